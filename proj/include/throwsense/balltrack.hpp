#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "throwsense/types.hpp"

namespace throwsense::balltrack {

// Row-major RGB raster, 3 bytes per pixel.
struct RasterFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    static RasterFrame solid(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);
    void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

// Filled disk, clipped at the frame borders. Subpixel centers paint every
// pixel whose center lies within the radius.
void paint_disk(RasterFrame& frame, double cx, double cy, double radius, std::uint8_t r,
                std::uint8_t g, std::uint8_t b);

struct Hsv {
    double h = 0.0; // degrees, [0, 360)
    double s = 0.0; // [0, 1]
    double v = 0.0; // [0, 1]
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

// HSV threshold box; hue may wrap (h_min > h_max selects the arc through 0).
struct ColorRange {
    double h_min = 0.0, h_max = 360.0;
    double s_min = 0.0, s_max = 1.0;
    double v_min = 0.0, v_max = 1.0;

    bool contains(const Hsv& c) const;
    void validate() const; // non-hue mins must not exceed maxes
};

struct SegmentConfig {
    int min_pixels = 4; // smallest connected component worth reporting
};

// HSV threshold -> 3x3 morphological closing -> 8-connected components ->
// center of the largest component's bounding box. Absence is a value.
std::optional<PixelPos> segment_ball(const RasterFrame& frame, const ColorRange& range,
                                     const SegmentConfig& config = {});

// Track assembly from per-frame detections: wrist positions up to frame
// n_tf-11, detections (gaps interpolated, edges held) in n_tf-10..n_tf+5,
// absent afterwards. Sets `degenerate` when the window held no detection at
// all and was filled from the wrist position at n_tf-10.
BallTrack assemble_ball_track(std::span<const std::optional<PixelPos>> detections,
                              std::span<const PixelPos> wrist_track, int n_tf);

// Same, segmenting only the frames inside the detection window. The provider
// is called once per needed frame index.
using FrameProvider = std::function<RasterFrame(std::size_t)>;
BallTrack extract_ball_track(const FrameProvider& frames, std::size_t frame_count,
                             std::span<const PixelPos> wrist_track, int n_tf,
                             const ColorRange& range, const SegmentConfig& config = {});

// 11 rows of (x, y) covering n_tf-5..n_tf+5, normalized by the frame size.
OutcomeFeatures outcome_feature_vector(const BallTrack& track, int frame_width, int frame_height);

} // namespace throwsense::balltrack
