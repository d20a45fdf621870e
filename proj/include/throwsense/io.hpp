#pragma once

#include <filesystem>
#include <optional>

#include "throwsense/balltrack.hpp"
#include "throwsense/types.hpp"

namespace throwsense::io {

// Raw per-frame ball detections for a whole video, before any windowing.
struct BallObservations {
    int width = 0;  // frame dimensions, used later for coordinate normalization
    int height = 0;
    std::vector<std::optional<PixelPos>> positions;
};

// Pose files: JSON with fps, the joint name list, and per-frame [x, y, c]
// triples. Missing detections keep c == -1; no interpolation happens here.
PoseSequence load_pose_sequence(const std::filesystem::path& path);
void save_pose_sequence(const PoseSequence& pose, const std::filesystem::path& path);

BallObservations load_ball_observations(const std::filesystem::path& path);
void save_ball_observations(const BallObservations& obs, const std::filesystem::path& path);

ReactionFeatures load_reaction_features(const std::filesystem::path& path);
void save_reaction_features(const ReactionFeatures& features, const std::filesystem::path& path);

// Manifest loading re-derives congruence from intent/outcome and rejects
// records whose stored flag disagrees; feature refs must resolve relative to
// the manifest directory (empty refs are allowed and skipped).
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Versioned little-endian binary container for named f64 layers; save/load
// round-trips bit-exactly. Layout documented in docs/formats.md.
void save_weights(const ModelWeights& weights, const std::filesystem::path& path);
ModelWeights load_weights(const std::filesystem::path& path);

// Portable raster sequences for segmentation runs: flat row-major interleaved
// RGB bytes per frame, JSON-encoded.
std::vector<balltrack::RasterFrame> load_raster_frames(const std::filesystem::path& path);
void save_raster_frames(const std::vector<balltrack::RasterFrame>& frames,
                        const std::filesystem::path& path);

// HSV threshold box from JSON ({"h_min": ..., "s_min": ..., ...}).
balltrack::ColorRange load_color_range(const std::filesystem::path& path);
void save_color_range(const balltrack::ColorRange& range, const std::filesystem::path& path);

} // namespace throwsense::io
