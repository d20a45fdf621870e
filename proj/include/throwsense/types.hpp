#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "throwsense/error.hpp"

namespace throwsense {

// One cell of the 3x3 target grid, numbered row-major from the top-left (1..9),
// plus a distinguished MISS value for throws that leave the grid entirely.
class Zone {
public:
    static constexpr int kMiss = 0;

    Zone() : value_(kMiss) {}

    static Zone cell(int v) {
        if (v < 1 || v > 9) throw SchemaError("zone cell must be in 1..9, got " + std::to_string(v));
        return Zone(v);
    }
    static Zone miss() { return Zone(kMiss); }

    bool is_miss() const { return value_ == kMiss; }
    // 1..9; throws if MISS
    int cell_index() const {
        if (is_miss()) throw SchemaError("MISS zone has no cell index");
        return value_;
    }
    // grid coordinates, row 0 = top, col 0 = left
    int row() const { return (cell_index() - 1) / 3; }
    int col() const { return (cell_index() - 1) % 3; }

    bool operator==(const Zone& o) const { return value_ == o.value_; }
    bool operator!=(const Zone& o) const { return value_ != o.value_; }
    bool operator<(const Zone& o) const { return value_ < o.value_; }

private:
    explicit Zone(int v) : value_(v) {}
    int value_;
};

enum class View { deg0, deg45, deg90 };

std::string view_name(View v);
View view_from_name(const std::string& name);

// A joint sample; confidence == kMissingConfidence marks a dropped detection.
struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double confidence = 0.0;
};

constexpr double kMissingConfidence = -1.0;

inline bool is_missing(const Keypoint& k) { return k.confidence == kMissingConfidence; }

// Per-frame 2D joint keypoints for one throw video. Frames are uniformly
// spaced at 1/fps and every frame carries the same joint count.
struct PoseSequence {
    double fps = 30.0;
    std::vector<std::string> joints;           // 26 named keypoints
    std::vector<std::vector<Keypoint>> frames; // frames[t][joint]

    std::size_t frame_count() const { return frames.size(); }
    std::size_t joint_count() const { return joints.size(); }

    // Index of a named joint; throws MissingJoint if absent.
    std::size_t joint_index(const std::string& name) const;
};

// The 26 joint names used by the pose files, in canonical order.
const std::vector<std::string>& pose_joint_names();

struct PixelPos {
    double x = 0.0;
    double y = 0.0;
};

// Ball pixel positions per frame; absent entries mean the ball was not
// observable (left the field of view, or past the tracking window).
struct BallTrack {
    std::vector<std::optional<PixelPos>> positions;
    int throw_frame = 0;
    // set when no detection landed in the segmentation window and the track
    // was held from the last wrist position instead
    bool degenerate = false;
};

// 11 x 2 matrix of normalized ball positions covering throw_frame-5..throw_frame+5.
struct OutcomeFeatures {
    static constexpr int kRows = 11;
    static constexpr int kCols = 2;
    std::array<double, kRows * kCols> values{};

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * kCols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * kCols + c]; }
};

// 30 x 7 matrix of per-frame reaction channels covering throw_frame+10..throw_frame+39.
struct ReactionFeatures {
    static constexpr int kRows = 30;
    static constexpr int kCols = 7;
    std::array<double, kRows * kCols> values{};

    double& at(int r, int c) { return values[static_cast<std::size_t>(r) * kCols + c]; }
    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * kCols + c]; }
};

// One labeled throw. congruence is always intent == outcome; the loader
// recomputes it and rejects files where the stored flag disagrees.
struct ThrowRecord {
    std::string subject_id;
    View view = View::deg0;
    Zone intent;  // never MISS
    Zone outcome; // 1..9 or MISS
    bool congruence = false;
    std::string pose_ref;
    std::string ball_ref;
    std::string reaction_ref;
};

inline bool congruence_of(const Zone& intent, const Zone& outcome) {
    return intent == outcome;
}

struct DatasetManifest {
    std::vector<ThrowRecord> records;
    // provenance: generator seed, config hash, tool version, free-form note
    std::string metadata;
};

// Named, shaped f64 payloads with a versioned binary container.
struct WeightLayer {
    std::string name;
    std::vector<std::uint64_t> shape;
    std::vector<double> values;
};

struct ModelWeights {
    static constexpr std::uint32_t kCurrentVersion = 1;
    std::uint32_t format_version = kCurrentVersion;
    std::vector<WeightLayer> layers;

    bool operator==(const ModelWeights& o) const;
};

} // namespace throwsense
