#pragma once

#include <cstddef>
#include <string>

#include "throwsense/signal.hpp"
#include "throwsense/types.hpp"

namespace throwsense::throwdetect {

// Inclusive frame window left after ignoring the first and last 10% of frames.
struct SearchWindow {
    std::size_t start = 0;
    std::size_t end = 0; // inclusive

    bool contains(std::size_t i) const { return i >= start && i <= end; }
};

SearchWindow trimmed_window(std::size_t frame_count);

// Per-frame relative-speed scores: (speed - max)/max. All scores are <= 0 and
// the global speed maximum scores exactly 0.
struct ThrowScore {
    std::vector<double> scores;
    std::size_t throw_frame = 0;
    SearchWindow window;
};

struct DetectConfig {
    std::string wrist_joint = "right_wrist"; // right-handed throwers by default
    std::string hip_joint = "right_hip";
    int toward_target_sign = 1; // which image-x direction points at the target
    double cutoff_hz = 2.0;
    int butterworth_order = 4;
    int savgol_window = 11;
    int savgol_polyorder = 2;
};

// Frontal heuristic: the throw frame is the in-window argmax of the wrist
// speed score. Earliest index wins exact ties.
ThrowScore frontal_scores(const signal::Series& wrist_speed);

// Side heuristic: the throw frame is the in-window argmax of the signed
// wrist-hip pixel offset toward the target (maximal arm extension).
std::size_t side_throw_frame(const signal::Series& wrist_x, const signal::Series& hip_x,
                             int toward_target_sign);

// Full chain: interpolate + low-pass the relevant joint tracks, then apply the
// view-appropriate heuristic.
std::size_t detect_throw_frame(const PoseSequence& pose, View view, const DetectConfig& config = {});

// Preprocessed wrist-speed series for a pose (deg0 chain), exposed for
// score inspection from the CLI.
signal::Series wrist_speed_series(const PoseSequence& pose, const DetectConfig& config = {});

} // namespace throwsense::throwdetect
