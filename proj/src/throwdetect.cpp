#include "throwsense/throwdetect.hpp"

#include <cmath>

namespace throwsense::throwdetect {

namespace {

constexpr std::size_t kMinFrames = 10;

// Extract one coordinate of a joint as a gappy series and run it through the
// interpolate + low-pass chain.
signal::Series joint_track(const PoseSequence& pose, std::size_t joint, bool y_coord,
                           const DetectConfig& config) {
    std::vector<std::optional<double>> raw;
    raw.reserve(pose.frame_count());
    bool any_valid = false;
    for (const auto& frame : pose.frames) {
        const Keypoint& k = frame[joint];
        if (is_missing(k)) {
            raw.emplace_back(std::nullopt);
        } else {
            raw.emplace_back(y_coord ? k.y : k.x);
            any_valid = true;
        }
    }
    if (!any_valid) {
        throw MissingJoint("joint '" + pose.joints[joint] + "' has no valid samples");
    }
    const auto filled = signal::interpolate_missing(raw, 1.0 / pose.fps);
    return signal::butterworth_lowpass(filled, config.cutoff_hz, config.butterworth_order);
}

std::size_t argmax_in_window(const std::vector<double>& values, const SearchWindow& w) {
    std::size_t best = w.start;
    for (std::size_t i = w.start + 1; i <= w.end; ++i) {
        if (values[i] > values[best]) best = i; // strict: earliest index on ties
    }
    return best;
}

} // namespace

SearchWindow trimmed_window(std::size_t frame_count) {
    const double n = static_cast<double>(frame_count);
    SearchWindow w;
    w.start = static_cast<std::size_t>(std::ceil(0.1 * n));
    w.end = static_cast<std::size_t>(std::floor(0.9 * n));
    if (w.end >= frame_count) w.end = frame_count - 1;
    return w;
}

ThrowScore frontal_scores(const signal::Series& wrist_speed) {
    const std::size_t n = wrist_speed.size();
    if (n < kMinFrames) {
        throw TooShort("frontal heuristic needs at least " + std::to_string(kMinFrames) +
                       " frames, got " + std::to_string(n));
    }
    double max_speed = 0.0;
    for (double v : wrist_speed.values) max_speed = std::max(max_speed, v);
    // floor well below any real pixel motion; absorbs filter round-off on static tracks
    if (max_speed < 1e-9) throw ZeroMotion("wrist speed is zero over the whole sequence");

    ThrowScore out;
    out.scores.reserve(n);
    for (double v : wrist_speed.values) out.scores.push_back((v - max_speed) / max_speed);
    out.window = trimmed_window(n);
    out.throw_frame = argmax_in_window(out.scores, out.window);
    return out;
}

std::size_t side_throw_frame(const signal::Series& wrist_x, const signal::Series& hip_x,
                             int toward_target_sign) {
    const std::size_t n = wrist_x.size();
    if (n != hip_x.size()) throw ShapeMismatch("wrist and hip series must have equal length");
    if (n < kMinFrames) {
        throw TooShort("side heuristic needs at least " + std::to_string(kMinFrames) +
                       " frames, got " + std::to_string(n));
    }
    std::vector<double> offset(n);
    for (std::size_t i = 0; i < n; ++i) {
        offset[i] = toward_target_sign * (wrist_x.values[i] - hip_x.values[i]);
    }
    return argmax_in_window(offset, trimmed_window(n));
}

signal::Series wrist_speed_series(const PoseSequence& pose, const DetectConfig& config) {
    const std::size_t wrist = pose.joint_index(config.wrist_joint);
    const auto x = joint_track(pose, wrist, false, config);
    const auto y = joint_track(pose, wrist, true, config);
    const auto vx = signal::savgol_derivative(x, config.savgol_window, config.savgol_polyorder);
    const auto vy = signal::savgol_derivative(y, config.savgol_window, config.savgol_polyorder);

    signal::Series speed;
    speed.dt = 1.0 / pose.fps;
    speed.values.resize(pose.frame_count());
    for (std::size_t i = 0; i < speed.values.size(); ++i) {
        speed.values[i] = std::hypot(vx.values[i], vy.values[i]);
    }
    return speed;
}

std::size_t detect_throw_frame(const PoseSequence& pose, View view, const DetectConfig& config) {
    if (view == View::deg0) {
        return frontal_scores(wrist_speed_series(pose, config)).throw_frame;
    }
    const std::size_t wrist = pose.joint_index(config.wrist_joint);
    const std::size_t hip = pose.joint_index(config.hip_joint);
    const auto wrist_x = joint_track(pose, wrist, false, config);
    const auto hip_x = joint_track(pose, hip, false, config);
    return side_throw_frame(wrist_x, hip_x, config.toward_target_sign);
}

} // namespace throwsense::throwdetect
