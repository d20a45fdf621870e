#include "throwsense/pipeline.hpp"

#include "throwsense/balltrack.hpp"
#include "throwsense/io.hpp"
#include "throwsense/signal.hpp"

namespace throwsense::pipeline {

namespace {

// raw wrist pixels with gaps filled; tracking wants the unsmoothed positions
std::vector<PixelPos> wrist_positions(const PoseSequence& pose, const std::string& joint) {
    const std::size_t idx = pose.joint_index(joint);
    std::vector<std::optional<double>> xs, ys;
    xs.reserve(pose.frame_count());
    ys.reserve(pose.frame_count());
    for (const auto& frame : pose.frames) {
        const Keypoint& kp = frame[idx];
        if (is_missing(kp)) {
            xs.emplace_back(std::nullopt);
            ys.emplace_back(std::nullopt);
        } else {
            xs.emplace_back(kp.x);
            ys.emplace_back(kp.y);
        }
    }
    const auto x = signal::interpolate_missing(xs, 1.0 / pose.fps);
    const auto y = signal::interpolate_missing(ys, 1.0 / pose.fps);
    std::vector<PixelPos> out(pose.frame_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {x.values[i], y.values[i]};
    return out;
}

} // namespace

ExtractionResult extract_outcome_features(const PoseSequence& pose, const io::BallObservations& ball,
                                          View view, const throwdetect::DetectConfig& config) {
    ExtractionResult result;
    result.throw_frame = throwdetect::detect_throw_frame(pose, view, config);

    const auto wrist = wrist_positions(pose, config.wrist_joint);
    const auto track = balltrack::assemble_ball_track(ball.positions, wrist,
                                                      static_cast<int>(result.throw_frame));
    result.outcome_features = balltrack::outcome_feature_vector(track, ball.width, ball.height);
    return result;
}

eval::Dataset dataset_from_throws(std::span<const synth::GeneratedThrow> throws_data,
                                  const throwdetect::DetectConfig& config) {
    eval::Dataset data;
    for (const auto& gen : throws_data) {
        const auto extracted = extract_outcome_features(gen.pose, gen.ball, gen.record.view, config);
        data.manifest.records.push_back(gen.record);
        data.outcome_features.push_back(extracted.outcome_features);
        data.reaction_features.push_back(gen.reaction);
    }
    return data;
}

eval::Dataset load_dataset(const std::filesystem::path& manifest_path,
                           const throwdetect::DetectConfig& config) {
    const auto manifest = io::load_manifest(manifest_path);
    const auto base = manifest_path.parent_path();

    eval::Dataset data;
    data.manifest.metadata = manifest.metadata;
    for (const ThrowRecord& rec : manifest.records) {
        if (rec.pose_ref.empty() || rec.ball_ref.empty() || rec.reaction_ref.empty()) {
            throw DanglingRef("record for subject '" + rec.subject_id +
                              "' lacks feature refs needed to build a dataset");
        }
        const auto pose = io::load_pose_sequence(base / rec.pose_ref);
        const auto ball = io::load_ball_observations(base / rec.ball_ref);
        const auto extracted = extract_outcome_features(pose, ball, rec.view, config);
        data.manifest.records.push_back(rec);
        data.outcome_features.push_back(extracted.outcome_features);
        data.reaction_features.push_back(io::load_reaction_features(base / rec.reaction_ref));
    }
    return data;
}

} // namespace throwsense::pipeline
