#pragma once

#include <filesystem>
#include <span>

#include "throwsense/eval.hpp"
#include "throwsense/synth.hpp"
#include "throwsense/throwdetect.hpp"

namespace throwsense::pipeline {

struct ExtractionResult {
    std::size_t throw_frame = 0;
    OutcomeFeatures outcome_features;
};

// The per-record feature chain: detect the throw frame from the pose, stitch
// the ball track from the raw detections, and cut the 11x2 outcome window.
ExtractionResult extract_outcome_features(const PoseSequence& pose, const io::BallObservations& ball,
                                          View view, const throwdetect::DetectConfig& config = {});

// Model-ready dataset from in-memory generated throws.
eval::Dataset dataset_from_throws(std::span<const synth::GeneratedThrow> throws_data,
                                  const throwdetect::DetectConfig& config = {});

// Model-ready dataset from a manifest on disk; runs the same chain on every
// record's referenced files.
eval::Dataset load_dataset(const std::filesystem::path& manifest_path,
                           const throwdetect::DetectConfig& config = {});

} // namespace throwsense::pipeline
