#pragma once

#include <cstdint>
#include <vector>

#include "throwsense/nn/model.hpp"
#include "throwsense/nn/optim.hpp"

namespace throwsense::nn {

enum class OptimizerKind { adam, sgd_momentum };

struct TrainConfig {
    std::size_t batch_size = 5;
    OptimizerKind optimizer = OptimizerKind::adam;
    double learning_rate = 2e-3;
    double sgd_momentum = 0.9;
    int early_stop_patience = 20;
    int max_epochs = 300;
    std::uint64_t seed = 0;
    std::vector<double> class_weights; // empty = unweighted

    void validate() const;
};

struct LabeledSample {
    Tensor x;
    int label = 0;
};

struct EpochLog {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct FitResult {
    ModelWeights best_weights;
    std::vector<EpochLog> log;
    int best_epoch = 0; // 1-based epoch whose validation loss was retained
    double best_val_loss = 0.0;
};

// Mini-batch training with per-epoch seeded shuffling and early stopping on
// the validation loss. The model is left holding the best-validation weights,
// which are also returned. Throws Diverged on a non-finite loss.
FitResult fit(Model& model, const std::vector<LabeledSample>& train,
              const std::vector<LabeledSample>& val, const TrainConfig& config);

// Mean weighted cross-entropy of the model over a sample set (eval mode).
double evaluate_loss(Model& model, const std::vector<LabeledSample>& samples,
                     const std::vector<double>& class_weights = {});

} // namespace throwsense::nn
