#include "throwsense/nn/train.hpp"

#include <cmath>
#include <memory>
#include <numeric>

#include "throwsense/nn/loss.hpp"
#include "throwsense/rng.hpp"

namespace throwsense::nn {

void TrainConfig::validate() const {
    if (batch_size < 1) throw ShapeMismatch("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ShapeMismatch("learning_rate must be positive");
    if (early_stop_patience < 1) throw ShapeMismatch("early_stop_patience must be >= 1");
}

double evaluate_loss(Model& model, const std::vector<LabeledSample>& samples,
                     const std::vector<double>& class_weights) {
    double total = 0.0;
    for (const auto& s : samples) {
        const Tensor probs = model.forward(s.x, false);
        total += weighted_cross_entropy(probs, {s.label}, class_weights).loss;
    }
    return total / static_cast<double>(samples.size());
}

FitResult fit(Model& model, const std::vector<LabeledSample>& train,
              const std::vector<LabeledSample>& val, const TrainConfig& config) {
    config.validate();
    if (train.empty() || val.empty()) {
        throw ShapeMismatch("fit requires non-empty train and validation sets");
    }

    std::unique_ptr<Optimizer> opt;
    if (config.optimizer == OptimizerKind::adam) {
        opt = std::make_unique<Adam>(config.learning_rate);
    } else {
        opt = std::make_unique<SgdMomentum>(config.learning_rate, config.sgd_momentum);
    }

    Rng shuffle_rng = Rng(config.seed).split("fit.shuffle");
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    FitResult result;
    result.best_val_loss = std::numeric_limits<double>::infinity();
    int epochs_since_best = 0;
    const auto params = model.params();

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);

        double train_loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            const double batch_n = static_cast<double>(stop - start);

            model.zero_grads();
            for (std::size_t b = start; b < stop; ++b) {
                const LabeledSample& s = train[order[b]];
                const Tensor probs = model.forward(s.x, true);
                auto lg = weighted_cross_entropy(probs, {s.label}, config.class_weights);
                if (!std::isfinite(lg.loss)) {
                    throw Diverged("training loss became non-finite at epoch " + std::to_string(epoch));
                }
                train_loss_sum += lg.loss;
                for (double& g : lg.grad.values) g /= batch_n; // batch mean
                model.backward(lg.grad);
            }
            opt->step(params);
        }

        const double val_loss = evaluate_loss(model, val, config.class_weights);
        if (!std::isfinite(val_loss)) {
            throw Diverged("validation loss became non-finite at epoch " + std::to_string(epoch));
        }
        result.log.push_back({train_loss_sum / static_cast<double>(train.size()), val_loss});

        if (val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            result.best_weights = model.export_weights();
            epochs_since_best = 0;
        } else {
            ++epochs_since_best;
            if (epochs_since_best >= config.early_stop_patience) break;
        }
    }

    model.import_weights(result.best_weights);
    return result;
}

} // namespace throwsense::nn
