#include "throwsense/nn/loss.hpp"

#include <cmath>

namespace throwsense::nn {

LossGrad weighted_cross_entropy(const Tensor& probs, const std::vector<int>& labels,
                                const std::vector<double>& class_weights) {
    constexpr double kEps = 1e-12;

    const bool batched = probs.rank() == 2;
    const std::size_t n = batched ? probs.dim(0) : 1;
    const std::size_t k = batched ? probs.dim(1) : probs.dim(0);
    if (labels.size() != n) {
        throw ShapeMismatch("cross entropy: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(n) + " rows");
    }
    if (!class_weights.empty() && class_weights.size() != k) {
        throw ShapeMismatch("cross entropy: class weight count does not match class count");
    }

    LossGrad out;
    out.grad = Tensor(probs.shape);
    for (std::size_t i = 0; i < n; ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= k) {
            throw ShapeMismatch("cross entropy: label " + std::to_string(label) + " out of range");
        }
        const double w = class_weights.empty() ? 1.0 : class_weights[static_cast<std::size_t>(label)];
        const std::size_t idx = i * k + static_cast<std::size_t>(label);
        const double p = std::max(probs.at(idx), kEps);
        out.loss += -w * std::log(p);
        out.grad.at(idx) = -w / (p * static_cast<double>(n));
    }
    out.loss /= static_cast<double>(n);
    return out;
}

} // namespace throwsense::nn
