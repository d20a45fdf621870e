#pragma once

#include <vector>

#include "throwsense/nn/tensor.hpp"

namespace throwsense::nn {

struct LossGrad {
    double loss = 0.0;
    Tensor grad; // w.r.t. the probabilities
};

// Mean over the batch of -w[label] * log(p[label]), probabilities clamped at
// 1e-12. probs is [N, K] (or [K] for a single sample); empty weights mean 1.
LossGrad weighted_cross_entropy(const Tensor& probs, const std::vector<int>& labels,
                                const std::vector<double>& class_weights = {});

} // namespace throwsense::nn
