#pragma once

#include <vector>

#include "throwsense/nn/model.hpp"

namespace throwsense::nn {

// Analytic parameter gradients of the cross-entropy loss at (x, label),
// dropout off, flattened in parameter order.
std::vector<double> analytic_gradients(Model& model, const Tensor& x, int label,
                                       const std::vector<double>& class_weights = {});

// Central-difference gradients of the same loss.
std::vector<double> numeric_gradients(Model& model, const Tensor& x, int label,
                                      const std::vector<double>& class_weights = {},
                                      double eps = 1e-5);

// max_i |a_i - b_i| / max(|a_i|, |b_i|, 1e-8)
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b);

// Convenience wrapper: max relative error between the two gradient routes.
double gradient_check(Model& model, const Tensor& x, int label,
                      const std::vector<double>& class_weights = {}, double eps = 1e-5);

} // namespace throwsense::nn
