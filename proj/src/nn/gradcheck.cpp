#include "throwsense/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "throwsense/nn/loss.hpp"

namespace throwsense::nn {

namespace {

double loss_at(Model& model, const Tensor& x, int label, const std::vector<double>& weights) {
    const Tensor probs = model.forward(x, false);
    return weighted_cross_entropy(probs, {label}, weights).loss;
}

} // namespace

std::vector<double> analytic_gradients(Model& model, const Tensor& x, int label,
                                       const std::vector<double>& class_weights) {
    model.zero_grads();
    const Tensor probs = model.forward(x, false);
    const auto lg = weighted_cross_entropy(probs, {label}, class_weights);
    model.backward(lg.grad);

    std::vector<double> flat;
    for (const Param* p : model.params()) {
        flat.insert(flat.end(), p->grad.values.begin(), p->grad.values.end());
    }
    return flat;
}

std::vector<double> numeric_gradients(Model& model, const Tensor& x, int label,
                                      const std::vector<double>& class_weights, double eps) {
    std::vector<double> flat;
    for (Param* p : model.params()) {
        for (std::size_t j = 0; j < p->value.size(); ++j) {
            const double saved = p->value.at(j);
            p->value.at(j) = saved + eps;
            const double plus = loss_at(model, x, label, class_weights);
            p->value.at(j) = saved - eps;
            const double minus = loss_at(model, x, label, class_weights);
            p->value.at(j) = saved;
            flat.push_back((plus - minus) / (2.0 * eps));
        }
    }
    return flat;
}

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    // The floor must sit above the central-difference noise: at eps=1e-5 on an
    // O(1) loss, f(+eps)-f(-eps) cancellation leaves ~1e-11 absolute noise in
    // the numeric gradient, so differences below 1e-6 carry no signal.
    constexpr double kFloor = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a[i]), std::abs(b[i]), kFloor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

double gradient_check(Model& model, const Tensor& x, int label,
                      const std::vector<double>& class_weights, double eps) {
    const auto analytic = analytic_gradients(model, x, label, class_weights);
    const auto numeric = numeric_gradients(model, x, label, class_weights, eps);
    return max_relative_error(analytic, numeric);
}

} // namespace throwsense::nn
