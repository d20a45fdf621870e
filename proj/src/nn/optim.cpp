#include "throwsense/nn/optim.hpp"

#include <cmath>

namespace throwsense::nn {

void SgdMomentum::step(const std::vector<Param*>& params) {
    if (velocity_.empty()) {
        for (const Param* p : params) velocity_.emplace_back(p->value.size(), 0.0);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        Param& p = *params[i];
        auto& vel = velocity_[i];
        for (std::size_t j = 0; j < vel.size(); ++j) {
            vel[j] = momentum_ * vel[j] + p.grad.at(j);
            p.value.at(j) -= lr_ * vel[j];
        }
    }
}

void Adam::step(const std::vector<Param*>& params) {
    if (m_.empty()) {
        for (const Param* p : params) {
            m_.emplace_back(p->value.size(), 0.0);
            v_.emplace_back(p->value.size(), 0.0);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Param& p = *params[i];
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < m.size(); ++j) {
            const double g = p.grad.at(j);
            m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
            v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
            p.value.at(j) -= lr_ * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps_);
        }
    }
}

} // namespace throwsense::nn
