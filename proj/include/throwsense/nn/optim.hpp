#pragma once

#include <vector>

#include "throwsense/nn/layers.hpp"

namespace throwsense::nn {

class Optimizer {
public:
    virtual ~Optimizer() = default;
    // Applies one update from the accumulated grads; does not clear them.
    virtual void step(const std::vector<Param*>& params) = 0;
};

class SgdMomentum : public Optimizer {
public:
    explicit SgdMomentum(double lr, double momentum = 0.9) : lr_(lr), momentum_(momentum) {}
    void step(const std::vector<Param*>& params) override;

private:
    double lr_, momentum_;
    std::vector<std::vector<double>> velocity_;
};

class Adam : public Optimizer {
public:
    explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
    void step(const std::vector<Param*>& params) override;

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

} // namespace throwsense::nn
