#pragma once

#include <vector>

#include "throwsense/nn/layers.hpp"
#include "throwsense/types.hpp"

namespace throwsense::nn {

// A classifier mapping one input tensor to a probability vector.
class Model {
public:
    virtual ~Model() = default;

    virtual Tensor forward(const Tensor& x, bool training) = 0;
    // Consumes the gradient w.r.t. the output probabilities; accumulates into
    // the parameter grads.
    virtual void backward(const Tensor& grad_probs) = 0;
    virtual std::vector<Param*> params() = 0;
    virtual std::size_t num_classes() const = 0;

    void zero_grads() {
        for (Param* p : params()) p->grad.fill(0.0);
    }

    std::size_t parameter_count() {
        std::size_t n = 0;
        for (Param* p : params()) n += p->value.size();
        return n;
    }

    // Snapshot / restore all parameters by layer name (bit-exact).
    ModelWeights export_weights();
    void import_weights(const ModelWeights& w);
};

} // namespace throwsense::nn
