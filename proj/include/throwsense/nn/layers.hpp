#pragma once

#include <memory>
#include <string>
#include <vector>

#include "throwsense/nn/tensor.hpp"
#include "throwsense/rng.hpp"

namespace throwsense::nn {

// A learnable tensor with its gradient accumulator.
struct Param {
    std::string name;
    Tensor value;
    Tensor grad;

    explicit Param(std::string n, std::vector<std::size_t> shape)
        : name(std::move(n)), value(shape), grad(std::move(shape)) {}
};

// Single-sample layer: forward caches whatever backward needs, backward
// accumulates parameter gradients and returns the gradient w.r.t. the input.
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor forward(const Tensor& x, bool training) = 0;
    virtual Tensor backward(const Tensor& grad_out) = 0;
    virtual std::vector<Param*> params() { return {}; }
};

// Valid (unpadded) 1D cross-correlation, stride 1: [L, C_in] -> [L-k+1, C_out].
class Conv1D : public Layer {
public:
    Conv1D(std::string name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param*> params() override { return {&weight_, &bias_}; }

    void init_glorot(Rng& rng);

private:
    std::size_t in_ch_, out_ch_, kernel_;
    Param weight_; // [k, C_in, C_out]
    Param bias_;   // [C_out]
    Tensor input_;
};

// Non-overlapping window max over the time axis: [L, C] -> [floor(L/k), C].
class MaxPool1D : public Layer {
public:
    explicit MaxPool1D(std::size_t k = 2) : k_(k) {}

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;

private:
    std::size_t k_;
    std::vector<std::size_t> argmax_;
    std::vector<std::size_t> input_shape_;
};

// Affine map on a rank-1 input: [n_in] -> [n_out].
class Dense : public Layer {
public:
    Dense(std::string name, std::size_t n_in, std::size_t n_out);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param*> params() override { return {&weight_, &bias_}; }

    void init_glorot(Rng& rng);

private:
    std::size_t n_in_, n_out_;
    Param weight_; // [n_in, n_out]
    Param bias_;   // [n_out]
    Tensor input_;
};

class Relu : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;

private:
    Tensor input_;
};

// Row softmax on rank-1 input; rows sum to 1.
class Softmax : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;

private:
    Tensor output_;
};

// Inverted dropout: active only in training, keeps the output expectation
// equal to the input. Uses the stream it was handed at construction.
class Dropout : public Layer {
public:
    Dropout(double rate, Rng* rng) : rate_(rate), rng_(rng) {}

    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& grad_out) override;

private:
    double rate_;
    Rng* rng_;
    Tensor mask_;
    bool active_ = false;
};

// Single-layer LSTM over [T, F]; forward yields the final hidden state [H],
// forward_sequence yields all hidden states [T, H]. Initial states are zero.
class Lstm : public Layer {
public:
    Lstm(std::string name, std::size_t input_size, std::size_t hidden_size);

    Tensor forward(const Tensor& x, bool training) override;
    Tensor forward_sequence(const Tensor& x);
    Tensor backward(const Tensor& grad_out) override; // grad w.r.t. final hidden
    std::vector<Param*> params() override { return {&w_ih_, &w_hh_, &bias_}; }

    void init_uniform(Rng& rng);

    std::size_t hidden_size() const { return hidden_; }

private:
    struct StepCache {
        std::vector<double> x, h_prev, c_prev, i, f, g, o, c, tanh_c;
    };

    void step(const double* x_t, std::vector<double>& h, std::vector<double>& c, StepCache& cache);

    std::size_t input_, hidden_;
    Param w_ih_; // [4H, F], gate order i, f, g, o
    Param w_hh_; // [4H, H]
    Param bias_; // [4H]
    std::vector<StepCache> caches_;
};

} // namespace throwsense::nn
