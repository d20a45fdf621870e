#include "throwsense/nn/layers.hpp"

#include <cmath>

namespace throwsense::nn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

// ---------------------------------------------------------------- Conv1D

Conv1D::Conv1D(std::string name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel)
    : in_ch_(in_channels),
      out_ch_(out_channels),
      kernel_(kernel),
      weight_(name + ".weight", {kernel, in_channels, out_channels}),
      bias_(name + ".bias", {out_channels}) {}

void Conv1D::init_glorot(Rng& rng) {
    const double fan_in = static_cast<double>(kernel_ * in_ch_);
    const double fan_out = static_cast<double>(kernel_ * out_ch_);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : weight_.value.values) v = rng.uniform(-limit, limit);
    bias_.value.fill(0.0);
}

Tensor Conv1D::forward(const Tensor& x, bool) {
    if (x.rank() != 2 || x.dim(1) != in_ch_) {
        throw ShapeMismatch(weight_.name + ": expected [L," + std::to_string(in_ch_) + "] input, got " +
                            x.shape_str());
    }
    const std::size_t len = x.dim(0);
    if (len < kernel_) {
        throw ShapeMismatch(weight_.name + ": input length " + std::to_string(len) +
                            " shorter than kernel " + std::to_string(kernel_));
    }
    input_ = x;
    const std::size_t out_len = len - kernel_ + 1;
    Tensor y({out_len, out_ch_});
    for (std::size_t t = 0; t < out_len; ++t) {
        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
            double acc = bias_.value.at(oc);
            for (std::size_t j = 0; j < kernel_; ++j) {
                for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                    acc += x.at(t + j, ic) * weight_.value.at(j, ic, oc);
                }
            }
            y.at(t, oc) = acc;
        }
    }
    return y;
}

Tensor Conv1D::backward(const Tensor& grad_out) {
    const std::size_t out_len = grad_out.dim(0);
    Tensor dx(input_.shape);
    for (std::size_t t = 0; t < out_len; ++t) {
        for (std::size_t oc = 0; oc < out_ch_; ++oc) {
            const double g = grad_out.at(t, oc);
            bias_.grad.at(oc) += g;
            for (std::size_t j = 0; j < kernel_; ++j) {
                for (std::size_t ic = 0; ic < in_ch_; ++ic) {
                    weight_.grad.at(j, ic, oc) += g * input_.at(t + j, ic);
                    dx.at(t + j, ic) += g * weight_.value.at(j, ic, oc);
                }
            }
        }
    }
    return dx;
}

// -------------------------------------------------------------- MaxPool1D

Tensor MaxPool1D::forward(const Tensor& x, bool) {
    if (x.rank() != 2 || x.dim(0) < k_) {
        throw ShapeMismatch("maxpool: need [L,C] input with L >= " + std::to_string(k_) + ", got " +
                            x.shape_str());
    }
    input_shape_ = x.shape;
    const std::size_t out_len = x.dim(0) / k_;
    const std::size_t channels = x.dim(1);
    Tensor y({out_len, channels});
    argmax_.assign(out_len * channels, 0);
    for (std::size_t t = 0; t < out_len; ++t) {
        for (std::size_t c = 0; c < channels; ++c) {
            std::size_t best = t * k_;
            for (std::size_t j = 1; j < k_; ++j) {
                if (x.at(t * k_ + j, c) > x.at(best, c)) best = t * k_ + j;
            }
            y.at(t, c) = x.at(best, c);
            argmax_[t * channels + c] = best;
        }
    }
    return y;
}

Tensor MaxPool1D::backward(const Tensor& grad_out) {
    Tensor dx(input_shape_);
    const std::size_t channels = input_shape_[1];
    for (std::size_t t = 0; t < grad_out.dim(0); ++t) {
        for (std::size_t c = 0; c < channels; ++c) {
            dx.at(argmax_[t * channels + c], c) += grad_out.at(t, c);
        }
    }
    return dx;
}

// ------------------------------------------------------------------ Dense

Dense::Dense(std::string name, std::size_t n_in, std::size_t n_out)
    : n_in_(n_in),
      n_out_(n_out),
      weight_(name + ".weight", {n_in, n_out}),
      bias_(name + ".bias", {n_out}) {}

void Dense::init_glorot(Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(n_in_ + n_out_));
    for (double& v : weight_.value.values) v = rng.uniform(-limit, limit);
    bias_.value.fill(0.0);
}

Tensor Dense::forward(const Tensor& x, bool) {
    require_shape(x, {n_in_}, weight_.name);
    input_ = x;
    Tensor y({n_out_});
    for (std::size_t o = 0; o < n_out_; ++o) {
        double acc = bias_.value.at(o);
        for (std::size_t i = 0; i < n_in_; ++i) acc += x.at(i) * weight_.value.at(i, o);
        y.at(o) = acc;
    }
    return y;
}

Tensor Dense::backward(const Tensor& grad_out) {
    Tensor dx({n_in_});
    for (std::size_t o = 0; o < n_out_; ++o) {
        const double g = grad_out.at(o);
        bias_.grad.at(o) += g;
        for (std::size_t i = 0; i < n_in_; ++i) {
            weight_.grad.at(i, o) += g * input_.at(i);
            dx.at(i) += g * weight_.value.at(i, o);
        }
    }
    return dx;
}

// ------------------------------------------------------------------- Relu

Tensor Relu::forward(const Tensor& x, bool) {
    input_ = x;
    Tensor y = x;
    for (double& v : y.values) v = v > 0.0 ? v : 0.0;
    return y;
}

Tensor Relu::backward(const Tensor& grad_out) {
    Tensor dx = grad_out;
    for (std::size_t i = 0; i < dx.size(); ++i) {
        if (input_.at(i) <= 0.0) dx.at(i) = 0.0;
    }
    return dx;
}

// ---------------------------------------------------------------- Softmax

Tensor Softmax::forward(const Tensor& x, bool) {
    Tensor y = x;
    double max_v = y.values[0];
    for (double v : y.values) max_v = std::max(max_v, v);
    double sum = 0.0;
    for (double& v : y.values) {
        v = std::exp(v - max_v);
        sum += v;
    }
    for (double& v : y.values) v /= sum;
    output_ = y;
    return y;
}

Tensor Softmax::backward(const Tensor& grad_out) {
    // dL/dz_j = p_j * (g_j - sum_k g_k p_k)
    double dot = 0.0;
    for (std::size_t k = 0; k < grad_out.size(); ++k) dot += grad_out.at(k) * output_.at(k);
    Tensor dx = grad_out;
    for (std::size_t j = 0; j < dx.size(); ++j) {
        dx.at(j) = output_.at(j) * (grad_out.at(j) - dot);
    }
    return dx;
}

// ---------------------------------------------------------------- Dropout

Tensor Dropout::forward(const Tensor& x, bool training) {
    active_ = training && rate_ > 0.0;
    if (!active_) return x;
    const double keep = 1.0 - rate_;
    mask_ = Tensor(x.shape);
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double m = rng_->uniform() < rate_ ? 0.0 : 1.0 / keep;
        mask_.at(i) = m;
        y.at(i) *= m;
    }
    return y;
}

Tensor Dropout::backward(const Tensor& grad_out) {
    if (!active_) return grad_out;
    Tensor dx = grad_out;
    for (std::size_t i = 0; i < dx.size(); ++i) dx.at(i) *= mask_.at(i);
    return dx;
}

// ------------------------------------------------------------------- Lstm

Lstm::Lstm(std::string name, std::size_t input_size, std::size_t hidden_size)
    : input_(input_size),
      hidden_(hidden_size),
      w_ih_(name + ".w_ih", {4 * hidden_size, input_size}),
      w_hh_(name + ".w_hh", {4 * hidden_size, hidden_size}),
      bias_(name + ".bias", {4 * hidden_size}) {}

void Lstm::init_uniform(Rng& rng) {
    const double lim_ih = 1.0 / std::sqrt(static_cast<double>(input_));
    const double lim_hh = 1.0 / std::sqrt(static_cast<double>(hidden_));
    for (double& v : w_ih_.value.values) v = rng.uniform(-lim_ih, lim_ih);
    for (double& v : w_hh_.value.values) v = rng.uniform(-lim_hh, lim_hh);
    bias_.value.fill(0.0);
}

void Lstm::step(const double* x_t, std::vector<double>& h, std::vector<double>& c, StepCache& cache) {
    const std::size_t H = hidden_;
    cache.x.assign(x_t, x_t + input_);
    cache.h_prev = h;
    cache.c_prev = c;
    cache.i.resize(H);
    cache.f.resize(H);
    cache.g.resize(H);
    cache.o.resize(H);
    cache.c.resize(H);
    cache.tanh_c.resize(H);

    for (std::size_t u = 0; u < H; ++u) {
        double a[4];
        for (int gate = 0; gate < 4; ++gate) {
            const std::size_t row = static_cast<std::size_t>(gate) * H + u;
            double acc = bias_.value.at(row);
            for (std::size_t j = 0; j < input_; ++j) acc += w_ih_.value.at(row, j) * x_t[j];
            for (std::size_t j = 0; j < H; ++j) acc += w_hh_.value.at(row, j) * cache.h_prev[j];
            a[gate] = acc;
        }
        cache.i[u] = sigmoid(a[0]);
        cache.f[u] = sigmoid(a[1]);
        cache.g[u] = std::tanh(a[2]);
        cache.o[u] = sigmoid(a[3]);
        cache.c[u] = cache.f[u] * cache.c_prev[u] + cache.i[u] * cache.g[u];
        cache.tanh_c[u] = std::tanh(cache.c[u]);
        c[u] = cache.c[u];
        h[u] = cache.o[u] * cache.tanh_c[u];
    }
}

Tensor Lstm::forward(const Tensor& x, bool) {
    if (x.rank() != 2 || x.dim(1) != input_ || x.dim(0) < 1) {
        throw ShapeMismatch(w_ih_.name + ": expected [T," + std::to_string(input_) + "] input, got " +
                            x.shape_str());
    }
    const std::size_t T = x.dim(0);
    caches_.assign(T, StepCache{});
    std::vector<double> h(hidden_, 0.0), c(hidden_, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        step(&x.values[t * input_], h, c, caches_[t]);
    }
    Tensor out({hidden_});
    out.values = h;
    return out;
}

Tensor Lstm::forward_sequence(const Tensor& x) {
    forward(x, false);
    Tensor seq({caches_.size(), hidden_});
    for (std::size_t t = 0; t < caches_.size(); ++t) {
        for (std::size_t u = 0; u < hidden_; ++u) {
            seq.at(t, u) = caches_[t].o[u] * caches_[t].tanh_c[u];
        }
    }
    return seq;
}

Tensor Lstm::backward(const Tensor& grad_out) {
    require_shape(grad_out, {hidden_}, w_ih_.name + " backward");
    const std::size_t T = caches_.size();
    const std::size_t H = hidden_;

    std::vector<double> dh(grad_out.values.begin(), grad_out.values.end());
    std::vector<double> dc(H, 0.0);
    Tensor dx({T, input_});

    for (std::size_t t = T; t-- > 0;) {
        const StepCache& cc = caches_[t];
        std::vector<double> dh_prev(H, 0.0);
        for (std::size_t u = 0; u < H; ++u) {
            const double dct = dh[u] * cc.o[u] * (1.0 - cc.tanh_c[u] * cc.tanh_c[u]) + dc[u];
            const double da[4] = {
                dct * cc.g[u] * cc.i[u] * (1.0 - cc.i[u]),            // input gate
                dct * cc.c_prev[u] * cc.f[u] * (1.0 - cc.f[u]),       // forget gate
                dct * cc.i[u] * (1.0 - cc.g[u] * cc.g[u]),            // candidate
                dh[u] * cc.tanh_c[u] * cc.o[u] * (1.0 - cc.o[u]),     // output gate
            };
            for (int gate = 0; gate < 4; ++gate) {
                const std::size_t row = static_cast<std::size_t>(gate) * H + u;
                bias_.grad.at(row) += da[gate];
                for (std::size_t j = 0; j < input_; ++j) {
                    w_ih_.grad.at(row, j) += da[gate] * cc.x[j];
                    dx.at(t, j) += da[gate] * w_ih_.value.at(row, j);
                }
                for (std::size_t j = 0; j < H; ++j) {
                    w_hh_.grad.at(row, j) += da[gate] * cc.h_prev[j];
                    dh_prev[j] += da[gate] * w_hh_.value.at(row, j);
                }
            }
            dc[u] = dct * cc.f[u];
        }
        dh = std::move(dh_prev);
    }
    return dx;
}

} // namespace throwsense::nn
