#include "throwsense/models.hpp"

namespace throwsense::models {

using nn::Tensor;

// ------------------------------------------------------------ OutcomeModel

OutcomeModel::OutcomeModel(std::uint64_t seed, std::size_t hidden)
    : lstm_("lstm", kInputChannels, hidden), head_("head", hidden, kClasses) {
    Rng rng = Rng(seed).split("outcome.init");
    lstm_.init_uniform(rng);
    head_.init_glorot(rng);
}

Tensor OutcomeModel::forward(const Tensor& x, bool training) {
    nn::require_shape(x, {kInputLen, kInputChannels}, "outcome model input");
    return softmax_.forward(head_.forward(lstm_.forward(x, training), training), training);
}

void OutcomeModel::backward(const Tensor& grad_probs) {
    lstm_.backward(head_.backward(softmax_.backward(grad_probs)));
}

std::vector<nn::Param*> OutcomeModel::params() {
    std::vector<nn::Param*> ps;
    for (auto* p : lstm_.params()) ps.push_back(p);
    for (auto* p : head_.params()) ps.push_back(p);
    return ps;
}

// --------------------------------------------------------- CongruenceModel

CongruenceModel::Branch::Branch(const std::string& name, std::size_t kernel, Rng* dropout_rng)
    : conv1(name + ".conv1", kInputChannels, 8, kernel),
      drop(0.1, dropout_rng),
      conv2(name + ".conv2", 8, 16, kernel),
      pool(2) {}

Tensor CongruenceModel::Branch::forward(const Tensor& x, bool training) {
    Tensor y = pool.forward(conv2.forward(drop.forward(conv1.forward(x, training), training), training), training);
    pool_out_shape = y.shape;
    // flatten [L, C] -> [L*C]
    y.shape = {y.size()};
    return y;
}

Tensor CongruenceModel::Branch::backward(const Tensor& grad_flat) {
    Tensor g = grad_flat;
    g.shape = pool_out_shape;
    return conv1.backward(drop.backward(conv2.backward(pool.backward(g))));
}

std::size_t CongruenceModel::concat_width(std::size_t input_len) {
    // two valid convs then a halving pool, per branch, times 16 channels
    const auto branch = [input_len](std::size_t k) { return (input_len - 2 * (k - 1)) / 2 * 16; };
    return branch(3) + branch(9);
}

CongruenceModel::CongruenceModel(std::uint64_t seed)
    : dropout_rng_(Rng(seed).split("congruence.dropout")),
      branch_a_("branch_a", 3, &dropout_rng_),
      branch_b_("branch_b", 9, &dropout_rng_),
      concat_drop_(0.1, &dropout_rng_),
      hidden_("hidden", kConcatWidth, 20),
      head_("head", 20, kClasses) {
    static_assert(CongruenceModel::kConcatWidth == (30 - 4) / 2 * 16 + (30 - 16) / 2 * 16);
    Rng rng = Rng(seed).split("congruence.init");
    branch_a_.conv1.init_glorot(rng);
    branch_a_.conv2.init_glorot(rng);
    branch_b_.conv1.init_glorot(rng);
    branch_b_.conv2.init_glorot(rng);
    hidden_.init_glorot(rng);
    head_.init_glorot(rng);
}

Tensor CongruenceModel::forward(const Tensor& x, bool training) {
    nn::require_shape(x, {kInputLen, kInputChannels}, "congruence model input");
    const Tensor a = branch_a_.forward(x, training);
    const Tensor b = branch_b_.forward(x, training);

    Tensor cat({a.size() + b.size()});
    std::copy(a.values.begin(), a.values.end(), cat.values.begin());
    std::copy(b.values.begin(), b.values.end(), cat.values.begin() + static_cast<std::ptrdiff_t>(a.size()));

    Tensor y = concat_drop_.forward(cat, training);
    y = relu_.forward(hidden_.forward(y, training), training);
    return softmax_.forward(head_.forward(y, training), training);
}

void CongruenceModel::backward(const Tensor& grad_probs) {
    Tensor g = hidden_.backward(relu_.backward(head_.backward(softmax_.backward(grad_probs))));
    g = concat_drop_.backward(g);

    const std::size_t a_width = Tensor::element_count(branch_a_.pool_out_shape);
    Tensor ga({a_width});
    Tensor gb({g.size() - a_width});
    std::copy(g.values.begin(), g.values.begin() + static_cast<std::ptrdiff_t>(a_width), ga.values.begin());
    std::copy(g.values.begin() + static_cast<std::ptrdiff_t>(a_width), g.values.end(), gb.values.begin());

    branch_a_.backward(ga);
    branch_b_.backward(gb);
}

std::vector<nn::Param*> CongruenceModel::params() {
    std::vector<nn::Param*> ps;
    for (auto* branch : {&branch_a_, &branch_b_}) {
        for (auto* p : branch->conv1.params()) ps.push_back(p);
        for (auto* p : branch->conv2.params()) ps.push_back(p);
    }
    for (auto* p : hidden_.params()) ps.push_back(p);
    for (auto* p : head_.params()) ps.push_back(p);
    return ps;
}

// ----------------------------------------------------------------- helpers

std::unique_ptr<OutcomeModel> build_outcome_model(std::uint64_t seed, std::size_t hidden) {
    return std::make_unique<OutcomeModel>(seed, hidden);
}

std::unique_ptr<CongruenceModel> build_congruence_model(std::uint64_t seed) {
    return std::make_unique<CongruenceModel>(seed);
}

Tensor to_tensor(const OutcomeFeatures& f) {
    return Tensor::of({OutcomeFeatures::kRows, OutcomeFeatures::kCols},
                      {f.values.begin(), f.values.end()});
}

Tensor to_tensor(const ReactionFeatures& f) {
    return Tensor::of({ReactionFeatures::kRows, ReactionFeatures::kCols},
                      {f.values.begin(), f.values.end()});
}

OutcomePrediction predict_outcome(OutcomeModel& model, const OutcomeFeatures& features) {
    const Tensor probs = model.forward(to_tensor(features), false);
    OutcomePrediction out;
    std::size_t best = 0;
    for (std::size_t k = 0; k < OutcomeModel::kClasses; ++k) {
        out.distribution[k] = probs.at(k);
        if (probs.at(k) > probs.at(best)) best = k;
    }
    out.zone = Zone::cell(static_cast<int>(best) + 1);
    return out;
}

CongruencePrediction predict_congruence(CongruenceModel& model, const ReactionFeatures& features) {
    const Tensor probs = model.forward(to_tensor(features), false);
    CongruencePrediction out;
    out.congruent = probs.at(1) >= 0.5;
    out.probability = out.congruent ? probs.at(1) : probs.at(0);
    return out;
}

} // namespace throwsense::models
