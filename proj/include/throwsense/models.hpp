#pragma once

#include <memory>

#include "throwsense/nn/layers.hpp"
#include "throwsense/nn/model.hpp"
#include "throwsense/types.hpp"

namespace throwsense::models {

// LSTM over the 11x2 ball-position window, final hidden state into a 9-way
// softmax over outcome zones.
class OutcomeModel : public nn::Model {
public:
    static constexpr std::size_t kInputLen = OutcomeFeatures::kRows;
    static constexpr std::size_t kInputChannels = OutcomeFeatures::kCols;
    static constexpr std::size_t kClasses = 9;

    explicit OutcomeModel(std::uint64_t seed, std::size_t hidden = 32);

    nn::Tensor forward(const nn::Tensor& x, bool training) override;
    void backward(const nn::Tensor& grad_probs) override;
    std::vector<nn::Param*> params() override;
    std::size_t num_classes() const override { return kClasses; }

private:
    nn::Lstm lstm_;
    nn::Dense head_;
    nn::Softmax softmax_;
};

// Two 1D-conv branches over the 30x7 reaction window (kernels 3 and 9), each
// conv-dropout-conv-pool, flattened and concatenated to width 320, then a
// small dense head with a 2-way softmax.
class CongruenceModel : public nn::Model {
public:
    static constexpr std::size_t kInputLen = ReactionFeatures::kRows;
    static constexpr std::size_t kInputChannels = ReactionFeatures::kCols;
    static constexpr std::size_t kClasses = 2;
    static constexpr std::size_t kConcatWidth = 320;

    explicit CongruenceModel(std::uint64_t seed);

    nn::Tensor forward(const nn::Tensor& x, bool training) override;
    void backward(const nn::Tensor& grad_probs) override;
    std::vector<nn::Param*> params() override;
    std::size_t num_classes() const override { return kClasses; }

    // Width of the concatenated branch output for the given input length.
    static std::size_t concat_width(std::size_t input_len);

private:
    struct Branch {
        Branch(const std::string& name, std::size_t kernel, Rng* dropout_rng);
        nn::Tensor forward(const nn::Tensor& x, bool training);
        nn::Tensor backward(const nn::Tensor& grad_flat);

        nn::Conv1D conv1;
        nn::Dropout drop;
        nn::Conv1D conv2;
        nn::MaxPool1D pool;
        std::vector<std::size_t> pool_out_shape;
    };

    Rng dropout_rng_;
    Branch branch_a_; // kernel 3
    Branch branch_b_; // kernel 9
    nn::Dropout concat_drop_;
    nn::Dense hidden_;
    nn::Relu relu_;
    nn::Dense head_;
    nn::Softmax softmax_;
};

// Fresh models with seeded initialization.
std::unique_ptr<OutcomeModel> build_outcome_model(std::uint64_t seed, std::size_t hidden = 32);
std::unique_ptr<CongruenceModel> build_congruence_model(std::uint64_t seed);

nn::Tensor to_tensor(const OutcomeFeatures& f);
nn::Tensor to_tensor(const ReactionFeatures& f);

struct OutcomePrediction {
    Zone zone;
    std::array<double, 9> distribution{};
};

struct CongruencePrediction {
    bool congruent = false;
    double probability = 0.0; // probability of the predicted class
};

// Argmax class mapped to zone 1..9; earliest index wins exact ties.
OutcomePrediction predict_outcome(OutcomeModel& model, const OutcomeFeatures& features);

// Class 1 is "congruent"; threshold 0.5.
CongruencePrediction predict_congruence(CongruenceModel& model, const ReactionFeatures& features);

} // namespace throwsense::models
