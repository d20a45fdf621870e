#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "throwsense/intent.hpp"
#include "throwsense/nn/train.hpp"
#include "throwsense/types.hpp"

namespace throwsense::eval {

// K x K integer counts, truth on rows, prediction on columns.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t k) : k_(k), counts_(k * k, 0) {
        if (k < 2) throw EmptyMatrix("confusion matrix needs at least 2 classes");
    }

    void add(std::size_t truth, std::size_t predicted, long count = 1);
    long at(std::size_t truth, std::size_t predicted) const { return counts_[truth * k_ + predicted]; }
    std::size_t classes() const { return k_; }
    long total() const;

private:
    std::size_t k_;
    std::vector<long> counts_;
};

struct Metrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<double> per_class_f1;
    std::optional<double> mcc; // binary tasks only
};

// accuracy, macro-averaged F1 (zero for classes with no precision and no
// recall), and for K=2 the phi coefficient (0 on degenerate margins).
Metrics compute_metrics(const ConfusionMatrix& cm);

// w_c = N / (K * N_c); every class must be present.
std::vector<double> class_weights(std::span<const int> labels, std::size_t k);

// ------------------------------------------------------------ fold planning

enum class StratKey { outcome, congruence, intent };

std::string strat_key_name(StratKey k);
StratKey strat_key_from_name(const std::string& name);

struct FoldAssignment {
    std::vector<std::size_t> train, val, test; // record indices into the manifest
};

struct FoldPlan {
    int k = 5;
    StratKey strat = StratKey::outcome;
    std::uint64_t seed = 0;
    std::vector<FoldAssignment> folds;
    std::vector<std::string> warnings;
};

// Per-subject stratified k-fold: each (subject, stratum) cell is shuffled once
// and chunked, giving every fold an ~80:20 train/test split per subject with
// disjoint test sets; the 80% side is further split 80:20 into train/val.
// Cells smaller than k are pooled per subject (warned).
FoldPlan make_fold_plan(const DatasetManifest& manifest, StratKey strat, std::uint64_t seed, int k = 5);

// ----------------------------------------------------------- pipeline runs

// Records plus their model-ready features, index-aligned.
struct Dataset {
    DatasetManifest manifest;
    std::vector<OutcomeFeatures> outcome_features;
    std::vector<ReactionFeatures> reaction_features;

    std::size_t size() const { return manifest.records.size(); }
};

enum class Task { outcome, congruence, intent, end_to_end };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

enum class PriorScope { dataset, subject, uniform };

struct EvalConfig {
    Task task = Task::end_to_end;
    int folds = 5;
    std::uint64_t seed = 0;
    int max_epochs = 300;
    std::size_t lstm_hidden = 32;
    PriorScope prior_scope = PriorScope::dataset;
    int jobs = 1;
};

struct FoldArtifacts {
    ModelWeights outcome_weights;
    ModelWeights congruence_weights;
    intent::PriorMatrix prior = intent::PriorMatrix::uniform();
    std::map<std::string, double> metrics;
};

struct Report {
    std::string task;
    int folds = 0;
    std::uint64_t seed = 0;
    std::size_t records_used = 0; // complete misses are excluded up front
    std::vector<std::map<std::string, double>> per_fold;
    std::map<std::string, double> mean;
    std::map<std::string, double> stddev;
    std::vector<std::string> warnings;
};

// Train and evaluate one fold of the plan. Training touches only the fold's
// train/val records; test records are read at inference time only.
FoldArtifacts run_fold(const Dataset& data, const FoldPlan& plan, std::size_t fold_index,
                       const EvalConfig& config);

// The full protocol: plan (stratified by the task's key), per-fold training
// and testing, and a mean/std reduction across folds. A failed fold aborts.
Report evaluate_pipeline(const Dataset& data, const EvalConfig& config);

} // namespace throwsense::eval
