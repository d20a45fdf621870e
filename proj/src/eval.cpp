#include "throwsense/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include "throwsense/models.hpp"

namespace throwsense::eval {

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, long count) {
    if (truth >= k_ || predicted >= k_) {
        throw ShapeMismatch("confusion matrix index out of range");
    }
    counts_[truth * k_ + predicted] += count;
}

long ConfusionMatrix::total() const {
    long t = 0;
    for (long c : counts_) t += c;
    return t;
}

Metrics compute_metrics(const ConfusionMatrix& cm) {
    const std::size_t k = cm.classes();
    const double total = static_cast<double>(cm.total());
    if (total <= 0) throw EmptyMatrix("confusion matrix is empty");

    Metrics m;
    double trace = 0.0;
    for (std::size_t c = 0; c < k; ++c) trace += static_cast<double>(cm.at(c, c));
    m.accuracy = trace / total;

    double f1_sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            row += static_cast<double>(cm.at(c, j));
            col += static_cast<double>(cm.at(j, c));
        }
        const double tp = static_cast<double>(cm.at(c, c));
        const double precision = col > 0.0 ? tp / col : 0.0;
        const double recall = row > 0.0 ? tp / row : 0.0;
        const double f1 =
            (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        m.per_class_f1.push_back(f1);
        f1_sum += f1;
    }
    m.macro_f1 = f1_sum / static_cast<double>(k);

    if (k == 2) {
        const double tp = static_cast<double>(cm.at(1, 1));
        const double tn = static_cast<double>(cm.at(0, 0));
        const double fp = static_cast<double>(cm.at(0, 1));
        const double fn = static_cast<double>(cm.at(1, 0));
        const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
        m.mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
    }
    return m;
}

std::vector<double> class_weights(std::span<const int> labels, std::size_t k) {
    std::vector<double> counts(k, 0.0);
    for (int label : labels) {
        if (label < 0 || static_cast<std::size_t>(label) >= k) {
            throw ShapeMismatch("label " + std::to_string(label) + " out of range");
        }
        counts[static_cast<std::size_t>(label)] += 1.0;
    }
    std::vector<double> weights(k);
    const double n = static_cast<double>(labels.size());
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0.0) {
            throw MissingClass("class " + std::to_string(c) + " absent from the labels");
        }
        weights[c] = n / (static_cast<double>(k) * counts[c]);
    }
    return weights;
}

// ------------------------------------------------------------ fold planning

std::string strat_key_name(StratKey k) {
    switch (k) {
        case StratKey::outcome: return "outcome";
        case StratKey::congruence: return "congruence";
        case StratKey::intent: return "intent";
    }
    throw SchemaError("invalid stratification key");
}

StratKey strat_key_from_name(const std::string& name) {
    if (name == "outcome") return StratKey::outcome;
    if (name == "congruence") return StratKey::congruence;
    if (name == "intent") return StratKey::intent;
    throw SchemaError("unknown stratification key '" + name + "'");
}

namespace {

std::string stratum_of(const ThrowRecord& rec, StratKey key) {
    switch (key) {
        case StratKey::outcome:
            return rec.outcome.is_miss() ? "o:miss" : "o:" + std::to_string(rec.outcome.cell_index());
        case StratKey::congruence:
            return rec.congruence ? "c:1" : "c:0";
        case StratKey::intent:
            return "i:" + std::to_string(rec.intent.cell_index());
    }
    throw SchemaError("invalid stratification key");
}

} // namespace

FoldPlan make_fold_plan(const DatasetManifest& manifest, StratKey strat, std::uint64_t seed, int k) {
    if (k < 2) throw InsufficientData("fold count must be at least 2");
    if (manifest.records.size() < static_cast<std::size_t>(k)) {
        throw InsufficientData("cannot build " + std::to_string(k) + " folds from " +
                               std::to_string(manifest.records.size()) + " records");
    }

    FoldPlan plan;
    plan.k = k;
    plan.strat = strat;
    plan.seed = seed;
    plan.folds.assign(static_cast<std::size_t>(k), {});

    // (subject, stratum) cells; std::map keeps processing order deterministic
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        const ThrowRecord& rec = manifest.records[i];
        cells[{rec.subject_id, stratum_of(rec, strat)}].push_back(i);
    }

    // cells with fewer samples than folds pool at the subject level
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> usable;
    for (auto& [key, indices] : cells) {
        if (indices.size() < static_cast<std::size_t>(k)) {
            auto& pool = usable[{key.first, "pooled"}];
            pool.insert(pool.end(), indices.begin(), indices.end());
            plan.warnings.push_back("subject " + key.first + " stratum " + key.second + " has only " +
                                    std::to_string(indices.size()) + " samples; pooled");
        } else {
            usable[key] = std::move(indices);
        }
    }

    const Rng master(seed);
    // per fold: the shuffled non-test remainder of every cell
    std::vector<std::vector<std::vector<std::size_t>>> rests(static_cast<std::size_t>(k));
    for (auto& [key, indices] : usable) {
        const std::string cell_tag = key.first + "|" + key.second;
        Rng cell_rng = master.split("plan|" + cell_tag);
        cell_rng.shuffle(indices);
        const std::size_t n = indices.size();

        for (int f = 0; f < k; ++f) {
            const std::size_t lo = n * static_cast<std::size_t>(f) / static_cast<std::size_t>(k);
            const std::size_t hi = n * static_cast<std::size_t>(f + 1) / static_cast<std::size_t>(k);

            auto& fold = plan.folds[static_cast<std::size_t>(f)];
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < n; ++i) {
                if (i >= lo && i < hi) {
                    fold.test.push_back(indices[i]);
                } else {
                    rest.push_back(indices[i]);
                }
            }
            Rng val_rng = master.split("val|" + cell_tag + "|" + std::to_string(f));
            val_rng.shuffle(rest);
            rests[static_cast<std::size_t>(f)].push_back(std::move(rest));
        }
    }

    // inner 80:20 split: floor the per-cell validation share, then hand out
    // the fold-level remainder by largest fractional part (stable order)
    for (int f = 0; f < k; ++f) {
        auto& fold = plan.folds[static_cast<std::size_t>(f)];
        auto& fold_rests = rests[static_cast<std::size_t>(f)];

        std::size_t total = 0;
        for (const auto& rest : fold_rests) total += rest.size();
        std::size_t target = static_cast<std::size_t>(static_cast<double>(total) * 0.2 + 0.5);

        std::vector<std::size_t> val_counts(fold_rests.size());
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t c = 0; c < fold_rests.size(); ++c) {
            const double share = static_cast<double>(fold_rests[c].size()) * 0.2;
            val_counts[c] = static_cast<std::size_t>(share);
            assigned += val_counts[c];
            remainders.emplace_back(share - static_cast<double>(val_counts[c]), c);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t i = 0; i < remainders.size() && assigned < target; ++i) {
            const std::size_t c = remainders[i].second;
            if (val_counts[c] < fold_rests[c].size()) {
                ++val_counts[c];
                ++assigned;
            }
        }

        for (std::size_t c = 0; c < fold_rests.size(); ++c) {
            const auto& rest = fold_rests[c];
            fold.val.insert(fold.val.end(), rest.begin(),
                            rest.begin() + static_cast<std::ptrdiff_t>(val_counts[c]));
            fold.train.insert(fold.train.end(), rest.begin() + static_cast<std::ptrdiff_t>(val_counts[c]),
                              rest.end());
        }
    }

    for (auto& fold : plan.folds) {
        // degenerate tiny datasets: keep the validation set non-empty
        if (fold.val.empty() && fold.train.size() >= 2) {
            fold.val.push_back(fold.train.back());
            fold.train.pop_back();
        }
        std::sort(fold.train.begin(), fold.train.end());
        std::sort(fold.val.begin(), fold.val.end());
        std::sort(fold.test.begin(), fold.test.end());
    }
    return plan;
}

// ----------------------------------------------------------- pipeline runs

std::string task_name(Task t) {
    switch (t) {
        case Task::outcome: return "outcome";
        case Task::congruence: return "congruence";
        case Task::intent: return "intent";
        case Task::end_to_end: return "end-to-end";
    }
    throw SchemaError("invalid task");
}

Task task_from_name(const std::string& name) {
    if (name == "outcome") return Task::outcome;
    if (name == "congruence") return Task::congruence;
    if (name == "intent") return Task::intent;
    if (name == "end-to-end") return Task::end_to_end;
    throw SchemaError("unknown task '" + name + "' (outcome|congruence|intent|end-to-end)");
}

namespace {

StratKey strat_for_task(Task t) {
    switch (t) {
        case Task::outcome: return StratKey::outcome;
        case Task::congruence: return StratKey::congruence;
        case Task::intent: return StratKey::intent;
        case Task::end_to_end: return StratKey::intent; // one split family for every model
    }
    throw SchemaError("invalid task");
}

Dataset exclude_misses(const Dataset& data) {
    Dataset out;
    out.manifest.metadata = data.manifest.metadata;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.manifest.records[i].outcome.is_miss()) continue;
        out.manifest.records.push_back(data.manifest.records[i]);
        out.outcome_features.push_back(data.outcome_features[i]);
        out.reaction_features.push_back(data.reaction_features[i]);
    }
    return out;
}

nn::TrainConfig train_config_for(const EvalConfig& config, std::uint64_t fit_seed) {
    nn::TrainConfig tc;
    tc.batch_size = 5;
    tc.optimizer = nn::OptimizerKind::adam;
    tc.learning_rate = 2e-3;
    tc.early_stop_patience = 20;
    tc.max_epochs = config.max_epochs;
    tc.seed = fit_seed;
    return tc;
}

std::vector<nn::LabeledSample> outcome_samples(const Dataset& data, std::span<const std::size_t> idx) {
    std::vector<nn::LabeledSample> samples;
    samples.reserve(idx.size());
    for (std::size_t i : idx) {
        samples.push_back({models::to_tensor(data.outcome_features[i]),
                           data.manifest.records[i].outcome.cell_index() - 1});
    }
    return samples;
}

std::vector<nn::LabeledSample> congruence_samples(const Dataset& data, std::span<const std::size_t> idx) {
    std::vector<nn::LabeledSample> samples;
    samples.reserve(idx.size());
    for (std::size_t i : idx) {
        samples.push_back({models::to_tensor(data.reaction_features[i]),
                           data.manifest.records[i].congruence ? 1 : 0});
    }
    return samples;
}

std::vector<ThrowRecord> mistake_records(const Dataset& data, std::span<const std::size_t> idx) {
    std::vector<ThrowRecord> records;
    for (std::size_t i : idx) {
        if (!data.manifest.records[i].congruence) records.push_back(data.manifest.records[i]);
    }
    return records;
}

// Per-sample streams keyed by (master seed, purpose, record index): any
// evaluation order, thread schedule, or pass count draws the same numbers.
Rng sample_rng(std::uint64_t seed, const std::string& purpose, std::size_t record_index) {
    return Rng(seed).split(purpose).split(record_index);
}

double intent_accuracy_with(const intent::PriorStore& store, PriorScope scope, const Dataset& data,
                            std::span<const std::size_t> test, std::uint64_t seed) {
    static const intent::PriorMatrix uniform = intent::PriorMatrix::uniform();
    long correct = 0, total = 0;
    for (std::size_t i : test) {
        const ThrowRecord& rec = data.manifest.records[i];
        if (rec.congruence) continue; // prior predictions are defined on mistakes
        const intent::PriorMatrix& prior = scope == PriorScope::uniform ? uniform
                                           : scope == PriorScope::subject
                                               ? store.for_subject(rec.subject_id)
                                               : store.dataset;
        Rng rng = sample_rng(seed, "intent", i);
        correct += intent::predict_intent_from_prior(prior, rec.outcome, rng) == rec.intent;
        ++total;
    }
    return total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

} // namespace

FoldArtifacts run_fold(const Dataset& data, const FoldPlan& plan, std::size_t fold_index,
                       const EvalConfig& config) {
    const FoldAssignment& fold = plan.folds.at(fold_index);
    const Rng master(config.seed);
    const std::string tag = "fold" + std::to_string(fold_index);

    FoldArtifacts art;
    const bool want_outcome = config.task == Task::outcome || config.task == Task::end_to_end;
    const bool want_congruence = config.task == Task::congruence || config.task == Task::end_to_end;
    const bool want_intent = config.task == Task::intent || config.task == Task::end_to_end;

    std::unique_ptr<models::OutcomeModel> outcome_model;
    if (want_outcome) {
        outcome_model =
            models::build_outcome_model(master.split(tag + "|outcome-init").seed(), config.lstm_hidden);
        nn::fit(*outcome_model, outcome_samples(data, fold.train), outcome_samples(data, fold.val),
                train_config_for(config, master.split(tag + "|outcome-fit").seed()));
        art.outcome_weights = outcome_model->export_weights();

        ConfusionMatrix cm(9);
        for (std::size_t i : fold.test) {
            const auto pred = models::predict_outcome(*outcome_model, data.outcome_features[i]);
            cm.add(static_cast<std::size_t>(data.manifest.records[i].outcome.cell_index() - 1),
                   static_cast<std::size_t>(pred.zone.cell_index() - 1));
        }
        art.metrics["outcome_accuracy"] = compute_metrics(cm).accuracy;
    }

    std::unique_ptr<models::CongruenceModel> congruence_model;
    if (want_congruence) {
        congruence_model = models::build_congruence_model(master.split(tag + "|congruence-init").seed());
        auto train = congruence_samples(data, fold.train);
        std::vector<int> labels;
        for (const auto& s : train) labels.push_back(s.label);
        auto tc = train_config_for(config, master.split(tag + "|congruence-fit").seed());
        tc.class_weights = class_weights(labels, 2);
        nn::fit(*congruence_model, train, congruence_samples(data, fold.val), tc);
        art.congruence_weights = congruence_model->export_weights();

        ConfusionMatrix cm(2);
        for (std::size_t i : fold.test) {
            const auto pred = models::predict_congruence(*congruence_model, data.reaction_features[i]);
            cm.add(data.manifest.records[i].congruence ? 1 : 0, pred.congruent ? 1 : 0);
        }
        const Metrics m = compute_metrics(cm);
        art.metrics["congruence_accuracy"] = m.accuracy;
        art.metrics["congruence_f1"] = m.macro_f1;
        art.metrics["congruence_mcc"] = *m.mcc;
    }

    intent::PriorStore store;
    if (want_intent) {
        // prior counts come from the fold's training side (train + val) only
        std::vector<std::size_t> train_side = fold.train;
        train_side.insert(train_side.end(), fold.val.begin(), fold.val.end());
        store = intent::PriorStore::build(mistake_records(data, train_side));
        art.prior = config.prior_scope == PriorScope::uniform ? intent::PriorMatrix::uniform()
                                                              : store.dataset;

        if (config.task == Task::intent) {
            art.metrics["intent_accuracy_dataset"] =
                intent_accuracy_with(store, PriorScope::dataset, data, fold.test, config.seed);
            art.metrics["intent_accuracy_subject"] =
                intent_accuracy_with(store, PriorScope::subject, data, fold.test, config.seed);
            art.metrics["intent_accuracy_uniform"] =
                intent_accuracy_with(store, PriorScope::uniform, data, fold.test, config.seed);
            art.metrics["intent_accuracy"] =
                art.metrics["intent_accuracy_" + std::string(config.prior_scope == PriorScope::dataset
                                                                 ? "dataset"
                                                                 : config.prior_scope == PriorScope::subject
                                                                     ? "subject"
                                                                     : "uniform")];
        } else {
            art.metrics["intent_accuracy"] =
                intent_accuracy_with(store, config.prior_scope, data, fold.test, config.seed);
        }
    }

    if (config.task == Task::end_to_end) {
        long correct = 0;
        for (std::size_t i : fold.test) {
            const ThrowRecord& rec = data.manifest.records[i];
            Rng rng = sample_rng(config.seed, "e2e", i);
            const intent::PriorMatrix& prior =
                config.prior_scope == PriorScope::subject ? store.for_subject(rec.subject_id) : art.prior;
            const auto pred = intent::end_to_end_predict(*outcome_model, *congruence_model, prior,
                                                         data.outcome_features[i],
                                                         data.reaction_features[i], rng);
            correct += pred.intent == rec.intent;
        }
        art.metrics["end_to_end_accuracy"] =
            static_cast<double>(correct) / static_cast<double>(fold.test.size());
    }
    return art;
}

Report evaluate_pipeline(const Dataset& data, const EvalConfig& config) {
    if (data.outcome_features.size() != data.size() || data.reaction_features.size() != data.size()) {
        throw ShapeMismatch("dataset features are not index-aligned with the manifest");
    }
    const Dataset working = exclude_misses(data);
    const FoldPlan plan =
        make_fold_plan(working.manifest, strat_for_task(config.task), config.seed, config.folds);

    Report report;
    report.task = task_name(config.task);
    report.folds = config.folds;
    report.seed = config.seed;
    report.records_used = working.size();
    report.warnings = plan.warnings;
    report.per_fold.resize(plan.folds.size());

    std::vector<std::exception_ptr> errors(plan.folds.size());
    const int jobs = std::max(1, config.jobs);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t f = next.fetch_add(1);
            if (f >= plan.folds.size()) return;
            try {
                report.per_fold[f] = run_fold(working, plan, f, config).metrics;
            } catch (...) {
                errors[f] = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err); // one bad fold voids the report
    }

    for (const auto& [name, value] : report.per_fold.front()) {
        double sum = 0.0;
        for (const auto& fold : report.per_fold) sum += fold.at(name);
        const double mean = sum / static_cast<double>(report.per_fold.size());
        double var = 0.0;
        for (const auto& fold : report.per_fold) {
            var += (fold.at(name) - mean) * (fold.at(name) - mean);
        }
        report.mean[name] = mean;
        report.stddev[name] = std::sqrt(var / static_cast<double>(report.per_fold.size()));
    }
    return report;
}

} // namespace throwsense::eval
