#include "throwsense/intent.hpp"

#include <fstream>

#include "json.hpp"

namespace throwsense::intent {

namespace {

using nlohmann::json;

std::array<double, PriorMatrix::kZones> smooth_zone_row(const std::array<double, 9>& counts,
                                                        std::size_t outcome_idx) {
    std::array<double, 9> row{};
    double total = 0.0;
    for (std::size_t j = 0; j < 9; ++j) {
        if (j == outcome_idx) continue; // the diagonal stays zero
        row[j] = counts[j] + 1.0;
        total += row[j];
    }
    for (double& v : row) v /= total;
    return row;
}

std::array<double, PriorMatrix::kZones> smooth_miss_row(const std::array<double, 9>& counts) {
    std::array<double, 9> row{};
    double total = 0.0;
    for (std::size_t j = 0; j < 9; ++j) {
        row[j] = counts[j] + 1.0;
        total += row[j];
    }
    for (double& v : row) v /= total;
    return row;
}

} // namespace

PriorMatrix PriorMatrix::uniform(bool include_miss_row) {
    PriorMatrix m;
    m.has_miss_row_ = include_miss_row;
    for (std::size_t r = 0; r < kZones; ++r) {
        std::array<double, kZones> row{};
        for (std::size_t j = 0; j < kZones; ++j) {
            if (j != r) row[j] = 1.0 / 8.0;
        }
        m.rows_.push_back(row);
    }
    if (include_miss_row) {
        std::array<double, kZones> row{};
        row.fill(1.0 / 9.0);
        m.rows_.push_back(row);
    }
    return m;
}

PriorMatrix PriorMatrix::from_records(std::span<const ThrowRecord> records, bool include_miss_row) {
    if (records.empty()) {
        PriorMatrix m = uniform(include_miss_row);
        m.fallback_ = true;
        return m;
    }

    std::vector<std::array<double, kZones>> counts(kZones + (include_miss_row ? 1 : 0));
    for (auto& row : counts) row.fill(0.0);

    for (const ThrowRecord& rec : records) {
        if (rec.congruence) {
            throw SchemaError("prior matrix takes mistake records only; got a congruent throw");
        }
        const std::size_t intent_idx = static_cast<std::size_t>(rec.intent.cell_index() - 1);
        if (rec.outcome.is_miss()) {
            if (include_miss_row) counts[kZones][intent_idx] += 1.0;
            continue;
        }
        counts[static_cast<std::size_t>(rec.outcome.cell_index() - 1)][intent_idx] += 1.0;
    }

    PriorMatrix m;
    m.has_miss_row_ = include_miss_row;
    for (std::size_t r = 0; r < kZones; ++r) m.rows_.push_back(smooth_zone_row(counts[r], r));
    if (include_miss_row) m.rows_.push_back(smooth_miss_row(counts[kZones]));
    return m;
}

std::size_t PriorMatrix::row_index(const Zone& outcome) const {
    if (outcome.is_miss()) {
        if (!has_miss_row_) throw RowMissing("this prior matrix has no row for complete misses");
        return kZones;
    }
    return static_cast<std::size_t>(outcome.cell_index() - 1);
}

const std::array<double, PriorMatrix::kZones>& PriorMatrix::row(const Zone& outcome) const {
    return rows_[row_index(outcome)];
}

double PriorMatrix::prob(const Zone& outcome, int intent_cell) const {
    return row(outcome)[static_cast<std::size_t>(Zone::cell(intent_cell).cell_index() - 1)];
}

void PriorMatrix::save(const std::filesystem::path& path) const {
    json outcomes = json::array();
    json rows = json::array();
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        outcomes.push_back(r < kZones ? json(static_cast<int>(r) + 1) : json("miss"));
        rows.push_back(rows_[r]);
    }
    json j{{"schema", "throwsense.prior.v1"},
           {"smoothed", true},
           {"uniform_fallback", fallback_},
           {"outcomes", std::move(outcomes)},
           {"intents", {1, 2, 3, 4, 5, 6, 7, 8, 9}},
           {"rows", std::move(rows)}};
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

PriorMatrix PriorMatrix::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (j.value("schema", "") != "throwsense.prior.v1") {
        throw SchemaError(path.string() + ": expected schema 'throwsense.prior.v1'");
    }

    PriorMatrix m;
    m.fallback_ = j.value("uniform_fallback", false);
    const json& rows = j.at("rows");
    if (rows.size() != kZones && rows.size() != kZones + 1) {
        throw SchemaError(path.string() + ": prior must have 9 zone rows (plus an optional miss row)");
    }
    m.has_miss_row_ = rows.size() == kZones + 1;
    for (const json& row : rows) {
        if (row.size() != kZones) throw SchemaError(path.string() + ": rows must have 9 entries");
        std::array<double, kZones> r{};
        double sum = 0.0;
        for (std::size_t c = 0; c < kZones; ++c) {
            r[c] = row[c].get<double>();
            sum += r[c];
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw SchemaError(path.string() + ": prior rows must sum to 1");
        }
        m.rows_.push_back(r);
    }
    return m;
}

Zone predict_intent_from_prior(const PriorMatrix& prior, const Zone& outcome, Rng& rng) {
    const auto& row = prior.row(outcome);
    double best = row[0];
    for (double v : row) best = std::max(best, v);

    std::vector<int> ties;
    for (int j = 0; j < static_cast<int>(PriorMatrix::kZones); ++j) {
        if (row[static_cast<std::size_t>(j)] == best) ties.push_back(j + 1);
    }
    const int pick = ties[rng.uniform_index(ties.size())];
    return Zone::cell(pick);
}

IntentPrediction end_to_end_predict(models::OutcomeModel& outcome_model,
                                    models::CongruenceModel& congruence_model,
                                    const PriorMatrix& prior, const OutcomeFeatures& outcome_features,
                                    const ReactionFeatures& reaction_features, Rng& rng) {
    const auto outcome = models::predict_outcome(outcome_model, outcome_features);
    const auto congruence = models::predict_congruence(congruence_model, reaction_features);

    IntentPrediction pred;
    pred.outcome_used = outcome.zone;
    pred.congruence_prob =
        congruence.congruent ? congruence.probability : 1.0 - congruence.probability;
    if (congruence.congruent) {
        pred.via = PredictionRoute::congruent_pass_through;
        pred.intent = outcome.zone;
    } else {
        pred.via = PredictionRoute::prior_argmax;
        pred.intent = predict_intent_from_prior(prior, outcome.zone, rng);
    }
    return pred;
}

PriorStore PriorStore::build(std::span<const ThrowRecord> mistake_records, bool include_miss_row,
                             std::span<const std::string> all_subjects) {
    PriorStore store;
    store.dataset = PriorMatrix::from_records(mistake_records, include_miss_row);
    if (store.dataset.used_uniform_fallback()) {
        store.warnings.push_back("no mistake records at all; dataset prior is uniform");
    }

    std::map<std::string, std::vector<ThrowRecord>> by_subject;
    for (const ThrowRecord& rec : mistake_records) by_subject[rec.subject_id].push_back(rec);
    for (auto& [subject, recs] : by_subject) {
        store.by_subject.emplace(subject, PriorMatrix::from_records(recs, include_miss_row));
    }
    for (const std::string& subject : all_subjects) {
        if (!by_subject.contains(subject)) {
            store.by_subject.emplace(subject, PriorMatrix::uniform(include_miss_row));
            store.warnings.push_back("subject '" + subject + "' has no mistakes; prior is uniform");
        }
    }
    return store;
}

const PriorMatrix& PriorStore::for_subject(const std::string& subject_id) const {
    static const PriorMatrix uniform_fallback = PriorMatrix::uniform();
    const auto it = by_subject.find(subject_id);
    return it == by_subject.end() ? uniform_fallback : it->second;
}

const PriorMatrix& PriorStore::require_subject(const std::string& subject_id) const {
    const auto it = by_subject.find(subject_id);
    if (it == by_subject.end()) {
        throw EmptyScope("no prior available for subject '" + subject_id + "'");
    }
    return it->second;
}

} // namespace throwsense::intent
