#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "throwsense/models.hpp"
#include "throwsense/rng.hpp"
#include "throwsense/types.hpp"

namespace throwsense::intent {

// P(intent zone | outcome zone) under a mistake, from frequency counts with
// add-one smoothing over the admissible (off-diagonal) cells. The diagonal is
// structurally zero: a mistake means the intent cannot equal the outcome. An
// optional extra row conditions on a complete miss.
class PriorMatrix {
public:
    static constexpr std::size_t kZones = 9;

    // Counts outcome/intent pairs from mistake-only records, smooths, and
    // normalizes. Records must all be incongruent; MISS outcomes only count
    // when the miss row is enabled. No records at all yields the uniform
    // fallback with a warning recorded.
    static PriorMatrix from_records(std::span<const ThrowRecord> records, bool include_miss_row = false);

    // Uniform over the admissible cells of every row (the zero-count case).
    static PriorMatrix uniform(bool include_miss_row = false);

    const std::array<double, kZones>& row(const Zone& outcome) const;
    double prob(const Zone& outcome, int intent_cell) const;

    bool has_miss_row() const { return has_miss_row_; }
    bool used_uniform_fallback() const { return fallback_; }

    void save(const std::filesystem::path& path) const;
    static PriorMatrix load(const std::filesystem::path& path);

    bool operator==(const PriorMatrix& o) const = default;

private:
    PriorMatrix() = default;
    std::size_t row_index(const Zone& outcome) const;

    std::vector<std::array<double, kZones>> rows_; // 9 zone rows, then the miss row if present
    bool has_miss_row_ = false;
    bool fallback_ = false;
};

// Argmax of the outcome's row; exact ties are broken uniformly at random from
// the supplied stream. Never returns the conditioning zone itself.
Zone predict_intent_from_prior(const PriorMatrix& prior, const Zone& outcome, Rng& rng);

enum class PredictionRoute { congruent_pass_through, prior_argmax };

struct IntentPrediction {
    Zone intent;
    PredictionRoute via = PredictionRoute::congruent_pass_through;
    Zone outcome_used;
    double congruence_prob = 0.0; // probability that the throw was congruent
};

// Full composition: predicted outcome plus predicted congruence gate the
// intent between pass-through and the prior argmax.
IntentPrediction end_to_end_predict(models::OutcomeModel& outcome_model,
                                    models::CongruenceModel& congruence_model,
                                    const PriorMatrix& prior, const OutcomeFeatures& outcome_features,
                                    const ReactionFeatures& reaction_features, Rng& rng);

// Dataset-wide and per-subject priors built from the same mistake pool.
// Subjects with no mistakes fall back to the uniform matrix (warned).
struct PriorStore {
    PriorMatrix dataset = PriorMatrix::uniform();
    std::map<std::string, PriorMatrix> by_subject;
    std::vector<std::string> warnings;

    static PriorStore build(std::span<const ThrowRecord> mistake_records, bool include_miss_row = false,
                            std::span<const std::string> all_subjects = {});
    // Uniform fallback for subjects without any mistakes.
    const PriorMatrix& for_subject(const std::string& subject_id) const;
    // Strict variant: throws EmptyScope instead of falling back.
    const PriorMatrix& require_subject(const std::string& subject_id) const;
};

} // namespace throwsense::intent
