#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "throwsense/intent.hpp"
#include "throwsense/rng.hpp"

using namespace throwsense;
using namespace throwsense::intent;

namespace {

ThrowRecord mistake(const std::string& subject, int intent_cell, int outcome_cell) {
    ThrowRecord r;
    r.subject_id = subject;
    r.view = View::deg0;
    r.intent = Zone::cell(intent_cell);
    r.outcome = outcome_cell == 0 ? Zone::miss() : Zone::cell(outcome_cell);
    r.congruence = false;
    return r;
}

} // namespace

TEST_CASE("zero counts smooth to uniform 1/8 over the off-diagonal") {
    const auto prior = PriorMatrix::from_records({}, false);
    CHECK(prior.used_uniform_fallback());
    for (int outcome = 1; outcome <= 9; ++outcome) {
        double sum = 0.0;
        for (int intent = 1; intent <= 9; ++intent) {
            const double p = prior.prob(Zone::cell(outcome), intent);
            if (intent == outcome) {
                CHECK(p == 0.0);
            } else {
                CHECK(p == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
            }
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("add-one smoothing on a concrete count row") {
    // outcome 3: intent 2 observed three times, nothing else
    std::vector<ThrowRecord> records = {mistake("s01", 2, 3), mistake("s01", 2, 3), mistake("s02", 2, 3)};
    const auto prior = PriorMatrix::from_records(records, false);

    for (int intent = 1; intent <= 9; ++intent) {
        const double p = prior.prob(Zone::cell(3), intent);
        if (intent == 3) {
            CHECK(p == 0.0);
        } else if (intent == 2) {
            CHECK(p == doctest::Approx(4.0 / 11.0).epsilon(1e-12));
        } else {
            CHECK(p == doctest::Approx(1.0 / 11.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("every row sums to 1 with a zero diagonal and positive off-diagonal") {
    Rng rng(500);
    std::vector<ThrowRecord> records;
    for (int i = 0; i < 400; ++i) {
        const int intent = 1 + static_cast<int>(rng.uniform_index(9));
        int outcome = 1 + static_cast<int>(rng.uniform_index(9));
        if (outcome == intent) outcome = intent == 9 ? 1 : intent + 1;
        records.push_back(mistake("s0" + std::to_string(1 + i % 3), intent, outcome));
    }
    const auto prior = PriorMatrix::from_records(records, false);
    for (int outcome = 1; outcome <= 9; ++outcome) {
        double sum = 0.0;
        for (int intent = 1; intent <= 9; ++intent) {
            const double p = prior.prob(Zone::cell(outcome), intent);
            if (intent == outcome) {
                CHECK(p == 0.0);
            } else {
                CHECK(p > 0.0);
            }
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("smoothing preserves a unique count argmax") {
    Rng rng(501);
    for (int trial = 0; trial < 30; ++trial) {
        // random counts for outcome 5 with a forced unique maximum
        std::array<int, 10> counts{};
        for (int intent = 1; intent <= 9; ++intent) {
            if (intent != 5) counts[static_cast<std::size_t>(intent)] = static_cast<int>(rng.uniform_index(6));
        }
        int best_intent = 5 == 1 ? 2 : 1;
        for (int intent = 1; intent <= 9; ++intent) {
            if (intent != 5 && counts[static_cast<std::size_t>(intent)] > counts[static_cast<std::size_t>(best_intent)]) {
                best_intent = intent;
            }
        }
        counts[static_cast<std::size_t>(best_intent)] += 2; // make it strictly unique

        std::vector<ThrowRecord> records;
        for (int intent = 1; intent <= 9; ++intent) {
            for (int c = 0; c < counts[static_cast<std::size_t>(intent)]; ++c) {
                records.push_back(mistake("s01", intent, 5));
            }
        }
        const auto prior = PriorMatrix::from_records(records, false);
        Rng pick_rng(trial);
        CHECK(predict_intent_from_prior(prior, Zone::cell(5), pick_rng).cell_index() == best_intent);
    }
}

TEST_CASE("uniform rows tie-break uniformly at random") {
    const auto prior = PriorMatrix::uniform(false);
    Rng rng(777);
    std::array<int, 10> counts{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const Zone z = predict_intent_from_prior(prior, Zone::cell(5), rng);
        CHECK(z.cell_index() != 5);
        counts[static_cast<std::size_t>(z.cell_index())]++;
    }
    for (int intent = 1; intent <= 9; ++intent) {
        if (intent == 5) continue;
        const double freq = counts[static_cast<std::size_t>(intent)] / static_cast<double>(draws);
        CHECK(std::abs(freq - 1.0 / 8.0) < 0.02);
    }
}

TEST_CASE("a unique maximum is always chosen") {
    std::vector<ThrowRecord> records(6, mistake("s01", 5, 3));
    const auto prior = PriorMatrix::from_records(records, false);
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        CHECK(predict_intent_from_prior(prior, Zone::cell(3), rng).cell_index() == 5);
    }
}

TEST_CASE("prediction never returns the conditioning outcome") {
    Rng data_rng(502);
    std::vector<ThrowRecord> records;
    for (int i = 0; i < 200; ++i) {
        const int intent = 1 + static_cast<int>(data_rng.uniform_index(9));
        int outcome = 1 + static_cast<int>(data_rng.uniform_index(9));
        if (outcome == intent) continue;
        records.push_back(mistake("s01", intent, outcome));
    }
    const auto prior = PriorMatrix::from_records(records, false);
    Rng rng(503);
    for (int i = 0; i < 500; ++i) {
        const Zone outcome = Zone::cell(1 + static_cast<int>(rng.uniform_index(9)));
        CHECK(predict_intent_from_prior(prior, outcome, rng) != outcome);
    }
}

TEST_CASE("a MISS outcome needs the optional miss row") {
    const auto without = PriorMatrix::uniform(false);
    Rng rng(2);
    CHECK_THROWS_AS(predict_intent_from_prior(without, Zone::miss(), rng), RowMissing);

    std::vector<ThrowRecord> records = {mistake("s01", 7, 0), mistake("s01", 7, 0), mistake("s01", 1, 2)};
    const auto with = PriorMatrix::from_records(records, true);
    // miss row smooths over all nine intents: (2+1)/(2+9) for intent 7
    CHECK(with.prob(Zone::miss(), 7) == doctest::Approx(3.0 / 11.0).epsilon(1e-12));
    CHECK(predict_intent_from_prior(with, Zone::miss(), rng).cell_index() == 7);
}

TEST_CASE("congruent records are rejected by the prior builder") {
    ThrowRecord good = mistake("s01", 2, 3);
    ThrowRecord bad;
    bad.subject_id = "s01";
    bad.intent = Zone::cell(4);
    bad.outcome = Zone::cell(4);
    bad.congruence = true;
    std::vector<ThrowRecord> records = {good, bad};
    CHECK_THROWS_AS(PriorMatrix::from_records(records, false), SchemaError);
}

TEST_CASE("prior matrices round-trip through JSON") {
    namespace fs = std::filesystem;
    std::vector<ThrowRecord> records = {mistake("s01", 2, 3), mistake("s02", 6, 3), mistake("s01", 4, 0)};
    const auto prior = PriorMatrix::from_records(records, true);

    const auto path = fs::temp_directory_path() / "throwsense_prior_test.json";
    prior.save(path);
    const auto loaded = PriorMatrix::load(path);
    fs::remove(path);
    CHECK(loaded == prior);
    CHECK(loaded.has_miss_row());
}

TEST_CASE("prior store: dataset, per-subject, and uniform fallbacks") {
    std::vector<ThrowRecord> records = {mistake("s01", 2, 3), mistake("s01", 8, 5), mistake("s02", 1, 4)};
    const std::vector<std::string> all = {"s01", "s02", "s03"};
    const auto store = PriorStore::build(records, false, all);

    CHECK_FALSE(store.dataset.used_uniform_fallback());
    CHECK(store.by_subject.size() == 3);
    CHECK(store.for_subject("s03").prob(Zone::cell(1), 2) == doctest::Approx(1.0 / 8.0));
    CHECK(store.warnings.size() == 1);
    CHECK(store.for_subject("nobody").prob(Zone::cell(1), 2) == doctest::Approx(1.0 / 8.0));
    CHECK_THROWS_AS(store.require_subject("nobody"), EmptyScope);

    // subject priors really are subject-scoped
    CHECK(store.require_subject("s01").prob(Zone::cell(3), 2) == doctest::Approx(2.0 / 9.0));
    CHECK(store.require_subject("s02").prob(Zone::cell(4), 1) == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("end-to-end prediction passes through or consults the prior") {
    auto outcome_model = models::build_outcome_model(11);
    auto congruence_model = models::build_congruence_model(12);

    // pin the congruence head so the gate is under test control
    auto params = congruence_model->params();
    params[params.size() - 2]->value.fill(0.0);
    auto& head_bias = params[params.size() - 1]->value;

    OutcomeFeatures of;
    of.values.fill(0.4);
    ReactionFeatures rf;
    rf.values.fill(0.1);
    const auto prior = PriorMatrix::uniform(false);

    head_bias.values = {std::log(0.1), std::log(0.9)}; // congruent
    Rng rng(3);
    const auto pass = end_to_end_predict(*outcome_model, *congruence_model, prior, of, rf, rng);
    CHECK(pass.via == PredictionRoute::congruent_pass_through);
    CHECK(pass.intent == pass.outcome_used);
    CHECK(pass.congruence_prob == doctest::Approx(0.9).epsilon(1e-9));

    head_bias.values = {std::log(0.8), std::log(0.2)}; // incongruent
    const auto routed = end_to_end_predict(*outcome_model, *congruence_model, prior, of, rf, rng);
    CHECK(routed.via == PredictionRoute::prior_argmax);
    CHECK(routed.intent != routed.outcome_used);
    CHECK(routed.congruence_prob == doctest::Approx(0.2).epsilon(1e-9));
}
