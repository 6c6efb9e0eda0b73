#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "selectqa/ambiguity.hpp"
#include "selectqa/error.hpp"

#include <array>
#include <random>

using namespace selectqa;

namespace {

Completion completion_of(std::string text) {
    Completion c;
    c.text = std::move(text);
    c.finish_reason = FinishReason::Stop;
    return c;
}

SampleSet set_of(std::string greedy, std::vector<std::string> samples) {
    SampleSet set;
    set.greedy = completion_of(std::move(greedy));
    for (auto& s : samples) set.samples.push_back(completion_of(std::move(s)));
    return set;
}

std::vector<AmbiguityScore> scored(const std::vector<double>& scores, const std::vector<bool>& labels) {
    std::vector<AmbiguityScore> out;
    for (size_t i = 0; i < scores.size(); ++i)
        out.push_back({"q" + std::to_string(i), AmbiguityMethod::VotingDisambig, scores[i], labels[i]});
    return out;
}

} // namespace

TEST_CASE("greedy_disambig fires on an interpretation line") {
    CHECK(greedy_disambig(set_of("Question interpretation: which?\nA: x", {})) == 1.0);
    CHECK(greedy_disambig(set_of("A: x", {})) == 0.0);
    CHECK(greedy_disambig(set_of("", {})) == 0.0);
}

TEST_CASE("voting_disambig is the disambiguating fraction") {
    std::vector<std::string> samples(10, "A: x");
    samples[1] = samples[4] = samples[7] = "Question interpretation: which?\nA: x";
    CHECK(voting_disambig(set_of("A: x", samples)) == doctest::Approx(0.3));
    CHECK(voting_disambig(set_of("A: x", std::vector<std::string>(4, "Question interpretation: w\nA: y"))) == 1.0);
    CHECK(voting_disambig(set_of("A: x", std::vector<std::string>(4, "A: y"))) == 0.0);
}

TEST_CASE("num_disagreements complements repetition exactly") {
    std::mt19937_64 rng(5);
    const std::vector<std::string> alphabet = {"a", "b", "c"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> answers;
        std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
        std::uniform_int_distribution<int> n_dist(1, 10);
        const int n = n_dist(rng);
        for (int i = 0; i < n; ++i) answers.push_back(alphabet[pick(rng)]);
        SampleSet set = set_of("a", answers);
        CHECK(num_disagreements(set) + repetition_score(set) == 1.0);
        CHECK(num_answers(set) + diversity_score(set) == 1.0);
    }
}

TEST_CASE("num_answers is the unique fraction") {
    CHECK(num_answers(set_of("g", {"a", "b", "a", "c", "a", "b", "d", "a", "b", "a"})) == doctest::Approx(0.4));
    CHECK(num_answers(set_of("g", {"a", "a", "a", "a", "a", "a", "a", "a", "a", "a"})) == doctest::Approx(0.1));
    CHECK(num_answers(set_of("g", {"a", "b", "c", "d", "e", "f", "h", "i", "j", "k"})) == 1.0);
}

TEST_CASE("direct prediction reads the Ambiguous literal") {
    CHECK(direct_prediction(set_of("Ambiguous", {}), DirectMode::Greedy) == 1.0);
    CHECK(direct_prediction(set_of("Unambiguous", {}), DirectMode::Greedy) == 0.0);
    CHECK(direct_prediction(set_of("whatever else", {}), DirectMode::Greedy) == 0.0);
    std::vector<std::string> samples(10, "Unambiguous");
    for (int i = 0; i < 6; ++i) samples[i] = "Ambiguous";
    CHECK(direct_prediction(set_of("Ambiguous", samples), DirectMode::Voting) == doctest::Approx(0.6));
    // marker-wrapped and recased variants still count
    CHECK(direct_prediction(set_of("A: ambiguous.", {}), DirectMode::Greedy) == 1.0);
}

TEST_CASE("precision_recall_curve matches the frozen 6-item enumeration") {
    const auto scores = scored({0.9, 0.7, 0.5, 0.3, 0.2, 0.0}, {true, true, false, true, false, false});
    const auto curve = precision_recall_curve(scores, 10);
    REQUIRE(curve.size() == 6);
    // brute-force confusion-matrix oracle values
    const std::vector<std::array<double, 3>> expected = {
        {0.0, 0.5, 1.0},       {0.1, 0.6, 1.0},           {0.3, 0.75, 1.0},
        {0.4, 2.0 / 3.0, 2.0 / 3.0}, {0.6, 1.0, 2.0 / 3.0}, {0.8, 1.0, 1.0 / 3.0},
    };
    for (size_t i = 0; i < expected.size(); ++i) {
        CHECK(curve[i].threshold == expected[i][0]);
        CHECK(curve[i].precision == expected[i][1]);
        CHECK(curve[i].recall == expected[i][2]);
    }
    const auto oracle = oracles::pr_curve(scores, 10);
    REQUIRE(oracle.size() == curve.size());
    for (size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].threshold == oracle[i].threshold);
        CHECK(curve[i].precision == oracle[i].precision);
        CHECK(curve[i].recall == oracle[i].recall);
    }
}

TEST_CASE("separating scores reach precision 1 at recall 1") {
    const auto scores = scored({1.0, 0.9, 0.1, 0.0}, {true, true, false, false});
    const auto curve = precision_recall_curve(scores, 10);
    bool perfect = false;
    for (const auto& p : curve) perfect |= (p.precision == 1.0 && p.recall == 1.0);
    CHECK(perfect);
}

TEST_CASE("constant scores collapse to one base-rate point") {
    const auto scores = scored({0.4, 0.4, 0.4, 0.4, 0.4}, {true, false, true, false, false});
    const auto curve = precision_recall_curve(scores, 10);
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].precision == doctest::Approx(0.4));
    CHECK(curve[0].recall == 1.0);
}

TEST_CASE("curve errors on degenerate or missing labels") {
    CHECK_THROWS_WITH_AS(precision_recall_curve(scored({0.5, 0.6}, {true, true}), 10),
                         doctest::Contains("degenerate labels"), config_error);
    std::vector<AmbiguityScore> unlabeled = {{"q", AmbiguityMethod::NumAnswers, 0.5, std::nullopt}};
    CHECK_THROWS_AS(precision_recall_curve(unlabeled, 10), config_error);
}

TEST_CASE("recall never increases with threshold; threshold 0 precision is the base rate") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> n_dist(2, 40);
        const int n = n_dist(rng);
        std::vector<double> scores;
        std::vector<bool> labels;
        std::uniform_int_distribution<int> k_dist(0, 10);
        std::bernoulli_distribution label_dist(0.5);
        for (int i = 0; i < n; ++i) {
            scores.push_back(k_dist(rng) / 10.0);
            labels.push_back(label_dist(rng));
        }
        int positives = 0;
        for (bool l : labels) positives += l ? 1 : 0;
        if (positives == 0 || positives == n) continue;

        const auto curve = precision_recall_curve(scored(scores, labels), 10);
        REQUIRE_FALSE(curve.empty());
        CHECK(curve.front().threshold == 0.0);
        CHECK(curve.front().precision == doctest::Approx(double(positives) / n));
        CHECK(curve.front().recall == 1.0);
        for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].recall <= curve[i - 1].recall);

        const auto oracle = oracles::pr_curve(scored(scores, labels), 10);
        REQUIRE(oracle.size() == curve.size());
        for (size_t i = 0; i < curve.size(); ++i) {
            CHECK(curve[i].precision == oracle[i].precision);
            CHECK(curve[i].recall == oracle[i].recall);
        }
    }
}
