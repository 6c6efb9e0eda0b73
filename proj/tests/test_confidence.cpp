#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "selectqa/confidence.hpp"
#include "selectqa/error.hpp"
#include "selectqa/mock_model.hpp"

#include <algorithm>
#include <cmath>
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

} // namespace

TEST_CASE("likelihood is the exp of the summed token logprobs") {
    SampleSet set = set_of("paris", {});
    set.greedy.token_logprobs = {{"par", -0.1}, {"is", -0.2}};
    CHECK(likelihood_score(set) == doctest::Approx(std::exp(-0.3)).epsilon(1e-9));
    CHECK(likelihood_score(set) == doctest::Approx(0.74082).epsilon(1e-4));

    set.greedy.token_logprobs = {{"paris", 0.0}};
    CHECK(likelihood_score(set) == 1.0);

    set.greedy.token_logprobs.clear();
    CHECK_THROWS_AS(likelihood_score(set), config_error);
}

TEST_CASE("repetition counts samples matching the greedy answer") {
    SampleSet set = set_of("Paris", {"paris.", "Paris", "Lyon", "paris", "PARIS", "Nice", "Paris!", "paris",
                                     "Marseille", "Paris"});
    CHECK(repetition_score(set) == 0.7);
    CHECK(repetition_score(set_of("a", {"a", "a", "a"})) == 1.0);
    CHECK(repetition_score(set_of("a", {"b", "c", "d"})) == 0.0);
}

TEST_CASE("repetition ignores interpretations, matches answers only") {
    SampleSet set = set_of("Question interpretation: which one?\nA: Paris",
                           {"A: paris", "Question interpretation: other reading\nA: Paris", "A: Lyon"});
    CHECK(repetition_score(set) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("diversity is one minus the unique fraction") {
    CHECK(diversity_score(set_of("g", {"a", "b", "a", "c", "a", "b", "d", "a", "b", "a"})) == doctest::Approx(0.6));
    CHECK(diversity_score(set_of("g", {"a", "b", "c", "d", "e", "f", "h", "i", "j", "k"})) == 0.0);
    CHECK(diversity_score(set_of("g", {"a", "a", "a", "a", "a", "a", "a", "a", "a", "a"})) == doctest::Approx(0.9));
    // normalization-equivalent strings are one answer
    CHECK(diversity_score(set_of("g", {"Paris", "paris.", "PARIS!", "paris"})) == doctest::Approx(0.75));
}

TEST_CASE("repetition and diversity are permutation invariant and rational") {
    std::mt19937_64 rng(2024);
    const std::vector<std::string> alphabet = {"a", "b", "c", "d"};
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> n_dist(1, 12);
        const int n = n_dist(rng);
        std::vector<std::string> answers;
        std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
        for (int i = 0; i < n; ++i) answers.push_back(alphabet[pick(rng)]);
        SampleSet set = set_of("a", answers);

        const double rep = repetition_score(set);
        const double div = diversity_score(set);
        const double rep_n = rep * n, div_n = div * n;
        CHECK(rep_n == doctest::Approx(std::round(rep_n)).epsilon(1e-12));
        CHECK(div_n == doctest::Approx(std::round(div_n)).epsilon(1e-12));
        CHECK(std::round(rep_n) >= 0);
        CHECK(std::round(rep_n) <= n);
        CHECK(std::round(div_n) <= n - 1);

        std::shuffle(answers.begin(), answers.end(), rng);
        SampleSet shuffled = set_of("a", answers);
        CHECK(repetition_score(shuffled) == rep);
        CHECK(diversity_score(shuffled) == div);
    }
}

TEST_CASE("verification scores the True continuation") {
    auto make_mock = [](double p_true) {
        std::map<std::string, MockAnswerDist> qs;
        qs["capital of france"] = {{{"Paris", 1.0}}, p_true};
        return MockModel(std::move(qs));
    };
    SampleSet set = set_of("Paris", {"Paris", "paris", "Lyon"});
    CompletionRequest base;
    base.model_id = "mock";

    auto mock_80 = make_mock(0.8); // greedy token True at ln 0.8
    CHECK(verification_score(mock_80, "capital of france", set, base) == doctest::Approx(0.8).epsilon(1e-12));

    auto mock_sure = make_mock(1.0); // logprob 0
    CHECK(verification_score(mock_sure, "capital of france", set, base) == 1.0);

    auto mock_25 = make_mock(0.25); // greedy token False at ln 0.75
    CHECK(verification_score(mock_25, "capital of france", set, base) == doctest::Approx(0.25).epsilon(1e-12));

    auto mock_unset = make_mock(-1.0);
    CHECK_THROWS_AS(verification_score(mock_unset, "capital of france", set, base), backend_error);
}
