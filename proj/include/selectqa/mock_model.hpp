#pragma once

#include "selectqa/backend.hpp"
#include "selectqa/prompting.hpp"

#include <map>
#include <string>

namespace selectqa {

// Behaviour of the mock for one question: a categorical distribution over
// answer strings (probabilities sum to 1 within 1e-9) and, optionally, the
// probability the model assigns to "True" at a verification position.
struct MockAnswerDist {
    std::map<std::string, double> probabilities;
    double verification_true_prob = -1.0; // < 0 means unset
};

// Deterministic in-process model used as a test oracle. Keyed by the question
// on the final question-marker line of the prompt. Greedy requests return the
// distribution's mode (ties broken by smallest string); sampled requests draw
// i.i.d. from the categorical with a generator seeded by (seed, question,
// sample_index), so each index reproduces independently. Token logprobs carry
// the drawn answer's log-probability as a single token.
class MockModel : public Backend {
public:
    MockModel(std::map<std::string, MockAnswerDist> questions, Markers markers = {});

    Completion complete(const CompletionRequest& request) override;

    // Pure draw used by complete(); exposed so tests can precompute draws.
    const std::string& draw(const std::string& question, uint64_t seed, int sample_index) const;

    // Loads {"questions": {question: {"answers": {...}, "verification_true_prob": p}}}.
    static MockModel from_json_file(const std::string& path, Markers markers = {});

private:
    const MockAnswerDist& dist_for(const std::string& question) const;

    std::map<std::string, MockAnswerDist> questions_;
    Markers markers_;
};

} // namespace selectqa
