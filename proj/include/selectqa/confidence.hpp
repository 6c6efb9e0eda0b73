#pragma once

#include "selectqa/backend.hpp"
#include "selectqa/prompting.hpp"

#include <string>

namespace selectqa {

enum class Scorer { Likelihood, Repetition, Diversity, Verification };

std::string to_string(Scorer scorer);
Scorer scorer_from_string(const std::string& name);

struct ScoredPrediction {
    std::string question_id;
    std::string answer; // normalized greedy answer
    double score = 0.0; // in [0, 1]
    Scorer scorer = Scorer::Repetition;
    bool correct = false;
};

// Sequence probability of the greedy completion: exp of the summed token
// logprobs over all generated tokens, interpretation text included, with no
// length normalization. Throws config_error when the greedy completion has no
// token logprobs.
double likelihood_score(const SampleSet& set);

// Fraction of the n samples whose parsed answer exactly matches the parsed
// greedy answer. Interpretations are ignored; only answers are compared.
double repetition_score(const SampleSet& set, const Markers& markers = {});

// 1 - unique/n over the normalized parsed answers of the n samples. The
// greedy answer is not counted. 0 when every sample differs.
double diversity_score(const SampleSet& set, const Markers& markers = {});

// Two-step self-verification: feeds the sampled answers (duplicates kept)
// and the greedy answer back to the model and scores the True/False position
// at temperature 0 with one token. The score is exp(logprob of "True"):
// taken directly when the scored token is "True", via the complement of the
// "False" probability otherwise, and 0 for any other token. The stub-server
// fixtures pin this convention.
double verification_score(Backend& backend, const std::string& question, const SampleSet& set,
                          const CompletionRequest& base, const Markers& markers = {});

} // namespace selectqa
