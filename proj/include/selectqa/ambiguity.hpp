#pragma once

#include "selectqa/backend.hpp"
#include "selectqa/prompting.hpp"

#include <optional>
#include <string>
#include <vector>

namespace selectqa {

enum class AmbiguityMethod {
    GreedyDisambig,   // 1 iff the greedy output poses an interpretation
    VotingDisambig,   // fraction of samples posing an interpretation
    NumDisagreements, // fraction of sampled answers differing from greedy
    NumAnswers,       // fraction of unique answers among the samples
    GreedyDirect,     // greedy output of the Ambiguous/Unambiguous prompt
    VotingDirect,     // sample vote of the Ambiguous/Unambiguous prompt
};

std::string to_string(AmbiguityMethod method);
AmbiguityMethod ambiguity_method_from_string(const std::string& name);

struct AmbiguityScore {
    std::string question_id;
    AmbiguityMethod method = AmbiguityMethod::GreedyDisambig;
    double score = 0.0; // in [0, 1]; greedy methods emit only 0 or 1
    std::optional<bool> label;
};

// Predictors over a disambiguate-style sample set.
double greedy_disambig(const SampleSet& set, const Markers& markers = {});
double voting_disambig(const SampleSet& set, const Markers& markers = {});
double num_disagreements(const SampleSet& set, const Markers& markers = {}); // 1 - repetition
double num_answers(const SampleSet& set, const Markers& markers = {});       // 1 - diversity

enum class DirectMode { Greedy, Voting };

// Predictors over a direct-ambiguity sample set: outputs equal to "Ambiguous"
// after normalization count as ambiguous; anything unrecognized does not.
double direct_prediction(const SampleSet& set, DirectMode mode, const Markers& markers = {});

struct PrPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// Sweeps thresholds over the achievable grid {k/num_samples : k = 0..n},
// classifying score >= threshold as ambiguous. Thresholds with no predicted
// positives are omitted (precision undefined there), and runs of thresholds
// with identical (precision, recall) collapse to their first point. Every
// score must carry a label; throws config_error("degenerate labels") unless
// both classes occur.
std::vector<PrPoint> precision_recall_curve(const std::vector<AmbiguityScore>& scores, int num_samples);

} // namespace selectqa
