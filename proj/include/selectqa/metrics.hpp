#pragma once

#include "selectqa/confidence.hpp"

#include <optional>
#include <string>
#include <vector>

namespace selectqa {

struct ReliabilityBin {
    int bin_index = 0; // 0 holds the highest-confidence predictions
    double mean_confidence = 0.0;
    double accuracy = 0.0;
    int count = 0;
};

struct SelectivePolicy {
    double tau = 0.0;
};

struct CoveragePoint {
    double coverage = 0.0; // percent of questions answered, most confident first
    double accuracy = 0.0;
};

// Expected calibration error over equal-count rank bins: predictions are
// stably sorted by descending confidence (ties keep input order), split into
// `bins` contiguous groups with the first |preds| mod bins groups taking one
// extra element, and the mean |mean confidence - accuracy| is returned.
// Throws config_error when |preds| < bins.
double ece(const std::vector<ScoredPrediction>& preds, int bins = 10);

// The same partition as ece, reported per bin.
std::vector<ReliabilityBin> reliability_bins(const std::vector<ScoredPrediction>& preds, int bins = 10);

// Mann-Whitney statistic: over all (correct, incorrect) pairs, the fraction
// where the correct prediction has strictly higher confidence plus half the
// tied fraction. Computed from tie-averaged ranks in integer arithmetic, so
// it equals the pairwise enumeration exactly. Throws
// config_error("degenerate labels") unless both classes occur.
double roc_auc(const std::vector<ScoredPrediction>& preds);

// Maximum coverage (percent) whose prefix accuracy reaches target_acc when
// predictions are taken most confident first; 0 when no prefix qualifies.
double cov_at_acc(const std::vector<ScoredPrediction>& preds, double target_acc);

// Prefix accuracies for every coverage 100*k/N, most confident first.
std::vector<CoveragePoint> coverage_accuracy_curve(const std::vector<ScoredPrediction>& preds);

// The selective answering policy: the argmax-score answer when its score
// strictly exceeds tau, otherwise abstention (nullopt). Argmax ties go to the
// first occurrence; an empty candidate list abstains.
std::optional<std::string> selective_answer(const std::vector<std::pair<std::string, double>>& candidates,
                                            const SelectivePolicy& policy);

double exact_match_rate(const std::vector<ScoredPrediction>& preds);

} // namespace selectqa
