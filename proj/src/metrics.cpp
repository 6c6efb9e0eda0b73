#include "selectqa/metrics.hpp"

#include "selectqa/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace selectqa {
namespace {

// Indices sorted by descending confidence; ties keep input order.
std::vector<size_t> rank_order(const std::vector<ScoredPrediction>& preds) {
    std::vector<size_t> idx(preds.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return preds[a].score > preds[b].score; });
    return idx;
}

} // namespace

std::vector<ReliabilityBin> reliability_bins(const std::vector<ScoredPrediction>& preds, int bins) {
    if (bins < 1) throw config_error("reliability bins require bins >= 1");
    if (std::ssize(preds) < bins)
        throw config_error("need at least " + std::to_string(bins) + " predictions for " + std::to_string(bins) +
                           " bins, got " + std::to_string(preds.size()));
    const std::vector<size_t> idx = rank_order(preds);
    const size_t n = preds.size();
    const size_t base = n / bins;
    const size_t extra = n % bins; // the highest-confidence bins absorb the remainder

    std::vector<ReliabilityBin> out;
    out.reserve(bins);
    size_t start = 0;
    for (int b = 0; b < bins; ++b) {
        const size_t size = base + (size_t(b) < extra ? 1 : 0);
        double conf_sum = 0.0;
        int correct = 0;
        for (size_t k = start; k < start + size; ++k) {
            conf_sum += preds[idx[k]].score;
            correct += preds[idx[k]].correct ? 1 : 0;
        }
        out.push_back({b, conf_sum / double(size), double(correct) / double(size), int(size)});
        start += size;
    }
    return out;
}

double ece(const std::vector<ScoredPrediction>& preds, int bins) {
    double total = 0.0;
    for (const auto& bin : reliability_bins(preds, bins)) total += std::abs(bin.mean_confidence - bin.accuracy);
    return total / double(bins);
}

double roc_auc(const std::vector<ScoredPrediction>& preds) {
    std::vector<size_t> idx(preds.size());
    std::iota(idx.begin(), idx.end(), size_t{0});
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return preds[a].score < preds[b].score; });

    int64_t positives = 0;
    for (const auto& p : preds) positives += p.correct ? 1 : 0;
    const int64_t negatives = std::ssize(preds) - positives;
    if (positives == 0 || negatives == 0) throw config_error("degenerate labels");

    // Twice the positive rank sum, with tied scores sharing their average
    // rank: a tie group over 1-based ranks [i..j] contributes i+j per member.
    int64_t rank2_pos = 0;
    size_t i = 0;
    while (i < idx.size()) {
        size_t j = i;
        while (j + 1 < idx.size() && preds[idx[j + 1]].score == preds[idx[i]].score) ++j;
        const int64_t rank2 = int64_t(i + 1) + int64_t(j + 1);
        for (size_t k = i; k <= j; ++k)
            if (preds[idx[k]].correct) rank2_pos += rank2;
        i = j + 1;
    }
    const int64_t u2 = rank2_pos - positives * (positives + 1); // 2U
    return double(u2) / (2.0 * double(positives) * double(negatives));
}

double cov_at_acc(const std::vector<ScoredPrediction>& preds, double target_acc) {
    if (preds.empty()) throw config_error("cov_at_acc requires at least one prediction");
    if (!(target_acc > 0.0 && target_acc <= 100.0))
        throw config_error("target accuracy must lie in (0, 100], got " + std::to_string(target_acc));
    const std::vector<size_t> idx = rank_order(preds);
    size_t best = 0;
    int correct = 0;
    for (size_t k = 1; k <= idx.size(); ++k) {
        correct += preds[idx[k - 1]].correct ? 1 : 0;
        if (double(correct) / double(k) >= target_acc / 100.0) best = k;
    }
    return 100.0 * double(best) / double(preds.size());
}

std::vector<CoveragePoint> coverage_accuracy_curve(const std::vector<ScoredPrediction>& preds) {
    const std::vector<size_t> idx = rank_order(preds);
    std::vector<CoveragePoint> curve;
    curve.reserve(idx.size());
    int correct = 0;
    for (size_t k = 1; k <= idx.size(); ++k) {
        correct += preds[idx[k - 1]].correct ? 1 : 0;
        curve.push_back({100.0 * double(k) / double(idx.size()), double(correct) / double(k)});
    }
    return curve;
}

std::optional<std::string> selective_answer(const std::vector<std::pair<std::string, double>>& candidates,
                                            const SelectivePolicy& policy) {
    if (candidates.empty()) return std::nullopt;
    size_t best = 0;
    for (size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].second > candidates[best].second) best = i;
    if (candidates[best].second > policy.tau) return candidates[best].first;
    return std::nullopt; // abstain, including at score == tau
}

double exact_match_rate(const std::vector<ScoredPrediction>& preds) {
    if (preds.empty()) throw config_error("exact_match_rate requires at least one prediction");
    int correct = 0;
    for (const auto& p : preds) correct += p.correct ? 1 : 0;
    return double(correct) / double(preds.size());
}

} // namespace selectqa
