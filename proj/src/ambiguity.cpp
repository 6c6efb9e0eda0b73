#include "selectqa/ambiguity.hpp"

#include "selectqa/confidence.hpp"
#include "selectqa/error.hpp"
#include "selectqa/normalize.hpp"

namespace selectqa {

std::string to_string(AmbiguityMethod method) {
    switch (method) {
    case AmbiguityMethod::GreedyDisambig: return "greedy_disambig";
    case AmbiguityMethod::VotingDisambig: return "voting_disambig";
    case AmbiguityMethod::NumDisagreements: return "num_disagreements";
    case AmbiguityMethod::NumAnswers: return "num_answers";
    case AmbiguityMethod::GreedyDirect: return "greedy_direct";
    case AmbiguityMethod::VotingDirect: return "voting_direct";
    }
    return "greedy_disambig";
}

AmbiguityMethod ambiguity_method_from_string(const std::string& name) {
    if (name == "greedy_disambig") return AmbiguityMethod::GreedyDisambig;
    if (name == "voting_disambig") return AmbiguityMethod::VotingDisambig;
    if (name == "num_disagreements") return AmbiguityMethod::NumDisagreements;
    if (name == "num_answers") return AmbiguityMethod::NumAnswers;
    if (name == "greedy_direct") return AmbiguityMethod::GreedyDirect;
    if (name == "voting_direct") return AmbiguityMethod::VotingDirect;
    throw config_error("unknown ambiguity method: " + name);
}

double greedy_disambig(const SampleSet& set, const Markers& markers) {
    return parse_generation(set.greedy.text, markers).disambiguation ? 1.0 : 0.0;
}

double voting_disambig(const SampleSet& set, const Markers& markers) {
    int count = 0;
    for (const auto& sample : set.samples)
        if (parse_generation(sample.text, markers).disambiguation) ++count;
    return double(count) / double(set.samples.size());
}

double num_disagreements(const SampleSet& set, const Markers& markers) {
    return 1.0 - repetition_score(set, markers);
}

double num_answers(const SampleSet& set, const Markers& markers) {
    return 1.0 - diversity_score(set, markers);
}

double direct_prediction(const SampleSet& set, DirectMode mode, const Markers& markers) {
    auto is_ambiguous = [&](const Completion& c) {
        return normalize(parse_generation(c.text, markers).answer) == "ambiguous";
    };
    if (mode == DirectMode::Greedy) return is_ambiguous(set.greedy) ? 1.0 : 0.0;
    int count = 0;
    for (const auto& sample : set.samples)
        if (is_ambiguous(sample)) ++count;
    return double(count) / double(set.samples.size());
}

std::vector<PrPoint> precision_recall_curve(const std::vector<AmbiguityScore>& scores, int num_samples) {
    if (num_samples < 1) throw config_error("precision_recall_curve requires num_samples >= 1");
    int positives = 0, negatives = 0;
    for (const auto& s : scores) {
        if (!s.label) throw config_error("precision_recall_curve requires a label on every score");
        (*s.label ? positives : negatives)++;
    }
    if (positives == 0 || negatives == 0) throw config_error("degenerate labels");

    std::vector<PrPoint> curve;
    for (int k = 0; k <= num_samples; ++k) {
        const double threshold = double(k) / double(num_samples);
        int tp = 0, fp = 0, fn = 0;
        for (const auto& s : scores) {
            const bool predicted = s.score >= threshold;
            if (predicted && *s.label) ++tp;
            else if (predicted) ++fp;
            else if (*s.label) ++fn;
        }
        if (tp + fp == 0) continue;
        const double precision = double(tp) / double(tp + fp);
        const double recall = double(tp) / double(tp + fn);
        // Neighbouring thresholds often classify identically; keep one point.
        if (!curve.empty() && curve.back().precision == precision && curve.back().recall == recall) continue;
        curve.push_back({threshold, precision, recall});
    }
    return curve;
}

} // namespace selectqa
