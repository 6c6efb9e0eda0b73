#include "selectqa/confidence.hpp"

#include "selectqa/error.hpp"
#include "selectqa/normalize.hpp"

#include <cmath>
#include <set>

namespace selectqa {

std::string to_string(Scorer scorer) {
    switch (scorer) {
    case Scorer::Likelihood: return "likelihood";
    case Scorer::Repetition: return "repetition";
    case Scorer::Diversity: return "diversity";
    case Scorer::Verification: return "verification";
    }
    return "repetition";
}

Scorer scorer_from_string(const std::string& name) {
    if (name == "likelihood") return Scorer::Likelihood;
    if (name == "repetition") return Scorer::Repetition;
    if (name == "diversity") return Scorer::Diversity;
    if (name == "verification") return Scorer::Verification;
    throw config_error("unknown scorer: " + name);
}

double likelihood_score(const SampleSet& set) {
    if (set.greedy.token_logprobs.empty())
        throw config_error("likelihood_score requires token logprobs on the greedy completion");
    return std::exp(set.greedy.sum_logprob());
}

double repetition_score(const SampleSet& set, const Markers& markers) {
    const std::string greedy = normalize(parse_generation(set.greedy.text, markers).answer);
    int matches = 0;
    for (const auto& sample : set.samples)
        if (normalize(parse_generation(sample.text, markers).answer) == greedy) ++matches;
    return double(matches) / double(set.samples.size());
}

double diversity_score(const SampleSet& set, const Markers& markers) {
    std::set<std::string> unique;
    for (const auto& sample : set.samples) unique.insert(normalize(parse_generation(sample.text, markers).answer));
    return 1.0 - double(unique.size()) / double(set.samples.size());
}

double verification_score(Backend& backend, const std::string& question, const SampleSet& set,
                          const CompletionRequest& base, const Markers& markers) {
    std::vector<std::string> candidates;
    candidates.reserve(set.samples.size());
    for (const auto& sample : set.samples) candidates.push_back(parse_generation(sample.text, markers).answer);
    const std::string proposed = parse_generation(set.greedy.text, markers).answer;

    CompletionRequest req = base;
    req.prompt = build_verification_prompt(question, candidates, proposed, markers);
    req.temperature = 0.0;
    req.max_tokens = 1;
    req.want_logprobs = true;
    req.sample_index = 0;

    const Completion scored = backend.complete(req);
    if (scored.token_logprobs.empty())
        throw backend_error("verification scoring returned no token logprobs");
    const auto& first = scored.token_logprobs.front();
    std::string token = first.token;
    while (!token.empty() && (token.front() == ' ' || token.front() == '\n')) token.erase(token.begin());
    while (!token.empty() && (token.back() == ' ' || token.back() == '\n')) token.pop_back();
    if (token == "True") return std::exp(first.logprob);
    if (token == "False") return 1.0 - std::exp(first.logprob);
    return 0.0;
}

} // namespace selectqa
