#include "selectqa/mock_model.hpp"

#include "selectqa/error.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <random>

namespace selectqa {
namespace {

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t mix(uint64_t a, uint64_t b) {
    // splitmix64 finalizer over the combined value
    uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// The question is whatever follows the last question-marker line.
std::string question_from_prompt(const std::string& prompt, const Markers& markers) {
    const std::string needle = "\n" + markers.question + " ";
    size_t pos;
    if (prompt.rfind(markers.question + " ", 0) == 0 && prompt.find(needle) == std::string::npos)
        pos = 0;
    else {
        pos = prompt.rfind(needle);
        if (pos == std::string::npos) return {};
        pos += 1;
    }
    size_t start = pos + markers.question.size() + 1;
    size_t end = prompt.find('\n', start);
    if (end == std::string::npos) end = prompt.size();
    return std::string(trim(std::string_view(prompt).substr(start, end - start)));
}

Completion one_token(std::string text, double logprob) {
    Completion c;
    c.token_logprobs.push_back({text, logprob});
    c.text = std::move(text);
    c.finish_reason = FinishReason::Stop;
    return c;
}

} // namespace

MockModel::MockModel(std::map<std::string, MockAnswerDist> questions, Markers markers)
    : questions_(std::move(questions)), markers_(std::move(markers)) {
    for (const auto& [question, dist] : questions_) {
        if (dist.probabilities.empty())
            throw config_error("mock distribution for \"" + question + "\" is empty");
        double total = 0.0;
        for (const auto& [answer, p] : dist.probabilities) {
            if (p < 0.0) throw config_error("mock distribution for \"" + question + "\" has negative probability");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw config_error("mock distribution for \"" + question + "\" sums to " + std::to_string(total));
    }
}

const MockAnswerDist& MockModel::dist_for(const std::string& question) const {
    auto it = questions_.find(question);
    if (it == questions_.end()) throw backend_error("mock model has no distribution for question: " + question);
    return it->second;
}

const std::string& MockModel::draw(const std::string& question, uint64_t seed, int sample_index) const {
    const MockAnswerDist& dist = dist_for(question);
    std::mt19937_64 rng(mix(seed ^ fnv1a64(question), uint64_t(sample_index)));
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double cum = 0.0;
    const std::string* last = nullptr;
    for (const auto& [answer, p] : dist.probabilities) {
        cum += p;
        last = &answer;
        if (u < cum) return answer;
    }
    return *last; // u landed in the rounding slack at the top
}

Completion MockModel::complete(const CompletionRequest& request) {
    const std::string question = question_from_prompt(request.prompt, markers_);

    // Verification prompts score the True/False position instead of answering.
    if (request.prompt.find("\nProposed answer: ") != std::string::npos) {
        const MockAnswerDist& dist = dist_for(question);
        if (dist.verification_true_prob < 0.0)
            throw backend_error("mock model has no verification probability for question: " + question);
        const double p_true = dist.verification_true_prob;
        if (request.temperature == 0.0)
            return p_true >= 0.5 ? one_token("True", std::log(p_true)) : one_token("False", std::log1p(-p_true));
        std::mt19937_64 rng(mix(request.seed ^ fnv1a64(question), 0x5eedull + uint64_t(request.sample_index)));
        bool t = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p_true;
        return t ? one_token("True", std::log(p_true)) : one_token("False", std::log1p(-p_true));
    }

    const MockAnswerDist& dist = dist_for(question);
    if (request.temperature == 0.0) {
        // Mode; ties go to the lexicographically smallest answer, which is the
        // first maximal entry of the ordered map.
        const std::string* best = nullptr;
        double best_p = -1.0;
        for (const auto& [answer, p] : dist.probabilities) {
            if (p > best_p) {
                best_p = p;
                best = &answer;
            }
        }
        return one_token(*best, std::log(best_p));
    }
    const std::string& answer = draw(question, request.seed, request.sample_index);
    return one_token(answer, std::log(dist.probabilities.at(answer)));
}

MockModel MockModel::from_json_file(const std::string& path, Markers markers) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open mock config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error("invalid mock config " + path + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("questions") || !j["questions"].is_object())
        throw config_error("mock config must be an object with a \"questions\" map");
    std::map<std::string, MockAnswerDist> questions;
    for (const auto& [question, spec] : j["questions"].items()) {
        MockAnswerDist dist;
        if (!spec.is_object() || !spec.contains("answers") || !spec["answers"].is_object())
            throw config_error("mock config entry for \"" + question + "\" needs an \"answers\" map");
        for (const auto& [answer, p] : spec["answers"].items()) {
            if (!p.is_number()) throw config_error("mock probability for \"" + answer + "\" must be a number");
            dist.probabilities[answer] = p.get<double>();
        }
        if (spec.contains("verification_true_prob"))
            dist.verification_true_prob = spec["verification_true_prob"].get<double>();
        questions.emplace(question, std::move(dist));
    }
    return MockModel(std::move(questions), std::move(markers));
}

} // namespace selectqa
