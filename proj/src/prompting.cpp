#include "selectqa/prompting.hpp"

#include "selectqa/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

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

std::string_view trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool starts_with_marker(std::string_view line, std::string_view marker, std::string_view& rest) {
    if (line.substr(0, marker.size()) != marker) return false;
    rest = line.substr(marker.size());
    return true;
}

// Draws k distinct indices from [0, n), order randomized.
std::vector<size_t> sample_indices(std::mt19937_64& rng, size_t n, size_t k) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    for (size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<size_t> d(i, n - 1);
        std::swap(idx[i], idx[d(rng)]);
    }
    idx.resize(k);
    return idx;
}

void render_exemplar(std::ostringstream& out, const Exemplar& ex, PromptStyle style, const Markers& m) {
    out << m.question << ' ' << ex.question << '\n';
    switch (style) {
    case PromptStyle::Disambig:
        if (ex.disambiguation) out << m.interpretation << ' ' << *ex.disambiguation << '\n';
        out << m.answer << ' ' << ex.answer << '\n';
        break;
    case PromptStyle::DirectAmbiguity:
        out << m.answer << ' ' << (ex.disambiguation ? "Ambiguous" : "Unambiguous") << '\n';
        break;
    case PromptStyle::CotShortLong:
        out << m.answer << ' ' << ex.answer << '\n';
        out << m.long_answer << ' ' << ex.long_answer.value_or("") << '\n';
        break;
    case PromptStyle::CotLongShort:
        out << m.long_answer << ' ' << ex.long_answer.value_or("") << '\n';
        out << m.answer << ' ' << ex.answer << '\n';
        break;
    default:
        out << m.answer << ' ' << ex.answer << '\n';
        break;
    }
}

} // namespace

std::string to_string(PromptStyle style) {
    switch (style) {
    case PromptStyle::Qa: return "qa";
    case PromptStyle::Disambig: return "disambig";
    case PromptStyle::DirectAmbiguity: return "direct_ambiguity";
    case PromptStyle::Verification: return "verification";
    case PromptStyle::Unknown: return "unknown";
    case PromptStyle::CotShortLong: return "cot_short_long";
    case PromptStyle::CotLongShort: return "cot_long_short";
    }
    return "qa";
}

PromptStyle prompt_style_from_string(const std::string& name) {
    if (name == "qa") return PromptStyle::Qa;
    if (name == "disambig") return PromptStyle::Disambig;
    if (name == "direct_ambiguity") return PromptStyle::DirectAmbiguity;
    if (name == "verification") return PromptStyle::Verification;
    if (name == "unknown") return PromptStyle::Unknown;
    if (name == "cot_short_long") return PromptStyle::CotShortLong;
    if (name == "cot_long_short") return PromptStyle::CotLongShort;
    throw config_error("unknown prompt style: " + name);
}

int default_num_exemplars(PromptStyle style) {
    switch (style) {
    case PromptStyle::Qa:
    case PromptStyle::CotShortLong:
    case PromptStyle::CotLongShort: return 4;
    default: return 6;
    }
}

std::string build_prompt(const PromptSpec& spec, std::span<const Exemplar> pool, const std::string& question) {
    const PromptStyle style = spec.style;
    if (style == PromptStyle::Verification)
        throw config_error("verification prompts are built with build_verification_prompt");
    const int want = spec.num_exemplars > 0 ? spec.num_exemplars : default_num_exemplars(style);
    const Markers& m = spec.markers;

    std::mt19937_64 rng(spec.seed ^ fnv1a64(question));

    const bool needs_long = style == PromptStyle::CotShortLong || style == PromptStyle::CotLongShort;
    const bool balanced = style == PromptStyle::Disambig || style == PromptStyle::DirectAmbiguity;

    std::vector<Exemplar> chosen;
    if (balanced) {
        // Half the exemplars are ambiguous (carry an interpretation), half plain.
        const int ambig_want = want / 2;
        const int plain_want = want - ambig_want;
        std::vector<size_t> ambig, plain;
        for (size_t i = 0; i < pool.size(); ++i)
            (pool[i].disambiguation ? ambig : plain).push_back(i);
        if (std::ssize(ambig) < ambig_want)
            throw config_error("insufficient pool for style " + to_string(style) + ": need " +
                               std::to_string(ambig_want) + " ambiguous exemplars, have " +
                               std::to_string(ambig.size()));
        if (std::ssize(plain) < plain_want)
            throw config_error("insufficient pool for style " + to_string(style) + ": need " +
                               std::to_string(plain_want) + " unambiguous exemplars, have " +
                               std::to_string(plain.size()));
        for (size_t i : sample_indices(rng, ambig.size(), ambig_want)) chosen.push_back(pool[ambig[i]]);
        for (size_t i : sample_indices(rng, plain.size(), plain_want)) chosen.push_back(pool[plain[i]]);
        std::shuffle(chosen.begin(), chosen.end(), rng);
    } else {
        std::vector<size_t> eligible;
        for (size_t i = 0; i < pool.size(); ++i)
            if (!needs_long || pool[i].long_answer) eligible.push_back(i);
        if (std::ssize(eligible) < want)
            throw config_error("insufficient pool for style " + to_string(style) + ": need " +
                               std::to_string(want) + " exemplars, have " + std::to_string(eligible.size()));
        for (size_t i : sample_indices(rng, eligible.size(), size_t(want))) chosen.push_back(pool[eligible[i]]);
    }

    if (style == PromptStyle::Unknown) {
        // Two of the answers are replaced with the literal Unknown.
        const size_t replace = std::min<size_t>(2, chosen.size());
        for (size_t i : sample_indices(rng, chosen.size(), replace)) chosen[i].answer = "Unknown";
    }

    std::ostringstream out;
    for (const auto& ex : chosen) {
        render_exemplar(out, ex, style, m);
        out << '\n';
    }
    out << m.question << ' ' << question << '\n';
    const bool open_ended = style == PromptStyle::Disambig || style == PromptStyle::CotShortLong ||
                            style == PromptStyle::CotLongShort;
    if (!open_ended) out << m.answer;
    return out.str();
}

std::string build_verification_prompt(const std::string& question, std::span<const std::string> candidates,
                                      const std::string& proposed, const Markers& markers) {
    if (candidates.empty()) throw config_error("verification prompt requires at least one candidate answer");
    std::ostringstream out;
    out << markers.question << ' ' << question << '\n';
    out << "Possible answers:\n";
    for (const auto& c : candidates) out << "- " << c << '\n';
    out << "Proposed answer: " << proposed << '\n';
    out << "Is the proposed answer true or false?\n";
    return out.str();
}

ParsedGeneration parse_generation(const std::string& raw, const Markers& markers) {
    ParsedGeneration parsed;
    parsed.raw = raw;

    std::optional<std::string> first_line;
    std::optional<std::string> answer;
    size_t pos = 0;
    while (pos <= raw.size()) {
        size_t nl = raw.find('\n', pos);
        std::string_view line(raw.data() + pos, (nl == std::string::npos ? raw.size() : nl) - pos);
        pos = (nl == std::string::npos) ? raw.size() + 1 : nl + 1;

        std::string_view rest;
        if (!parsed.disambiguation && starts_with_marker(line, markers.interpretation, rest)) {
            parsed.disambiguation = std::string(trim(rest));
            continue;
        }
        if (!answer) {
            bool found = false;
            for (const auto& alias : markers.answer_aliases) {
                if (starts_with_marker(line, alias, rest)) {
                    answer = std::string(trim(rest));
                    found = true;
                    break;
                }
            }
            if (found) continue;
        }
        // Echoed question lines never count as the fallback answer.
        if (starts_with_marker(line, markers.question, rest)) continue;
        if (!first_line && !trim(line).empty()) first_line = std::string(trim(line));
    }

    parsed.answer = answer ? *answer : first_line.value_or("");
    return parsed;
}

std::vector<Exemplar> make_exemplar_pool(std::span<const QuestionRecord> records) {
    std::vector<Exemplar> pool;
    pool.reserve(records.size());
    for (const auto& rec : records) {
        Exemplar ex;
        ex.question = rec.question;
        ex.long_answer = rec.long_answer;
        if (!rec.disambiguations.empty()) {
            // The first disambiguation supplies the interpretation and its answer.
            ex.disambiguation = rec.disambiguations.front().question;
            ex.answer = rec.disambiguations.front().answers.front();
        } else {
            ex.answer = rec.answers.front();
        }
        pool.push_back(std::move(ex));
    }
    return pool;
}

} // namespace selectqa
