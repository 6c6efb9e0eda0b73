#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "selectqa/error.hpp"
#include "selectqa/prompting.hpp"

#include <random>

using namespace selectqa;

namespace {

std::vector<Exemplar> mixed_pool() {
    std::vector<Exemplar> pool;
    for (int i = 0; i < 8; ++i) {
        Exemplar ex;
        ex.question = "plain question " + std::to_string(i);
        ex.answer = "answer " + std::to_string(i);
        ex.long_answer = "a longer account of answer " + std::to_string(i);
        pool.push_back(ex);
    }
    for (int i = 0; i < 6; ++i) {
        Exemplar ex;
        ex.question = "ambiguous question " + std::to_string(i);
        ex.answer = "disambiguated answer " + std::to_string(i);
        ex.disambiguation = "which reading of question " + std::to_string(i) + "?";
        pool.push_back(ex);
    }
    return pool;
}

size_t count_lines_starting(const std::string& text, const std::string& prefix) {
    size_t count = 0, pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, (nl == std::string::npos ? text.size() : nl) - pos);
        if (line.rfind(prefix, 0) == 0) ++count;
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    return count;
}

} // namespace

TEST_CASE("build_prompt is deterministic under a fixed seed") {
    const auto pool = mixed_pool();
    PromptSpec spec;
    spec.seed = 42;
    const std::string a = build_prompt(spec, pool, "who wrote hamlet");
    const std::string b = build_prompt(spec, pool, "who wrote hamlet");
    CHECK(a == b);
    spec.seed = 43;
    CHECK(build_prompt(spec, pool, "who wrote hamlet") != a);
    // different questions get different exemplar selections
    spec.seed = 42;
    CHECK(build_prompt(spec, pool, "who wrote macbeth") != a);
}

TEST_CASE("qa prompts use four exemplars and end at the answer marker") {
    const auto pool = mixed_pool();
    PromptSpec spec;
    spec.seed = 1;
    const std::string prompt = build_prompt(spec, pool, "who wrote hamlet");
    CHECK(count_lines_starting(prompt, "Q: ") == 5); // 4 exemplars + the question
    CHECK(prompt.ends_with("Q: who wrote hamlet\nA:"));
}

TEST_CASE("disambig prompts carry exactly three interpretation lines of six exemplars") {
    const auto pool = mixed_pool();
    PromptSpec spec;
    spec.style = PromptStyle::Disambig;
    for (uint64_t seed = 0; seed < 25; ++seed) {
        spec.seed = seed;
        const std::string prompt = build_prompt(spec, pool, "where does the new fallout game take place");
        CHECK(count_lines_starting(prompt, "Q: ") == 7);
        CHECK(count_lines_starting(prompt, "Question interpretation: ") == 3);
        CHECK(prompt.ends_with("Q: where does the new fallout game take place\n"));
    }
}

TEST_CASE("unknown prompts replace exactly two answers with Unknown") {
    const auto pool = mixed_pool();
    PromptSpec spec;
    spec.style = PromptStyle::Unknown;
    for (uint64_t seed = 0; seed < 25; ++seed) {
        spec.seed = seed;
        const std::string prompt = build_prompt(spec, pool, "q");
        CHECK(count_lines_starting(prompt, "A: Unknown") == 2);
        CHECK(count_lines_starting(prompt, "Q: ") == 7);
    }
}

TEST_CASE("direct ambiguity prompts label exemplars Ambiguous or Unambiguous") {
    const auto pool = mixed_pool();
    PromptSpec spec;
    spec.style = PromptStyle::DirectAmbiguity;
    spec.seed = 5;
    const std::string prompt = build_prompt(spec, pool, "q");
    CHECK(count_lines_starting(prompt, "A: Ambiguous") == 3);
    CHECK(count_lines_starting(prompt, "A: Unambiguous") == 3);
    CHECK(count_lines_starting(prompt, "Question interpretation:") == 0);
}

TEST_CASE("cot prompts order the long and short answers") {
    const auto pool = mixed_pool();
    PromptSpec spec;
    spec.seed = 9;

    spec.style = PromptStyle::CotLongShort;
    std::string prompt = build_prompt(spec, pool, "q");
    size_t long_pos = prompt.find("Long answer: ");
    size_t short_pos = prompt.find("A: ");
    REQUIRE(long_pos != std::string::npos);
    REQUIRE(short_pos != std::string::npos);
    CHECK(long_pos < short_pos);
    CHECK(prompt.ends_with("Q: q\n"));

    spec.style = PromptStyle::CotShortLong;
    prompt = build_prompt(spec, pool, "q");
    CHECK(prompt.find("A: ") < prompt.find("Long answer: "));
}

TEST_CASE("insufficient pools are reported with style and count") {
    std::vector<Exemplar> tiny(2, Exemplar{"q", "a", std::nullopt, std::nullopt});
    PromptSpec spec;
    CHECK_THROWS_WITH_AS(build_prompt(spec, tiny, "q"), doctest::Contains("qa"), config_error);
    CHECK_THROWS_WITH_AS(build_prompt(spec, tiny, "q"), doctest::Contains("4"), config_error);

    spec.style = PromptStyle::Disambig; // no ambiguous exemplars at all
    std::vector<Exemplar> plain(8, Exemplar{"q", "a", std::nullopt, std::nullopt});
    CHECK_THROWS_WITH_AS(build_prompt(spec, plain, "q"), doctest::Contains("disambig"), config_error);
}

TEST_CASE("verification prompt lists candidates verbatim, duplicates kept") {
    std::vector<std::string> candidates = {"Paris", "Paris", "Lyon", "Paris"};
    const std::string prompt = build_verification_prompt("capital of france", candidates, "Paris");
    CHECK(count_lines_starting(prompt, "- Paris") == 3);
    CHECK(count_lines_starting(prompt, "- Lyon") == 1);
    CHECK(prompt.ends_with("Is the proposed answer true or false?\n"));

    const std::string single = build_verification_prompt("q", std::vector<std::string>{"a"}, "a");
    CHECK(count_lines_starting(single, "- ") == 1);

    CHECK_THROWS_AS(build_verification_prompt("q", std::vector<std::string>{}, "a"), config_error);
}

TEST_CASE("parse_generation splits marker lines") {
    const auto parsed =
        parse_generation("Question interpretation: Where does fallout 76 take place?\nAnswer: Appalachia");
    REQUIRE(parsed.disambiguation.has_value());
    CHECK(*parsed.disambiguation == "Where does fallout 76 take place?");
    CHECK(parsed.answer == "Appalachia");

    const auto bare = parse_generation("Appalachia");
    CHECK_FALSE(bare.disambiguation.has_value());
    CHECK(bare.answer == "Appalachia");

    const auto empty = parse_generation("");
    CHECK_FALSE(empty.disambiguation.has_value());
    CHECK(empty.answer.empty());

    // completion of a prompt that ended with "A:"
    const auto plain = parse_generation(" Paris\n");
    CHECK(plain.answer == "Paris");
    CHECK(plain.raw == " Paris\n");
}

TEST_CASE("parse round-trips rendered exemplars") {
    std::mt19937_64 rng(1234);
    const auto pool = mixed_pool();
    std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 200; ++i) {
        const Exemplar& ex = pool[pick(rng)];
        PromptSpec spec;
        spec.style = ex.disambiguation ? PromptStyle::Disambig : PromptStyle::Qa;
        spec.num_exemplars = ex.disambiguation ? 2 : 1;
        spec.seed = rng();
        std::vector<Exemplar> small = {ex};
        if (ex.disambiguation) small.push_back(Exemplar{"pad", "pad answer", std::nullopt, std::nullopt});
        const std::string prompt = build_prompt(spec, small, "probe");

        // locate the block rendered for ex (blocks are separated by blank lines)
        const std::string header = "Q: " + ex.question + "\n";
        const size_t start = prompt.find(header);
        REQUIRE(start != std::string::npos);
        size_t end = prompt.find("\n\n", start);
        if (end == std::string::npos) end = prompt.size();
        const ParsedGeneration parsed = parse_generation(prompt.substr(start, end - start), spec.markers);

        CHECK(parsed.answer == ex.answer);
        CHECK(parsed.disambiguation == ex.disambiguation);
    }
}
