#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "selectqa/error.hpp"
#include "selectqa/normalize.hpp"
#include "selectqa/qa_data.hpp"

#include <random>
#include <string>

using namespace selectqa;

namespace {

const char* kTwoRecords =
    R"({"id": "q1", "question": "who wrote hamlet", "answers": ["Shakespeare"]})"
    "\n"
    R"({"id": "q2", "question": "where does the new fallout game take place", "answers": ["Appalachia"], "ambiguous": true, "disambiguations": [{"question": "Where does the fallout 76 game take place?", "answers": ["appalachia"]}]})"
    "\n";

} // namespace

TEST_CASE("parse_dataset keeps file order and ids") {
    const auto records = parse_dataset(kTwoRecords);
    REQUIRE(records.size() == 2);
    CHECK(records[0].id == "q1");
    CHECK(records[1].id == "q2");
    CHECK(records[1].ambiguous == true);
    REQUIRE(records[1].disambiguations.size() == 1);
    CHECK(records[1].disambiguations[0].answers[0] == "appalachia");
}

TEST_CASE("parse_dataset names the offending line") {
    SUBCASE("missing question") {
        const std::string text = std::string(kTwoRecords) + R"({"id": "q3", "answers": ["x"]})" + "\n";
        CHECK_THROWS_WITH_AS(parse_dataset(text), doctest::Contains("line 3"), config_error);
    }
    SUBCASE("invalid json") {
        CHECK_THROWS_WITH_AS(parse_dataset("{not json\n"), doctest::Contains("line 1"), config_error);
    }
    SUBCASE("duplicate id") {
        const std::string text = std::string(kTwoRecords) +
                                 R"({"id": "q1", "question": "again", "answers": ["x"]})" + "\n";
        CHECK_THROWS_WITH_AS(parse_dataset(text), doctest::Contains("duplicate id"), config_error);
    }
    SUBCASE("empty answers") {
        CHECK_THROWS_AS(parse_dataset(R"({"id": "a", "question": "q", "answers": []})"), config_error);
    }
    SUBCASE("ambiguous without disambiguations") {
        CHECK_THROWS_AS(
            parse_dataset(R"({"id": "a", "question": "q", "answers": ["x"], "ambiguous": true, "disambiguations": []})"),
            config_error);
    }
}

TEST_CASE("unknown fields are ignored") {
    const auto records =
        parse_dataset(R"({"id": "a", "question": "q", "answers": ["x"], "source": "nq", "viewed_doc_titles": []})");
    REQUIRE(records.size() == 1);
    CHECK(records[0].answers[0] == "x");
}

TEST_CASE("is_correct matches any disambiguation answer") {
    const auto records = parse_dataset(kTwoRecords);
    const QuestionRecord& fallout = records[1];
    CHECK(is_correct("Appalachia", fallout));
    CHECK(is_correct("appalachia", fallout));
    CHECK_FALSE(is_correct("Boston", fallout));

    QuestionRecord r;
    r.id = "r";
    r.question = "q";
    r.answers = {"x"};
    CHECK_FALSE(is_correct("", r));

    QuestionRecord paris;
    paris.id = "p";
    paris.question = "q";
    paris.answers = {"Paris"};
    CHECK(is_correct("paris!", paris));
}

TEST_CASE("is_correct is invariant under normalization and monotone in the gold set") {
    std::mt19937_64 rng(99);
    const std::vector<std::string> answers = {"Paris", "New York!", "  Appalachia", "U.S.A.", "東京", "42"};
    std::uniform_int_distribution<size_t> pick(0, answers.size() - 1);
    for (int i = 0; i < 300; ++i) {
        QuestionRecord r;
        r.id = "r";
        r.question = "q";
        r.answers = {answers[pick(rng)]};
        const std::string candidate = answers[pick(rng)];

        const bool before = is_correct(candidate, r);
        CHECK(is_correct(normalize(candidate), r) == before);

        Disambiguation d;
        d.question = "which?";
        d.answers = {answers[pick(rng)]};
        r.disambiguations.push_back(d);
        const bool after = is_correct(candidate, r);
        if (before) CHECK(after); // gold set only grows
    }
}
