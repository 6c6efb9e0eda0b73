#pragma once

#include "selectqa/qa_data.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace selectqa {

// One in-context example. An exemplar with a disambiguation renders with an
// interpretation line and answers its disambiguated question.
struct Exemplar {
    std::string question;
    std::string answer;
    std::optional<std::string> disambiguation;
    std::optional<std::string> long_answer;
};

enum class PromptStyle {
    Qa,              // plain question/answer pairs
    Disambig,        // half the exemplars carry an interpretation line
    DirectAmbiguity, // exemplar answers are the literals Ambiguous/Unambiguous
    Verification,    // built via build_verification_prompt, not build_prompt
    Unknown,         // two exemplar answers replaced with the literal Unknown
    CotShortLong,    // short answer, then long answer
    CotLongShort,    // long answer, then short answer
};

std::string to_string(PromptStyle style);
PromptStyle prompt_style_from_string(const std::string& name);

// Template marker lines. The wording is a project convention, configurable
// through the CLI. Parsing accepts any of answer_aliases so that generations
// writing "Answer:" instead of "A:" still parse.
struct Markers {
    std::string question = "Q:";
    std::string interpretation = "Question interpretation:";
    std::string answer = "A:";
    std::string long_answer = "Long answer:";
    std::vector<std::string> answer_aliases = {"A:", "Answer:"};
};

struct PromptSpec {
    PromptStyle style = PromptStyle::Qa;
    // 0 means the style default: 4 for qa and the cot styles, 6 otherwise.
    int num_exemplars = 0;
    uint64_t seed = 0;
    Markers markers;
};

int default_num_exemplars(PromptStyle style);

// Structured view of one generation.
struct ParsedGeneration {
    std::optional<std::string> disambiguation;
    std::string answer;
    std::string raw;
};

// Builds the few-shot prompt for one question. Pure function of its
// arguments: exemplars are drawn without replacement with an RNG seeded from
// spec.seed XOR a hash of the question text, so every question sees a
// different but reproducible exemplar selection.
//
// Style rules:
//   qa             exemplars render as question/answer pairs
//   disambig       num_exemplars/2 exemplars carry an interpretation line
//   direct         balanced like disambig; answers become Ambiguous/Unambiguous
//   unknown        two randomly chosen exemplar answers become "Unknown"
//   cot_*          long and short answer lines in the requested order
//
// qa/unknown/direct prompts end with an answer marker awaiting completion;
// disambig and cot prompts end after the question line so the model may emit
// interpretation or long-answer lines first.
//
// Throws config_error when the pool cannot satisfy the style (message names
// the style and required count).
std::string build_prompt(const PromptSpec& spec, std::span<const Exemplar> pool, const std::string& question);

// Self-verification prompt: the question, every candidate answer verbatim
// (duplicates kept), and the proposed answer. Ends where the next token is
// scored as True/False. Throws config_error when candidates is empty.
std::string build_verification_prompt(const std::string& question, std::span<const std::string> candidates,
                                      const std::string& proposed, const Markers& markers = {});

// Splits a generation on the marker lines. An interpretation marker populates
// disambiguation; the answer is the text after the first answer marker, or
// the first non-empty line when no marker is present. Never throws; anything
// unparseable degrades to (no disambiguation, first line).
ParsedGeneration parse_generation(const std::string& raw, const Markers& markers = {});

// Derives the exemplar pool from training records. Ambiguous records
// contribute their first disambiguation as the interpretation and answer it;
// unambiguous records contribute their first gold answer.
std::vector<Exemplar> make_exemplar_pool(std::span<const QuestionRecord> records);

} // namespace selectqa
