#pragma once

#include <optional>
#include <string>
#include <vector>

namespace selectqa {

// One unambiguous reading of an ambiguous question, with its answers.
struct Disambiguation {
    std::string question;
    std::vector<std::string> answers;
};

// A question plus its reference answers. For ambiguous questions the
// disambiguations carry the alternative interpretations and their answers.
// Immutable after load; safe to share across threads.
struct QuestionRecord {
    std::string id;
    std::string question;
    std::vector<std::string> answers;
    std::optional<bool> ambiguous;
    std::vector<Disambiguation> disambiguations;
    std::optional<std::string> long_answer;
};

// Loads a dataset from a UTF-8 file with one JSON record per line (see the
// README for the field list). Preserves file order. Throws config_error on a
// malformed line (naming its line number), a duplicate id, an empty answers
// list, or ambiguous=true with no disambiguations. Unknown fields are ignored.
std::vector<QuestionRecord> load_dataset(const std::string& path);

// Parses records from an already-loaded buffer; line numbers in errors are
// 1-based offsets into the buffer.
std::vector<QuestionRecord> parse_dataset(const std::string& content);

// True iff the normalized answer equals the normalization of any gold answer:
// record.answers plus every disambiguation's answers, as one union. Adding a
// disambiguation can only turn false into true.
bool is_correct(const std::string& answer, const QuestionRecord& record);

} // namespace selectqa
