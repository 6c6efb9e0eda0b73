#pragma once

#include <string>
#include <string_view>

namespace selectqa {

// Maps raw generated text into the answer space used for exact match:
// lowercase, Unicode punctuation (general categories P*) removed, whitespace
// runs collapsed to single spaces, ends trimmed. Idempotent, and never
// longer than the input in code points. Invalid UTF-8 bytes decode as U+FFFD.
std::string normalize(std::string_view text);

// Exact match after normalization.
bool answers_match(std::string_view a, std::string_view b);

} // namespace selectqa
