#include "selectqa/normalize.hpp"

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <vector>

namespace selectqa {
namespace {

#include "unicode_tables.inc"

bool is_punct(char32_t cp) {
    auto it = std::upper_bound(std::begin(kPunctRanges), std::end(kPunctRanges), cp,
                               [](char32_t v, const CpRange& r) { return v < r.lo; });
    if (it == std::begin(kPunctRanges)) return false;
    --it;
    return cp >= it->lo && cp <= it->hi;
}

char32_t to_lower(char32_t cp) {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    auto it = std::lower_bound(std::begin(kLowerPairs), std::end(kLowerPairs), cp,
                               [](const CpPair& p, char32_t v) { return p.from < v; });
    if (it != std::end(kLowerPairs) && it->from == cp) return it->to;
    return cp;
}

bool is_space(char32_t cp) {
    for (char32_t w : kWhitespace)
        if (cp == w) return true;
    return false;
}

constexpr char32_t kReplacement = 0xFFFD;

// Decodes the next code point; ill-formed sequences yield U+FFFD and advance
// one byte.
char32_t decode_utf8(std::string_view s, size_t& i) {
    auto byte = [&](size_t k) { return static_cast<uint8_t>(s[k]); };
    uint8_t b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + len > s.size()) {
        ++i;
        return kReplacement;
    }
    for (int k = 1; k < len; ++k) {
        uint8_t b = byte(i + k);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms and surrogates.
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return kReplacement;
    }
    i += len;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

} // namespace

std::string normalize(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    size_t i = 0;
    while (i < text.size()) {
        char32_t cp = decode_utf8(text, i);
        if (is_punct(cp)) continue;
        cp = to_lower(cp);
        if (is_space(cp)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        encode_utf8(cp, out);
    }
    return out;
}

bool answers_match(std::string_view a, std::string_view b) {
    return normalize(a) == normalize(b);
}

} // namespace selectqa
