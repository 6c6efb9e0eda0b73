#pragma once

#include <string>
#include <string_view>

namespace selectqa {

// SHA-256 digest as a lowercase hex string. Used for cache file names and
// prompt digests, not for security.
std::string sha256_hex(std::string_view data);

} // namespace selectqa
