#pragma once

#include <stdexcept>
#include <string>

namespace selectqa {

// Bad inputs: CLI flags, dataset files, prompt pools. CLI exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Generation-side failures: transport, malformed responses, unknown mock keys.
// CLI exit code 2.
struct backend_error : std::runtime_error {
    explicit backend_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace selectqa
