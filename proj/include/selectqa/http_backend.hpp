#pragma once

#include "selectqa/backend.hpp"

#include <string>

namespace selectqa {

struct HttpBackendOptions {
    std::string host = "localhost";
    int port = 8080;
    std::string path = "/v1/complete";
    int max_retries = 3;       // attempts beyond the first
    int backoff_initial_ms = 200;
    int backoff_max_ms = 5000;
    int timeout_seconds = 60;
};

// Parses "host:port" or "http://host:port/path".
HttpBackendOptions parse_endpoint(const std::string& endpoint, HttpBackendOptions base = {});

// Client for the completion wire protocol: POST {model, prompt, temperature,
// max_tokens, logprobs, stop, seed} -> {text, tokens, finish_reason}.
// Transport failures and 5xx responses are retried with bounded exponential
// backoff; anything else fails fast. After retries are exhausted, throws
// backend_error naming the request digest.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendOptions options);

    Completion complete(const CompletionRequest& request) override;

private:
    HttpBackendOptions options_;
};

} // namespace selectqa
