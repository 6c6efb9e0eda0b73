#include "selectqa/http_backend.hpp"

#include "selectqa/error.hpp"
#include "selectqa/sha256.hpp"

#include <httplib.h>

#include <chrono>
#include <thread>

namespace selectqa {

HttpBackendOptions parse_endpoint(const std::string& endpoint, HttpBackendOptions base) {
    std::string rest = endpoint;
    if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);
    std::string host_port = rest;
    if (size_t slash = rest.find('/'); slash != std::string::npos) {
        host_port = rest.substr(0, slash);
        base.path = rest.substr(slash);
    }
    size_t colon = host_port.rfind(':');
    if (colon == std::string::npos) throw config_error("endpoint must be host:port[/path], got: " + endpoint);
    base.host = host_port.substr(0, colon);
    try {
        base.port = std::stoi(host_port.substr(colon + 1));
    } catch (const std::exception&) {
        throw config_error("invalid port in endpoint: " + endpoint);
    }
    if (base.host.empty() || base.port <= 0) throw config_error("invalid endpoint: " + endpoint);
    return base;
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {}

Completion HttpBackend::complete(const CompletionRequest& request) {
    const std::string body = encode_request(request);
    std::string last_failure;

    int delay_ms = options_.backoff_initial_ms;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
            delay_ms = std::min(delay_ms * 2, options_.backoff_max_ms);
        }
        httplib::Client client(options_.host, options_.port);
        client.set_connection_timeout(options_.timeout_seconds);
        client.set_read_timeout(options_.timeout_seconds);
        client.set_write_timeout(options_.timeout_seconds);

        auto res = client.Post(options_.path, body, "application/json");
        if (!res) {
            last_failure = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_failure = "server error: HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw backend_error("completion request rejected: HTTP " + std::to_string(res->status) +
                                " (request " + sha256_hex(body).substr(0, 12) + ")");
        return decode_completion(res->body);
    }
    throw backend_error("completion request failed after " + std::to_string(options_.max_retries + 1) +
                        " attempts: " + last_failure + " (request " + sha256_hex(body).substr(0, 12) + ")");
}

} // namespace selectqa
