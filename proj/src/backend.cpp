#include "selectqa/backend.hpp"

#include "selectqa/error.hpp"
#include "selectqa/sha256.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace selectqa {

using nlohmann::json;
namespace fs = std::filesystem;

std::string to_string(FinishReason r) {
    switch (r) {
    case FinishReason::Stop: return "stop";
    case FinishReason::Length: return "length";
    case FinishReason::Error: return "error";
    }
    return "error";
}

FinishReason finish_reason_from_string(const std::string& s) {
    if (s == "stop") return FinishReason::Stop;
    if (s == "length") return FinishReason::Length;
    if (s == "error") return FinishReason::Error;
    throw backend_error("unknown finish_reason: " + s);
}

double Completion::sum_logprob() const {
    double total = 0.0;
    for (const auto& t : token_logprobs) total += t.logprob;
    return total;
}

SampleSet sample_set(Backend& backend, const CompletionRequest& base, int n, double t_greedy, double t_sample) {
    if (n < 1) throw config_error("sample_set requires n >= 1, got " + std::to_string(n));
    SampleSet set;
    set.prompt = base.prompt;
    set.prompt_digest = sha256_hex(base.prompt);

    CompletionRequest req = base;
    req.temperature = t_greedy;
    req.sample_index = 0;
    set.greedy = backend.complete(req);

    set.samples.reserve(n);
    for (int i = 1; i <= n; ++i) {
        req.temperature = t_sample;
        req.sample_index = i;
        set.samples.push_back(backend.complete(req));
    }
    return set;
}

uint64_t wire_seed(const CompletionRequest& request) {
    // splitmix64 finalizer over (seed, sample_index)
    uint64_t z = request.seed + 0x9e3779b97f4a7c15ull * (uint64_t(request.sample_index) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::string encode_request(const CompletionRequest& request) {
    json j;
    j["model"] = request.model_id;
    j["prompt"] = request.prompt;
    j["temperature"] = request.temperature;
    j["max_tokens"] = request.max_tokens;
    j["logprobs"] = request.want_logprobs;
    j["stop"] = request.stop_markers;
    j["seed"] = wire_seed(request);
    return j.dump();
}

std::string encode_completion(const Completion& completion) {
    json j;
    j["text"] = completion.text;
    json tokens = json::array();
    for (const auto& t : completion.token_logprobs) tokens.push_back({{"token", t.token}, {"logprob", t.logprob}});
    j["tokens"] = std::move(tokens);
    j["finish_reason"] = to_string(completion.finish_reason);
    return j.dump();
}

Completion decode_completion(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw backend_error(std::string("malformed completion response: ") + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() || !j.contains("finish_reason"))
        throw backend_error("malformed completion response: missing text/finish_reason");
    Completion c;
    c.text = j["text"].get<std::string>();
    c.finish_reason = finish_reason_from_string(j["finish_reason"].get<std::string>());
    if (j.contains("tokens")) {
        if (!j["tokens"].is_array()) throw backend_error("malformed completion response: tokens must be an array");
        for (const auto& t : j["tokens"]) {
            if (!t.is_object() || !t.contains("token") || !t.contains("logprob") || !t["logprob"].is_number())
                throw backend_error("malformed completion response: bad token entry");
            TokenLogprob tl{t["token"].get<std::string>(), t["logprob"].get<double>()};
            if (tl.logprob > 0.0)
                throw backend_error("malformed completion response: positive logprob " +
                                    std::to_string(tl.logprob));
            c.token_logprobs.push_back(std::move(tl));
        }
        if (!c.token_logprobs.empty()) {
            std::string concat;
            for (const auto& t : c.token_logprobs) concat += t.token;
            if (concat != c.text)
                throw backend_error("malformed completion response: tokens do not concatenate to text");
        }
    }
    return c;
}

DiskCache::DiskCache(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw config_error("cannot create cache directory " + dir_ + ": " + ec.message());
}

std::optional<std::string> DiskCache::load(const std::string& key) const {
    std::ifstream in(fs::path(dir_) / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void DiskCache::store(const std::string& key, const std::string& value) const {
    const fs::path final_path = fs::path(dir_) / (key + ".json");
    // Write-then-rename keeps concurrent writers from exposing partial files.
    const fs::path tmp_path = fs::path(dir_) / (key + ".tmp" + std::to_string(::getpid()));
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("cannot write cache file " + tmp_path.string());
        out.write(value.data(), static_cast<std::streamsize>(value.size()));
    }
    std::error_code ec;
    fs::rename(tmp_path, final_path, ec);
    if (ec) {
        fs::remove(tmp_path);
        if (!fs::exists(final_path)) throw config_error("cannot store cache entry: " + ec.message());
    }
}

std::string cache_key(const CompletionRequest& request) {
    std::ostringstream key;
    key << request.model_id << '\x1f' << request.prompt << '\x1f' << request.temperature << '\x1f'
        << request.max_tokens << '\x1f' << request.sample_index << '\x1f' << request.seed;
    return sha256_hex(key.str());
}

Completion CachingBackend::complete(const CompletionRequest& request) {
    const std::string key = cache_key(request);
    if (auto cached = cache_.load(key)) return decode_completion(*cached);
    Completion fresh = inner_.complete(request);
    cache_.store(key, encode_completion(fresh));
    return fresh;
}

} // namespace selectqa
