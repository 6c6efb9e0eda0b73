#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace selectqa {

struct TokenLogprob {
    std::string token;
    double logprob = 0.0; // always <= 0
};

enum class FinishReason { Stop, Length, Error };

std::string to_string(FinishReason r);
FinishReason finish_reason_from_string(const std::string& s);

struct CompletionRequest {
    std::string model_id;
    std::string prompt;
    double temperature = 0.0; // 0 means greedy decoding
    int max_tokens = 64;
    bool want_logprobs = true;
    std::vector<std::string> stop_markers;
    int sample_index = 0; // 0 is reserved for the greedy completion
    uint64_t seed = 0;
};

struct Completion {
    std::string text;
    std::vector<TokenLogprob> token_logprobs; // token texts concatenate to text
    FinishReason finish_reason = FinishReason::Stop;

    double sum_logprob() const;
};

// One greedy generation plus n temperature samples for a single prompt.
struct SampleSet {
    Completion greedy;               // temperature 0
    std::vector<Completion> samples; // temperature t_sample, indices 1..n
    std::string prompt;
    std::string prompt_digest; // sha256 of prompt; guards against mixing

    int n() const { return static_cast<int>(samples.size()); }
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const CompletionRequest& request) = 0;
};

// Issues 1 greedy request (sample_index 0, t_greedy) and n sampled requests
// (sample_index 1..n, t_sample) and returns the full set, or throws if any
// request fails. Throws config_error when n < 1.
SampleSet sample_set(Backend& backend, const CompletionRequest& base, int n, double t_greedy = 0.0,
                     double t_sample = 0.5);

// The seed actually sent over the wire: sample_index is not a protocol field,
// so each sample's identity is folded into the seed deterministically.
uint64_t wire_seed(const CompletionRequest& request);

// Wire codec for the completion protocol:
//   request  {model, prompt, temperature, max_tokens, logprobs, stop, seed}
//   response {text, tokens: [{token, logprob}], finish_reason}
// Serialization is canonical (sorted keys) so cached bytes are stable.
std::string encode_request(const CompletionRequest& request);
std::string encode_completion(const Completion& completion);
// Throws backend_error on malformed payloads (including positive logprobs).
Completion decode_completion(const std::string& body);

// Content under one cache key never changes, so write races are benign.
class DiskCache {
public:
    explicit DiskCache(std::string dir);

    std::optional<std::string> load(const std::string& key) const;
    void store(const std::string& key, const std::string& value) const;

    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
};

// Cache key: digest of (model_id, prompt, temperature, max_tokens,
// sample_index, seed). sample_index keeps separate draws distinct.
std::string cache_key(const CompletionRequest& request);

// Serves completions from the cache, delegating misses to the inner backend
// and persisting its raw responses.
class CachingBackend : public Backend {
public:
    CachingBackend(Backend& inner, DiskCache cache) : inner_(inner), cache_(std::move(cache)) {}

    Completion complete(const CompletionRequest& request) override;

private:
    Backend& inner_;
    DiskCache cache_;
};

} // namespace selectqa
