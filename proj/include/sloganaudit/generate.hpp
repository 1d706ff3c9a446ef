#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sloganaudit/corpus.hpp"
#include "sloganaudit/lexicon.hpp"
#include "sloganaudit/taxonomy.hpp"

namespace sloganaudit {

struct GenerationParams {
    std::string model;  // required: no default, provenance must be explicit
    double temperature = 1.0;
    int max_tokens = 500;
    int n_per_group = 100;
    std::optional<std::uint64_t> seed;  // synthetic backend only
    int rate_limit = 60;                // live requests per minute
    int max_retries = 3;

    void validate() const;  // throws ConfigError

    bool operator==(const GenerationParams&) const = default;
};

// Dictionary-term insertions per slogan for (group x term category). Every
// slogan of the group carries exactly that many plantable phrases of the
// category, which gives end-to-end tests an exact counting oracle.
struct PlantedPlan {
    // group_id -> category_id -> insertions per slogan
    std::map<std::string, std::map<std::string, int>> insertions;

    bool empty() const { return insertions.empty(); }
    int at(const std::string& group_id, const std::string& category_id) const;

    // Every referenced group and category must exist; counts non-negative.
    void validate(const Taxonomy& taxonomy, const Lexicon& lexicon) const;

    bool operator==(const PlantedPlan&) const = default;
};

struct HttpBackendConfig {
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string api_key_env = "OPENAI_API_KEY";  // variable name, never the key

    bool operator==(const HttpBackendConfig&) const = default;
};

struct ReplayBackendConfig {
    std::filesystem::path corpus_path;

    bool operator==(const ReplayBackendConfig&) const = default;
};

struct SyntheticBackendConfig {
    std::uint64_t seed = 0;
    PlantedPlan plan;  // empty plan -> varied per-group pseudo-random rates

    bool operator==(const SyntheticBackendConfig&) const = default;
};

using BackendKind = std::variant<HttpBackendConfig, ReplayBackendConfig, SyntheticBackendConfig>;

std::string backend_name(const BackendKind& kind);  // "http" | "replay" | "synthetic"

// Sliding-window limiter: at most `per_minute` acquisitions in any trailing
// 60-second window. Clock and sleep are injectable for tests.
class RateLimiter {
public:
    using ClockFn = std::function<double()>;      // monotonic seconds
    using SleepFn = std::function<void(double)>;  // sleep for seconds

    explicit RateLimiter(int per_minute, ClockFn clock = {}, SleepFn sleep = {});

    void acquire();

private:
    int limit_;
    ClockFn clock_;
    SleepFn sleep_;
    std::deque<double> stamps_;
    std::mutex mu_;
};

// One file per key, content = raw slogan text (UTF-8). The key hashes the
// backend salt plus (model, temperature, max_tokens, prompt, index), so any
// parameter change invalidates.
class SloganCache {
public:
    explicit SloganCache(std::filesystem::path dir);

    static std::string key(const std::string& backend_salt, const GenerationParams& params,
                           const std::string& prompt, int index);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& text) const;

    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

// Trims whitespace, strips one layer of surrounding quotes and leading
// enumeration ("1. ", "2) "), repeated to a fixpoint.
std::string clean_slogan_text(std::string text);

class Backend {
public:
    virtual ~Backend() = default;

    // All slogans for one group in index order. Throws GenerationError.
    virtual std::vector<Slogan> generate_group(const TargetGroup& group,
                                               const GenerationParams& params,
                                               const PromptSpec& prompt_spec) = 0;

    // Raw fetches actually issued (cache hits excluded).
    int requests_issued() const { return requests_; }

protected:
    int requests_ = 0;
};

// Shared per-request path: cache lookup, retry loop, post-processing.
class RequestBackend : public Backend {
public:
    std::vector<Slogan> generate_group(const TargetGroup& group, const GenerationParams& params,
                                       const PromptSpec& prompt_spec) final;

    void set_cache(std::shared_ptr<SloganCache> cache) { cache_ = std::move(cache); }

protected:
    virtual std::string fetch_raw(const TargetGroup& group, int index, const std::string& prompt,
                                  const GenerationParams& params) = 0;
    virtual std::string cache_salt(const GenerationParams& params) const = 0;
    virtual std::string stamp() const;  // created_at policy; default = now

private:
    std::shared_ptr<SloganCache> cache_;
};

// Pure function of (seed, group_id, index, plan): equal inputs give equal
// texts. Slogans are neutral filler plus planted dictionary phrases; with an
// explicit plan only phrases that score in exactly their own category are
// planted.
class SyntheticBackend : public RequestBackend {
public:
    SyntheticBackend(SyntheticBackendConfig config, Lexicon lexicon = default_lexicon());

protected:
    std::string fetch_raw(const TargetGroup& group, int index, const std::string& prompt,
                          const GenerationParams& params) override;
    std::string cache_salt(const GenerationParams& params) const override;
    std::string stamp() const override;  // fixed timestamp: byte-stable reruns

private:
    SyntheticBackendConfig config_;
    Lexicon lexicon_;
    // category id -> phrases that match only themselves, in their category
    std::map<std::string, std::vector<std::string>> plantable_;
};

// POSTs a chat-completion request per slogan. The API key is read from the
// configured environment variable at construction; a missing variable is a
// ConfigError before any request leaves.
class HttpBackend final : public RequestBackend {
public:
    HttpBackend(HttpBackendConfig config, RateLimiter::ClockFn clock = {},
                RateLimiter::SleepFn sleep = {});
    ~HttpBackend() override;

protected:
    std::string fetch_raw(const TargetGroup& group, int index, const std::string& prompt,
                          const GenerationParams& params) override;
    std::string cache_salt(const GenerationParams& params) const override;

private:
    HttpBackendConfig config_;
    std::string api_key_;
    std::unique_ptr<RateLimiter> limiter_;  // created on first request
    RateLimiter::ClockFn clock_;
    RateLimiter::SleepFn sleep_;
    struct Endpoint {
        std::string scheme_host;  // e.g. "http://localhost:8080"
        std::string path;         // e.g. "/v1/chat/completions"
    } endpoint_;
};

// Serves a stored corpus verbatim (text, model, timestamps preserved); the
// stored group size wins over params.n_per_group.
class ReplayBackend final : public Backend {
public:
    ReplayBackend(ReplayBackendConfig config, const Taxonomy& taxonomy);

    std::vector<Slogan> generate_group(const TargetGroup& group, const GenerationParams& params,
                                       const PromptSpec& prompt_spec) override;

    const Corpus& stored() const { return stored_; }

private:
    Corpus stored_;
};

std::unique_ptr<Backend> make_backend(const BackendKind& kind, const Taxonomy& taxonomy,
                                      const Lexicon& lexicon,
                                      std::optional<std::filesystem::path> cache_dir);

using ProgressFn = std::function<void(const TargetGroup& group, std::size_t done, std::size_t total)>;

// One generate_group per taxonomy group, merged into a validated Corpus.
// Progress already cached persists, so interrupted runs resume; a group
// failure aborts with a completed-vs-failed summary.
Corpus generate_all(Backend& backend, const Taxonomy& taxonomy, const GenerationParams& params,
                    const PromptSpec& prompt_spec, ProgressFn progress = {});

} // namespace sloganaudit
