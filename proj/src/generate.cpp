#include "sloganaudit/generate.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sloganaudit/digest.hpp"
#include "sloganaudit/errors.hpp"

namespace sloganaudit {

namespace {

// Works as joiner vocabulary for synthetic slogans. None of these tokens
// occurs in any default dictionary phrase, so filler text never scores a hit
// and never extends a planted phrase into a longer one (checked by tests).
const std::vector<std::string>& filler_words() {
    static const std::vector<std::string> words = {
        "brighter", "journeys", "every",    "day",     "tomorrow", "begins",
        "steady",   "habits",   "forward",  "together", "toward",  "better",
        "plans",    "each",     "small",    "step",    "that",     "momentum",
        "saving",   "feels",    "simple",   "when",    "the",      "path",
        "and",      "clear",    "counts",   "matters", "goes",     "far",
    };
    return words;
}

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::uint64_t slogan_seed(std::uint64_t seed, const std::string& group_id, int index) {
    Fnv64 h;
    h.update(seed);
    h.update(group_id).sep();
    h.update(static_cast<std::uint64_t>(index));
    return h.value();
}

std::size_t draw(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

std::string trim(std::string s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool strip_pair(std::string& s, std::string_view open, std::string_view close) {
    if (s.size() >= open.size() + close.size() && s.starts_with(open) && s.ends_with(close)) {
        s = s.substr(open.size(), s.size() - open.size() - close.size());
        return true;
    }
    return false;
}

bool strip_enumeration(std::string& s) {
    std::size_t i = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i;
    if (i == 0 || i >= s.size()) return false;
    if (s[i] != '.' && s[i] != ')') return false;
    ++i;
    if (i >= s.size() || !std::isspace(static_cast<unsigned char>(s[i]))) return false;
    s = s.substr(i + 1);
    return true;
}

} // namespace

std::string clean_slogan_text(std::string text) {
    for (;;) {
        const std::string before = text;
        text = trim(std::move(text));
        strip_pair(text, "\"", "\"") || strip_pair(text, "'", "'") ||
            strip_pair(text, "\xE2\x80\x9C", "\xE2\x80\x9D") ||
            strip_pair(text, "\xE2\x80\x98", "\xE2\x80\x99");
        strip_enumeration(text);
        if (text == before) break;  // every rewrite strictly shortens
    }
    return text;
}

void GenerationParams::validate() const {
    if (model.empty()) throw ConfigError("generation model must be set explicitly");
    if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
    if (n_per_group < 1) throw ConfigError("n_per_group must be >= 1");
    if (rate_limit < 1) throw ConfigError("rate_limit must be >= 1");
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

int PlantedPlan::at(const std::string& group_id, const std::string& category_id) const {
    auto g = insertions.find(group_id);
    if (g == insertions.end()) return 0;
    auto c = g->second.find(category_id);
    return c == g->second.end() ? 0 : c->second;
}

void PlantedPlan::validate(const Taxonomy& taxonomy, const Lexicon& lexicon) const {
    for (const auto& [gid, cats] : insertions) {
        if (!taxonomy.find_group(gid))
            throw ConfigError("planted plan references unknown group '" + gid + "'");
        for (const auto& [cid, n] : cats) {
            if (!lexicon.find(cid))
                throw ConfigError("planted plan references unknown category '" + cid + "'");
            if (n < 0)
                throw ConfigError("planted plan has negative count at (" + gid + ", " + cid +
                                  ")");
        }
    }
}

std::string backend_name(const BackendKind& kind) {
    if (std::holds_alternative<HttpBackendConfig>(kind)) return "http";
    if (std::holds_alternative<ReplayBackendConfig>(kind)) return "replay";
    return "synthetic";
}

RateLimiter::RateLimiter(int per_minute, ClockFn clock, SleepFn sleep)
    : limit_(per_minute),
      clock_(clock ? std::move(clock)
                   : [] {
                         return std::chrono::duration<double>(
                                    std::chrono::steady_clock::now().time_since_epoch())
                             .count();
                     }),
      sleep_(sleep ? std::move(sleep) : [](double s) {
          std::this_thread::sleep_for(std::chrono::duration<double>(s));
      }) {
    if (limit_ < 1) throw ConfigError("rate limit must be >= 1 per minute");
}

void RateLimiter::acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    for (;;) {
        const double now = clock_();
        while (!stamps_.empty() && stamps_.front() <= now - 60.0) stamps_.pop_front();
        if (static_cast<int>(stamps_.size()) < limit_) {
            stamps_.push_back(now);
            return;
        }
        const double wait = stamps_.front() + 60.0 - now;
        lock.unlock();
        sleep_(wait > 0.0 ? wait : 0.001);
        lock.lock();
    }
}

SloganCache::SloganCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string SloganCache::key(const std::string& backend_salt, const GenerationParams& params,
                             const std::string& prompt, int index) {
    Fnv64 h;
    h.update(backend_salt).sep();
    h.update(params.model).sep();
    h.update(fmt_double(params.temperature)).sep();
    h.update(static_cast<std::uint64_t>(params.max_tokens));
    h.update(prompt).sep();
    h.update(static_cast<std::uint64_t>(index));
    return h.hex();
}

std::optional<std::string> SloganCache::get(const std::string& key) const {
    std::ifstream in(dir_ / key, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void SloganCache::put(const std::string& key, const std::string& text) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    std::ofstream out(dir_ / key, std::ios::binary | std::ios::trunc);
    if (!out) throw GenerationError("cannot write cache file: " + (dir_ / key).string());
    out << text;
}

std::string RequestBackend::stamp() const { return utc_timestamp_now(); }

std::vector<Slogan> RequestBackend::generate_group(const TargetGroup& group,
                                                   const GenerationParams& params,
                                                   const PromptSpec& prompt_spec) {
    params.validate();
    const std::string prompt = build_prompt(group, prompt_spec);
    const std::string salt = cache_salt(params);

    std::vector<Slogan> out;
    out.reserve(static_cast<std::size_t>(params.n_per_group));
    for (int i = 0; i < params.n_per_group; ++i) {
        std::string text;
        std::string cache_key;
        if (cache_) {
            cache_key = SloganCache::key(salt, params, prompt, i);
            if (auto raw = cache_->get(cache_key)) text = clean_slogan_text(*raw);
        }
        if (text.empty()) {
            std::string last_error = "empty model response";
            for (int attempt = 0; attempt <= params.max_retries && text.empty(); ++attempt) {
                ++requests_;
                std::string raw;
                try {
                    raw = fetch_raw(group, i, prompt, params);
                } catch (const GenerationError& e) {
                    last_error = e.what();
                    continue;
                }
                std::string cleaned = clean_slogan_text(raw);
                if (cleaned.empty()) {
                    last_error = "empty model response";
                    continue;
                }
                text = std::move(cleaned);
                if (cache_) cache_->put(cache_key, raw);
            }
            if (text.empty())
                throw GenerationError("group '" + group.id + "' index " + std::to_string(i) +
                                      ": giving up after " +
                                      std::to_string(params.max_retries + 1) + " attempts (" +
                                      last_error + ")");
        }
        out.push_back(Slogan{.group_id = group.id,
                             .index = i,
                             .prompt = prompt,
                             .text = std::move(text),
                             .model = params.model,
                             .created_at = stamp()});
    }
    return out;
}

SyntheticBackend::SyntheticBackend(SyntheticBackendConfig config, Lexicon lexicon)
    : config_(std::move(config)), lexicon_(std::move(lexicon)) {
    // A phrase is plantable when it scores exactly one hit overall, in its
    // own category: planting it cannot leak counts anywhere else.
    for (const auto& cat : lexicon_.categories()) {
        std::vector<std::string> ok;
        for (std::size_t p = 0; p < cat.phrases.size(); ++p) {
            const auto hits = match_terms(cat.tokens[p], lexicon_);
            if (hits.size() == 1 && hits[0].category_id == cat.info.id &&
                hits[0].token_count == cat.tokens[p].size()) {
                ok.push_back(cat.phrases[p]);
            }
        }
        plantable_[cat.info.id] = std::move(ok);
    }
}

std::string SyntheticBackend::stamp() const {
    // Fixed timestamp: identical reruns produce byte-identical corpora.
    return "2024-01-01T00:00:00Z";
}

std::string SyntheticBackend::cache_salt(const GenerationParams& params) const {
    Fnv64 h;
    h.update("synthetic").sep();
    h.update(params.seed.value_or(config_.seed));
    for (const auto& [gid, cats] : config_.plan.insertions) {
        h.update(gid).sep();
        for (const auto& [cid, n] : cats) {
            h.update(cid).sep();
            h.update(static_cast<std::uint64_t>(n));
        }
    }
    return h.hex();
}

std::string SyntheticBackend::fetch_raw(const TargetGroup& group, int index,
                                        const std::string& /*prompt*/,
                                        const GenerationParams& params) {
    const std::uint64_t seed = params.seed.value_or(config_.seed);
    std::mt19937_64 rng(slogan_seed(seed, group.id, index));
    const auto& fillers = filler_words();

    std::vector<std::string> parts;
    const std::size_t lead = 2 + draw(rng, 3);
    for (std::size_t i = 0; i < lead; ++i) parts.push_back(fillers[draw(rng, fillers.size())]);

    for (const auto& cat : lexicon_.categories()) {
        int wanted = 0;
        if (!config_.plan.empty()) {
            wanted = config_.plan.at(group.id, cat.info.id);
        } else {
            // Group-dependent rate so distributions differ between groups:
            // up to three insertion chances per category and slogan.
            Fnv64 h;
            h.update(group.id).sep().update(cat.info.id);
            const std::uint64_t rate = 25 + h.value() % 140;  // per-300 odds
            for (int t = 0; t < 3; ++t) {
                if (rng() % 300 < rate) ++wanted;
            }
        }
        const auto& pool = config_.plan.empty() ? cat.phrases : plantable_.at(cat.info.id);
        if (wanted > 0 && pool.empty())
            throw GenerationError("no plantable phrases for category '" + cat.info.id + "'");
        for (int k = 0; k < wanted; ++k) {
            parts.push_back(pool[draw(rng, pool.size())]);
            parts.push_back(fillers[draw(rng, fillers.size())]);  // keep phrases separated
        }
    }

    std::string text;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) text.push_back(' ');
        text += parts[i];
    }
    if (!text.empty())
        text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    text.push_back('!');
    return text;
}

HttpBackend::HttpBackend(HttpBackendConfig config, RateLimiter::ClockFn clock,
                         RateLimiter::SleepFn sleep)
    : config_(std::move(config)), clock_(std::move(clock)), sleep_(std::move(sleep)) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || std::string_view(key).empty())
        throw ConfigError("API key environment variable '" + config_.api_key_env +
                          "' is not set");
    api_key_ = key;

    const auto& url = config_.endpoint;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("endpoint URL must include a scheme: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    endpoint_.scheme_host = path_start == std::string::npos ? url : url.substr(0, path_start);
    endpoint_.path = path_start == std::string::npos ? "/" : url.substr(path_start);
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::cache_salt(const GenerationParams& /*params*/) const {
    Fnv64 h;
    h.update("http").sep().update(config_.endpoint).sep();
    return h.hex();
}

std::string HttpBackend::fetch_raw(const TargetGroup& group, int index,
                                   const std::string& prompt, const GenerationParams& params) {
    if (!limiter_) limiter_ = std::make_unique<RateLimiter>(params.rate_limit, clock_, sleep_);
    limiter_->acquire();

    nlohmann::json body;
    body["model"] = params.model;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_tokens;

    httplib::Client client(endpoint_.scheme_host);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(120, 0);
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

    auto res = client.Post(endpoint_.path, headers, body.dump(), "application/json");
    const std::string where = "group '" + group.id + "' index " + std::to_string(index);
    if (!res)
        throw GenerationError(where + ": no response from " + endpoint_.scheme_host + " (" +
                              httplib::to_string(res.error()) + ")");
    if (res->status != 200)
        throw GenerationError(where + ": HTTP " + std::to_string(res->status) + " " +
                              res->body.substr(0, 200));

    nlohmann::json j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded())
        throw GenerationError(where + ": response is not JSON");
    try {
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw GenerationError(where + ": response has no choices[0].message.content");
    }
}

ReplayBackend::ReplayBackend(ReplayBackendConfig config, const Taxonomy& taxonomy)
    : stored_(load_corpus(config.corpus_path, taxonomy)) {}

std::vector<Slogan> ReplayBackend::generate_group(const TargetGroup& group,
                                                  const GenerationParams& /*params*/,
                                                  const PromptSpec& /*prompt_spec*/) {
    // Replay is identity: the stored group wins over n_per_group.
    std::vector<Slogan> out;
    for (const Slogan* s : stored_.group(group.id)) out.push_back(*s);
    return out;
}

std::unique_ptr<Backend> make_backend(const BackendKind& kind, const Taxonomy& taxonomy,
                                      const Lexicon& lexicon,
                                      std::optional<std::filesystem::path> cache_dir) {
    if (const auto* http = std::get_if<HttpBackendConfig>(&kind)) {
        auto backend = std::make_unique<HttpBackend>(*http);
        if (cache_dir) backend->set_cache(std::make_shared<SloganCache>(*cache_dir));
        return backend;
    }
    if (const auto* replay = std::get_if<ReplayBackendConfig>(&kind)) {
        return std::make_unique<ReplayBackend>(*replay, taxonomy);
    }
    const auto& synth = std::get<SyntheticBackendConfig>(kind);
    auto backend = std::make_unique<SyntheticBackend>(synth, lexicon);
    if (cache_dir) backend->set_cache(std::make_shared<SloganCache>(*cache_dir));
    return backend;
}

Corpus generate_all(Backend& backend, const Taxonomy& taxonomy, const GenerationParams& params,
                    const PromptSpec& prompt_spec, ProgressFn progress) {
    taxonomy.validate();
    params.validate();

    std::vector<Slogan> all;
    std::size_t done = 0;
    const std::size_t total = taxonomy.groups.size();
    for (const auto& g : taxonomy.groups) {
        std::vector<Slogan> slogans;
        try {
            slogans = backend.generate_group(g, params, prompt_spec);
        } catch (const std::exception& e) {
            throw GenerationError("generation aborted at group '" + g.id + "': " +
                                  std::to_string(done) + " of " + std::to_string(total) +
                                  " groups completed, cache retained. Cause: " + e.what());
        }
        all.insert(all.end(), std::make_move_iterator(slogans.begin()),
                   std::make_move_iterator(slogans.end()));
        ++done;
        if (progress) progress(g, done, total);
    }
    return Corpus(taxonomy, std::move(all));
}

} // namespace sloganaudit
