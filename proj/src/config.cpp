#include "sloganaudit/config.hpp"

#include <fstream>

#include "sloganaudit/errors.hpp"

namespace sloganaudit {

namespace {

using nlohmann::json;

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

BackendKind backend_from_json(const json& gen) {
    const std::string kind = gen.value("backend", "synthetic");
    if (kind == "http") {
        HttpBackendConfig http;
        read_if(gen, "endpoint", http.endpoint);
        read_if(gen, "api_key_env", http.api_key_env);
        return http;
    }
    if (kind == "replay") {
        ReplayBackendConfig replay;
        std::string path;
        read_if(gen, "corpus_path", path);
        if (path.empty())
            throw ConfigError("replay backend requires generation.corpus_path");
        replay.corpus_path = path;
        return replay;
    }
    if (kind == "synthetic") {
        SyntheticBackendConfig synth;
        read_if(gen, "synthetic_seed", synth.seed);
        if (gen.contains("plan") && !gen.at("plan").is_null()) {
            for (auto git = gen.at("plan").begin(); git != gen.at("plan").end(); ++git) {
                for (auto cit = git.value().begin(); cit != git.value().end(); ++cit) {
                    synth.plan.insertions[git.key()][cit.key()] = cit.value().get<int>();
                }
            }
        }
        return synth;
    }
    throw ConfigError("unknown backend '" + kind + "' (expected http | replay | synthetic)");
}

json backend_to_json(const BackendKind& kind) {
    json gen;
    gen["backend"] = backend_name(kind);
    if (const auto* http = std::get_if<HttpBackendConfig>(&kind)) {
        gen["endpoint"] = http->endpoint;
        gen["api_key_env"] = http->api_key_env;
    } else if (const auto* replay = std::get_if<ReplayBackendConfig>(&kind)) {
        gen["corpus_path"] = replay->corpus_path.string();
    } else if (const auto* synth = std::get_if<SyntheticBackendConfig>(&kind)) {
        gen["synthetic_seed"] = synth->seed;
        json plan = json::object();
        for (const auto& [gid, cats] : synth->plan.insertions) {
            for (const auto& [cid, n] : cats) plan[gid][cid] = n;
        }
        gen["plan"] = plan;
    }
    return gen;
}

} // namespace

AuditConfig AuditConfig::from_json(const json& j) {
    AuditConfig c;
    if (j.contains("categories") || j.contains("groups")) {
        if (!j.contains("categories") || !j.contains("groups"))
            throw ConfigError("config must supply categories and groups together");
        Taxonomy t;
        for (const auto& cat : j.at("categories")) {
            t.categories.push_back(DemographicCategory{
                cat.at("id").get<std::string>(), cat.value("display_name", "")});
        }
        for (const auto& g : j.at("groups")) {
            t.groups.push_back(TargetGroup{g.at("id").get<std::string>(),
                                           g.at("category").get<std::string>(),
                                           g.at("descriptor").get<std::string>(),
                                           g.value("is_baseline", false)});
        }
        c.taxonomy = std::move(t);
    }
    read_if(j, "prompt_template", c.prompt_spec.template_text);
    read_if(j, "product", c.prompt_spec.product);
    read_if(j, "n_per_group", c.params.n_per_group);

    if (j.contains("generation")) {
        const auto& gen = j.at("generation");
        c.backend = backend_from_json(gen);
        if (gen.contains("model")) {
            c.params.model = gen.at("model").get<std::string>();
        } else if (std::holds_alternative<HttpBackendConfig>(c.backend)) {
            // no default for live runs: corpus provenance must be explicit
            throw ConfigError("generation.model is required for the http backend");
        } else {
            c.params.model = backend_name(c.backend);
        }
        read_if(gen, "temperature", c.params.temperature);
        read_if(gen, "max_tokens", c.params.max_tokens);
        read_if(gen, "rate_limit", c.params.rate_limit);
        read_if(gen, "max_retries", c.params.max_retries);
        if (gen.contains("seed") && !gen.at("seed").is_null())
            c.params.seed = gen.at("seed").get<std::uint64_t>();
    }

    if (j.contains("lexicon_path") && !j.at("lexicon_path").is_null())
        c.lexicon_path = std::filesystem::path(j.at("lexicon_path").get<std::string>());
    if (j.contains("denominator_scope"))
        c.denominator_scope = parse_scope(j.at("denominator_scope").get<std::string>());
    read_if(j, "include_baseline", c.include_baseline);
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    read_if(j, "seed", c.seed);
    if (j.contains("p_method")) c.p_method = parse_p_method(j.at("p_method").get<std::string>());
    read_if(j, "permutation_rounds", c.permutation_rounds);
    if (j.contains("alpha") && !j.at("alpha").is_null())
        c.alpha = j.at("alpha").get<double>();
    if (j.contains("baseline") && !j.at("baseline").is_null())
        c.baseline_override = j.at("baseline").get<std::string>();
    if (j.contains("cache_dir")) {
        if (j.at("cache_dir").is_null())
            c.cache_dir.reset();
        else
            c.cache_dir = std::filesystem::path(j.at("cache_dir").get<std::string>());
    }
    return c;
}

AuditConfig AuditConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError("config file " + path.string() + " is not a JSON object");
    return from_json(j);
}

json AuditConfig::to_json() const {
    json j;
    j["categories"] = json::array();
    for (const auto& cat : taxonomy.categories)
        j["categories"].push_back({{"id", cat.id}, {"display_name", cat.display_name}});
    j["groups"] = json::array();
    for (const auto& g : taxonomy.groups)
        j["groups"].push_back({{"id", g.id},
                               {"category", g.category},
                               {"descriptor", g.descriptor},
                               {"is_baseline", g.is_baseline}});
    j["prompt_template"] = prompt_spec.template_text;
    j["product"] = prompt_spec.product;
    j["n_per_group"] = params.n_per_group;

    json gen = backend_to_json(backend);
    gen["model"] = params.model;
    gen["temperature"] = params.temperature;
    gen["max_tokens"] = params.max_tokens;
    gen["rate_limit"] = params.rate_limit;
    gen["max_retries"] = params.max_retries;
    gen["seed"] = params.seed ? json(*params.seed) : json(nullptr);
    j["generation"] = std::move(gen);

    j["lexicon_path"] = lexicon_path ? json(lexicon_path->string()) : json(nullptr);
    j["denominator_scope"] = to_string(denominator_scope);
    j["include_baseline"] = include_baseline;
    j["out_dir"] = out_dir.string();
    j["seed"] = seed;
    j["p_method"] = to_string(p_method);
    j["permutation_rounds"] = permutation_rounds;
    j["alpha"] = alpha ? json(*alpha) : json(nullptr);
    j["baseline"] = baseline_override ? json(*baseline_override) : json(nullptr);
    j["cache_dir"] = cache_dir ? json(cache_dir->string()) : json(nullptr);
    return j;
}

void AuditConfig::validate() const {
    taxonomy.validate();
    params.validate();
    if (permutation_rounds < 1) throw ConfigError("permutation_rounds must be >= 1");
    if (alpha && (*alpha <= 0.0 || *alpha >= 1.0))
        throw ConfigError("alpha must be in (0, 1)");

    // the template must render for every group
    for (const auto& g : taxonomy.groups) build_prompt(g, prompt_spec);

    if (baseline_override && !taxonomy.find_group(*baseline_override))
        throw ConfigError("baseline override '" + *baseline_override + "' not in taxonomy");

    if (lexicon_path && !std::filesystem::exists(*lexicon_path))
        throw ConfigError("lexicon file does not exist: " + lexicon_path->string());
    if (const auto* replay = std::get_if<ReplayBackendConfig>(&backend)) {
        if (!std::filesystem::exists(replay->corpus_path))
            throw ConfigError("replay corpus does not exist: " + replay->corpus_path.string());
    }
    if (const auto* synth = std::get_if<SyntheticBackendConfig>(&backend)) {
        synth->plan.validate(taxonomy, lexicon());
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir.string() + ": " +
                              ec.message());
}

Lexicon AuditConfig::lexicon() const {
    return lexicon_path ? load_lexicon(*lexicon_path) : default_lexicon();
}

std::string AuditConfig::baseline_id() const {
    if (baseline_override) return *baseline_override;
    return taxonomy.baseline().id;
}

} // namespace sloganaudit
