#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "sloganaudit/bias.hpp"
#include "sloganaudit/generate.hpp"
#include "sloganaudit/stats.hpp"
#include "sloganaudit/taxonomy.hpp"

namespace sloganaudit {

inline GenerationParams synthetic_default_params() {
    GenerationParams p;
    p.model = "synthetic";
    return p;
}

// Everything one audit run needs. Serializes to/from a single JSON document;
// the report echoes it back so a run can be reproduced from its outputs.
struct AuditConfig {
    Taxonomy taxonomy = default_taxonomy();
    PromptSpec prompt_spec;
    GenerationParams params = synthetic_default_params();
    BackendKind backend = SyntheticBackendConfig{};
    std::optional<std::filesystem::path> lexicon_path;  // embedded default if absent
    DenominatorScope denominator_scope = DenominatorScope::all;
    bool include_baseline = true;
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 0;  // feeds the synthetic backend and permutation test
    PValueMethod p_method = PValueMethod::asymptotic;
    int permutation_rounds = 10'000;
    std::optional<double> alpha;  // adds a significance column when set
    std::optional<std::string> baseline_override;
    std::optional<std::filesystem::path> cache_dir = std::filesystem::path(".slogan-cache");

    static AuditConfig from_json(const nlohmann::json& j);
    static AuditConfig from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;

    // Taxonomy/lexicon/backend consistency plus referenced-file existence.
    // Throws ConfigError or ValidationError.
    void validate() const;

    Lexicon lexicon() const;  // loads lexicon_path or returns the default

    // Baseline group id after applying the override.
    std::string baseline_id() const;

    bool operator==(const AuditConfig&) const = default;
};

} // namespace sloganaudit
