#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sloganaudit/bias.hpp"
#include "sloganaudit/config.hpp"
#include "sloganaudit/corpus.hpp"
#include "sloganaudit/errors.hpp"
#include "sloganaudit/generate.hpp"
#include "sloganaudit/lexicon.hpp"
#include "sloganaudit/report.hpp"
#include "sloganaudit/stats.hpp"
#include "sloganaudit/version.hpp"

namespace {

using namespace sloganaudit;

// Exit codes: 0 ok, 1 unexpected, 2 config/input, 3 generation, 4 analysis.
constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitGeneration = 3;
constexpr int kExitAnalysis = 4;

struct CliOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> out_dir;
    std::optional<std::string> backend;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> corpus;
    std::optional<std::string> counts;
    std::optional<std::string> lexicon_path;
    std::optional<std::string> baseline;
    std::optional<std::string> scope;
    std::optional<std::string> p_method;
    std::optional<double> alpha;
    std::optional<int> n_per_group;
    std::optional<std::string> model;
    std::optional<std::string> cache_dir;
    std::optional<std::string> endpoint;
    std::optional<std::string> api_key_env;
    std::optional<int> permutation_rounds;
    bool no_cache = false;
    std::optional<bool> include_baseline;
};

void add_common_options(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--config", o.config_path, "Config JSON file");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_option("--backend", o.backend, "Backend: http | replay | synthetic")
        ->check(CLI::IsMember({"http", "replay", "synthetic"}));
    cmd->add_option("--seed", o.seed, "Seed for synthetic generation and permutation tests");
    cmd->add_option("--corpus", o.corpus, "Corpus JSONL path (replay input)");
    cmd->add_option("--lexicon", o.lexicon_path, "Lexicon JSON file (default: embedded)");
    cmd->add_option("--baseline", o.baseline, "Baseline group id override");
    cmd->add_option("--denominator-scope", o.scope,
                    "Relative-bias denominator: all | per_category | targets_only")
        ->check(CLI::IsMember({"all", "per_category", "targets_only"}));
    cmd->add_option("--p-method", o.p_method, "KS p-value method: asymptotic | permutation")
        ->check(CLI::IsMember({"asymptotic", "permutation"}));
    cmd->add_option("--alpha", o.alpha, "Adds a significance column at this level");
    cmd->add_option("--n-per-group", o.n_per_group, "Slogans per group");
    cmd->add_option("--model", o.model, "Model identifier for generation");
    cmd->add_option("--cache-dir", o.cache_dir, "Generation cache directory");
    cmd->add_flag("--no-cache", o.no_cache, "Disable the generation cache");
    cmd->add_option("--endpoint", o.endpoint, "HTTP backend endpoint URL");
    cmd->add_option("--api-key-env", o.api_key_env, "Environment variable holding the API key");
    cmd->add_option("--permutation-rounds", o.permutation_rounds,
                    "Label shuffles for the permutation p-value");
}

AuditConfig resolve_config(const CliOptions& o) {
    AuditConfig c = o.config_path ? AuditConfig::from_file(*o.config_path) : AuditConfig{};

    if (o.backend) {
        if (*o.backend == "http") {
            HttpBackendConfig http;
            if (const auto* prev = std::get_if<HttpBackendConfig>(&c.backend)) http = *prev;
            c.backend = http;
        } else if (*o.backend == "replay") {
            ReplayBackendConfig replay;
            if (const auto* prev = std::get_if<ReplayBackendConfig>(&c.backend)) replay = *prev;
            c.backend = replay;
        } else {
            SyntheticBackendConfig synth;
            if (const auto* prev = std::get_if<SyntheticBackendConfig>(&c.backend)) synth = *prev;
            c.backend = synth;
            if (!o.model) c.params.model = "synthetic";
        }
    }
    if (o.endpoint || o.api_key_env) {
        auto* http = std::get_if<HttpBackendConfig>(&c.backend);
        if (!http) throw ConfigError("--endpoint/--api-key-env apply to the http backend only");
        if (o.endpoint) http->endpoint = *o.endpoint;
        if (o.api_key_env) http->api_key_env = *o.api_key_env;
    }
    if (o.corpus) {
        if (auto* replay = std::get_if<ReplayBackendConfig>(&c.backend))
            replay->corpus_path = *o.corpus;
    }
    if (o.model) {
        c.params.model = *o.model;
        if (std::holds_alternative<HttpBackendConfig>(c.backend) && o.model->empty())
            throw ConfigError("model must not be empty");
    }
    if (o.seed) c.seed = *o.seed;
    if (o.n_per_group) c.params.n_per_group = *o.n_per_group;
    if (o.out_dir) c.out_dir = *o.out_dir;
    if (o.lexicon_path) c.lexicon_path = *o.lexicon_path;
    if (o.baseline) c.baseline_override = *o.baseline;
    if (o.scope) c.denominator_scope = parse_scope(*o.scope);
    if (o.p_method) c.p_method = parse_p_method(*o.p_method);
    if (o.alpha) c.alpha = *o.alpha;
    if (o.permutation_rounds) c.permutation_rounds = *o.permutation_rounds;
    if (o.include_baseline) c.include_baseline = *o.include_baseline;
    if (o.cache_dir) c.cache_dir = *o.cache_dir;
    if (o.no_cache) c.cache_dir.reset();

    if (std::holds_alternative<HttpBackendConfig>(c.backend) &&
        (c.params.model == "synthetic" || c.params.model == "replay"))
        throw ConfigError("the http backend needs an explicit --model for corpus provenance");

    // one master seed drives both randomness sources
    if (auto* synth = std::get_if<SyntheticBackendConfig>(&c.backend)) synth->seed = c.seed;
    c.params.seed = c.seed;
    return c;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << content;
}

Corpus obtain_corpus(const AuditConfig& config, const Lexicon& lexicon, bool persist) {
    auto backend = make_backend(config.backend, config.taxonomy, lexicon, config.cache_dir);
    Corpus corpus = generate_all(*backend, config.taxonomy, config.params, config.prompt_spec,
                                 [&](const TargetGroup& g, std::size_t done, std::size_t total) {
                                     std::cout << "[" << done << "/" << total << "] " << g.id
                                               << "\n";
                                 });
    if (persist) save_corpus(corpus, config.out_dir / "corpus.jsonl");
    return corpus;
}

CountsTable obtain_counts(const AuditConfig& config, const CliOptions& o,
                          const Lexicon& lexicon) {
    if (o.counts) return load_counts(*o.counts);
    if (o.corpus) {
        Corpus corpus = load_corpus(*o.corpus, config.taxonomy);
        return count_corpus(corpus, lexicon);
    }
    throw ConfigError("provide --corpus or --counts");
}

int cmd_generate(const CliOptions& o) {
    AuditConfig config = resolve_config(o);
    config.validate();
    const Lexicon lexicon = config.lexicon();
    Corpus corpus = obtain_corpus(config, lexicon, /*persist=*/true);
    std::cout << "wrote " << (config.out_dir / "corpus.jsonl").string() << " (" << corpus.size()
              << " slogans, digest " << corpus.digest_hex() << ")\n";
    return kExitOk;
}

int cmd_analyze(const CliOptions& o) {
    AuditConfig config = resolve_config(o);
    if (!o.corpus) throw ConfigError("analyze requires --corpus");
    const Lexicon lexicon = config.lexicon();
    Corpus corpus = load_corpus(*o.corpus, config.taxonomy);
    CountsTable counts = count_corpus(corpus, lexicon);
    std::filesystem::create_directories(config.out_dir);
    save_counts(counts, config.out_dir / "counts.json");

    for (std::size_t c = 0; c < counts.category_ids.size(); ++c) {
        std::int64_t total = 0;
        for (std::size_t g = 0; g < counts.group_ids.size(); ++g) total += counts.raw[g][c];
        std::cout << counts.category_ids[c] << ": " << total << " hits\n";
    }
    std::cout << "wrote " << (config.out_dir / "counts.json").string() << "\n";
    return kExitOk;
}

int cmd_bias(const CliOptions& o) {
    AuditConfig config = resolve_config(o);
    const Lexicon lexicon = config.lexicon();
    CountsTable counts = obtain_counts(config, o, lexicon);
    BiasTable table = bias_table(counts, lexicon, config.taxonomy, config.denominator_scope,
                                 config.include_baseline);
    std::filesystem::create_directories(config.out_dir);
    std::ostringstream csv;
    write_bias_csv(table, csv);
    write_text_file(config.out_dir / "bias_table.csv", csv.str());
    std::cout << console_grid(table, config.taxonomy, lexicon);
    std::cout << "wrote " << (config.out_dir / "bias_table.csv").string() << "\n";
    return kExitOk;
}

int cmd_ks(const CliOptions& o) {
    AuditConfig config = resolve_config(o);
    const Lexicon lexicon = config.lexicon();
    CountsTable counts = obtain_counts(config, o, lexicon);
    KsOptions ks_opts{.method = config.p_method,
                      .permutation_rounds = config.permutation_rounds,
                      .seed = config.seed};
    auto results = compare_to_baseline(counts, config.baseline_id(), ks_opts);

    std::filesystem::create_directories(config.out_dir);
    std::ostringstream csv;
    write_ks_csv(results, config.taxonomy, config.alpha, csv);
    write_text_file(config.out_dir / "ks_results.csv", csv.str());
    write_text_file(config.out_dir / "cdf_export.json",
                    cdf_export_json(counts, config.baseline_id()).dump(2) + "\n");
    std::cout << "wrote " << (config.out_dir / "ks_results.csv").string() << " and "
              << (config.out_dir / "cdf_export.json").string() << "\n";
    return kExitOk;
}

int cmd_audit(const CliOptions& o) {
    AuditConfig config = resolve_config(o);
    config.validate();
    const Lexicon lexicon = config.lexicon();

    // generation stage (exit 3 on failure)
    Corpus corpus = obtain_corpus(config, lexicon, /*persist=*/true);

    // analysis stages (exit 4 on failure)
    try {
        CountsTable counts = count_corpus(corpus, lexicon);
        save_counts(counts, config.out_dir / "counts.json");

        BiasTable table = bias_table(counts, lexicon, config.taxonomy, config.denominator_scope,
                                     config.include_baseline);
        std::ostringstream bias_csv;
        write_bias_csv(table, bias_csv);
        write_text_file(config.out_dir / "bias_table.csv", bias_csv.str());

        KsOptions ks_opts{.method = config.p_method,
                          .permutation_rounds = config.permutation_rounds,
                          .seed = config.seed};
        auto results = compare_to_baseline(counts, config.baseline_id(), ks_opts);
        std::ostringstream ks_csv;
        write_ks_csv(results, config.taxonomy, config.alpha, ks_csv);
        write_text_file(config.out_dir / "ks_results.csv", ks_csv.str());
        write_text_file(config.out_dir / "cdf_export.json",
                        cdf_export_json(counts, config.baseline_id()).dump(2) + "\n");
        write_text_file(config.out_dir / "report.json",
                        report_json(config, corpus, table, results).dump(2) + "\n");

        std::cout << console_grid(table, config.taxonomy, lexicon);
        std::cout << "report: " << (config.out_dir / "report.json").string() << "\n";
    } catch (const ConfigError&) {
        throw;
    } catch (const GenerationError&) {
        throw;
    } catch (const AnalysisError&) {
        throw;
    } catch (const std::exception& e) {
        throw AnalysisError(e.what());  // stage-tag analysis failures
    }
    return kExitOk;
}

int cmd_lexicon_show(const CliOptions& o) {
    AuditConfig config = resolve_config(o);
    const Lexicon lexicon = config.lexicon();
    for (const auto& cat : lexicon.categories()) {
        std::cout << cat.info.id << " (" << cat.info.display_name << "), "
                  << cat.phrases.size() << " terms:\n";
        for (const auto& p : cat.phrases) std::cout << "  " << p << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audit demographic bias in LLM-generated marketing slogans"};
    app.set_version_flag("--version", std::string("sloganaudit ") + kVersion);
    app.require_subcommand(1);

    CliOptions opts;

    auto* generate = app.add_subcommand("generate", "Generate a slogan corpus per target group");
    auto* analyze = app.add_subcommand("analyze", "Count dictionary terms in a corpus");
    auto* bias = app.add_subcommand("bias", "Compute the relative-bias table");
    auto* ks = app.add_subcommand("ks", "Run KS tests of each group against the baseline");
    auto* audit = app.add_subcommand("audit", "Full pipeline: generate, analyze, bias, ks");
    auto* lexicon = app.add_subcommand("lexicon", "Lexicon utilities");
    auto* lexicon_show = lexicon->add_subcommand("show", "Print the active term dictionaries");
    lexicon->require_subcommand(1);

    for (CLI::App* cmd : {generate, analyze, bias, ks, audit, lexicon_show})
        add_common_options(cmd, opts);
    bias->add_option("--counts", opts.counts, "Precomputed counts.json");
    ks->add_option("--counts", opts.counts, "Precomputed counts.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (generate->parsed()) return cmd_generate(opts);
        if (analyze->parsed()) return cmd_analyze(opts);
        if (bias->parsed()) return cmd_bias(opts);
        if (ks->parsed()) return cmd_ks(opts);
        if (audit->parsed()) return cmd_audit(opts);
        if (lexicon->parsed() && lexicon_show->parsed()) return cmd_lexicon_show(opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const GenerationError& e) {
        std::cerr << "generation error: " << e.what() << "\n";
        return kExitGeneration;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return kExitAnalysis;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnexpected;
    }
    return kExitConfig;
}
