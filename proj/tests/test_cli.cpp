#include <doctest.h>

#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sloganaudit/corpus.hpp"

using namespace sloganaudit;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr interleaved
};

std::string cli_path() {
    const char* p = std::getenv("SLOGANAUDIT_CLI");
    REQUIRE_MESSAGE(p != nullptr, "SLOGANAUDIT_CLI must point at the built binary");
    return p;
}

fs::path fixtures_dir() {
    const char* p = std::getenv("SLOGANAUDIT_FIXTURES");
    REQUIRE_MESSAGE(p != nullptr, "SLOGANAUDIT_FIXTURES must point at tests/fixtures");
    return fs::path(p);
}

RunResult run_cli(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    RunResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buf.data(), buf.size(), pipe)) result.output += buf.data();
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path temp_dir(const std::string& tag) {
    static int counter = 0;
    auto dir = fs::temp_directory_path() /
               ("sloganaudit_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::size_t line_count(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) {
        if (c == '\n') ++n;
    }
    return n;
}

} // namespace

TEST_CASE("generate writes a deterministic 1700-slogan corpus") {
    const auto out1 = temp_dir("gen1");
    const auto out2 = temp_dir("gen2");
    const std::string common = "generate --backend synthetic --seed 7 --no-cache --out ";

    auto r1 = run_cli(common + out1.string());
    REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
    CHECK(r1.output.find("[17/17]") != std::string::npos);

    auto r2 = run_cli(common + out2.string());
    REQUIRE(r2.exit_code == 0);

    const std::string a = read_file(out1 / "corpus.jsonl");
    CHECK(line_count(a) == 1700);
    CHECK(a == read_file(out2 / "corpus.jsonl"));
}

TEST_CASE("generate with a missing API key variable fails fast with exit 2") {
    ::unsetenv("SLOGANAUDIT_CLI_MISSING_KEY");
    const auto out = temp_dir("nokey");
    auto r = run_cli("generate --backend http --model gpt-test --api-key-env "
                     "SLOGANAUDIT_CLI_MISSING_KEY --out " +
                     out.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("SLOGANAUDIT_CLI_MISSING_KEY") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "corpus.jsonl"));
}

TEST_CASE("analyze produces counts with per-category totals") {
    const auto out = temp_dir("analyze");
    auto gen = run_cli("generate --backend synthetic --seed 3 --n-per-group 5 --no-cache --out " +
                       out.string());
    REQUIRE_MESSAGE(gen.exit_code == 0, gen.output);

    auto r = run_cli("analyze --corpus " + (out / "corpus.jsonl").string() + " --out " +
                     out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    CHECK(r.output.find("empowerment:") != std::string::npos);
    CHECK(r.output.find("financial:") != std::string::npos);
    CHECK(fs::exists(out / "counts.json"));

    const auto counts = nlohmann::json::parse(read_file(out / "counts.json"));
    CHECK(counts.at("per_slogan").size() == 17 * 4);
}

TEST_CASE("analyze rejects a corpus with an unknown group id via exit 2") {
    const auto out = temp_dir("badgroup");
    {
        std::ofstream f(out / "bad.jsonl", std::ios::binary);
        f << R"({"group_id":"martian","index":0,"prompt":"p","text":"Hi","model":"m",)"
          << R"("created_at":"2024-05-01T12:00:00Z"})" << "\n";
    }
    auto r = run_cli("analyze --corpus " + (out / "bad.jsonl").string() + " --out " +
                     out.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("martian") != std::string::npos);
}

TEST_CASE("empty-group corpora still produce zero-vector counts") {
    const auto out = temp_dir("emptygroups");
    { std::ofstream f(out / "empty.jsonl", std::ios::binary); }
    auto r = run_cli("analyze --corpus " + (out / "empty.jsonl").string() + " --out " +
                     out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    const auto counts = nlohmann::json::parse(read_file(out / "counts.json"));
    CHECK(counts.at("raw_count").at("female/empowerment") == 0);
    CHECK(counts.at("per_slogan").at("female/empowerment").empty());
}

TEST_CASE("audit runs the full pipeline deterministically") {
    const auto out1 = temp_dir("audit1");
    const auto out2 = temp_dir("audit2");
    const std::string common =
        "audit --backend synthetic --seed 7 --n-per-group 5 --no-cache --out ";

    auto r1 = run_cli(common + out1.string());
    REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
    for (const char* name : {"corpus.jsonl", "counts.json", "bias_table.csv", "ks_results.csv",
                             "cdf_export.json", "report.json"}) {
        CHECK_MESSAGE(fs::exists(out1 / name), name);
    }

    // data files do not embed the output path: byte-identical across out dirs
    auto r2 = run_cli(common + out2.string());
    REQUIRE(r2.exit_code == 0);
    for (const char* name : {"corpus.jsonl", "counts.json", "bias_table.csv", "ks_results.csv",
                             "cdf_export.json"}) {
        CHECK_MESSAGE(read_file(out1 / name) == read_file(out2 / name), name);
    }

    // report.json echoes the config (including out_dir), so compare reruns
    // of the identical command
    const std::string report_before = read_file(out1 / "report.json");
    auto r3 = run_cli(common + out1.string());
    REQUIRE(r3.exit_code == 0);
    CHECK(read_file(out1 / "report.json") == report_before);

    // the console grid shows 16 target rows x 4 percent columns
    std::istringstream in(r1.output);
    std::string line;
    int grid_rows = 0;
    while (std::getline(in, line)) {
        if (std::count(line.begin(), line.end(), '%') == 4) ++grid_rows;
    }
    CHECK(grid_rows == 16);
}

TEST_CASE("report cells sum to one per category within the configured scope") {
    const auto out_all = temp_dir("scope_all");
    const auto out_pc = temp_dir("scope_pc");
    auto r1 = run_cli("audit --backend synthetic --seed 11 --n-per-group 4 --no-cache "
                      "--denominator-scope all --out " +
                      out_all.string());
    REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
    auto r2 = run_cli("audit --backend synthetic --seed 11 --n-per-group 4 --no-cache "
                      "--denominator-scope per_category --out " +
                      out_pc.string());
    REQUIRE(r2.exit_code == 0);

    auto sums = [](const fs::path& report, bool per_category) {
        const auto j = nlohmann::json::parse(std::ifstream(report));
        std::map<std::string, double> acc;
        for (const auto& cell : j.at("bias_table").at("cells")) {
            std::string key = cell.at("term_category").get<std::string>();
            if (per_category) key += "/" + cell.at("demographic_category").get<std::string>();
            acc[key] += cell.at("relative_bias").get<double>();
        }
        return acc;
    };
    for (const auto& [key, sum] : sums(out_all / "report.json", false)) {
        CHECK_MESSAGE(std::abs(sum - 1.0) < 1e-9, key, " sum=", sum);
    }
    for (const auto& [key, sum] : sums(out_pc / "report.json", true)) {
        CHECK_MESSAGE(std::abs(sum - 1.0) < 1e-9, key, " sum=", sum);
    }

    // CSV percentages are rounded to 2 decimals; their sums stay near 100
    std::istringstream csv(read_file(out_all / "bias_table.csv"));
    std::string line;
    std::getline(csv, line);  // header
    std::map<std::string, double> pct;
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 7);
        pct[fields[2]] += std::stod(fields[6]);
    }
    for (const auto& [cat, sum] : pct) CHECK_MESSAGE(std::abs(sum - 100.0) < 0.1, cat);
}

TEST_CASE("ks subcommand writes results and optional alpha column") {
    const auto out = temp_dir("ks");
    auto gen = run_cli("generate --backend synthetic --seed 4 --n-per-group 6 --no-cache --out " +
                       out.string());
    REQUIRE(gen.exit_code == 0);

    auto r = run_cli("ks --corpus " + (out / "corpus.jsonl").string() + " --alpha 0.05 --out " +
                     out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    const std::string csv = read_file(out / "ks_results.csv");
    CHECK(csv.find(",significant") != std::string::npos);
    CHECK(line_count(csv) == 1 + 64);

    const auto cdf = nlohmann::json::parse(read_file(out / "cdf_export.json"));
    CHECK(cdf.at("baseline_id") == "general");
    CHECK(cdf.at("groups").size() == 16);
}

TEST_CASE("bias subcommand accepts precomputed counts") {
    const auto out = temp_dir("bias");
    auto gen = run_cli("generate --backend synthetic --seed 5 --n-per-group 4 --no-cache --out " +
                       out.string());
    REQUIRE(gen.exit_code == 0);
    auto analyze = run_cli("analyze --corpus " + (out / "corpus.jsonl").string() + " --out " +
                           out.string());
    REQUIRE(analyze.exit_code == 0);

    auto r = run_cli("bias --counts " + (out / "counts.json").string() + " --out " +
                     out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    CHECK(fs::exists(out / "bias_table.csv"));
    CHECK(r.output.find("%") != std::string::npos);
}

TEST_CASE("lexicon show prints the four dictionaries") {
    auto r = run_cli("lexicon show");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("empowerment (Empowerment), 34 terms:") != std::string::npos);
    CHECK(r.output.find("financial") != std::string::npos);
    CHECK(r.output.find("benefits_features") != std::string::npos);
    CHECK(r.output.find("demographic_specific") != std::string::npos);
    CHECK(r.output.find("competitive interest rate") != std::string::npos);
}

TEST_CASE("usage errors exit with the config code") {
    auto r = run_cli("audit --denominator-scope sideways --out /tmp");
    CHECK(r.exit_code == 2);

    auto r2 = run_cli("analyze");  // --corpus missing
    CHECK(r2.exit_code == 2);

    auto r3 = run_cli("frobnicate");
    CHECK(r3.exit_code == 2);
}

TEST_CASE("generation failures exit with code 3") {
    ::setenv("SLOGANAUDIT_CLI_DEAD_KEY", "sk-test", 1);
    const auto out = temp_dir("dead");
    auto r = run_cli("generate --backend http --model gpt-test --endpoint "
                     "http://127.0.0.1:9/v1/chat/completions --api-key-env "
                     "SLOGANAUDIT_CLI_DEAD_KEY --n-per-group 1 --no-cache --out " +
                     out.string());
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("generation error") != std::string::npos);
}

TEST_CASE("a config file can replace the taxonomy") {
    const auto out = temp_dir("cfg");
    {
        std::ofstream f(out / "config.json");
        f << R"({
  "categories": [{"id": "general", "display_name": "General"},
                 {"id": "pets", "display_name": "Pets"}],
  "groups": [
    {"id": "general", "category": "general", "descriptor": "any individual",
     "is_baseline": true},
    {"id": "cats", "category": "pets", "descriptor": "cat owners"},
    {"id": "dogs", "category": "pets", "descriptor": "dog owners"}
  ],
  "n_per_group": 3,
  "seed": 5
})";
    }
    auto r = run_cli("generate --config " + (out / "config.json").string() +
                     " --backend synthetic --no-cache --out " + out.string());
    REQUIRE_MESSAGE(r.exit_code == 0, r.output);
    const std::string corpus = read_file(out / "corpus.jsonl");
    CHECK(line_count(corpus) == 9);
    CHECK(corpus.find("cat owners") != std::string::npos);
}

TEST_CASE("audit over the frozen fixture replays byte-identically") {
    const auto fixture = fixtures_dir() / "audit_fixture.jsonl";
    REQUIRE_MESSAGE(fs::exists(fixture), "frozen fixture corpus must ship in-repo");

    const auto out1 = temp_dir("fix1");
    const auto out2 = temp_dir("fix2");
    const std::string common = "audit --backend replay --corpus " + fixture.string() +
                               " --seed 7 --no-cache --out ";
    auto r1 = run_cli(common + out1.string());
    REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
    auto r2 = run_cli(common + out2.string());
    REQUIRE(r2.exit_code == 0);

    for (const char* name : {"bias_table.csv", "ks_results.csv", "cdf_export.json"}) {
        CHECK_MESSAGE(read_file(out1 / name) == read_file(out2 / name), name);
    }
    const Corpus fixture_corpus = load_corpus(fixture, default_taxonomy());
    CHECK(fixture_corpus.size() == 1700);
}
