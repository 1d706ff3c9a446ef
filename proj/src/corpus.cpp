#include "sloganaudit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sloganaudit/digest.hpp"
#include "sloganaudit/errors.hpp"

namespace sloganaudit {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim_copy(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool slogan_order(const Slogan& a, const Slogan& b) {
    if (a.group_id != b.group_id) return a.group_id < b.group_id;
    return a.index < b.index;
}

void append_errors(std::vector<std::string>& errors, std::string msg) {
    // Cap the list so a hopeless file does not flood the terminal.
    constexpr std::size_t kMaxErrors = 25;
    if (errors.size() < kMaxErrors) errors.push_back(std::move(msg));
}

[[noreturn]] void throw_joined(const std::string& prefix, const std::vector<std::string>& errors) {
    std::ostringstream out;
    out << prefix << ":";
    for (const auto& e : errors) out << "\n  - " << e;
    throw ValidationError(out.str());
}

} // namespace

bool is_valid_timestamp(const std::string& ts) {
    // YYYY-MM-DDThh:mm:ssZ
    if (ts.size() != 20) return false;
    for (std::size_t i = 0; i < 20; ++i) {
        char c = ts[i];
        switch (i) {
            case 4:
            case 7:
                if (c != '-') return false;
                break;
            case 10:
                if (c != 'T') return false;
                break;
            case 13:
            case 16:
                if (c != ':') return false;
                break;
            case 19:
                if (c != 'Z') return false;
                break;
            default:
                if (c < '0' || c > '9') return false;
        }
    }
    return true;
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

Corpus::Corpus(Taxonomy taxonomy, std::vector<Slogan> slogans)
    : taxonomy_(std::move(taxonomy)), slogans_(std::move(slogans)) {
    taxonomy_.validate();
    std::sort(slogans_.begin(), slogans_.end(), slogan_order);

    std::vector<std::string> errors;
    const Slogan* prev = nullptr;
    for (const auto& s : slogans_) {
        if (!taxonomy_.find_group(s.group_id))
            append_errors(errors, "unknown group_id '" + s.group_id + "' (index " +
                                      std::to_string(s.index) + ")");
        if (s.index < 0)
            append_errors(errors, "negative index " + std::to_string(s.index) + " in group '" +
                                      s.group_id + "'");
        if (trim_copy(s.text).empty())
            append_errors(errors, "empty slogan text at (" + s.group_id + ", " +
                                      std::to_string(s.index) + ")");
        if (!is_valid_timestamp(s.created_at))
            append_errors(errors, "bad created_at '" + s.created_at + "' at (" + s.group_id +
                                      ", " + std::to_string(s.index) + ")");
        if (prev && prev->group_id == s.group_id && prev->index == s.index)
            append_errors(errors, "duplicate (group_id, index) = (" + s.group_id + ", " +
                                      std::to_string(s.index) + ")");
        prev = &s;
    }
    if (!errors.empty()) throw_joined("invalid corpus", errors);
}

std::vector<const Slogan*> Corpus::group(const std::string& group_id) const {
    std::vector<const Slogan*> out;
    for (const auto& s : slogans_) {
        if (s.group_id == group_id) out.push_back(&s);
    }
    return out;
}

std::uint64_t Corpus::digest() const {
    Fnv64 h;
    h.update(to_hex64(taxonomy_digest(taxonomy_, PromptSpec{}))).sep();
    for (const auto& s : slogans_) {
        h.update(s.group_id).sep();
        h.update(static_cast<std::uint64_t>(s.index));
        h.update(s.prompt).sep().update(s.text).sep().update(s.model).sep();
        // created_at deliberately left out: re-generation at another time
        // with the same seed/model must produce the same digest.
    }
    return h.value();
}

std::string Corpus::digest_hex() const { return to_hex64(digest()); }

std::string slogan_to_jsonl(const Slogan& s) {
    ordered_json j;
    j["group_id"] = s.group_id;
    j["index"] = s.index;
    j["prompt"] = s.prompt;
    j["text"] = s.text;
    j["model"] = s.model;
    j["created_at"] = s.created_at;
    return j.dump();
}

Corpus load_corpus(const std::filesystem::path& path, const Taxonomy& taxonomy) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open corpus file: " + path.string());

    std::vector<Slogan> slogans;
    std::vector<std::string> errors;
    // first line number seen per (group_id, index), for duplicate reports
    std::map<std::pair<std::string, std::int64_t>, std::size_t> seen;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_copy(line).empty()) continue;

        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            append_errors(errors, "line " + std::to_string(lineno) + ": not a JSON object");
            continue;
        }
        Slogan s;
        try {
            s.group_id = j.at("group_id").get<std::string>();
            s.index = j.at("index").get<std::int64_t>();
            s.prompt = j.at("prompt").get<std::string>();
            s.text = j.at("text").get<std::string>();
            s.model = j.at("model").get<std::string>();
            s.created_at = j.at("created_at").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            append_errors(errors,
                          "line " + std::to_string(lineno) + ": " + std::string(e.what()));
            continue;
        }
        if (!taxonomy.find_group(s.group_id)) {
            append_errors(errors, "line " + std::to_string(lineno) + ": unknown group_id '" +
                                      s.group_id + "'");
            continue;
        }
        if (trim_copy(s.text).empty()) {
            append_errors(errors, "line " + std::to_string(lineno) + ": empty slogan text");
            continue;
        }
        auto [it, inserted] = seen.emplace(std::make_pair(s.group_id, s.index), lineno);
        if (!inserted) {
            append_errors(errors, "duplicate (" + s.group_id + ", " + std::to_string(s.index) +
                                      ") at lines " + std::to_string(it->second) + " and " +
                                      std::to_string(lineno));
            continue;
        }
        slogans.push_back(std::move(s));
    }
    if (!errors.empty()) throw_joined("invalid corpus file " + path.string(), errors);
    return Corpus(taxonomy, std::move(slogans));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open corpus file for writing: " + path.string());
    for (const auto& s : corpus.slogans()) {
        out << slogan_to_jsonl(s) << '\n';
    }
    out.flush();
    if (!out) throw ConfigError("write failed: " + path.string());
}

} // namespace sloganaudit
