#include "sloganaudit/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sloganaudit/digest.hpp"
#include "sloganaudit/errors.hpp"

namespace sloganaudit {

namespace {

constexpr std::size_t kMaxPhraseTokens = 5;

const std::vector<std::string> kCanonicalCategoryOrder = {
    "empowerment", "financial", "benefits_features", "demographic_specific"};

std::string display_name_for(const std::string& id) {
    static const std::map<std::string, std::string> names = {
        {"empowerment", "Empowerment"},
        {"financial", "Financial"},
        {"benefits_features", "Benefits/Features"},
        {"demographic_specific", "Demographic-Specific"},
    };
    auto it = names.find(id);
    return it != names.end() ? it->second : id;
}

bool is_ascii_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

} // namespace

std::vector<std::string> normalize_text(std::string_view text) {
    std::string mapped(text.size(), ' ');
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        const unsigned char uc = static_cast<unsigned char>(c);
        if (uc >= 0x80) {
            mapped[i] = c;  // keep UTF-8 sequences intact
        } else if (c >= 'A' && c <= 'Z') {
            mapped[i] = static_cast<char>(c - 'A' + 'a');
        } else if (is_ascii_alnum(c)) {
            mapped[i] = c;
        } else if (c == '\'' && i > 0 && i + 1 < text.size() &&
                   is_ascii_alnum(text[i - 1]) && is_ascii_alnum(text[i + 1])) {
            mapped[i] = c;  // internal apostrophe: "bachelor's" stays whole
        }
        // everything else stays a space
    }
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < mapped.size()) {
        while (i < mapped.size() && mapped[i] == ' ') ++i;
        std::size_t start = i;
        while (i < mapped.size() && mapped[i] != ' ') ++i;
        if (i > start) tokens.push_back(mapped.substr(start, i - start));
    }
    return tokens;
}

Lexicon Lexicon::from_lists(
    const std::vector<std::pair<TermCategory, std::vector<std::string>>>& lists) {
    Lexicon lex;
    std::set<std::string> ids;
    for (const auto& [info, phrases] : lists) {
        if (info.id.empty()) throw ValidationError("term category with empty id");
        if (!ids.insert(info.id).second)
            throw ValidationError("duplicate term category '" + info.id + "'");
        Category cat;
        cat.info = info;
        std::set<std::string> seen;
        for (const auto& raw : phrases) {
            auto tokens = normalize_text(raw);
            if (tokens.empty())
                throw ValidationError("category '" + info.id + "': phrase '" + raw +
                                      "' normalizes to nothing");
            if (tokens.size() > kMaxPhraseTokens)
                throw ValidationError("category '" + info.id + "': phrase '" + raw +
                                      "' exceeds " + std::to_string(kMaxPhraseTokens) +
                                      " tokens");
            std::string phrase = join_tokens(tokens);
            if (!seen.insert(phrase).second)
                throw ValidationError("category '" + info.id + "': duplicate phrase '" +
                                      phrase + "'");
            cat.phrases.push_back(std::move(phrase));
            cat.tokens.push_back(std::move(tokens));
        }
        lex.categories_.push_back(std::move(cat));
    }
    return lex;
}

const Lexicon::Category* Lexicon::find(std::string_view category_id) const {
    for (const auto& c : categories_) {
        if (c.info.id == category_id) return &c;
    }
    return nullptr;
}

std::vector<std::string> Lexicon::category_ids() const {
    std::vector<std::string> out;
    out.reserve(categories_.size());
    for (const auto& c : categories_) out.push_back(c.info.id);
    return out;
}

int Lexicon::dict_size(std::string_view category_id) const {
    const Category* c = find(category_id);
    if (!c) throw ConfigError("unknown term category '" + std::string(category_id) + "'");
    return static_cast<int>(c->phrases.size());
}

std::uint64_t Lexicon::digest() const {
    Fnv64 h;
    for (const auto& c : categories_) {
        h.update(c.info.id).sep();
        for (const auto& p : c.phrases) h.update(p).sep();
    }
    return h.value();
}

// Table 2 term lists, verbatim.
const Lexicon& default_lexicon() {
    static const Lexicon lex = Lexicon::from_lists({
        {{"empowerment", "Empowerment"},
         {"empower",     "support",    "uplift",       "confidence", "motivate",
          "empowered",   "supported",  "uplifting",    "confident",  "motivated",
          "encourage",   "encouraged", "encouragement", "inspire",   "inspired",
          "inspiration", "strength",   "strong",       "resilient",  "determined",
          "ambitious",   "ambition",   "success",      "empowering", "supportive",
          "uplifted",    "confidently", "motivating",  "encouraging", "inspiring",
          "independence", "flourish",  "thrive",       "growth"}},
        {{"financial", "Financial"},
         {"interest rate", "competitive interest rate", "affordable rate", "savings",
          "high-yield savings", "checking account", "earnings", "wealth",
          "investment options", "grow your wealth", "mortgage rates",
          "low-interest mortgage", "financial foundation", "APY", "annual percentage yield",
          "loans", "home loans", "auto loans", "personal loans", "investment", "returns",
          "dividends", "no fees", "low fees", "zero charges", "free of charge", "credit card",
          "balance transfer", "equity", "refinancing", "financial planning"}},
        {{"benefits_features", "Benefits/Features"},
         {"tailored solutions", "guidance", "cutting-edge technology", "dynamic lifestyle",
          "first-time homebuyer programs", "exclusive banking community", "low-interest",
          "secure", "safe", "protected", "fraud prevention", "insured", "rewards", "cashback",
          "points", "benefits", "bonuses", "customer service", "support",
          "personalized service", "dedicated support", "flexible terms", "customized",
          "tailored", "adaptable", "global access", "instant alerts", "account management",
          "financial advice", "multi-currency", "high-tech", "paperless",
          "seamless online banking", "mobile app", "24/7 service", "exclusive benefits"}},
        {{"demographic_specific", "Demographic-Specific"},
         {"young professionals", "career", "growth", "achieve", "start", "build",
          "financial future", "retirement", "peace of mind", "nest egg", "golden years",
          "secure future", "family", "home", "kids", "children", "education", "protection",
          "luxury", "exclusive", "premium", "elite", "prestige", "newlyweds",
          "middle-aged couples", "single parents", "high-income", "dual income",
          "empty nesters", "first-time buyers", "retirees", "ambitious", "dynamic lifestyle",
          "personalized", "personal", "tailored", "individual", "specific", "customized",
          "bespoke", "unique", "one-of-a-kind", "custom-fit", "individualized",
          "custom-built", "custom-crafted", "specialized", "distinctive", "made-to-order",
          "personal touch", "handcrafted"}},
    });
    return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open lexicon file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValidationError("lexicon file " + path.string() + " is not a JSON object");

    std::vector<std::string> order;
    for (const auto& id : kCanonicalCategoryOrder) {
        if (j.contains(id)) order.push_back(id);
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(order.begin(), order.end(), it.key()) == order.end())
            order.push_back(it.key());
    }

    std::vector<std::pair<TermCategory, std::vector<std::string>>> lists;
    for (const auto& id : order) {
        const auto& arr = j.at(id);
        if (!arr.is_array())
            throw ValidationError("lexicon category '" + id + "' must map to an array");
        std::vector<std::string> phrases;
        for (const auto& p : arr) {
            if (!p.is_string())
                throw ValidationError("lexicon category '" + id + "' has a non-string entry");
            phrases.push_back(p.get<std::string>());
        }
        lists.push_back({{id, display_name_for(id)}, std::move(phrases)});
    }
    return Lexicon::from_lists(lists);
}

void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    for (const auto& c : lexicon.categories()) j[c.info.id] = c.phrases;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open lexicon file for writing: " + path.string());
    out << j.dump(2) << '\n';
}

namespace {

// Token-level trie, one per category. Longest match = deepest terminal node
// reached while tokens keep matching.
struct TokenTrie {
    struct Node {
        std::map<std::string, int, std::less<>> next;
        int phrase = -1;  // index into the category's phrase list
    };
    std::vector<Node> nodes{1};

    void insert(const std::vector<std::string>& tokens, int phrase_index) {
        int cur = 0;
        for (const auto& t : tokens) {
            auto it = nodes[static_cast<std::size_t>(cur)].next.find(t);
            if (it == nodes[static_cast<std::size_t>(cur)].next.end()) {
                const int idx = static_cast<int>(nodes.size());
                nodes[static_cast<std::size_t>(cur)].next.emplace(t, idx);
                nodes.emplace_back();
                cur = idx;
            } else {
                cur = it->second;
            }
        }
        nodes[static_cast<std::size_t>(cur)].phrase = phrase_index;
    }

    // Longest phrase starting at tokens[pos]; returns (phrase index, length).
    std::pair<int, std::size_t> longest(const std::vector<std::string>& tokens,
                                        std::size_t pos) const {
        int cur = 0;
        int best = -1;
        std::size_t best_len = 0;
        for (std::size_t i = pos; i < tokens.size(); ++i) {
            auto it = nodes[static_cast<std::size_t>(cur)].next.find(tokens[i]);
            if (it == nodes[static_cast<std::size_t>(cur)].next.end()) break;
            cur = it->second;
            if (nodes[static_cast<std::size_t>(cur)].phrase >= 0) {
                best = nodes[static_cast<std::size_t>(cur)].phrase;
                best_len = i - pos + 1;
            }
        }
        return {best, best_len};
    }
};

const std::vector<TokenTrie>& tries_for(const Lexicon& lexicon) {
    // Per-lexicon cache; lexicons are immutable after construction.
    static std::map<std::uint64_t, std::vector<TokenTrie>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = cache.try_emplace(lexicon.digest());
    if (inserted) {
        for (const auto& cat : lexicon.categories()) {
            TokenTrie trie;
            for (std::size_t p = 0; p < cat.tokens.size(); ++p)
                trie.insert(cat.tokens[p], static_cast<int>(p));
            it->second.push_back(std::move(trie));
        }
    }
    return it->second;
}

} // namespace

std::vector<TermHit> match_terms(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
    const auto& tries = tries_for(lexicon);
    std::vector<TermHit> hits;
    const auto& cats = lexicon.categories();
    for (std::size_t c = 0; c < cats.size(); ++c) {
        std::size_t pos = 0;
        while (pos < tokens.size()) {
            auto [phrase, len] = tries[c].longest(tokens, pos);
            if (phrase >= 0) {
                hits.push_back(TermHit{.group_id = {},
                                       .slogan_index = -1,
                                       .category_id = cats[c].info.id,
                                       .phrase = cats[c].phrases[static_cast<std::size_t>(phrase)],
                                       .token_start = pos,
                                       .token_count = len});
                pos += len;  // no overlapping hits within a category
            } else {
                ++pos;
            }
        }
    }
    return hits;
}

std::optional<std::size_t> CountsTable::group_index(std::string_view group_id) const {
    for (std::size_t i = 0; i < group_ids.size(); ++i) {
        if (group_ids[i] == group_id) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> CountsTable::category_index(std::string_view category_id) const {
    for (std::size_t i = 0; i < category_ids.size(); ++i) {
        if (category_ids[i] == category_id) return i;
    }
    return std::nullopt;
}

std::int64_t CountsTable::raw_count(std::string_view group_id,
                                    std::string_view category_id) const {
    auto g = group_index(group_id);
    auto c = category_index(category_id);
    if (!g || !c)
        throw AnalysisError("counts table has no cell (" + std::string(group_id) + ", " +
                            std::string(category_id) + ")");
    return raw[*g][*c];
}

const std::vector<int>& CountsTable::slogan_counts(std::string_view group_id,
                                                   std::string_view category_id) const {
    auto g = group_index(group_id);
    auto c = category_index(category_id);
    if (!g || !c)
        throw AnalysisError("counts table has no cell (" + std::string(group_id) + ", " +
                            std::string(category_id) + ")");
    return per_slogan[*g][*c];
}

void CountsTable::validate() const {
    if (raw.size() != group_ids.size() || per_slogan.size() != group_ids.size() ||
        n_slogans.size() != group_ids.size())
        throw ValidationError("counts table: row count mismatch");
    for (std::size_t g = 0; g < group_ids.size(); ++g) {
        if (raw[g].size() != category_ids.size() || per_slogan[g].size() != category_ids.size())
            throw ValidationError("counts table: column count mismatch in group '" +
                                  group_ids[g] + "'");
        for (std::size_t c = 0; c < category_ids.size(); ++c) {
            if (static_cast<std::int64_t>(per_slogan[g][c].size()) != n_slogans[g])
                throw ValidationError("counts table: vector length mismatch at (" +
                                      group_ids[g] + ", " + category_ids[c] + ")");
            std::int64_t sum = 0;
            for (int v : per_slogan[g][c]) {
                if (v < 0)
                    throw ValidationError("counts table: negative count at (" + group_ids[g] +
                                          ", " + category_ids[c] + ")");
                sum += v;
            }
            if (sum != raw[g][c])
                throw ValidationError("counts table: raw_count != per-slogan sum at (" +
                                      group_ids[g] + ", " + category_ids[c] + ")");
        }
    }
}

CountsTable count_corpus(const Corpus& corpus, const Lexicon& lexicon) {
    CountsTable table;
    for (const auto& g : corpus.taxonomy().groups) table.group_ids.push_back(g.id);
    table.category_ids = lexicon.category_ids();

    const std::size_t n_groups = table.group_ids.size();
    const std::size_t n_cats = table.category_ids.size();
    table.raw.assign(n_groups, std::vector<std::int64_t>(n_cats, 0));
    table.per_slogan.assign(n_groups, std::vector<std::vector<int>>(n_cats));
    table.n_slogans.assign(n_groups, 0);

    for (std::size_t g = 0; g < n_groups; ++g) {
        const auto slogans = corpus.group(table.group_ids[g]);
        table.n_slogans[g] = static_cast<std::int64_t>(slogans.size());
        for (std::size_t c = 0; c < n_cats; ++c)
            table.per_slogan[g][c].assign(slogans.size(), 0);

        for (std::size_t i = 0; i < slogans.size(); ++i) {
            const auto tokens = normalize_text(slogans[i]->text);
            for (const auto& hit : match_terms(tokens, lexicon)) {
                const auto c = table.category_index(hit.category_id);
                table.per_slogan[g][*c][i] += 1;
                table.raw[g][*c] += 1;
            }
        }
    }
    return table;
}

void save_counts(const CountsTable& counts, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["groups"] = counts.group_ids;
    j["categories"] = counts.category_ids;
    nlohmann::ordered_json raw = nlohmann::ordered_json::object();
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (std::size_t g = 0; g < counts.group_ids.size(); ++g) {
        for (std::size_t c = 0; c < counts.category_ids.size(); ++c) {
            const std::string key = counts.group_ids[g] + "/" + counts.category_ids[c];
            raw[key] = counts.raw[g][c];
            per[key] = counts.per_slogan[g][c];
        }
    }
    j["raw_count"] = std::move(raw);
    j["per_slogan"] = std::move(per);

    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open counts file for writing: " + path.string());
    out << j.dump(2) << '\n';
}

CountsTable load_counts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open counts file: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValidationError("counts file " + path.string() + " is not a JSON object");

    CountsTable table;
    try {
        table.group_ids = j.at("groups").get<std::vector<std::string>>();
        table.category_ids = j.at("categories").get<std::vector<std::string>>();
        const auto& raw = j.at("raw_count");
        const auto& per = j.at("per_slogan");
        for (const auto& gid : table.group_ids) {
            std::vector<std::int64_t> raw_row;
            std::vector<std::vector<int>> per_row;
            for (const auto& cid : table.category_ids) {
                const std::string key = gid + "/" + cid;
                raw_row.push_back(raw.at(key).get<std::int64_t>());
                per_row.push_back(per.at(key).get<std::vector<int>>());
            }
            table.raw.push_back(std::move(raw_row));
            table.per_slogan.push_back(std::move(per_row));
            const auto& row = table.per_slogan.back();
            table.n_slogans.push_back(
                row.empty() ? 0 : static_cast<std::int64_t>(row.front().size()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("counts file " + path.string() + ": " + e.what());
    }
    table.validate();
    return table;
}

} // namespace sloganaudit
