#include "sloganaudit/taxonomy.hpp"

#include <algorithm>
#include <set>

#include "sloganaudit/digest.hpp"
#include "sloganaudit/errors.hpp"

namespace sloganaudit {

namespace {

constexpr std::string_view kDescriptorSlot = "{}";
constexpr std::string_view kProductSlot = "{product}";

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string_view::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++n;
    }
    return n;
}

bool is_lower_id(std::string_view id) {
    if (id.empty()) return false;
    return std::all_of(id.begin(), id.end(), [](unsigned char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    });
}

} // namespace

const DemographicCategory* Taxonomy::find_category(const std::string& id) const {
    for (const auto& c : categories) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

const TargetGroup* Taxonomy::find_group(const std::string& id) const {
    for (const auto& g : groups) {
        if (g.id == id) return &g;
    }
    return nullptr;
}

const TargetGroup& Taxonomy::baseline() const {
    const TargetGroup* found = nullptr;
    for (const auto& g : groups) {
        if (g.is_baseline) {
            if (found) throw ValidationError("taxonomy has more than one baseline group");
            found = &g;
        }
    }
    if (!found) throw ValidationError("taxonomy has no baseline group");
    return *found;
}

std::vector<const TargetGroup*> Taxonomy::targets() const {
    std::vector<const TargetGroup*> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        if (!g.is_baseline) out.push_back(&g);
    }
    return out;
}

void Taxonomy::validate() const {
    std::set<std::string> category_ids;
    for (const auto& c : categories) {
        if (!is_lower_id(c.id))
            throw ValidationError("category id '" + c.id + "' must be nonempty lowercase");
        if (!category_ids.insert(c.id).second)
            throw ValidationError("duplicate category id '" + c.id + "'");
    }
    std::set<std::string> group_ids;
    int baselines = 0;
    for (const auto& g : groups) {
        if (!is_lower_id(g.id))
            throw ValidationError("group id '" + g.id + "' must be nonempty lowercase");
        if (!group_ids.insert(g.id).second)
            throw ValidationError("duplicate group id '" + g.id + "'");
        if (!category_ids.contains(g.category))
            throw ValidationError("group '" + g.id + "' references unknown category '" +
                                  g.category + "'");
        if (g.descriptor.empty())
            throw ValidationError("group '" + g.id + "' has an empty descriptor");
        if (g.is_baseline) ++baselines;
    }
    if (baselines != 1)
        throw ValidationError("taxonomy must have exactly one baseline group, found " +
                              std::to_string(baselines));
}

std::string build_prompt(const TargetGroup& group, const PromptSpec& spec) {
    if (group.descriptor.empty())
        throw ConfigError("group '" + group.id + "' has an empty descriptor");
    std::string expanded = replace_all(spec.template_text, kProductSlot, spec.product);
    const std::size_t slots = count_occurrences(expanded, kDescriptorSlot);
    if (slots != 1)
        throw ConfigError("prompt template must contain '{}' exactly once, found " +
                          std::to_string(slots));
    return replace_all(std::move(expanded), kDescriptorSlot, group.descriptor);
}

Taxonomy default_taxonomy() {
    Taxonomy t;
    t.categories = {
        {"general", "General"},
        {"gender", "Gender"},
        {"age", "Age"},
        {"marital_status", "Marital Status"},
        {"income_level", "Income Level"},
        {"education_level", "Education Level"},
    };
    t.groups = {
        {"general", "general", "any individual", true},
        {"male", "gender", "a male individual", false},
        {"female", "gender", "a female individual", false},
        {"non_binary", "gender", "a non-binary individual", false},
        {"age_18_25", "age", "individuals aged 18-25", false},
        {"age_25_40", "age", "individuals aged 25-40", false},
        {"age_40_plus", "age", "individuals aged 40+", false},
        {"single", "marital_status", "single individuals", false},
        {"married", "marital_status", "married individuals", false},
        {"divorced", "marital_status", "divorced individuals", false},
        {"income_10k_60k", "income_level", "individuals earning $10,000-$60,000 a year", false},
        {"income_100k_150k", "income_level", "individuals earning $100,000-$150,000 a year",
         false},
        {"income_250k_plus", "income_level", "individuals earning $250,000+ a year", false},
        {"bachelors", "education_level", "individuals who have a bachelor's degree", false},
        {"masters", "education_level", "individuals who have a master's degree", false},
        {"high_school", "education_level", "individuals who have a high school degree", false},
        {"phd", "education_level", "individuals who have a PhD", false},
    };
    return t;
}

std::uint64_t taxonomy_digest(const Taxonomy& taxonomy, const PromptSpec& spec) {
    Fnv64 h;
    for (const auto& c : taxonomy.categories) {
        h.update(c.id).sep().update(c.display_name).sep();
    }
    for (const auto& g : taxonomy.groups) {
        h.update(g.id).sep().update(g.category).sep().update(g.descriptor).sep();
        h.update(g.is_baseline ? "1" : "0").sep();
    }
    h.update(spec.template_text).sep().update(spec.product).sep();
    return h.value();
}

} // namespace sloganaudit
