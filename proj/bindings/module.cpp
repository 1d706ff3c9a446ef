#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sloganaudit/bias.hpp"
#include "sloganaudit/corpus.hpp"
#include "sloganaudit/errors.hpp"
#include "sloganaudit/generate.hpp"
#include "sloganaudit/lexicon.hpp"
#include "sloganaudit/stats.hpp"
#include "sloganaudit/taxonomy.hpp"
#include "sloganaudit/version.hpp"

namespace py = pybind11;
using namespace sloganaudit;

namespace {

Lexicon lexicon_or_default(const std::optional<Lexicon>& lex) {
    return lex ? *lex : default_lexicon();
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Slogan bias auditing: lexicon matching, relative bias, KS tests";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
    py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_ValueError);

    py::class_<DemographicCategory>(m, "DemographicCategory")
        .def(py::init<std::string, std::string>(), py::arg("id"), py::arg("display_name") = "")
        .def_readwrite("id", &DemographicCategory::id)
        .def_readwrite("display_name", &DemographicCategory::display_name)
        .def("__repr__", [](const DemographicCategory& c) {
            return "DemographicCategory(id='" + c.id + "')";
        });

    py::class_<TargetGroup>(m, "TargetGroup")
        .def(py::init<std::string, std::string, std::string, bool>(), py::arg("id"),
             py::arg("category"), py::arg("descriptor"), py::arg("is_baseline") = false)
        .def_readwrite("id", &TargetGroup::id)
        .def_readwrite("category", &TargetGroup::category)
        .def_readwrite("descriptor", &TargetGroup::descriptor)
        .def_readwrite("is_baseline", &TargetGroup::is_baseline)
        .def("__repr__",
             [](const TargetGroup& g) { return "TargetGroup(id='" + g.id + "')"; });

    py::class_<PromptSpec>(m, "PromptSpec")
        .def(py::init<>())
        .def_readwrite("template_text", &PromptSpec::template_text)
        .def_readwrite("product", &PromptSpec::product);

    py::class_<Taxonomy>(m, "Taxonomy")
        .def(py::init<>())
        .def_readwrite("categories", &Taxonomy::categories)
        .def_readwrite("groups", &Taxonomy::groups)
        .def("validate", &Taxonomy::validate)
        .def("baseline", &Taxonomy::baseline, py::return_value_policy::copy)
        .def("find_group",
             [](const Taxonomy& t, const std::string& id) -> std::optional<TargetGroup> {
                 const TargetGroup* g = t.find_group(id);
                 if (!g) return std::nullopt;
                 return *g;
             });

    m.def("default_taxonomy", &default_taxonomy);
    m.def("build_prompt", &build_prompt, py::arg("group"), py::arg("spec") = PromptSpec{});

    py::class_<Slogan>(m, "Slogan")
        .def(py::init<>())
        .def_readwrite("group_id", &Slogan::group_id)
        .def_readwrite("index", &Slogan::index)
        .def_readwrite("prompt", &Slogan::prompt)
        .def_readwrite("text", &Slogan::text)
        .def_readwrite("model", &Slogan::model)
        .def_readwrite("created_at", &Slogan::created_at);

    py::class_<Corpus>(m, "Corpus")
        .def(py::init<Taxonomy, std::vector<Slogan>>(), py::arg("taxonomy"),
             py::arg("slogans"))
        .def_property_readonly("slogans", &Corpus::slogans)
        .def("__len__", &Corpus::size)
        .def("group",
             [](const Corpus& c, const std::string& group_id) {
                 std::vector<Slogan> out;
                 for (const Slogan* s : c.group(group_id)) out.push_back(*s);
                 return out;
             })
        .def("digest_hex", &Corpus::digest_hex);

    m.def("load_corpus", &load_corpus, py::arg("path"), py::arg("taxonomy"));
    m.def("save_corpus", &save_corpus, py::arg("corpus"), py::arg("path"));

    m.def("normalize_text",
          [](const std::string& text) { return normalize_text(text); });

    py::class_<TermCategory>(m, "TermCategory")
        .def(py::init<std::string, std::string>(), py::arg("id"), py::arg("display_name") = "")
        .def_readwrite("id", &TermCategory::id)
        .def_readwrite("display_name", &TermCategory::display_name);

    py::class_<Lexicon>(m, "Lexicon")
        .def_static(
            "from_lists",
            [](const std::vector<std::pair<std::string, std::vector<std::string>>>& lists) {
                std::vector<std::pair<TermCategory, std::vector<std::string>>> typed;
                for (const auto& [cid, phrases] : lists)
                    typed.push_back({TermCategory{cid, cid}, phrases});
                return Lexicon::from_lists(typed);
            },
            py::arg("lists"))
        .def("category_ids", &Lexicon::category_ids)
        .def("dict_size",
             [](const Lexicon& lex, const std::string& cid) { return lex.dict_size(cid); })
        .def("phrases", [](const Lexicon& lex, const std::string& cid) {
            const auto* cat = lex.find(cid);
            if (!cat) throw ConfigError("unknown term category '" + cid + "'");
            return cat->phrases;
        });

    m.def("default_lexicon", [] { return default_lexicon(); });
    m.def("load_lexicon", &load_lexicon, py::arg("path"));

    py::class_<TermHit>(m, "TermHit")
        .def_readonly("category_id", &TermHit::category_id)
        .def_readonly("phrase", &TermHit::phrase)
        .def_readonly("token_start", &TermHit::token_start)
        .def_readonly("token_count", &TermHit::token_count)
        .def("__repr__", [](const TermHit& h) {
            return "TermHit(category='" + h.category_id + "', phrase='" + h.phrase + "', at=" +
                   std::to_string(h.token_start) + ")";
        });

    m.def(
        "match_terms",
        [](const std::vector<std::string>& tokens, const std::optional<Lexicon>& lex) {
            return match_terms(tokens, lexicon_or_default(lex));
        },
        py::arg("tokens"), py::arg("lexicon") = std::nullopt);

    py::class_<CountsTable>(m, "CountsTable")
        .def_readonly("group_ids", &CountsTable::group_ids)
        .def_readonly("category_ids", &CountsTable::category_ids)
        .def("raw_count",
             [](const CountsTable& c, const std::string& g, const std::string& cat) {
                 return c.raw_count(g, cat);
             })
        .def("per_slogan", [](const CountsTable& c, const std::string& g,
                              const std::string& cat) { return c.slogan_counts(g, cat); });

    m.def(
        "count_corpus",
        [](const Corpus& corpus, const std::optional<Lexicon>& lex) {
            return count_corpus(corpus, lexicon_or_default(lex));
        },
        py::arg("corpus"), py::arg("lexicon") = std::nullopt);

    py::class_<BiasCell>(m, "BiasCell")
        .def_readonly("demographic_category", &BiasCell::demographic_category)
        .def_readonly("group_id", &BiasCell::group_id)
        .def_readonly("category_id", &BiasCell::category_id)
        .def_readonly("raw_count", &BiasCell::raw_count)
        .def_readonly("dict_size", &BiasCell::dict_size)
        .def_readonly("normalized_count", &BiasCell::normalized_count)
        .def_readonly("relative_bias", &BiasCell::relative_bias)
        .def_readonly("relative_bias_pct", &BiasCell::relative_bias_pct);

    py::class_<BiasTable>(m, "BiasTable")
        .def_readonly("cells", &BiasTable::cells)
        .def_readonly("included_groups", &BiasTable::included_groups)
        .def_readonly("no_detections", &BiasTable::no_detections)
        .def("find", [](const BiasTable& t, const std::string& g, const std::string& c)
                 -> std::optional<BiasCell> {
                 const BiasCell* cell = t.find(g, c);
                 if (!cell) return std::nullopt;
                 return *cell;
             });

    m.def("normalized_count", &normalized_count, py::arg("raw"), py::arg("dict_size"));
    m.def("relative_bias", &relative_bias, py::arg("norms"), py::arg("group_id"));
    m.def(
        "bias_table",
        [](const CountsTable& counts, const std::optional<Lexicon>& lex,
           const std::optional<Taxonomy>& taxonomy, const std::string& scope,
           bool include_baseline) {
            return bias_table(counts, lexicon_or_default(lex),
                              taxonomy ? *taxonomy : default_taxonomy(), parse_scope(scope),
                              include_baseline);
        },
        py::arg("counts"), py::arg("lexicon") = std::nullopt,
        py::arg("taxonomy") = std::nullopt, py::arg("scope") = "all",
        py::arg("include_baseline") = true);

    py::class_<EcdfPoint>(m, "EcdfPoint")
        .def_readonly("value", &EcdfPoint::value)
        .def_readonly("cumulative", &EcdfPoint::cumulative)
        .def("__repr__", [](const EcdfPoint& p) {
            return "(" + std::to_string(p.value) + ", " + std::to_string(p.cumulative) + ")";
        });

    py::class_<EcdfCurve>(m, "EcdfCurve")
        .def_readonly("points", &EcdfCurve::points)
        .def("at", &EcdfCurve::at, py::arg("x"));

    m.def("ecdf", [](const std::vector<double>& sample) { return ecdf(sample); },
          py::arg("sample"));
    m.def(
        "ks_statistic",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            return ks_statistic(a, b);
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "ks_pvalue",
        [](double d, int n_a, int n_b, const std::string& method, int rounds,
           std::uint64_t seed) {
            return ks_pvalue(d, n_a, n_b, parse_p_method(method),
                             PermutationOptions{rounds, seed});
        },
        py::arg("d"), py::arg("n_a"), py::arg("n_b"), py::arg("method") = "asymptotic",
        py::arg("rounds") = 10'000, py::arg("seed") = 0);
    m.def(
        "ks_permutation_pvalue",
        [](const std::vector<double>& a, const std::vector<double>& b, int rounds,
           std::uint64_t seed) { return ks_permutation_pvalue(a, b, rounds, seed); },
        py::arg("a"), py::arg("b"), py::arg("rounds") = 10'000, py::arg("seed") = 0);

    py::class_<KsResult>(m, "KsResult")
        .def_readonly("group_id", &KsResult::group_id)
        .def_readonly("category_id", &KsResult::category_id)
        .def_readonly("n_target", &KsResult::n_target)
        .def_readonly("n_baseline", &KsResult::n_baseline)
        .def_readonly("d_statistic", &KsResult::d_statistic)
        .def_readonly("p_value", &KsResult::p_value)
        .def_property_readonly(
            "p_method", [](const KsResult& r) { return to_string(r.p_method); })
        .def("__repr__", [](const KsResult& r) {
            return "KsResult(" + r.group_id + "/" + r.category_id +
                   ", D=" + std::to_string(r.d_statistic) + ", p=" +
                   std::to_string(r.p_value) + ")";
        });

    m.def(
        "compare_to_baseline",
        [](const CountsTable& counts, const std::string& baseline_id,
           const std::string& method, int rounds, std::uint64_t seed) {
            return compare_to_baseline(
                counts, baseline_id,
                KsOptions{parse_p_method(method), rounds, seed});
        },
        py::arg("counts"), py::arg("baseline_id") = "general",
        py::arg("method") = "asymptotic", py::arg("rounds") = 10'000, py::arg("seed") = 0);

    m.def(
        "generate_synthetic",
        [](int n_per_group, std::uint64_t seed,
           const std::map<std::string, std::map<std::string, int>>& plan,
           const std::optional<Taxonomy>& taxonomy) {
            const Taxonomy t = taxonomy ? *taxonomy : default_taxonomy();
            SyntheticBackendConfig config;
            config.seed = seed;
            config.plan.insertions = plan;
            GenerationParams params;
            params.model = "synthetic";
            params.n_per_group = n_per_group;
            params.seed = seed;
            config.plan.validate(t, default_lexicon());
            SyntheticBackend backend(config);
            return generate_all(backend, t, params, PromptSpec{});
        },
        py::arg("n_per_group") = 100, py::arg("seed") = 0,
        py::arg("plan") = std::map<std::string, std::map<std::string, int>>{},
        py::arg("taxonomy") = std::nullopt,
        "Deterministic test corpus: filler text plus planted dictionary phrases");
}
