#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "interleave_lab/analytic.hpp"
#include "interleave_lab/clickmodel.hpp"
#include "interleave_lab/comparison.hpp"
#include "interleave_lab/dataio.hpp"
#include "interleave_lab/harness.hpp"

namespace py = pybind11;
using namespace ilab;

namespace {

std::vector<RelevanceGrade> to_grades(const std::vector<int>& g) {
    std::vector<RelevanceGrade> out;
    out.reserve(g.size());
    for (int v : g) out.push_back(RelevanceGrade{v});
    return out;
}

py::dict stats_dict(const MethodStats& m) {
    py::dict d;
    d["p_a"] = m.p_a;
    d["p_b"] = m.p_b;
    d["delta"] = m.delta;
    d["var_sum"] = m.var_sum;
    return d;
}

py::dict point_dict(const ErrorPoint& p) {
    py::dict d;
    d["er_a"] = p.scenario.er_a;
    d["er_b"] = p.scenario.er_b;
    d["alpha"] = p.scenario.alpha;
    d["n"] = p.scenario.n;
    d["ab"] = stats_dict(p.ab);
    d["interleaved"] = stats_dict(p.interleaved);
    d["p_err_ab"] = p.p_err_ab;
    d["p_err_i"] = p.p_err_i;
    d["diff"] = p.diff;
    return d;
}

py::dict report_dict(const TheoremReport& r) {
    py::dict d;
    d["delta_ab"] = r.delta_ab;
    d["delta_i"] = r.delta_i;
    d["var_sum_ab"] = r.var_sum_ab;
    d["var_sum_i"] = r.var_sum_i;
    d["boundary"] = r.boundary;
    return d;
}

std::vector<QueryRecord> dataset_from(const std::optional<std::string>& letor_text, std::size_t synthetic_queries,
                                      std::uint64_t synthetic_seed) {
    if (letor_text) {
        std::istringstream in(*letor_text);
        return parse_letor(in);
    }
    SyntheticSpec spec;
    spec.queries = synthetic_queries;
    spec.seed = synthetic_seed;
    return generate_synthetic(spec);
}

ExperimentConfig config_from(const std::string& click_model, std::size_t impressions, std::size_t repeats,
                             std::uint64_t seed, unsigned workers) {
    ExperimentConfig cfg;
    cfg.click_model = builtin_click_model(click_model);
    cfg.impressions = impressions;
    cfg.repeats = repeats;
    cfg.seed = seed;
    cfg.workers = workers;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Interleaving versus A/B testing: closed forms, click simulation and experiments";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    m.def("examination_fn", &examination_fn, py::arg("x"), py::arg("alpha"));
    m.def("expected_click_ab", py::overload_cast<double, double>(&expected_click_ab), py::arg("er_self"),
          py::arg("alpha"));
    m.def("expected_click_interleaved", py::overload_cast<double, double, double>(&expected_click_interleaved),
          py::arg("er_self"), py::arg("er_other"), py::arg("alpha"));
    m.def("normal_cdf", &normal_cdf, py::arg("z"));
    m.def("error_probability", &error_probability, py::arg("delta"), py::arg("var_sum"));

    m.def(
        "evaluate_scenario",
        [](double er_a, double er_b, double alpha, std::size_t n) { return point_dict(evaluate_scenario({er_a, er_b, alpha, n})); },
        py::arg("er_a"), py::arg("er_b"), py::arg("alpha"), py::arg("n") = kDefaultAnalyticN);

    m.def(
        "sweep_grid",
        [](const std::vector<double>& alphas, double grid_step, std::size_t n, unsigned workers) {
            std::vector<ErrorPoint> points;
            {
                py::gil_scoped_release release;
                points = sweep_grid(alphas, grid_step, n, workers);
            }
            py::list out;
            for (const auto& p : points) out.append(point_dict(p));
            return out;
        },
        py::arg("alphas"), py::arg("grid_step") = kDefaultGridStep, py::arg("n") = kDefaultAnalyticN,
        py::arg("workers") = 1);

    m.def(
        "check_constant_case",
        [](double c, double er_a, double er_b, std::size_t n) { return report_dict(check_constant_case(c, er_a, er_b, n)); },
        py::arg("c"), py::arg("er_a"), py::arg("er_b"), py::arg("n"));
    m.def(
        "check_relevance_aware_case",
        [](double er_a, double er_b, double alpha, std::size_t n) {
            return report_dict(check_relevance_aware_case({er_a, er_b, alpha, n}));
        },
        py::arg("er_a"), py::arg("er_b"), py::arg("alpha"), py::arg("n"));

    m.def(
        "dcg", [](const std::vector<int>& grades, std::size_t cutoff) { return dcg(to_grades(grades), cutoff); },
        py::arg("grades"), py::arg("cutoff"));
    m.def(
        "ndcg",
        [](const std::vector<int>& grades, const std::vector<int>& ideal, std::size_t cutoff) {
            return ndcg(to_grades(grades), to_grades(ideal), cutoff);
        },
        py::arg("grades"), py::arg("ideal"), py::arg("cutoff"));

    m.def(
        "parse_letor",
        [](const std::string& text, int max_grade) {
            std::istringstream in(text);
            py::list out;
            for (const auto& q : parse_letor(in, {max_grade})) {
                py::list docs;
                for (const auto& d : q.docs) {
                    py::dict doc;
                    doc["doc_id"] = d.doc_id;
                    doc["grade"] = d.grade.value;
                    doc["features"] = d.features;
                    docs.append(doc);
                }
                py::dict query;
                query["query_id"] = q.query_id;
                query["docs"] = docs;
                out.append(query);
            }
            return out;
        },
        py::arg("text"), py::arg("max_grade") = kDefaultMaxGrade);

    m.def(
        "draw_teams",
        [](std::size_t length, std::uint64_t seed) {
            RandomStream gen(seed);
            std::vector<Team> teams(length);
            draw_teams(gen, std::span<Team>(teams));
            std::vector<std::string> out;
            for (Team t : teams) out.emplace_back(to_string(t));
            return out;
        },
        py::arg("length"), py::arg("seed"));

    m.def(
        "score_impression",
        [](const std::vector<std::string>& teams, const std::vector<std::size_t>& clicks) {
            std::vector<Team> t;
            for (const auto& s : teams) {
                if (s != "A" && s != "B") throw Error(ErrorCode::DomainError, "teams must be 'A' or 'B'");
                t.push_back(s == "A" ? Team::A : Team::B);
            }
            const auto score = score_impression(t, ClickVector(t.size(), clicks));
            return py::make_tuple(score.score_a, score.score_b);
        },
        py::arg("teams"), py::arg("clicks"));

    m.def(
        "simulate_cascade",
        [](const std::vector<int>& grades, const std::string& click_model, std::uint64_t seed) {
            RandomStream gen(seed);
            const auto g = to_grades(grades);
            return simulate_cascade(std::span<const RelevanceGrade>(g), builtin_click_model(click_model), gen).positions();
        },
        py::arg("grades"), py::arg("click_model"), py::arg("seed"));

    m.def(
        "monte_carlo_error",
        [](double er_a, double er_b, double alpha, std::size_t n, const std::string& method, std::size_t trials,
           std::uint64_t seed) {
            RandomStream rng(seed);
            return monte_carlo_error({er_a, er_b, alpha, n}, method_from_string(method), trials, rng);
        },
        py::arg("er_a"), py::arg("er_b"), py::arg("alpha"), py::arg("n"), py::arg("method"),
        py::arg("trials") = 100000, py::arg("seed") = 42);

    m.def(
        "run_rq1",
        [](const std::string& click_model, std::size_t impressions, std::size_t repeats, std::uint64_t seed,
           std::optional<std::string> letor_text, std::size_t synthetic_queries, std::uint64_t synthetic_seed,
           unsigned workers) {
            const auto data = dataset_from(letor_text, synthetic_queries, synthetic_seed);
            const auto cfg = config_from(click_model, impressions, repeats, seed, workers);
            const auto pairs = enumerate_pairs(feature_indices(data), cfg.cutoff);
            Rq1Report report;
            {
                py::gil_scoped_release release;
                report = run_rq1(cfg, data, pairs);
            }
            std::ostringstream csv;
            write_rq1_csv(csv, report);
            return csv.str();
        },
        py::arg("click_model") = "navigational", py::arg("impressions") = 1000, py::arg("repeats") = 10,
        py::arg("seed") = 42, py::arg("letor_text") = py::none(), py::arg("synthetic_queries") = 60,
        py::arg("synthetic_seed") = 7, py::arg("workers") = 1,
        "Runs the error-rate-over-impressions experiment and returns its CSV text.");

    m.def(
        "run_rq2",
        [](const std::string& click_model, std::size_t impressions, std::size_t repeats, std::uint64_t seed,
           std::size_t query_samples, std::optional<std::string> letor_text, std::size_t synthetic_queries,
           std::uint64_t synthetic_seed, unsigned workers) {
            const auto data = dataset_from(letor_text, synthetic_queries, synthetic_seed);
            auto cfg = config_from(click_model, impressions, repeats, seed, workers);
            cfg.rq2_query_samples = query_samples;
            const auto pairs = enumerate_pairs(feature_indices(data), cfg.cutoff);
            Rq2Report report;
            {
                py::gil_scoped_release release;
                report = run_rq2(cfg, data, pairs);
            }
            std::ostringstream csv;
            write_rq2_csv(csv, report);
            return csv.str();
        },
        py::arg("click_model") = "navigational", py::arg("impressions") = 1000, py::arg("repeats") = 10,
        py::arg("seed") = 42, py::arg("query_samples") = 1000, py::arg("letor_text") = py::none(),
        py::arg("synthetic_queries") = 60, py::arg("synthetic_seed") = 7, py::arg("workers") = 1,
        "Runs the error-rate-by-nDCG-difference experiment and returns its CSV text.");
}
