#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "interleave_lab/analytic.hpp"
#include "interleave_lab/cli.hpp"
#include "interleave_lab/clickmodel.hpp"
#include "interleave_lab/comparison.hpp"
#include "interleave_lab/dataio.hpp"
#include "interleave_lab/format.hpp"
#include "interleave_lab/harness.hpp"

namespace ilab {

namespace {

struct Check {
    std::string name;
    // Returns an empty string on success, otherwise what went wrong.
    std::function<std::string()> run;
};

std::string expect(bool ok, const std::string& detail) { return ok ? std::string() : detail; }

std::string theorem_sweep() {
    auto gen = RandomStream::derive(1, {});
    for (int i = 0; i < 2000; ++i) {
        const double c = 1.0 - uniform01(gen);
        double a = uniform01(gen);
        double b = uniform01(gen);
        const std::size_t n = 1 + uniform_index(gen, 50000);
        check_constant_case(c, a, b, n);
        if (a < b) std::swap(a, b);
        if (a == b) continue;
        check_relevance_aware_case({a, b, 200.0 * (1.0 - uniform01(gen)), n});
    }
    return {};
}

std::string cdf_symmetry() {
    for (double d : {1e-4, 3e-3, 0.02}) {
        for (double v : {1e-6, 1e-5, 1e-3}) {
            const double sum = error_probability(d, v) + error_probability(-d, v);
            if (std::abs(sum - 1.0) > 1e-12) return "P(d) + P(-d) = " + fmt_double(sum);
        }
    }
    return {};
}

std::string team_marginal() {
    auto gen = RandomStream::derive(2, {});
    constexpr int kDraws = 20000;
    std::vector<int> heads(5, 0);
    std::vector<Team> teams(5);
    for (int i = 0; i < kDraws; ++i) {
        draw_teams(gen, std::span<Team>(teams));
        for (std::size_t l = 0; l < 5; ++l) heads[l] += teams[l] == Team::A;
    }
    for (int h : heads) {
        const double f = static_cast<double>(h) / kDraws;
        if (std::abs(f - 0.5) > 0.02) return "team A frequency " + fmt_double(f);
    }
    return {};
}

std::string cascade_frequency() {
    auto gen = RandomStream::derive(3, {});
    constexpr int kDraws = 20000;
    const std::vector<RelevanceGrade> one{RelevanceGrade{1}};
    const auto nav = navigational_spec();
    int clicks = 0;
    for (int i = 0; i < kDraws; ++i) clicks += static_cast<int>(simulate_cascade(std::span(one), nav, gen).count());
    const double f = static_cast<double>(clicks) / kDraws;
    return expect(std::abs(f - 0.5) < 0.02, "grade-1 click frequency " + fmt_double(f));
}

std::string ndcg_examples() {
    const std::vector<RelevanceGrade> r{{0}, {1}, {2}};
    const std::vector<RelevanceGrade> ideal{{2}, {1}, {0}};
    const double v = ndcg(r, ideal, 3);
    if (std::abs(v - 0.5869) > 1e-4) return "nDCG(0,1,2) = " + fmt_double(v);
    return expect(ndcg(ideal, ideal, 3) == 1.0, "ideal ordering is not 1");
}

std::string figure_three_point() {
    const auto pt = evaluate_scenario({1.0, 0.2, 100.0, 10000});
    return expect(pt.p_err_ab >= 0.35 && pt.p_err_ab <= 0.5 && pt.p_err_i < 1e-4,
                  "p_err_ab=" + fmt_double(pt.p_err_ab) + " p_err_i=" + fmt_double(pt.p_err_i));
}

std::string monte_carlo_agreement() {
    const AnalyticScenario s{0.6, 0.3, 10.0, 2000};
    const auto pt = evaluate_scenario(s);
    auto gen = RandomStream::derive(4, {});
    const double mc = monte_carlo_error(s, Method::AbTesting, 20000, gen);
    const double half = 2.576 * std::sqrt(pt.p_err_ab * (1.0 - pt.p_err_ab) / 20000.0);
    return expect(std::abs(mc - pt.p_err_ab) <= half,
                  "monte carlo " + fmt_double(mc) + " vs closed form " + fmt_double(pt.p_err_ab));
}

std::string rq1_determinism() {
    SyntheticSpec spec;
    spec.queries = 20;
    const auto data = generate_synthetic(spec);
    const auto features = feature_indices(data);
    const auto pairs = enumerate_pairs(features, kDefaultCutoff);
    ExperimentConfig cfg;
    cfg.impressions = 100;
    cfg.repeats = 2;
    std::ostringstream first;
    std::ostringstream second;
    write_rq1_csv(first, run_rq1(cfg, data, pairs));
    cfg.workers = 3;
    write_rq1_csv(second, run_rq1(cfg, data, pairs));
    return expect(first.str() == second.str(), "RQ1 output depends on worker count");
}

}  // namespace

int run_selftest(std::ostream& out) {
    const std::vector<Check> checks{
        {"theorem_sweep", theorem_sweep},
        {"error_probability_symmetry", cdf_symmetry},
        {"team_marginal", team_marginal},
        {"cascade_click_frequency", cascade_frequency},
        {"ndcg_examples", ndcg_examples},
        {"error_probability_point", figure_three_point},
        {"monte_carlo_agreement", monte_carlo_agreement},
        {"rq1_determinism", rq1_determinism},
    };
    int failures = 0;
    for (const auto& check : checks) {
        std::string problem;
        try {
            problem = check.run();
        } catch (const std::exception& e) {
            problem = e.what();
        }
        if (problem.empty()) {
            out << "PASS " << check.name << '\n';
        } else {
            ++failures;
            out << "FAIL " << check.name << ": " << problem << '\n';
        }
    }
    out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << '\n';
    return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace ilab
