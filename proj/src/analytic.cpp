#include "interleave_lab/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "interleave_lab/core.hpp"
#include "interleave_lab/format.hpp"
#include "parallel.hpp"

namespace ilab {

namespace {

void require_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::DomainError, std::string(what) + " must lie in [0, 1]");
}

void require_alpha(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::DomainError, "alpha must be finite and >= 0");
}

// E(S) * E(O * R) with E(S) = 1/2 for both methods.
double click_score(double examination, double relevance) { return 0.5 * examination * relevance; }

double error_or_tie(double delta, double var_sum) {
    // Identical rankers with no clicks at all: no information, coin flip.
    if (delta == 0.0 && var_sum == 0.0) return 0.5;
    return error_probability(delta, var_sum);
}

}  // namespace

double examination_fn(double x, double alpha) {
    require_unit(x, "relevance level");
    require_alpha(alpha);
    return 1.0 / (alpha * x + 1.0);
}

ExaminationFunction reciprocal_examination(double alpha) {
    require_alpha(alpha);
    return [alpha](double x) { return examination_fn(x, alpha); };
}

void validate_scenario(const AnalyticScenario& s) {
    require_unit(s.er_a, "E(R_A)");
    require_unit(s.er_b, "E(R_B)");
    require_alpha(s.alpha);
    if (s.n < 1) throw Error(ErrorCode::DomainError, "n must be >= 1");
}

double expected_click_ab(double er_self, const ExaminationFunction& f) {
    require_unit(er_self, "expected relevance");
    return click_score(f(er_self), er_self);
}

double expected_click_ab(double er_self, double alpha) { return expected_click_ab(er_self, reciprocal_examination(alpha)); }

double expected_click_interleaved(double er_self, double er_other, const ExaminationFunction& f) {
    require_unit(er_self, "expected relevance");
    require_unit(er_other, "expected relevance");
    return click_score(f(std::max(er_self, er_other)), er_self);
}

double expected_click_interleaved(double er_self, double er_other, double alpha) {
    return expected_click_interleaved(er_self, er_other, reciprocal_examination(alpha));
}

double sample_mean_variance(double p, std::size_t n) {
    require_unit(p, "click probability");
    if (n < 1) throw Error(ErrorCode::DomainError, "n must be >= 1");
    return p * (1.0 - p) / static_cast<double>(n);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double error_probability(double delta, double var_sum) {
    if (!(var_sum >= 0.0) || !std::isfinite(delta)) {
        throw Error(ErrorCode::DomainError, "variance sum must be >= 0 and delta finite");
    }
    if (var_sum == 0.0) {
        if (delta == 0.0) throw Error(ErrorCode::Undefined, "error probability undefined for zero delta and variance");
        return delta > 0.0 ? 0.0 : 1.0;
    }
    return normal_cdf(-delta / std::sqrt(var_sum));
}

MethodStats ab_stats(const AnalyticScenario& s, const ExaminationFunction& f) {
    MethodStats m;
    m.p_a = expected_click_ab(s.er_a, f);
    m.p_b = expected_click_ab(s.er_b, f);
    m.delta = m.p_a - m.p_b;
    m.var_sum = sample_mean_variance(m.p_a, s.n) + sample_mean_variance(m.p_b, s.n);
    return m;
}

MethodStats interleaved_stats(const AnalyticScenario& s, const ExaminationFunction& f) {
    MethodStats m;
    m.p_a = expected_click_interleaved(s.er_a, s.er_b, f);
    m.p_b = expected_click_interleaved(s.er_b, s.er_a, f);
    m.delta = m.p_a - m.p_b;
    m.var_sum = sample_mean_variance(m.p_a, s.n) + sample_mean_variance(m.p_b, s.n);
    return m;
}

ErrorPoint evaluate_scenario(const AnalyticScenario& s, const ExaminationFunction& f) {
    validate_scenario(s);
    ErrorPoint pt;
    pt.scenario = s;
    pt.ab = ab_stats(s, f);
    pt.interleaved = interleaved_stats(s, f);
    pt.p_err_ab = error_or_tie(pt.ab.delta, pt.ab.var_sum);
    pt.p_err_i = error_or_tie(pt.interleaved.delta, pt.interleaved.var_sum);
    pt.diff = pt.p_err_ab - pt.p_err_i;
    return pt;
}

ErrorPoint evaluate_scenario(const AnalyticScenario& s) {
    validate_scenario(s);
    return evaluate_scenario(s, reciprocal_examination(s.alpha));
}

std::vector<ErrorPoint> sweep_grid(std::span<const double> alphas, double grid_step, std::size_t n, unsigned workers) {
    if (!(grid_step > 0.0 && grid_step <= 1.0)) throw Error(ErrorCode::DomainError, "grid step must lie in (0, 1]");
    const double cells = 1.0 / grid_step;
    const auto steps = static_cast<std::size_t>(std::llround(cells));
    if (std::abs(cells - static_cast<double>(steps)) > 1e-9 * cells) {
        throw Error(ErrorCode::DomainError, "grid step must divide [0, 1] evenly");
    }
    if (n < 1) throw Error(ErrorCode::DomainError, "n must be >= 1");
    for (double a : alphas) require_alpha(a);

    const std::size_t side = steps + 1;
    const std::size_t rows = alphas.size() * side;  // one row per (alpha, er_a)
    std::vector<ErrorPoint> out(rows * side);
    auto level = [steps](std::size_t k) { return static_cast<double>(k) / static_cast<double>(steps); };
    auto fill_row = [&](std::size_t row) {
        const double alpha = alphas[row / side];
        const auto f = reciprocal_examination(alpha);
        for (std::size_t j = 0; j < side; ++j) {
            out[row * side + j] = evaluate_scenario({level(row % side), level(j), alpha, n}, f);
        }
    };

    detail::parallel_for(rows, workers, fill_row);
    return out;
}

void write_sweep_csv(std::ostream& out, std::span<const ErrorPoint> points) {
    out << "alpha,er_a,er_b,n,delta_ab,delta_i,var_ab,var_i,p_err_ab,p_err_i,diff\n";
    for (const auto& p : points) {
        out << fmt_double(p.scenario.alpha) << ',' << fmt_double(p.scenario.er_a) << ','
            << fmt_double(p.scenario.er_b) << ',' << p.scenario.n << ',' << fmt_double(p.ab.delta) << ','
            << fmt_double(p.interleaved.delta) << ',' << fmt_double(p.ab.var_sum) << ','
            << fmt_double(p.interleaved.var_sum) << ',' << fmt_double(p.p_err_ab) << ',' << fmt_double(p.p_err_i)
            << ',' << fmt_double(p.diff) << '\n';
    }
}

namespace {

bool close(double x, double y) { return std::abs(x - y) <= kTheoremTolerance; }

std::string describe(const TheoremReport& r) {
    return "delta_ab=" + fmt_double(r.delta_ab) + " delta_i=" + fmt_double(r.delta_i) +
           " var_sum_ab=" + fmt_double(r.var_sum_ab) + " var_sum_i=" + fmt_double(r.var_sum_i);
}

TheoremReport report_from(const MethodStats& ab, const MethodStats& il) {
    return {ab.delta, il.delta, ab.var_sum, il.var_sum, false};
}

}  // namespace

TheoremReport check_constant_case(double c, double er_a, double er_b, std::size_t n) {
    if (!(c > 0.0 && c <= 1.0)) throw Error(ErrorCode::DomainError, "examination constant must lie in (0, 1]");
    const AnalyticScenario s{er_a, er_b, 0.0, n};
    validate_scenario(s);
    const ExaminationFunction constant = [c](double) { return c; };
    auto report = report_from(ab_stats(s, constant), interleaved_stats(s, constant));
    if (!close(report.delta_ab, report.delta_i) || !close(report.var_sum_ab, report.var_sum_i)) {
        throw Error(ErrorCode::TheoremViolation, "constant examination: methods disagree: " + describe(report));
    }
    return report;
}

TheoremReport check_relevance_aware_case(const AnalyticScenario& s) {
    validate_scenario(s);
    if (!(s.er_a > s.er_b)) throw Error(ErrorCode::DomainError, "relevance-aware check requires E(R_A) > E(R_B)");
    const auto f = reciprocal_examination(s.alpha);
    auto report = report_from(ab_stats(s, f), interleaved_stats(s, f));
    // Flat f, or a ranker B that never earns clicks, removes the gap.
    report.boundary = s.alpha == 0.0 || s.er_b == 0.0;
    if (report.boundary) {
        if (!close(report.delta_ab, report.delta_i) || !close(report.var_sum_ab, report.var_sum_i)) {
            throw Error(ErrorCode::TheoremViolation, "boundary case should collapse to equality: " + describe(report));
        }
        return report;
    }
    if (!(report.delta_i > report.delta_ab) || !(report.var_sum_ab > report.var_sum_i)) {
        throw Error(ErrorCode::TheoremViolation, "relevance-aware examination: expected delta_i > delta_ab and "
                                                 "var_sum_ab > var_sum_i: " + describe(report));
    }
    return report;
}

}  // namespace ilab
