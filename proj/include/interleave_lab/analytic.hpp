#pragma once

// Closed-form error probabilities of interleaving and A/B testing.
//
// A click on a ranker's item is S * O * R with E(S) = 1/2. The examination
// term E(O * R) is f(x) * E(R), where the examination function f is evaluated
// at the ranker's own relevance for A/B testing and at the larger of the two
// relevances for interleaving. Each method's sample means are treated as
// normal with binomial variance p(1 - p)/n, and the error probability is the
// chance the better ranker's mean does not exceed the other's.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace ilab {

// Probability of continuing to examine after relevance level x in [0, 1].
// Must satisfy f(0) = 1 and be non-increasing.
using ExaminationFunction = std::function<double(double)>;

// f(x) = 1 / (alpha * x + 1).
double examination_fn(double x, double alpha);
ExaminationFunction reciprocal_examination(double alpha);

struct AnalyticScenario {
    double er_a = 0.0;
    double er_b = 0.0;
    double alpha = 0.0;
    std::size_t n = 1;
};

void validate_scenario(const AnalyticScenario& s);

// Expected per-impression click score of one ranker.
double expected_click_ab(double er_self, double alpha);
double expected_click_ab(double er_self, const ExaminationFunction& f);
double expected_click_interleaved(double er_self, double er_other, double alpha);
double expected_click_interleaved(double er_self, double er_other, const ExaminationFunction& f);

// Variance of a mean of n Bernoulli(p) draws.
double sample_mean_variance(double p, std::size_t n);

// Standard normal CDF.
double normal_cdf(double z);

// P(mean difference <= 0) for a normal difference with the given mean and
// variance. With zero variance a non-zero delta gives 0 or 1; both zero is
// Undefined.
double error_probability(double delta, double var_sum);

struct MethodStats {
    double p_a = 0.0;
    double p_b = 0.0;
    double delta = 0.0;
    double var_sum = 0.0;
};

struct ErrorPoint {
    AnalyticScenario scenario;
    MethodStats ab;
    MethodStats interleaved;
    double p_err_ab = 0.0;
    double p_err_i = 0.0;
    double diff = 0.0;  // p_err_ab - p_err_i
};

MethodStats ab_stats(const AnalyticScenario& s, const ExaminationFunction& f);
MethodStats interleaved_stats(const AnalyticScenario& s, const ExaminationFunction& f);

ErrorPoint evaluate_scenario(const AnalyticScenario& s);
ErrorPoint evaluate_scenario(const AnalyticScenario& s, const ExaminationFunction& f);

inline constexpr std::size_t kDefaultAnalyticN = 10000;
inline constexpr double kDefaultGridStep = 0.02;

// Full [0,1]^2 relevance grid for each alpha, ordered alpha, er_a, er_b.
// `grid_step` must divide 1 evenly.
std::vector<ErrorPoint> sweep_grid(std::span<const double> alphas, double grid_step, std::size_t n,
                                   unsigned workers = 1);

void write_sweep_csv(std::ostream& out, std::span<const ErrorPoint> points);

// Theorem checks ---------------------------------------------------------

struct TheoremReport {
    double delta_ab = 0.0;
    double delta_i = 0.0;
    double var_sum_ab = 0.0;
    double var_sum_i = 0.0;
    // Relevance-aware check only: the inequalities degenerate to equalities
    // (alpha == 0 or er_b == 0) and were checked as such.
    bool boundary = false;
};

inline constexpr double kTheoremTolerance = 1e-12;

// Constant examination c for every ranker and method. Throws
// TheoremViolation unless deltas and variance sums agree within 1e-12.
TheoremReport check_constant_case(double c, double er_a, double er_b, std::size_t n);

// Requires er_a > er_b. Throws TheoremViolation unless delta_I > delta_AB and
// var_sum_AB > var_sum_I, or, on the boundary, both pairs agree.
TheoremReport check_relevance_aware_case(const AnalyticScenario& s);

}  // namespace ilab
