#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "interleave_lab/analytic.hpp"
#include "interleave_lab/core.hpp"
#include "interleave_lab/random.hpp"

using namespace ilab;

namespace {

// Standard normal CDF by composite Simpson integration of the density.
double phi_by_quadrature(double z) {
    constexpr int kIntervals = 20000;
    const double h = z / kIntervals;
    auto density = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
    double s = density(0.0) + density(z);
    for (int i = 1; i < kIntervals; ++i) s += (i % 2 ? 4.0 : 2.0) * density(i * h);
    return 0.5 + s * h / 3.0;
}

// Click probability written out directly from the model.
double click_oracle(double er_self, double er_examined, double alpha) {
    return 0.5 * er_self / (alpha * er_examined + 1.0);
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an ilab::Error");
    return ErrorCode::IoError;
}

}  // namespace

TEST_SUITE("normal cdf") {
    TEST_CASE("matches numerical integration") {
        for (double z : {-6.0, -3.2, -1.0, -0.25, 0.0, 0.4, 1.96, 2.576, 5.0}) {
            CAPTURE(z);
            CHECK(std::abs(normal_cdf(z) - phi_by_quadrature(z)) < 1e-12);
        }
    }

    TEST_CASE("symmetry and monotonicity") {
        double prev = 0.0;
        for (double z = -8.0; z <= 8.0; z += 0.01) {
            CHECK(std::abs(normal_cdf(z) + normal_cdf(-z) - 1.0) < 1e-15);
            CHECK(normal_cdf(z) >= prev);
            prev = normal_cdf(z);
        }
        CHECK(normal_cdf(0.0) == 0.5);
    }
}

TEST_SUITE("error probability") {
    TEST_CASE("reflection") {
        RandomStream g(8);
        for (int i = 0; i < 1000; ++i) {
            const double d = (uniform01(g) - 0.5) * 0.02;
            const double v = 1e-7 + uniform01(g) * 1e-4;
            CHECK(std::abs(error_probability(d, v) + error_probability(-d, v) - 1.0) < 1e-12);
        }
    }

    TEST_CASE("zero variance") {
        CHECK(error_probability(0.1, 0.0) == 0.0);
        CHECK(error_probability(-0.1, 0.0) == 1.0);
        CHECK(code_of([] { error_probability(0.0, 0.0); }) == ErrorCode::Undefined);
        CHECK(code_of([] { error_probability(0.1, -1e-9); }) == ErrorCode::DomainError);
    }

    TEST_CASE("identical rankers with no clicks are a coin flip") {
        const auto pt = evaluate_scenario({0.0, 0.0, 10.0, 100});
        CHECK(pt.p_err_ab == 0.5);
        CHECK(pt.p_err_i == 0.5);
        CHECK(pt.diff == 0.0);
    }

    TEST_CASE("equal rankers give one half") {
        const auto pt = evaluate_scenario({0.4, 0.4, 10.0, 100});
        CHECK(pt.p_err_ab == 0.5);
        CHECK(pt.p_err_i == 0.5);
    }
}

TEST_SUITE("closed form") {
    TEST_CASE("examination function") {
        CHECK(examination_fn(0.0, 100.0) == 1.0);
        CHECK(examination_fn(1.0, 100.0) == doctest::Approx(1.0 / 101.0));
        CHECK(examination_fn(0.5, 0.0) == 1.0);
        CHECK(code_of([] { examination_fn(1.5, 1.0); }) == ErrorCode::DomainError);
        CHECK(code_of([] { examination_fn(0.5, -1.0); }) == ErrorCode::DomainError);
    }

    TEST_CASE("click probabilities against the model") {
        RandomStream g(9);
        for (int i = 0; i < 500; ++i) {
            const double a = uniform01(g), b = uniform01(g), alpha = 200.0 * uniform01(g);
            CHECK(expected_click_ab(a, alpha) == doctest::Approx(click_oracle(a, a, alpha)).epsilon(1e-14));
            CHECK(expected_click_interleaved(a, b, alpha) ==
                  doctest::Approx(click_oracle(a, std::max(a, b), alpha)).epsilon(1e-14));
        }
    }

    TEST_CASE("reference scenario at n = 1000") {
        const AnalyticScenario s{1.0, 0.2, 100.0, 1000};
        const auto pt = evaluate_scenario(s);
        const double pa_ab = click_oracle(1.0, 1.0, 100.0), pb_ab = click_oracle(0.2, 0.2, 100.0);
        const double pa_i = click_oracle(1.0, 1.0, 100.0), pb_i = click_oracle(0.2, 1.0, 100.0);
        CHECK(pt.ab.delta == doctest::Approx(pa_ab - pb_ab).epsilon(1e-12));
        CHECK(pt.interleaved.delta == doctest::Approx(pa_i - pb_i).epsilon(1e-12));
        CHECK(pt.ab.var_sum == doctest::Approx((pa_ab * (1 - pa_ab) + pb_ab * (1 - pb_ab)) / 1000).epsilon(1e-12));
        CHECK(pt.interleaved.var_sum == doctest::Approx((pa_i * (1 - pa_i) + pb_i * (1 - pb_i)) / 1000).epsilon(1e-12));
        // Rounded values quoted in the docs.
        CHECK(pt.interleaved.delta == doctest::Approx(0.003960).epsilon(1e-3));
        CHECK(pt.ab.delta == doctest::Approx(0.0001886).epsilon(1e-3));
        CHECK(pt.ab.var_sum == doctest::Approx(9.665e-6).epsilon(1e-3));
        CHECK(pt.interleaved.var_sum == doctest::Approx(5.915e-6).epsilon(1e-3));
    }

    TEST_CASE("reference scenario at n = 10000") {
        const auto pt = evaluate_scenario({1.0, 0.2, 100.0, 10000});
        const auto oracle = [](double pa, double pb) {
            return 1.0 - phi_by_quadrature((pa - pb) / std::sqrt((pa * (1 - pa) + pb * (1 - pb)) / 10000));
        };
        const double ab = oracle(click_oracle(1.0, 1.0, 100.0), click_oracle(0.2, 0.2, 100.0));
        const double il = oracle(click_oracle(1.0, 1.0, 100.0), click_oracle(0.2, 1.0, 100.0));
        CHECK(std::abs(pt.p_err_ab - ab) < 1e-6);
        CHECK(std::abs(pt.p_err_i - il) < 1e-6);
        CHECK(pt.p_err_ab == doctest::Approx(0.424).epsilon(2e-3));
        CHECK(pt.p_err_i < 1e-4);
        CHECK(pt.p_err_ab >= 0.35);
        CHECK(pt.p_err_ab <= 0.5);
    }

    TEST_CASE("scenario validation") {
        CHECK(code_of([] { evaluate_scenario({1.1, 0.2, 1.0, 10}); }) == ErrorCode::DomainError);
        CHECK(code_of([] { evaluate_scenario({0.5, 0.2, 1.0, 0}); }) == ErrorCode::DomainError);
        CHECK(code_of([] { evaluate_scenario({0.5, 0.2, NAN, 10}); }) == ErrorCode::DomainError);
        CHECK(code_of([] { sample_mean_variance(0.5, 0); }) == ErrorCode::DomainError);
    }
}

TEST_SUITE("theorems") {
    TEST_CASE("constant examination gives identical deltas and variances") {
        RandomStream g(10);
        for (int i = 0; i < 5000; ++i) {
            const double c = 1.0 - uniform01(g);
            const auto r = check_constant_case(c, uniform01(g), uniform01(g), 1 + uniform_index(g, 100000));
            CHECK(std::abs(r.delta_ab - r.delta_i) <= kTheoremTolerance);
            CHECK(std::abs(r.var_sum_ab - r.var_sum_i) <= kTheoremTolerance);
        }
    }

    TEST_CASE("relevance-aware examination favours interleaving") {
        RandomStream g(11);
        int strict = 0;
        for (int i = 0; i < 5000; ++i) {
            double a = uniform01(g), b = uniform01(g);
            if (a == b) continue;
            if (a < b) std::swap(a, b);
            const auto r = check_relevance_aware_case({a, b, 200.0 * (1.0 - uniform01(g)), 1 + uniform_index(g, 100000)});
            if (!r.boundary) {
                ++strict;
                CHECK(r.delta_i > r.delta_ab);
                CHECK(r.var_sum_ab > r.var_sum_i);
            }
        }
        CHECK(strict > 4900);
    }

    TEST_CASE("boundary cases collapse to equality") {
        CHECK(check_relevance_aware_case({0.8, 0.3, 0.0, 500}).boundary);
        CHECK(check_relevance_aware_case({0.8, 0.0, 50.0, 500}).boundary);
    }

    TEST_CASE("preconditions") {
        CHECK(code_of([] { check_relevance_aware_case({0.3, 0.3, 5.0, 10}); }) == ErrorCode::DomainError);
        CHECK(code_of([] { check_constant_case(0.0, 0.3, 0.2, 10); }) == ErrorCode::DomainError);
    }
}

TEST_SUITE("grid") {
    TEST_CASE("layout and diagonal") {
        const std::vector<double> alphas{1.0, 100.0};
        const auto pts = sweep_grid(alphas, 0.25, 1000);
        REQUIRE(pts.size() == 2 * 5 * 5);
        CHECK(pts[0].scenario.alpha == 1.0);
        CHECK(pts[1].scenario.er_b == 0.25);
        CHECK(pts[5].scenario.er_a == 0.25);
        CHECK(pts[25].scenario.alpha == 100.0);
        for (const auto& p : pts) {
            if (p.scenario.er_a == p.scenario.er_b) CHECK(std::abs(p.diff) <= 1e-12);
        }
    }

    TEST_CASE("a larger alpha widens the gap between the methods") {
        const std::vector<double> alphas{1.0, 100.0};
        const auto pts = sweep_grid(alphas, kDefaultGridStep, kDefaultAnalyticN);
        const std::size_t half = pts.size() / 2;
        double max_low = -1.0, max_high = -1.0;
        for (std::size_t i = 0; i < pts.size(); ++i) (i < half ? max_low : max_high) = std::max(i < half ? max_low : max_high, pts[i].diff);
        CHECK(max_high > max_low);
    }

    TEST_CASE("worker count does not change the output") {
        const std::vector<double> alphas{0.0, 3.0, 40.0};
        std::ostringstream one, many;
        write_sweep_csv(one, sweep_grid(alphas, 0.05, 2000, 1));
        write_sweep_csv(many, sweep_grid(alphas, 0.05, 2000, 7));
        CHECK(one.str() == many.str());
        CHECK(one.str().rfind("alpha,er_a,er_b,n,delta_ab,delta_i,var_ab,var_i,p_err_ab,p_err_i,diff\n", 0) == 0);
    }

    TEST_CASE("bad grid step") {
        const std::vector<double> alphas{1.0};
        CHECK(code_of([&] { sweep_grid(alphas, 0.3, 10); }) == ErrorCode::DomainError);
        CHECK(code_of([&] { sweep_grid(alphas, 0.0, 10); }) == ErrorCode::DomainError);
    }
}
