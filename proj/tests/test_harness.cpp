#include "doctest.h"

#include <cmath>
#include <sstream>

#include "interleave_lab/harness.hpp"

using namespace ilab;

namespace {

std::vector<double> binomial_pmf(std::size_t n, double p) {
    std::vector<double> out(n + 1, 0.0);
    if (p == 0.0) {
        out[0] = 1.0;
        return out;
    }
    for (std::size_t k = 0; k <= n; ++k) {
        const double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        out[k] = std::exp(lg + k * std::log(p) + (n - k) * std::log1p(-p));
    }
    return out;
}

// P(X_A < X_B) + P(X_A == X_B) / 2 for independent binomial click counts.
double exact_error(std::size_t n, double p_a, double p_b) {
    const auto a = binomial_pmf(n, p_a);
    const auto b = binomial_pmf(n, p_b);
    double below = 0.0, err = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        err += b[k] * (below + 0.5 * a[k]);
        below += a[k];
    }
    return err;
}

QueryRecord query(const std::string& id, std::vector<std::pair<int, std::vector<double>>> docs) {
    QueryRecord q{id, {}};
    for (std::size_t i = 0; i < docs.size(); ++i) {
        Document d{id + "-" + std::to_string(i), RelevanceGrade{docs[i].first}, {}};
        for (std::size_t f = 0; f < docs[i].second.size(); ++f) d.features[static_cast<int>(f) + 1] = docs[i].second[f];
        q.docs.push_back(std::move(d));
    }
    return q;
}

std::vector<QueryRecord> small_dataset() {
    SyntheticSpec spec;
    spec.queries = 20;
    spec.docs_per_query = 12;
    return generate_synthetic(spec);
}

}  // namespace

TEST_SUITE("harness helpers") {
    TEST_CASE("method names") {
        CHECK(to_string(Method::AbTesting) == "ab_testing");
        CHECK(method_from_string("ima") == Method::Interleaving);
        CHECK(method_from_string("ab") == Method::AbTesting);
        CHECK_THROWS_AS(method_from_string("tdi"), Error);
    }

    TEST_CASE("checkpoint schedule") {
        const auto s = checkpoint_schedule(1000, 20, false);
        CHECK(s.front() == 1);
        CHECK(s.back() == 1000);
        CHECK(std::is_sorted(s.begin(), s.end()));
        CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
        CHECK(s.size() <= 21);
        CHECK(checkpoint_schedule(5, 20, true) == std::vector<std::size_t>{1, 2, 3, 4, 5});
        CHECK(checkpoint_schedule(7, 0, false) == std::vector<std::size_t>{7});
    }

    TEST_CASE("error indicator") {
        CHECK(error_indicator(Preference::PreferA, GroundTruth::PreferA) == 0.0);
        CHECK(error_indicator(Preference::PreferB, GroundTruth::PreferA) == 1.0);
        CHECK(error_indicator(Preference::Tie, GroundTruth::PreferB) == 0.5);
        try {
            error_indicator(Preference::PreferA, GroundTruth::Undecidable);
            FAIL("expected UndecidableTruth");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UndecidableTruth);
        }
    }

    TEST_CASE("usable queries and ground truth") {
        const std::vector<QueryRecord> data{
            query("1", {{2, {0.9, 0.1}}, {0, {0.1, 0.9}}, {1, {0.5, 0.5}}}),
            query("2", {{0, {0.9, 0.1}}, {0, {0.1, 0.9}}, {0, {0.5, 0.5}}}),  // no relevant docs
            query("3", {{1, {0.9, 0.1}}, {0, {0.1, 0.9}}}),                   // too short
        };
        CHECK(usable_queries(data, 3) == std::vector<std::size_t>{0});
        CHECK(ground_truth({1, 2, 3}, data, 3) == GroundTruth::PreferA);
        CHECK(ground_truth({2, 1, 3}, data, 3) == GroundTruth::PreferB);
        CHECK(ground_truth({1, 1, 3}, data, 3) == GroundTruth::Undecidable);
    }

    TEST_CASE("config validation") {
        ExperimentConfig cfg;
        cfg.impressions = 0;
        CHECK_THROWS_AS(validate_config(cfg), Error);
        cfg = {};
        cfg.methods = {Method::AbTesting, Method::AbTesting};
        CHECK_THROWS_AS(validate_config(cfg), Error);
        cfg = {};
        cfg.rq2_bins = {0.0, 0.3, 0.2};
        CHECK_THROWS_AS(validate_config(cfg), Error);
        CHECK_NOTHROW(validate_config(ExperimentConfig{}));
    }
}

TEST_SUITE("rq1") {
    TEST_CASE("report shape and csv") {
        const auto data = small_dataset();
        const auto pairs = enumerate_pairs(feature_indices(data), 5);
        ExperimentConfig cfg;
        cfg.impressions = 200;
        cfg.repeats = 2;
        const auto report = run_rq1(cfg, data, pairs);
        const auto schedule = checkpoint_schedule(200, cfg.checkpoints, false);
        REQUIRE(report.rows.size() == 2 * schedule.size());
        CHECK(report.rows.front().method == Method::AbTesting);
        CHECK(report.rows.back().method == Method::Interleaving);
        CHECK(report.rows.back().impression == 200);
        for (const auto& row : report.rows) {
            CHECK(row.unit_errors.size() == 2 * row.n_pairs);
            CHECK(row.error_rate >= 0.0);
            CHECK(row.error_rate <= 1.0);
        }
        std::ostringstream out;
        write_rq1_csv(out, report);
        const auto text = out.str();
        CHECK(text.rfind("dataset,click_model,method,impression,error_rate,n_pairs,repeats,seed\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(report.rows.size() + 1));
    }

    TEST_CASE("same seed, same output, regardless of workers") {
        const auto data = small_dataset();
        const auto pairs = enumerate_pairs(feature_indices(data), 5);
        ExperimentConfig cfg;
        cfg.impressions = 150;
        cfg.repeats = 3;
        std::ostringstream a, b, c;
        write_rq1_csv(a, run_rq1(cfg, data, pairs));
        cfg.workers = 4;
        write_rq1_csv(b, run_rq1(cfg, data, pairs));
        cfg.seed = 43;
        write_rq1_csv(c, run_rq1(cfg, data, pairs));
        CHECK(a.str() == b.str());
        CHECK(a.str() != c.str());
    }

    TEST_CASE("undecidable pairs are skipped") {
        const auto data = small_dataset();
        const std::vector<RankerPair> pairs{{1, 1, 5}, {1, 4, 5}};
        ExperimentConfig cfg;
        cfg.impressions = 20;
        cfg.repeats = 1;
        const auto report = run_rq1(cfg, data, pairs);
        REQUIRE(report.skipped_pairs.size() == 1);
        CHECK(report.rows.front().n_pairs == 1);
        const std::vector<RankerPair> only_bad{{2, 2, 5}};
        CHECK_THROWS_AS(run_rq1(cfg, data, only_bad), Error);
    }
}

TEST_SUITE("rq2") {
    TEST_CASE("bins account for every sample") {
        const auto data = small_dataset();
        const auto pairs = enumerate_pairs(feature_indices(data), 5);
        ExperimentConfig cfg;
        cfg.impressions = 50;
        cfg.repeats = 2;
        cfg.rq2_query_samples = 40;
        const auto report = run_rq2(cfg, data, pairs);
        REQUIRE(report.rows.size() == 2 * 6);
        std::size_t binned = 0;
        for (std::size_t k = 0; k < 6; ++k) binned += report.rows[k].n_samples;
        CHECK(binned + report.skipped_zero_diff + report.skipped_out_of_bins == 2 * 40 * pairs.size());
        for (std::size_t k = 0; k < 6; ++k) CHECK(report.rows[k].n_samples == report.rows[k + 6].n_samples);

        std::ostringstream a, b;
        write_rq2_csv(a, report);
        cfg.workers = 3;
        write_rq2_csv(b, run_rq2(cfg, data, pairs));
        CHECK(a.str() == b.str());
        CHECK(a.str().rfind("dataset,click_model,method,ndcg_diff_lo,ndcg_diff_hi,error_rate,n_samples,seed\n", 0) == 0);
    }

    TEST_CASE("empty bins have an empty error rate") {
        const auto data = small_dataset();
        const auto pairs = enumerate_pairs(feature_indices(data), 5);
        ExperimentConfig cfg;
        cfg.impressions = 10;
        cfg.repeats = 1;
        cfg.rq2_query_samples = 5;
        cfg.methods = {Method::Interleaving};
        cfg.rq2_bins = {0.0, 0.999, 1.0};
        const auto report = run_rq2(cfg, data, pairs);
        REQUIRE(report.rows.size() == 2);
        if (report.rows[1].n_samples == 0) {
            CHECK(std::isnan(report.rows[1].error_rate));
            std::ostringstream out;
            write_rq2_csv(out, report);
            CHECK(out.str().find(",0.999,1,,0,") != std::string::npos);
        }
    }
}

TEST_SUITE("monte carlo") {
    TEST_CASE("agrees with the exact binomial error") {
        const AnalyticScenario s{1.0, 0.2, 100.0, 1000};
        for (auto method : {Method::AbTesting, Method::Interleaving}) {
            CAPTURE(to_string(method));
            const auto f = reciprocal_examination(s.alpha);
            const auto st = method == Method::AbTesting ? ab_stats(s, f) : interleaved_stats(s, f);
            const double exact = exact_error(s.n, st.p_a, st.p_b);
            auto rng = RandomStream::derive(5, {method == Method::AbTesting ? 0u : 1u});
            constexpr std::size_t kTrials = 100000;
            const double mc = monte_carlo_error(s, method, kTrials, rng);
            CHECK(std::abs(mc - exact) <= 2.576 * std::sqrt(exact * (1 - exact) / kTrials));
        }
    }

    TEST_CASE("exact interleaving error at n = 1000 sits below the normal approximation") {
        const AnalyticScenario s{1.0, 0.2, 100.0, 1000};
        const auto st = interleaved_stats(s, reciprocal_examination(s.alpha));
        const double exact = exact_error(s.n, st.p_a, st.p_b);
        CHECK(exact == doctest::Approx(0.0451).epsilon(0.01));
        CHECK(evaluate_scenario(s).p_err_i > exact);
    }

    TEST_CASE("bad input") {
        RandomStream rng(1);
        CHECK_THROWS_AS(monte_carlo_error({0.5, 0.2, 1.0, 10}, Method::AbTesting, 0, rng), Error);
        CHECK_THROWS_AS(monte_carlo_error({1.5, 0.2, 1.0, 10}, Method::AbTesting, 10, rng), Error);
    }
}
