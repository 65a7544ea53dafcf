#pragma once

// Simulation experiments: error rate over impressions (RQ1), error rate by
// per-query nDCG difference (RQ2), and a Monte Carlo check of the analytic
// error probability.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "interleave_lab/analytic.hpp"
#include "interleave_lab/clickmodel.hpp"
#include "interleave_lab/comparison.hpp"
#include "interleave_lab/dataio.hpp"
#include "interleave_lab/random.hpp"

namespace ilab {

enum class Method { AbTesting, Interleaving };

std::string_view to_string(Method m);
Method method_from_string(const std::string& name);

enum class GroundTruth { PreferA, PreferB, Undecidable };

struct ExperimentConfig {
    std::string dataset_name = "synthetic";
    ClickModelSpec click_model = navigational_spec();
    std::vector<Method> methods{Method::AbTesting, Method::Interleaving};
    std::size_t impressions = 1000;
    std::size_t repeats = 10;
    std::size_t cutoff = kDefaultCutoff;
    std::uint64_t seed = 42;
    std::size_t rq2_query_samples = 1000;
    std::vector<double> rq2_bins{0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 1.0};
    // Number of log-spaced RQ1 checkpoints; the final impression is always
    // logged as well.
    std::size_t checkpoints = 20;
    bool log_every_impression = false;
    unsigned workers = 1;
};

void validate_config(const ExperimentConfig& cfg);

// Impression counts at which RQ1 records the current verdict, ascending.
std::vector<std::size_t> checkpoint_schedule(std::size_t impressions, std::size_t count, bool every_impression);

// Queries that can be shown at `cutoff` and have at least one relevant doc.
std::vector<std::size_t> usable_queries(std::span<const QueryRecord> dataset, std::size_t cutoff);

// Mean nDCG@cutoff of each feature ranker over the usable queries.
GroundTruth ground_truth(const RankerPair& pair, std::span<const QueryRecord> dataset, std::size_t cutoff);

// 0 for a correct verdict, 1 for the opposite one, 0.5 for a tie.
double error_indicator(Preference inferred, GroundTruth truth);

struct Rq1Row {
    Method method;
    std::size_t impression = 0;
    double error_rate = 0.0;
    std::size_t n_pairs = 0;
    // One indicator per (repeat, pair), repeat-major. Same layout for every
    // method, so rows can be compared unit by unit.
    std::vector<double> unit_errors;
};

struct Rq1Report {
    std::string dataset;
    std::string click_model;
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    std::vector<Rq1Row> rows;  // sorted by method name, then impression
    std::vector<RankerPair> skipped_pairs;
    std::size_t skipped_queries = 0;
};

Rq1Report run_rq1(const ExperimentConfig& cfg, std::span<const QueryRecord> dataset, std::span<const RankerPair> pairs);
void write_rq1_csv(std::ostream& out, const Rq1Report& report);

struct Rq2Row {
    Method method;
    double ndcg_diff_lo = 0.0;
    double ndcg_diff_hi = 0.0;
    double error_rate = 0.0;  // NaN for an empty bin
    std::size_t n_samples = 0;
    // Indicators in (repeat, sample, pair) order, shared across methods.
    std::vector<double> unit_errors;
};

struct Rq2Report {
    std::string dataset;
    std::string click_model;
    std::size_t repeats = 0;
    std::uint64_t seed = 0;
    std::vector<Rq2Row> rows;  // sorted by method name, then bin
    std::size_t skipped_zero_diff = 0;
    std::size_t skipped_out_of_bins = 0;
    std::size_t skipped_queries = 0;
};

Rq2Report run_rq2(const ExperimentConfig& cfg, std::span<const QueryRecord> dataset, std::span<const RankerPair> pairs);
void write_rq2_csv(std::ostream& out, const Rq2Report& report);

// Draws n Bernoulli clicks per ranker at the closed-form click
// probabilities of `method` and returns the fraction of trials in which A is
// not preferred (ties broken by a fair coin).
double monte_carlo_error(const AnalyticScenario& s, Method method, std::size_t trials, RandomStream& rng);

}  // namespace ilab
