#include "interleave_lab/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "interleave_lab/format.hpp"
#include "parallel.hpp"

namespace ilab {

namespace {

constexpr std::uint64_t kRq1Stream = 1;
constexpr std::uint64_t kRq2Stream = 2;
constexpr std::uint64_t kQueryStream = 0;

// Top-cutoff grades of both rankers for one query.
struct PairedGrades {
    std::vector<RelevanceGrade> a;
    std::vector<RelevanceGrade> b;
    double ndcg_a = 0.0;
    double ndcg_b = 0.0;
};

// Rankings for every (pair, usable query), pair-major.
struct PreparedPairs {
    std::vector<std::size_t> queries;  // dataset indices
    std::vector<std::vector<PairedGrades>> by_pair;
};

PreparedPairs prepare(std::span<const QueryRecord> dataset, std::span<const RankerPair> pairs, std::size_t cutoff) {
    PreparedPairs out;
    out.queries = usable_queries(dataset, cutoff);
    out.by_pair.resize(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        out.by_pair[p].reserve(out.queries.size());
        for (std::size_t qi : out.queries) {
            const auto& q = dataset[qi];
            const auto ideal = q.grades();
            PairedGrades g;
            g.a = rank_by_feature(q, pairs[p].feature_a, cutoff).grades();
            g.b = rank_by_feature(q, pairs[p].feature_b, cutoff).grades();
            g.ndcg_a = ndcg(g.a, ideal, cutoff);
            g.ndcg_b = ndcg(g.b, ideal, cutoff);
            out.by_pair[p].push_back(std::move(g));
        }
    }
    return out;
}

// Reusable scratch space for one simulated impression.
class ImpressionRunner {
public:
    ImpressionRunner(const ClickModelSpec& model, std::size_t cutoff) : model_(model), teams_(cutoff), shown_(cutoff) {}

    ImpressionScore run(Method method, const PairedGrades& g, RandomStream& gen) {
        if (method == Method::Interleaving) {
            draw_teams(gen, std::span<Team>(teams_));
            for (std::size_t l = 0; l < teams_.size(); ++l) shown_[l] = teams_[l] == Team::A ? g.a[l] : g.b[l];
            simulate_cascade_into(std::span<const RelevanceGrade>(shown_), model_, gen, trace_);
            return score_impression(std::span<const Team>(teams_), trace_.clicks);
        }
        const Team arm = assign_ab_arm(gen);
        const auto& grades = arm == Team::A ? g.a : g.b;
        simulate_cascade_into(std::span<const RelevanceGrade>(grades), model_, gen, trace_);
        return score_ab_impression(arm, trace_.clicks);
    }

private:
    const ClickModelSpec& model_;
    std::vector<Team> teams_;
    std::vector<RelevanceGrade> shown_;
    CascadeTrace trace_;
};

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

std::vector<std::size_t> method_order(const std::vector<Method>& methods) {
    std::vector<std::size_t> idx(methods.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        return to_string(methods[x]) < to_string(methods[y]);
    });
    return idx;
}

std::uint64_t method_key(Method m) { return m == Method::AbTesting ? 0 : 1; }

}  // namespace

std::string_view to_string(Method m) { return m == Method::AbTesting ? "ab_testing" : "interleaving"; }

Method method_from_string(const std::string& name) {
    if (name == "ab_testing" || name == "ab") return Method::AbTesting;
    if (name == "interleaving" || name == "ima") return Method::Interleaving;
    throw Error(ErrorCode::ConfigError, "unknown method '" + name + "' (expected interleaving or ab_testing)");
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& why) { throw Error(ErrorCode::ConfigError, why); };
    if (cfg.impressions < 1) fail("impressions must be >= 1");
    if (cfg.repeats < 1) fail("repeats must be >= 1");
    if (cfg.cutoff < 1) fail("cutoff must be >= 1");
    if (cfg.methods.empty()) fail("at least one method is required");
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
            if (cfg.methods[i] == cfg.methods[j]) fail("methods listed twice");
        }
    }
    if (cfg.rq2_bins.size() < 2) fail("rq2 bins need at least two edges");
    if (!std::is_sorted(cfg.rq2_bins.begin(), cfg.rq2_bins.end()) ||
        std::adjacent_find(cfg.rq2_bins.begin(), cfg.rq2_bins.end()) != cfg.rq2_bins.end()) {
        fail("rq2 bin edges must be strictly increasing");
    }
}

std::vector<std::size_t> checkpoint_schedule(std::size_t impressions, std::size_t count, bool every_impression) {
    std::vector<std::size_t> out;
    if (impressions == 0) return out;
    if (every_impression) {
        for (std::size_t t = 1; t <= impressions; ++t) out.push_back(t);
        return out;
    }
    if (count >= 2) {
        const double top = std::log(static_cast<double>(impressions));
        for (std::size_t k = 0; k < count; ++k) {
            const double t = std::exp(top * static_cast<double>(k) / static_cast<double>(count - 1));
            out.push_back(std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(t)), 1, impressions));
        }
    }
    out.push_back(impressions);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::size_t> usable_queries(std::span<const QueryRecord> dataset, std::size_t cutoff) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& q = dataset[i];
        if (q.docs.size() < cutoff) continue;
        const auto g = q.grades();
        if (ideal_dcg(g, cutoff) <= 0.0) continue;
        out.push_back(i);
    }
    return out;
}

GroundTruth ground_truth(const RankerPair& pair, std::span<const QueryRecord> dataset, std::size_t cutoff) {
    double sum_a = 0.0;
    double sum_b = 0.0;
    std::size_t count = 0;
    for (std::size_t qi : usable_queries(dataset, cutoff)) {
        const auto& q = dataset[qi];
        const auto ideal = q.grades();
        sum_a += ndcg(rank_by_feature(q, pair.feature_a, cutoff), ideal, cutoff);
        sum_b += ndcg(rank_by_feature(q, pair.feature_b, cutoff), ideal, cutoff);
        ++count;
    }
    if (count == 0) return GroundTruth::Undecidable;
    const double mean_a = sum_a / static_cast<double>(count);
    const double mean_b = sum_b / static_cast<double>(count);
    if (mean_a > mean_b) return GroundTruth::PreferA;
    if (mean_a < mean_b) return GroundTruth::PreferB;
    return GroundTruth::Undecidable;
}

double error_indicator(Preference inferred, GroundTruth truth) {
    if (truth == GroundTruth::Undecidable) {
        throw Error(ErrorCode::UndecidableTruth, "cannot score a verdict against an undecidable ground truth");
    }
    if (inferred == Preference::Tie) return 0.5;
    const bool correct = (inferred == Preference::PreferA) == (truth == GroundTruth::PreferA);
    return correct ? 0.0 : 1.0;
}

Rq1Report run_rq1(const ExperimentConfig& cfg, std::span<const QueryRecord> dataset, std::span<const RankerPair> pairs) {
    validate_config(cfg);
    Rq1Report report;
    report.dataset = cfg.dataset_name;
    report.click_model = cfg.click_model.name();
    report.repeats = cfg.repeats;
    report.seed = cfg.seed;

    const auto usable = usable_queries(dataset, cfg.cutoff);
    report.skipped_queries = dataset.size() - usable.size();
    if (usable.empty()) throw Error(ErrorCode::ConfigError, "dataset has no queries usable at cutoff " + std::to_string(cfg.cutoff));

    std::vector<RankerPair> active;
    std::vector<GroundTruth> truths;
    for (const auto& pair : pairs) {
        const auto truth = ground_truth(pair, dataset, cfg.cutoff);
        if (truth == GroundTruth::Undecidable) {
            report.skipped_pairs.push_back(pair);
        } else {
            active.push_back(pair);
            truths.push_back(truth);
        }
    }
    if (active.empty()) throw Error(ErrorCode::NoValidPairs, "no ranker pair has a decidable ground truth");

    const auto prepared = prepare(dataset, active, cfg.cutoff);
    const auto schedule = checkpoint_schedule(cfg.impressions, cfg.checkpoints, cfg.log_every_impression);
    const std::size_t n_pairs = active.size();
    const std::size_t n_methods = cfg.methods.size();
    const std::size_t units = cfg.repeats * n_pairs;

    // Query sequence per repeat, shared by every pair and method.
    std::vector<std::vector<std::size_t>> sequences(cfg.repeats);
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        auto gen = RandomStream::derive(cfg.seed, {kRq1Stream, r, kQueryStream});
        sequences[r].resize(cfg.impressions);
        for (auto& s : sequences[r]) s = uniform_index(gen, usable.size());
    }

    // errors[unit][method][checkpoint]
    std::vector<std::vector<std::vector<double>>> errors(units);
    detail::parallel_for(units, cfg.workers, [&](std::size_t unit) {
        const std::size_t r = unit / n_pairs;
        const std::size_t p = unit % n_pairs;
        ImpressionRunner runner(cfg.click_model, cfg.cutoff);
        auto& out = errors[unit];
        out.assign(n_methods, {});
        for (std::size_t m = 0; m < n_methods; ++m) {
            auto gen = RandomStream::derive(cfg.seed, {kRq1Stream, r, p + 1, method_key(cfg.methods[m])});
            EvaluationAccumulator acc;
            std::size_t next = 0;
            for (std::size_t t = 1; t <= cfg.impressions; ++t) {
                acc.add(runner.run(cfg.methods[m], prepared.by_pair[p][sequences[r][t - 1]], gen));
                if (next < schedule.size() && schedule[next] == t) {
                    out[m].push_back(error_indicator(infer_preference(acc), truths[p]));
                    ++next;
                }
            }
        }
    });

    for (std::size_t m : method_order(cfg.methods)) {
        for (std::size_t c = 0; c < schedule.size(); ++c) {
            Rq1Row row{cfg.methods[m], schedule[c], 0.0, n_pairs, {}};
            row.unit_errors.reserve(units);
            for (std::size_t u = 0; u < units; ++u) row.unit_errors.push_back(errors[u][m][c]);
            row.error_rate = mean_of(row.unit_errors);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

void write_rq1_csv(std::ostream& out, const Rq1Report& report) {
    out << "dataset,click_model,method,impression,error_rate,n_pairs,repeats,seed\n";
    for (const auto& row : report.rows) {
        out << report.dataset << ',' << report.click_model << ',' << to_string(row.method) << ',' << row.impression
            << ',' << fmt_double(row.error_rate) << ',' << row.n_pairs << ',' << report.repeats << ',' << report.seed
            << '\n';
    }
}

Rq2Report run_rq2(const ExperimentConfig& cfg, std::span<const QueryRecord> dataset, std::span<const RankerPair> pairs) {
    validate_config(cfg);
    if (pairs.empty()) throw Error(ErrorCode::NoValidPairs, "no ranker pairs given");
    if (cfg.rq2_query_samples < 1) throw Error(ErrorCode::ConfigError, "rq2 query samples must be >= 1");
    Rq2Report report;
    report.dataset = cfg.dataset_name;
    report.click_model = cfg.click_model.name();
    report.repeats = cfg.repeats;
    report.seed = cfg.seed;

    const auto prepared = prepare(dataset, pairs, cfg.cutoff);
    const auto& usable = prepared.queries;
    report.skipped_queries = dataset.size() - usable.size();
    if (usable.empty()) throw Error(ErrorCode::ConfigError, "dataset has no queries usable at cutoff " + std::to_string(cfg.cutoff));

    const std::size_t n_pairs = pairs.size();
    const std::size_t n_methods = cfg.methods.size();
    const std::size_t n_bins = cfg.rq2_bins.size() - 1;
    const std::size_t samples = cfg.rq2_query_samples;

    std::vector<std::vector<std::size_t>> drawn(cfg.repeats);
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
        auto gen = RandomStream::derive(cfg.seed, {kRq2Stream, r, kQueryStream});
        drawn[r].resize(samples);
        for (auto& s : drawn[r]) s = uniform_index(gen, usable.size());
    }

    struct Outcome {
        double diff = 0.0;
        std::array<double, 2> error{};
    };
    // outcomes[(r * samples + s) * n_pairs + p]
    std::vector<Outcome> outcomes(cfg.repeats * samples * n_pairs);
    detail::parallel_for(cfg.repeats * samples, cfg.workers, [&](std::size_t unit) {
        const std::size_t r = unit / samples;
        const std::size_t s = unit % samples;
        ImpressionRunner runner(cfg.click_model, cfg.cutoff);
        for (std::size_t p = 0; p < n_pairs; ++p) {
            const auto& g = prepared.by_pair[p][drawn[r][s]];
            auto& o = outcomes[unit * n_pairs + p];
            o.diff = std::abs(g.ndcg_a - g.ndcg_b);
            if (o.diff == 0.0) continue;
            const auto truth = g.ndcg_a > g.ndcg_b ? GroundTruth::PreferA : GroundTruth::PreferB;
            for (std::size_t m = 0; m < n_methods; ++m) {
                auto gen = RandomStream::derive(cfg.seed, {kRq2Stream, r, s + 1, p, method_key(cfg.methods[m])});
                EvaluationAccumulator acc;
                for (std::size_t t = 0; t < cfg.impressions; ++t) acc.add(runner.run(cfg.methods[m], g, gen));
                o.error[m] = error_indicator(infer_preference(acc), truth);
            }
        }
    });

    auto bin_of = [&](double diff) -> std::ptrdiff_t {
        const auto& e = cfg.rq2_bins;
        if (diff < e.front() || diff > e.back()) return -1;
        const auto it = std::upper_bound(e.begin(), e.end(), diff);
        const auto k = static_cast<std::ptrdiff_t>(it - e.begin()) - 1;
        return std::min<std::ptrdiff_t>(k, static_cast<std::ptrdiff_t>(n_bins) - 1);
    };

    std::vector<std::vector<std::vector<double>>> binned(n_methods, std::vector<std::vector<double>>(n_bins));
    for (const auto& o : outcomes) {
        if (o.diff == 0.0) {
            ++report.skipped_zero_diff;
            continue;
        }
        const auto k = bin_of(o.diff);
        if (k < 0) {
            ++report.skipped_out_of_bins;
            continue;
        }
        for (std::size_t m = 0; m < n_methods; ++m) binned[m][static_cast<std::size_t>(k)].push_back(o.error[m]);
    }

    for (std::size_t m : method_order(cfg.methods)) {
        for (std::size_t k = 0; k < n_bins; ++k) {
            Rq2Row row{cfg.methods[m], cfg.rq2_bins[k], cfg.rq2_bins[k + 1], 0.0, binned[m][k].size(),
                       std::move(binned[m][k])};
            row.error_rate = mean_of(row.unit_errors);
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

void write_rq2_csv(std::ostream& out, const Rq2Report& report) {
    out << "dataset,click_model,method,ndcg_diff_lo,ndcg_diff_hi,error_rate,n_samples,seed\n";
    for (const auto& row : report.rows) {
        out << report.dataset << ',' << report.click_model << ',' << to_string(row.method) << ','
            << fmt_double(row.ndcg_diff_lo) << ',' << fmt_double(row.ndcg_diff_hi) << ',';
        // Empty bins have no error rate.
        if (row.n_samples > 0) out << fmt_double(row.error_rate);
        out << ',' << row.n_samples << ',' << report.seed << '\n';
    }
}

double monte_carlo_error(const AnalyticScenario& s, Method method, std::size_t trials, RandomStream& rng) {
    validate_scenario(s);
    if (trials < 1) throw Error(ErrorCode::DomainError, "trials must be >= 1");
    const auto f = reciprocal_examination(s.alpha);
    const auto stats = method == Method::AbTesting ? ab_stats(s, f) : interleaved_stats(s, f);
    const auto n = static_cast<std::int64_t>(s.n);
    std::binomial_distribution<std::int64_t> clicks_a(n, stats.p_a);
    std::binomial_distribution<std::int64_t> clicks_b(n, stats.p_b);
    std::size_t errors = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto a = clicks_a(rng);
        const auto b = clicks_b(rng);
        if (a < b || (a == b && coin(rng))) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(trials);
}

}  // namespace ilab
