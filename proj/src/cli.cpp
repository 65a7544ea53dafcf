#include "interleave_lab/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "interleave_lab/analytic.hpp"
#include "interleave_lab/config.hpp"
#include "interleave_lab/core.hpp"
#include "interleave_lab/dataio.hpp"
#include "interleave_lab/format.hpp"
#include "interleave_lab/harness.hpp"

#ifndef ILAB_VERSION
#define ILAB_VERSION "0.0.0"
#endif

namespace ilab {

std::string tool_version() { return ILAB_VERSION; }

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kFallbackSeed = 42;
constexpr std::uint64_t kCheckStream = 3;

// Flags bound to settings keys. Only flags present on the command line end
// up in the overlay, so config-file values survive unless overridden.
class FlagTable {
public:
    void option(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
        auto& b = bindings_.emplace_back(Binding{key, {}, false, nullptr});
        b.opt = app->add_option(name, b.value, help);
    }

    void flag(CLI::App* app, const std::string& name, const std::string& key, const std::string& help) {
        auto& b = bindings_.emplace_back(Binding{key, {}, true, nullptr});
        b.opt = app->add_flag(name, help);
    }

    Settings given() const {
        Settings s;
        for (const auto& b : bindings_) {
            if (b.opt->count() == 0) continue;
            s.set(b.key, b.is_flag ? std::string("true") : b.value);
        }
        return s;
    }

private:
    struct Binding {
        std::string key;
        std::string value;
        bool is_flag;
        CLI::Option* opt;
    };
    std::deque<Binding> bindings_;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
        return parse_uint(env, kSeedEnvVar);
    }
    return kFallbackSeed;
}

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Writes through a temporary file and renames it into place, so a failed
// run never leaves a partial output behind.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& body) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, path + ": cannot open for writing");
        try {
            body(out);
        } catch (...) {
            out.close();
            fs::remove(tmp);
            throw;
        }
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw Error(ErrorCode::IoError, path + ": write failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(ErrorCode::IoError, path + ": " + ec.message());
    }
}

std::string manifest_path(const std::string& out_path) { return out_path + ".manifest"; }

void write_manifest(const std::string& command, const Settings& merged) {
    Settings manifest = merged;
    manifest.set("command", command);
    manifest.set("tool.version", tool_version());
    const auto out_path = merged.get_string("output.path");
    manifest.set("output.manifest", manifest_path(out_path));
    write_atomically(manifest_path(out_path), [&](std::ostream& os) {
        os << "# interleave-lab run manifest; rerun with: interleave-lab " << command << " --config "
           << manifest_path(out_path) << '\n';
        manifest.write(os);
    });
}

struct Context {
    std::string command;
    Settings merged;
    std::ostream& out;
    std::ostream& err;
};

unsigned workers_of(const Settings& s) {
    const auto w = s.get_uint("run.workers", default_workers());
    if (w < 1) throw Error(ErrorCode::ConfigError, "workers must be >= 1");
    return static_cast<unsigned>(w);
}

// analyze --------------------------------------------------------------

int cmd_analyze(Context& ctx) {
    const auto& s = ctx.merged;
    const auto alphas = s.get_doubles("analyze.alphas", {1.0, 100.0});
    const double step = s.get_double("analyze.grid_step", kDefaultGridStep);
    const auto n = s.get_uint("analyze.n", kDefaultAnalyticN);
    for (double a : alphas) {
        if (!(a >= 0.0)) throw Error(ErrorCode::ConfigError, "--alpha values must be >= 0 (got " + fmt_double(a) + ")");
    }
    if (n < 1) throw Error(ErrorCode::ConfigError, "--n must be >= 1");
    const auto points = sweep_grid(alphas, step, n, workers_of(s));
    const auto path = s.get_string("output.path");
    write_atomically(path, [&](std::ostream& os) { write_sweep_csv(os, points); });
    write_manifest(ctx.command, s);
    ctx.out << "wrote " << points.size() << " rows to " << path << '\n';
    return kExitOk;
}

// check ----------------------------------------------------------------

int cmd_check(Context& ctx) {
    const auto& s = ctx.merged;
    const auto draws = s.get_uint("check.draws", 10000);
    const auto seed = s.get_uint("check.seed", default_seed());
    if (draws < 1) throw Error(ErrorCode::ConfigError, "--draws must be >= 1");

    std::ostringstream report;
    std::size_t constant_failures = 0;
    std::size_t aware_failures = 0;
    std::size_t boundaries = 0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        auto gen = RandomStream::derive(seed, {kCheckStream, i});
        const double c = 1.0 - uniform01(gen);
        const double x = uniform01(gen);
        const double y = uniform01(gen);
        const std::size_t n = 1 + uniform_index(gen, 100000);
        try {
            check_constant_case(c, x, y, n);
        } catch (const Error& e) {
            ++constant_failures;
            report << "FAIL constant c=" << fmt_double(c) << " er_a=" << fmt_double(x) << " er_b=" << fmt_double(y)
                   << " n=" << n << ": " << e.what() << '\n';
        }
        double hi = uniform01(gen);
        double lo = uniform01(gen);
        if (hi < lo) std::swap(hi, lo);
        if (hi == lo) continue;
        const double alpha = 200.0 * (1.0 - uniform01(gen));
        const AnalyticScenario scenario{hi, lo, alpha, n};
        try {
            if (check_relevance_aware_case(scenario).boundary) ++boundaries;
        } catch (const Error& e) {
            ++aware_failures;
            report << "FAIL relevance_aware er_a=" << fmt_double(hi) << " er_b=" << fmt_double(lo)
                   << " alpha=" << fmt_double(alpha) << " n=" << n << ": " << e.what() << '\n';
        }
    }
    std::ostringstream summary;
    summary << "seed = " << seed << '\n'
            << "draws = " << draws << '\n'
            << "constant_case_failures = " << constant_failures << '\n'
            << "relevance_aware_failures = " << aware_failures << '\n'
            << "relevance_aware_boundaries = " << boundaries << '\n'
            << report.str();
    const bool ok = constant_failures == 0 && aware_failures == 0;
    summary << "result = " << (ok ? "PASS" : "FAIL") << '\n';

    const auto path = s.get_string("output.path");
    write_atomically(path, [&](std::ostream& os) { os << summary.str(); });
    write_manifest(ctx.command, s);
    ctx.out << summary.str();
    return ok ? kExitOk : kExitFailure;
}

// simulate -------------------------------------------------------------

struct LoadedDataset {
    std::string name;
    std::vector<QueryRecord> queries;
};

LoadedDataset load_dataset(const Settings& s) {
    LoadedDataset d;
    if (s.get_bool("dataset.synthetic", false)) {
        SyntheticSpec spec;
        spec.queries = s.get_uint("synthetic.queries", spec.queries);
        spec.docs_per_query = s.get_uint("synthetic.docs_per_query", spec.docs_per_query);
        spec.seed = s.get_uint("synthetic.seed", spec.seed);
        spec.grade_weights = s.get_doubles("synthetic.grade_weights", spec.grade_weights);
        spec.feature_noise = s.get_doubles("synthetic.feature_noise", spec.feature_noise);
        d.name = s.get_string("dataset.name", "synthetic");
        d.queries = generate_synthetic(spec);
        return d;
    }
    const auto path = s.get("dataset.path");
    if (!path || path->empty()) throw Error(ErrorCode::ConfigError, "either --dataset or --synthetic is required");
    LetorOptions opts;
    opts.max_grade = static_cast<int>(s.get_uint("dataset.max_grade", kDefaultMaxGrade));
    d.name = s.get_string("dataset.name", fs::path(*path).stem().string());
    d.queries = load_letor_file(*path, opts);
    return d;
}

ClickModelSpec click_model_from(const Settings& s) {
    const auto name = s.get_string("click_model.name", "navigational");
    if (name != "file") return builtin_click_model(name);
    if (!s.contains("click_model.click") || !s.contains("click_model.stop")) {
        throw Error(ErrorCode::ConfigError, "click_model.name = file needs click_model.click and click_model.stop tables");
    }
    return {s.get_string("click_model.label", "custom"), s.get_doubles("click_model.click", {}),
            s.get_doubles("click_model.stop", {})};
}

ExperimentConfig experiment_from(const Settings& s, const std::string& dataset_name) {
    ExperimentConfig cfg;
    cfg.dataset_name = dataset_name;
    cfg.click_model = click_model_from(s);
    cfg.impressions = s.get_uint("experiment.impressions", cfg.impressions);
    cfg.repeats = s.get_uint("experiment.repeats", cfg.repeats);
    cfg.cutoff = s.get_uint("dataset.cutoff", cfg.cutoff);
    cfg.seed = s.get_uint("experiment.seed", default_seed());
    cfg.rq2_query_samples = s.get_uint("experiment.rq2_query_samples", cfg.rq2_query_samples);
    cfg.rq2_bins = s.get_doubles("experiment.rq2_bins", cfg.rq2_bins);
    cfg.checkpoints = s.get_uint("experiment.checkpoints", cfg.checkpoints);
    cfg.log_every_impression = s.get_bool("experiment.every_impression", false);
    cfg.workers = workers_of(s);
    validate_config(cfg);
    return cfg;
}

int cmd_simulate(Context& ctx, bool rq2) {
    const auto& s = ctx.merged;
    // Validate flags before touching the dataset.
    click_model_from(s);
    const auto dataset = load_dataset(s);
    const auto cfg = experiment_from(s, dataset.name);
    const auto features = s.get_ints("dataset.features", feature_indices(dataset.queries));
    const auto pairs = enumerate_pairs(features, cfg.cutoff);
    const auto path = s.get_string("output.path");
    if (rq2) {
        const auto report = run_rq2(cfg, dataset.queries, pairs);
        write_atomically(path, [&](std::ostream& os) { write_rq2_csv(os, report); });
        write_manifest(ctx.command, s);
        ctx.out << "wrote " << report.rows.size() << " rows to " << path << " (skipped: " << report.skipped_zero_diff
                << " zero-difference samples, " << report.skipped_queries << " unusable queries)\n";
    } else {
        const auto report = run_rq1(cfg, dataset.queries, pairs);
        write_atomically(path, [&](std::ostream& os) { write_rq1_csv(os, report); });
        write_manifest(ctx.command, s);
        ctx.out << "wrote " << report.rows.size() << " rows to " << path << " (" << report.skipped_pairs.size()
                << " undecidable pairs, " << report.skipped_queries << " unusable queries skipped)\n";
    }
    return kExitOk;
}

Settings command_defaults(const std::string& command) {
    Settings d;
    if (command == "analyze") {
        d.set("analyze.alphas", "1,100");
        d.set("analyze.grid_step", fmt_double(kDefaultGridStep));
        d.set("analyze.n", std::to_string(kDefaultAnalyticN));
    } else if (command == "check") {
        d.set("check.draws", "10000");
    } else {
        const ExperimentConfig cfg;
        std::string bins;
        for (double e : cfg.rq2_bins) bins += (bins.empty() ? "" : ",") + fmt_double(e);
        d.set("dataset.synthetic", "false");
        d.set("dataset.max_grade", std::to_string(kDefaultMaxGrade));
        d.set("dataset.cutoff", std::to_string(cfg.cutoff));
        d.set("click_model.name", cfg.click_model.name());
        d.set("experiment.impressions", std::to_string(cfg.impressions));
        d.set("experiment.repeats", std::to_string(cfg.repeats));
        d.set("experiment.checkpoints", std::to_string(cfg.checkpoints));
        d.set("experiment.every_impression", "false");
        d.set("experiment.rq2_query_samples", std::to_string(cfg.rq2_query_samples));
        d.set("experiment.rq2_bins", bins);
    }
    return d;
}

void resolve_synthetic_defaults(Settings& s) {
    if (!s.get_bool("dataset.synthetic", false)) return;
    const SyntheticSpec spec;
    auto join = [](const std::vector<double>& xs) {
        std::string out;
        for (double x : xs) out += (out.empty() ? "" : ",") + fmt_double(x);
        return out;
    };
    const Settings::Map defaults{
        {"dataset.name", "synthetic"},
        {"synthetic.queries", std::to_string(spec.queries)},
        {"synthetic.docs_per_query", std::to_string(spec.docs_per_query)},
        {"synthetic.seed", std::to_string(spec.seed)},
        {"synthetic.grade_weights", join(spec.grade_weights)},
        {"synthetic.feature_noise", join(spec.feature_noise)},
    };
    for (const auto& [k, v] : defaults) {
        if (!s.contains(k)) s.set(k, v);
    }
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::IoError:
        case ErrorCode::MalformedLine:
        case ErrorCode::InconsistentFeatures:
            return kExitIo;
        case ErrorCode::GradeOutOfRange:
        case ErrorCode::DuplicateItem:
            return e.line() ? kExitIo : kExitFailure;
        default:
            return kExitFailure;
    }
}

void add_simulate_flags(FlagTable& flags, CLI::App* app) {
    flags.option(app, "--dataset", "dataset.path", "LETOR file (plain or gzip)");
    flags.flag(app, "--synthetic", "dataset.synthetic", "use the bundled synthetic dataset");
    flags.option(app, "--dataset-name", "dataset.name", "label written to the CSV");
    flags.option(app, "--max-grade", "dataset.max_grade", "highest relevance grade (default 2)");
    flags.option(app, "--features", "dataset.features", "comma list of feature indices (default: all)");
    flags.option(app, "--cutoff", "dataset.cutoff", "display length |I| (default 5)");
    flags.option(app, "--click-model", "click_model.name", "perfect | navigational | file");
    flags.option(app, "--impressions", "experiment.impressions", "impressions per run (default 1000)");
    flags.option(app, "--repeats", "experiment.repeats", "independent repeats (default 10)");
    flags.option(app, "--seed", "experiment.seed", "root seed");
    flags.option(app, "--checkpoints", "experiment.checkpoints", "log-spaced RQ1 checkpoints (default 20)");
    flags.flag(app, "--every-impression", "experiment.every_impression", "log RQ1 after every impression");
    flags.option(app, "--query-samples", "experiment.rq2_query_samples", "RQ2 sampled queries per repeat");
    flags.option(app, "--bins", "experiment.rq2_bins", "RQ2 nDCG-difference bin edges");
    flags.option(app, "--synthetic-queries", "synthetic.queries", "synthetic query count");
    flags.option(app, "--synthetic-docs", "synthetic.docs_per_query", "synthetic documents per query");
    flags.option(app, "--synthetic-seed", "synthetic.seed", "synthetic dataset seed");
    flags.option(app, "--out", "output.path", "output CSV path");
    flags.option(app, "--workers", "run.workers", "worker threads");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interleaving vs. A/B testing efficiency lab", "interleave-lab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version());
    std::string config_path;
    app.add_option("--config", config_path, "INI config file or run manifest")->option_text("FILE");

    FlagTable flags;
    auto* analyze = app.add_subcommand("analyze", "closed-form error probability sweep");
    flags.option(analyze, "--alpha", "analyze.alphas", "comma list of alpha values (default 1,100)");
    flags.option(analyze, "--grid-step", "analyze.grid_step", "relevance grid step (default 0.02)");
    flags.option(analyze, "--n", "analyze.n", "impressions n (default 10000)");
    flags.option(analyze, "--out", "output.path", "output CSV path");
    flags.option(analyze, "--workers", "run.workers", "worker threads");
    analyze->add_option("--config", config_path, "INI config file or run manifest");

    auto* check = app.add_subcommand("check", "randomized theorem checks");
    flags.option(check, "--draws", "check.draws", "random scenarios per check (default 10000)");
    flags.option(check, "--seed", "check.seed", "root seed");
    flags.option(check, "--out", "output.path", "report path");
    check->add_option("--config", config_path, "INI config file or run manifest");

    auto* simulate = app.add_subcommand("simulate", "user-simulation experiments");
    simulate->require_subcommand(1);
    auto* rq1 = simulate->add_subcommand("rq1", "error rate over impressions");
    auto* rq2 = simulate->add_subcommand("rq2", "error rate by per-query nDCG difference");
    for (auto* sub : {rq1, rq2}) {
        add_simulate_flags(flags, sub);
        sub->add_option("--config", config_path, "INI config file or run manifest");
    }

    auto* selftest = app.add_subcommand("selftest", "run the built-in property checks");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kExitFailure;
    }

    if (selftest->parsed()) return run_selftest(out);

    std::string command;
    std::string default_out;
    if (analyze->parsed()) {
        command = "analyze";
        default_out = "analyze.csv";
    } else if (check->parsed()) {
        command = "check";
        default_out = "check.txt";
    } else if (rq1->parsed()) {
        command = "simulate rq1";
        default_out = "rq1.csv";
    } else {
        command = "simulate rq2";
        default_out = "rq2.csv";
    }

    try {
        Settings merged = command_defaults(command);
        merged.set("output.path", default_out);
        merged.set("run.workers", std::to_string(default_workers()));
        if (!config_path.empty()) {
            auto file = Settings::load(config_path);
            if (const auto recorded = file.get("command"); recorded && *recorded != command) {
                throw Error(ErrorCode::ConfigError,
                            config_path + " is a manifest for '" + *recorded + "', not '" + command + "'");
            }
            for (const char* key : {"command", "tool.version", "output.manifest"}) {
                Settings::Map m = file.values();
                m.erase(key);
                file = Settings(std::move(m));
            }
            merged.overlay(file);
        }
        merged.overlay(flags.given());
        resolve_synthetic_defaults(merged);
        // Pin the seed so the manifest reproduces the run without the env var.
        if (command == "check" && !merged.contains("check.seed")) {
            merged.set("check.seed", std::to_string(default_seed()));
        }
        if (command.starts_with("simulate") && !merged.contains("experiment.seed")) {
            merged.set("experiment.seed", std::to_string(default_seed()));
        }

        Context ctx{command, merged, out, err};
        if (command == "analyze") return cmd_analyze(ctx);
        if (command == "check") return cmd_check(ctx);
        return cmd_simulate(ctx, command == "simulate rq2");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

}  // namespace ilab
