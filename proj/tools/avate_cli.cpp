// avate command line: run simulation studies, replay confidence-sequence
// inference over recorded streams, aggregate trajectory files, and run the
// selfcheck suite.
//
// Exit codes: 0 ok, 2 config error, 3 data validation error, 4 selfcheck
// failure.
#include <glob.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "avate/aggregate.hpp"
#include "avate/config.hpp"
#include "avate/csv.hpp"
#include "avate/selfcheck.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::int64_t seed = -1;
    std::int64_t iters = -1;
    std::vector<std::string> methods;
    int threads = 0;
    bool quiet = false;
};

avate::ExperimentConfig load_with_overrides(const CommonFlags& flags) {
    avate::ExperimentConfig cfg = avate::load_config_file(flags.config_path);
    if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
    if (flags.iters > 0) cfg.n_iters = flags.iters;
    if (!flags.methods.empty()) cfg.methods = avate::MethodSet::parse(flags.methods);
    cfg.validate();
    return cfg;
}

std::string padded(std::uint64_t iter) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%05llu", static_cast<unsigned long long>(iter));
    return buf;
}

void print_summary(const avate::AggregateResult& agg, double theta0, std::ostream& os) {
    os << "method    cum_miscoverage  cum_power  mean_width   (at T=" << agg.horizon
       << ", n_iters=" << agg.n_iters << ", theta0=" << theta0 << ")\n";
    for (int m = 0; m < avate::kMethodCount; ++m) {
        if (!agg.present[m]) continue;
        const std::int64_t t = agg.horizon - 1;
        char line[128];
        std::snprintf(line, sizeof(line), "%-8s  %15.4f  %9.4f  %10.4f\n", avate::kMethodNames[m],
                      agg.cum_miscoverage[m][t], agg.cum_power[m][t], agg.mean_width[m][t]);
        os << line;
    }
}

int cmd_simulate(const CommonFlags& flags) {
    const avate::ExperimentConfig cfg = load_with_overrides(flags);
    const double theta0 = cfg.true_effect();

    fs::create_directories(flags.out);
    avate::csv::TrajectoryWriter trajectory((fs::path(flags.out) / "trajectory.csv").string());
    avate::Aggregator aggregator(cfg.horizon);

    std::int64_t done = 0;
    avate::run_monte_carlo(cfg, flags.threads, [&](avate::IterationResult&& result) {
        trajectory.write(result, theta0);
        aggregator.add(result, theta0);
        if (static_cast<std::int64_t>(result.iter) < cfg.emit_streams) {
            avate::csv::write_stream(
                (fs::path(flags.out) / ("stream_" + padded(result.iter) + ".csv")).string(), result,
                result.scores);
            avate::csv::write_scores(
                (fs::path(flags.out) / ("scores_" + padded(result.iter) + ".csv")).string(),
                result.scores);
        }
        ++done;
        if (!flags.quiet && (done % std::max<std::int64_t>(1, cfg.n_iters / 10) == 0)) {
            std::cerr << "simulate: " << done << "/" << cfg.n_iters << " iterations\n";
        }
    });
    trajectory.flush();

    const avate::AggregateResult agg = aggregator.finalize();
    avate::csv::write_aggregate((fs::path(flags.out) / "aggregate.csv").string(), agg);
    if (!flags.quiet) print_summary(agg, theta0, std::cout);
    return 0;
}

int cmd_infer(const CommonFlags& flags, const std::string& stream_path, std::int64_t iter_id) {
    avate::ExperimentConfig cfg = load_with_overrides(flags);
    const std::vector<avate::csv::StreamRow> rows = avate::csv::read_stream(stream_path);
    if (rows.empty()) throw avate::DataError("stream '" + stream_path + "' has no rows");

    avate::Rng fold_rng(cfg.seed,
                        avate::substream(static_cast<std::uint64_t>(iter_id), avate::StreamPurpose::Fold));
    avate::ScoringEngine engine(cfg, static_cast<std::uint64_t>(iter_id), fold_rng,
                                static_cast<int>(rows.front().x.size()));
    for (const avate::csv::StreamRow& row : rows) {
        try {
            engine.step(row.t, row.x, row.a, row.y, row.pi1, row.k);
        } catch (const avate::DataError& e) {
            throw avate::DataError("row t=" + std::to_string(row.t) + " of '" + stream_path +
                                   "': " + e.what());
        }
    }

    avate::IterationResult result = engine.finish();
    avate::csv::TrajectoryWriter out(flags.out);
    out.write(result, cfg.true_effect());
    return 0;
}

int cmd_aggregate(const std::vector<std::string>& patterns, const std::string& out_path) {
    std::vector<std::string> paths;
    for (const std::string& pattern : patterns) {
        glob_t g{};
        const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
        if (rc == 0) {
            for (std::size_t i = 0; i < g.gl_pathc; ++i) paths.emplace_back(g.gl_pathv[i]);
        } else if (rc == GLOB_NOMATCH && fs::exists(pattern)) {
            paths.push_back(pattern);
        }
        globfree(&g);
    }
    if (paths.empty()) throw avate::DataError("no trajectory files match the given patterns");

    avate::Aggregator aggregator;
    for (const std::string& path : paths) avate::csv::read_trajectory_into(path, aggregator);
    avate::csv::write_aggregate(out_path, aggregator.finalize());
    return 0;
}

int cmd_selfcheck(double mutate_psi, bool quiet) {
    avate::SelfcheckOptions options;
    options.psi_bias = mutate_psi;
    const avate::SelfcheckReport report = avate::run_selfcheck(options);
    for (const auto& item : report.items) {
        if (!quiet || !item.pass) {
            std::cout << (item.pass ? "[pass] " : "[FAIL] ") << item.name << ": " << item.detail
                      << "\n";
        }
    }
    return report.all_pass() ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anytime-valid treatment-effect inference for adaptive experiments"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string stream_path;
    std::int64_t infer_iter = 0;
    std::vector<std::string> agg_patterns;
    double mutate_psi = 0.0;

    CLI::App* simulate = app.add_subcommand("simulate", "run a simulation study, write CSVs");
    simulate->add_option("--config", flags.config_path, "config JSON path")->required();
    simulate->add_option("--out", flags.out, "output directory")->required();
    simulate->add_option("--seed", flags.seed, "override config seed");
    simulate->add_option("--iters", flags.iters, "override config n_iters");
    simulate->add_option("--methods", flags.methods, "override enabled methods")->delimiter(',');
    simulate->add_option("--threads", flags.threads, "worker threads (0 = hardware)");
    simulate->add_flag("--quiet", flags.quiet, "suppress progress and summary");

    CLI::App* infer = app.add_subcommand("infer", "replay confidence sequences over a recorded stream");
    infer->add_option("--stream", stream_path, "stream CSV (t,x1..xd,a,y,pi1,k)")->required();
    infer->add_option("--config", flags.config_path, "config JSON path")->required();
    infer->add_option("--out", flags.out, "output trajectory CSV path")->required();
    infer->add_option("--seed", flags.seed, "override config seed");
    infer->add_option("--iter", infer_iter, "iteration id for the fold-assignment stream");
    infer->add_flag("--quiet", flags.quiet, "suppress progress output");

    CLI::App* aggregate = app.add_subcommand("aggregate", "reduce trajectory CSVs into curves");
    aggregate->add_option("patterns", agg_patterns, "trajectory CSV paths or glob patterns")->required();
    aggregate->add_option("--out", flags.out, "output aggregate CSV path")->required();

    CLI::App* selfcheck = app.add_subcommand("selfcheck", "run the fast invariant suite");
    selfcheck->add_option("--mutate-psi", mutate_psi,
                          "bias the psi_E check constant (mutation-test mode; makes the suite fail)");
    selfcheck->add_flag("--quiet", flags.quiet, "print failures only");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(flags);
        if (infer->parsed()) return cmd_infer(flags, stream_path, infer_iter);
        if (aggregate->parsed()) return cmd_aggregate(agg_patterns, flags.out);
        if (selfcheck->parsed()) return cmd_selfcheck(mutate_psi, flags.quiet);
    } catch (const avate::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const avate::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
