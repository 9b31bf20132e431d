#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "nestdiag/engine.hpp"
#include "nestdiag/geometry.hpp"
#include "nestdiag/problems.hpp"
#include "nestdiag/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitRerun = 2;

std::string default_outdir() {
    if (const char* env = std::getenv("NESTDIAG_OUTDIR")) return env;
    return "nestdiag-out";
}

// Write-then-rename so partially written files never shadow good ones.
void write_file_atomic(const fs::path& path,
                       const std::function<void(std::ostream&)>& writer) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw nestdiag::Error("cannot open '" + tmp.string() +
                                  "' for writing");
        writer(out);
        out.flush();
        if (!out)
            throw nestdiag::Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

json summary_to_json(const nestdiag::RunResult& result) {
    const auto& s = result.summary;
    json j;
    j["problem"] = result.problem_name;
    j["num_live"] = result.num_live;
    j["num_steps"] = result.num_steps;
    j["seed"] = result.seed;
    j["radius_update_interval"] = result.radius_update_interval;
    j["logz"] = result.logz;
    j["logz_err"] = result.logz_err;
    j["iterations"] = result.records.size();
    j["geometric_mean_rjd"] = s.geometric_mean_rjd;
    j["frac_rjd_above_1"] = s.frac_rjd_above_1;
    j["num_jumps"] = s.num_jumps;
    j["num_zero_jumps"] = s.num_zero_jumps;
    j["esjd"] = s.esjd;
    j["verdict"] = nestdiag::to_string(s.verdict);
    if (!result.records.empty()) {
        const auto ks =
            nestdiag::insertion_order_ks(result.records, result.num_live);
        j["insertion_order_ks_statistic"] = ks.ks_statistic;
        j["insertion_order_p_value"] = ks.p_value;
    }
    j["wall_time_s"] = result.wall_time_s;
    return j;
}

fs::path run_directory(const fs::path& outdir, const nestdiag::RunResult& r) {
    return outdir / (r.problem_name + "_K" + std::to_string(r.num_live) + "_M" +
                     std::to_string(r.num_steps) + "_seed" +
                     std::to_string(r.seed));
}

void write_run_artifacts(const fs::path& outdir, const nestdiag::RunResult& r,
                         int bins_per_decade, bool jsonl) {
    const fs::path dir = run_directory(outdir, r);
    fs::create_directories(dir);
    write_file_atomic(dir / "trace.csv",
                      [&](std::ostream& out) { nestdiag::write_trace(r, out); });
    if (jsonl)
        write_file_atomic(dir / "trace.jsonl", [&](std::ostream& out) {
            nestdiag::write_trace_jsonl(r, out);
        });
    if (!r.records.empty())
        write_file_atomic(dir / "histogram.csv", [&](std::ostream& out) {
            nestdiag::write_histogram(r.records, bins_per_decade, out);
        });
    write_file_atomic(dir / "summary.json", [&](std::ostream& out) {
        out << summary_to_json(r).dump(2) << '\n';
    });
}

void print_run_line(const nestdiag::RunResult& r) {
    std::cout << r.problem_name << " K=" << r.num_live << " M=" << r.num_steps
              << " seed=" << r.seed << ": logz=" << r.logz << " +- "
              << r.logz_err << "  geometric-mean-RJD="
              << r.summary.geometric_mean_rjd
              << "  f(RJD>1)=" << r.summary.frac_rjd_above_1
              << "  verdict=" << nestdiag::to_string(r.summary.verdict)
              << std::endl;
}

struct RunOptions {
    std::string problem;
    int num_live = 400;
    int num_steps = 0;
    std::uint64_t seed = 1;
    std::string outdir = default_outdir();
    int bins_per_decade = 10;
    int radius_update_interval = 0;
    double termination_frac = 0.01;
    int bootstrap_rounds = 30;
    bool jsonl = false;
    bool verbose = false;
};

nestdiag::RunResult execute_run(const RunOptions& opt, int num_steps,
                                std::uint64_t seed) {
    const auto problem = nestdiag::problems::by_name(opt.problem);
    nestdiag::RunConfig config;
    config.num_live = opt.num_live;
    config.num_steps = num_steps;
    config.seed = seed;
    config.radius_update_interval = opt.radius_update_interval;
    config.termination_frac = opt.termination_frac;
    config.bootstrap_rounds = opt.bootstrap_rounds;

    nestdiag::IterationObserver observer;
    if (opt.verbose)
        observer = [](long iter, std::span<const nestdiag::UnitPoint>) {
            if (iter % 2000 == 0)
                std::cerr << "  iteration " << iter << std::endl;
        };
    return nestdiag::run(problem, config, nestdiag::AxisSliceSampler{},
                         observer);
}

int cmd_run(const RunOptions& opt) {
    const auto result = execute_run(opt, opt.num_steps, opt.seed);
    write_run_artifacts(opt.outdir, result, opt.bins_per_decade, opt.jsonl);
    print_run_line(result);
    return result.summary.verdict == nestdiag::Verdict::trustworthy
               ? kExitOk
               : kExitRerun;
}

int cmd_sequence(const RunOptions& opt, int rounds, int max_steps,
                 std::vector<int> schedule) {
    const auto problem = nestdiag::problems::by_name(opt.problem);
    if (schedule.empty()) {
        int steps = problem.dim;
        for (int i = 0; i < rounds; ++i, steps *= 2) {
            if (max_steps > 0 && steps > max_steps) break;
            schedule.push_back(steps);
        }
    }
    if (schedule.empty())
        throw nestdiag::PreconditionError("sequence: empty schedule");

    const auto flush_table = [&](const std::vector<nestdiag::RunResult>& runs) {
        if (runs.empty()) return;
        const auto table = nestdiag::make_sequence_table(runs);
        const fs::path dir =
            fs::path(opt.outdir) /
            (opt.problem + "_K" + std::to_string(opt.num_live) +
             "_sequence_seed" + std::to_string(opt.seed));
        fs::create_directories(dir);
        write_file_atomic(dir / "sequence.csv", [&](std::ostream& out) {
            nestdiag::write_sequence_table(table, out);
        });
    };

    std::vector<nestdiag::RunResult> results;
    std::optional<nestdiag::PreviousRun> previous;
    nestdiag::Recommendation recommendation =
        nestdiag::Recommendation::rerun_doubled;
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        nestdiag::RunResult result;
        try {
            result = execute_run(opt, schedule[i],
                                 opt.seed + static_cast<std::uint64_t>(i));
        } catch (...) {
            flush_table(results);  // keep the completed rows
            throw;
        }
        write_run_artifacts(opt.outdir, result, opt.bins_per_decade, opt.jsonl);
        print_run_line(result);
        recommendation = nestdiag::decision_rule(result.summary, previous,
                                                 result.logz, result.logz_err);
        previous = nestdiag::PreviousRun{result.summary, result.logz,
                                         result.logz_err};
        results.push_back(std::move(result));
    }

    flush_table(results);
    std::cout << "recommendation: " << nestdiag::to_string(recommendation)
              << std::endl;
    return recommendation == nestdiag::Recommendation::rerun_doubled
               ? kExitRerun
               : kExitOk;
}

int cmd_radius_scaling(std::vector<int> live_counts, std::vector<int> dims,
                       int repeats, std::uint64_t seed,
                       const std::string& out_file) {
    nestdiag::Rng root(seed);
    std::ostringstream table;
    table << "num_live,dim,repeats,mean_r,std_r,predicted_r\n";
    std::uint64_t stream = 0;
    for (int d : dims) {
        for (int num_live : live_counts) {
            if (num_live < 2)
                throw nestdiag::PreconditionError(
                    "radius-scaling: need at least 2 live points");
            double sum = 0.0, sum_sq = 0.0;
            for (int rep = 0; rep < repeats; ++rep) {
                nestdiag::Rng rng = root.substream(stream++);
                // K points uniform in a d-ball: the mono-modal ellipsoid
                // contour case of the scaling law.
                Eigen::MatrixXd pts(num_live, d);
                for (int i = 0; i < num_live; ++i) {
                    Eigen::VectorXd z(d);
                    for (int k = 0; k < d; ++k) z[k] = rng.normal();
                    z *= std::pow(rng.uniform(), 1.0 / d) / z.norm();
                    pts.row(i) = z.transpose();
                }
                const auto [radius, space] =
                    nestdiag::compute_reference_radius(pts, 30, rng);
                sum += radius.r;
                sum_sq += radius.r * radius.r;
            }
            const double mean = sum / repeats;
            const double var =
                repeats > 1
                    ? std::max(0.0, (sum_sq - repeats * mean * mean) /
                                        (repeats - 1))
                    : 0.0;
            const double predicted =
                std::pow(20.0 / num_live, 1.0 / d) * std::pow(d / 2.0, 0.1);
            table << num_live << ',' << d << ',' << repeats << ','
                  << nestdiag::format_double(mean) << ','
                  << nestdiag::format_double(std::sqrt(var)) << ','
                  << nestdiag::format_double(predicted) << '\n';
        }
    }
    if (out_file.empty() || out_file == "-") {
        std::cout << table.str();
    } else {
        write_file_atomic(out_file,
                          [&](std::ostream& out) { out << table.str(); });
    }
    return kExitOk;
}

int cmd_check(const std::string& trace_file) {
    std::ifstream in(trace_file, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open '" << trace_file << "'" << std::endl;
        return kExitError;
    }
    const auto data = nestdiag::read_trace(in);
    const auto summary = nestdiag::summarize(data.records);
    const auto ks = nestdiag::insertion_order_ks(data.records, data.num_live);
    std::cout << data.problem_name << " K=" << data.num_live
              << " M=" << data.num_steps << " seed=" << data.seed << ": "
              << data.records.size()
              << " records  geometric-mean-RJD=" << summary.geometric_mean_rjd
              << "  f(RJD>1)=" << summary.frac_rjd_above_1
              << "  insertion-order-p=" << ks.p_value
              << "  verdict=" << nestdiag::to_string(summary.verdict)
              << std::endl;
    return summary.verdict == nestdiag::Verdict::trustworthy ? kExitOk
                                                             : kExitRerun;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested sampling with relative jump distance diagnostics"};
    app.require_subcommand(1);

    RunOptions opt;

    auto add_common = [&](CLI::App* cmd, bool needs_steps) {
        cmd->add_option("--problem", opt.problem, "Benchmark problem name")
            ->required();
        cmd->add_option("--live", opt.num_live, "Number of live points K");
        if (needs_steps)
            cmd->add_option("--nsteps", opt.num_steps,
                            "Slice steps per replacement")
                ->required();
        cmd->add_option("--seed", opt.seed, "Root RNG seed");
        cmd->add_option("--outdir", opt.outdir,
                        "Output directory (default $NESTDIAG_OUTDIR)");
        cmd->add_option("--bins-per-decade", opt.bins_per_decade,
                        "Histogram resolution");
        cmd->add_option("--radius-update-interval",
                        opt.radius_update_interval,
                        "Iterations between radius updates (0 = auto)");
        cmd->add_option("--term-frac", opt.termination_frac,
                        "Remainder fraction that stops the run");
        cmd->add_option("--bootstrap-rounds", opt.bootstrap_rounds,
                        "Bootstrap rounds for the reference radius");
        cmd->add_flag("--jsonl", opt.jsonl, "Also write trace.jsonl");
        cmd->add_flag("--verbose", opt.verbose, "Log progress to stderr");
    };

    auto* run_cmd = app.add_subcommand("run", "One nested sampling run");
    add_common(run_cmd, true);

    int rounds = 4;
    int max_steps = 0;
    std::vector<int> schedule;
    auto* seq_cmd = app.add_subcommand(
        "sequence", "Doubling schedule of runs starting at M = d");
    add_common(seq_cmd, false);
    seq_cmd->add_option("--rounds", rounds, "Schedule length");
    seq_cmd->add_option("--max-steps", max_steps,
                        "Cap on schedule steps (0 = none)");
    seq_cmd->add_option("--schedule", schedule,
                        "Explicit step counts (overrides --rounds)")
        ->delimiter(',');

    std::vector<int> live_counts{100, 400};
    std::vector<int> dims{2, 4, 8, 16, 128};
    int repeats = 40;
    std::uint64_t scaling_seed = 1;
    std::string scaling_out;
    auto* scaling_cmd = app.add_subcommand(
        "radius-scaling",
        "Reference-radius scaling experiment over dimension and live points");
    scaling_cmd->add_option("--live-counts", live_counts, "Live point counts")
        ->delimiter(',');
    scaling_cmd->add_option("--dims", dims, "Dimensionalities")->delimiter(',');
    scaling_cmd->add_option("--repeats", repeats, "Simulations per cell");
    scaling_cmd->add_option("--seed", scaling_seed, "Root RNG seed");
    scaling_cmd->add_option("--out", scaling_out, "Output file (default stdout)");

    std::string trace_file;
    auto* check_cmd =
        app.add_subcommand("check", "Recompute diagnostics from a trace file");
    check_cmd->add_option("--trace", trace_file, "trace.csv of a previous run")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(opt);
        if (seq_cmd->parsed())
            return cmd_sequence(opt, rounds, max_steps, schedule);
        if (scaling_cmd->parsed())
            return cmd_radius_scaling(live_counts, dims, repeats, scaling_seed,
                                      scaling_out);
        if (check_cmd->parsed()) return cmd_check(trace_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitError;
    }
    return kExitError;
}
