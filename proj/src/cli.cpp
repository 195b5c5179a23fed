#include "predictsched/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "predictsched/forecaster.hpp"
#include "predictsched/metrics.hpp"
#include "predictsched/ranking.hpp"
#include "predictsched/simulator.hpp"
#include "predictsched/synth.hpp"
#include "predictsched/time_series.hpp"
#include "predictsched/workload.hpp"

namespace predictsched {
namespace {

// Unreadable or unwritable files map to the usage exit status.
class FileError : public Error {
public:
    using Error::Error;
};

struct WorkloadOptions {
    std::string path;
    std::string format = "auto";
};

struct ForecastOptions {
    double cpu_tol = 0.0;
    double runtime_tol = 0.25;
    double period_jitter = 0.10;
    int min_occurrences = 3;
    int max_layer = 3;
    Seconds tick = 86400;
    Seconds horizon = 86400;
    Seconds history = 0;
    std::string mode = "survival";
    double t_low = 0.33;
    double t_high = 0.66;
    double step = 0.02;

    ForecasterConfig config() const {
        ForecasterConfig cfg;
        cfg.similarity.cpu_tol = cpu_tol;
        cfg.similarity.runtime_tol = runtime_tol;
        cfg.similarity.period_jitter = period_jitter;
        cfg.similarity.min_occurrences = min_occurrences;
        cfg.max_layer = max_layer;
        cfg.tick = tick;
        cfg.horizon = horizon;
        cfg.history_window = history;
        cfg.mode = parse_confidence_mode(mode);
        cfg.thresholds.t_low = t_low;
        cfg.thresholds.t_high = t_high;
        cfg.thresholds.step = step;
        cfg.validate();
        return cfg;
    }
};

void add_workload_options(CLI::App* cmd, WorkloadOptions& w) {
    cmd->add_option("-w,--workload", w.path, "Workload trace (SWF, or CSV by extension)")->required();
    cmd->add_option("--format", w.format, "auto, swf or csv")
        ->check(CLI::IsMember({"auto", "swf", "csv"}));
}

void add_forecast_options(CLI::App* cmd, ForecastOptions& f) {
    cmd->add_option("--cpu-tol", f.cpu_tol, "Relative cpu tolerance for similar jobs");
    cmd->add_option("--runtime-tol", f.runtime_tol, "Relative runtime tolerance for similar jobs");
    cmd->add_option("--period-jitter", f.period_jitter, "Allowed relative deviation of a gap from the period");
    cmd->add_option("--min-occurrences", f.min_occurrences, "Shortest chain accepted as a pattern");
    cmd->add_option("--max-layer", f.max_layer, "Deepest pattern layer");
    cmd->add_option("--tick", f.tick, "Seconds between forecaster runs");
    cmd->add_option("--horizon", f.horizon, "Prediction horizon in seconds");
    cmd->add_option("--history", f.history, "History window in seconds, 0 for all");
    cmd->add_option("--mode", f.mode, "Confidence mode: survival or pdf");
    cmd->add_option("--t-low", f.t_low, "Initial lower decision threshold");
    cmd->add_option("--t-high", f.t_high, "Initial upper decision threshold");
    cmd->add_option("--step", f.step, "Threshold adaptation step");
}

Workload load(const WorkloadOptions& w) {
    if (!std::filesystem::exists(w.path)) throw FileError("cannot open file: " + w.path);
    const auto format = w.format == "swf"   ? WorkloadFormat::Swf
                        : w.format == "csv" ? WorkloadFormat::Csv
                                            : WorkloadFormat::Auto;
    return load_workload(w.path, format);
}

std::string slurp(const std::string& path) {
    if (!std::filesystem::exists(path)) throw FileError("cannot open file: " + path);
    return read_file(path);
}

void save(const std::filesystem::path& path, std::string_view contents) {
    try {
        write_file(path.string(), contents);
    } catch (const std::ios_base::failure&) {
        throw FileError("cannot write file: " + path.string());
    }
}

std::filesystem::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw FileError("cannot create directory: " + dir);
    return dir;
}

ClusterConfig cluster_for(const Workload& workload, int cpus) {
    ClusterConfig cluster;
    cluster.total_cpus = cpus > 0 ? cpus : workload.max_cpus();
    return cluster;
}

std::string format_number(double v, int precision) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

// ---- analyze ---------------------------------------------------------------

struct AnalyzeOptions {
    WorkloadOptions workload;
    std::string channel = "interarrival";
    Seconds bin = 3600;
};

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out) {
    const auto workload = load(o.workload);
    const auto channel = parse_channel(o.channel);
    const auto series = to_time_series(workload, channel, o.bin);
    const auto h = hurst_exponent(series.values);
    out << "channel\t" << to_string(channel) << '\n';
    out << "points\t" << series.values.size() << '\n';
    out << "h\t" << format_number(h.h, 6) << '\n';
    out << "fit_residual\t" << format_number(h.fit_residual, 6) << '\n';
    out << "log_n\tlog_rs\n";
    for (const auto& [x, y] : h.rs_points) out << format_number(x, 6) << '\t' << format_number(y, 6) << '\n';
    return kExitOk;
}

// ---- forecast --------------------------------------------------------------

struct ForecastCmdOptions {
    WorkloadOptions workload;
    ForecastOptions forecast;
    std::optional<Seconds> now;
    std::string out_path;
};

int cmd_forecast(const ForecastCmdOptions& o, std::ostream& out) {
    const auto workload = load(o.workload);
    const auto cfg = o.forecast.config();
    const Seconds now = o.now.value_or(workload.jobs.back().submit_time);
    const auto result = forecast(workload.jobs, now, cfg);

    out << "now\t" << now << '\n';
    for (std::size_t l = 0; l < result.patterns.layers.size(); ++l) {
        out << "layer_" << l + 1 << "_patterns\t" << result.patterns.layers[l].size() << '\n';
    }
    out << "groups\t" << result.groups.size() << '\n';
    out << "predictions\t" << result.predictions.size() << '\n';
    const auto csv = write_predictions(result.predictions);
    if (o.out_path.empty()) {
        out << csv;
    } else {
        save(o.out_path, csv);
    }
    return kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct SimulateOptions {
    WorkloadOptions workload;
    ForecastOptions forecast;
    std::string policy = "fcfs";
    int cpus = 0;
    std::string out_dir;
};

SimResult simulate(const Workload& workload, const ClusterConfig& cluster, PolicyKind kind,
                   const ForecastOptions& f) {
    std::optional<ForecasterConfig> cfg;
    if (kind == PolicyKind::DLPredictive) cfg = f.config();
    return run(workload, cluster, kind, cfg);
}

void write_objectives(std::ostream& out, const SimTrace& trace) {
    const auto obj = evaluate(trace);
    out << "makespan\t" << format_number(obj.makespan, 0) << '\n';
    out << "utilization\t" << format_number(obj.utilization, 3) << '\n';
    out << "slowdown\t" << format_number(obj.slowdown, 3) << '\n';
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    const auto workload = load(o.workload);
    const auto kind = parse_policy(o.policy);
    const auto cluster = cluster_for(workload, o.cpus);
    const auto result = simulate(workload, cluster, kind, o.forecast);

    out << "policy\t" << policy_label(kind) << '\n';
    out << "jobs\t" << workload.size() << '\n';
    out << "cpus\t" << cluster.total_cpus << '\n';
    write_objectives(out, result.trace);
    if (kind == PolicyKind::DLPredictive) {
        const auto& s = result.stats;
        out << "reservations\t" << s.created << '\n';
        out << "consumed\t" << s.consumed << '\n';
        out << "expired\t" << s.expired << '\n';
        out << "cancelled\t" << s.cancelled << '\n';
        out << "t_low\t" << format_number(result.thresholds.t_low, 4) << '\n';
        out << "t_high\t" << format_number(result.thresholds.t_high, 4) << '\n';
    }
    if (!o.out_dir.empty()) {
        const auto dir = prepare_dir(o.out_dir);
        save(dir / "trace.csv", write_trace(result.trace));
        std::ostringstream report;
        write_objectives(report, result.trace);
        save(dir / "objectives.tsv", report.str());
        if (kind == PolicyKind::DLPredictive) save(dir / "feedback.csv", write_feedback(result.feedback));
    }
    return kExitOk;
}

// ---- compare ---------------------------------------------------------------

struct CompareOptions {
    WorkloadOptions workload;
    ForecastOptions forecast;
    std::vector<std::string> policies;
    int cpus = 0;
    std::string out_dir;
    std::string matrix_path;
    bool parallel = true;
};

void write_ranking(std::ostream& out, const LabeledMatrix& m, const Ranking& r) {
    for (const auto& l : m.labels) out << '\t' << l;
    out << "\tMain eigen vector\n";
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        out << m.labels[i];
        for (std::size_t j = 0; j < m.labels.size(); ++j) out << '\t' << std::setprecision(9) << m.matrix(i, j);
        out << '\t' << format_number(r.eigenvector[i], 4) << '\n';
    }
    out << "winner\t" << m.labels[r.winner] << '\n';
}

int cmd_compare_matrix(const std::string& path, std::ostream& out) {
    const auto m = parse_matrix_tsv(slurp(path));
    const auto r = principal_eigenvector(m.matrix);
    write_ranking(out, m, r);
    return kExitOk;
}

int cmd_compare(const CompareOptions& o, std::ostream& out) {
    if (!o.matrix_path.empty()) return cmd_compare_matrix(o.matrix_path, out);
    if (o.workload.path.empty()) throw CLI::ValidationError("compare", "--workload or --matrix is required");
    if (o.policies.size() < 2) throw CLI::ValidationError("compare", "at least two policies are required");

    std::vector<PolicyKind> kinds;
    for (const auto& p : o.policies) kinds.push_back(parse_policy(p));
    const auto workload = load(o.workload);
    const auto cluster = cluster_for(workload, o.cpus);

    std::vector<SimTrace> traces(kinds.size());
    if (o.parallel) {
        std::vector<std::future<SimResult>> runs;
        for (auto kind : kinds) {
            runs.push_back(std::async(std::launch::async, [&, kind] {
                return simulate(workload, cluster, kind, o.forecast);
            }));
        }
        for (std::size_t i = 0; i < runs.size(); ++i) traces[i] = runs[i].get().trace;
    } else {
        for (std::size_t i = 0; i < kinds.size(); ++i) traces[i] = simulate(workload, cluster, kinds[i], o.forecast).trace;
    }

    std::vector<ObjectiveVector> objectives;
    for (const auto& t : traces) objectives.push_back(evaluate(t));

    std::vector<std::vector<double>> table;
    for (const auto& v : objectives) table.push_back({v.makespan, v.utilization, v.slowdown});
    const Orientation orient[] = {Orientation::Minimize, Orientation::Maximize, Orientation::Minimize};
    const auto rel = relative_estimations(table, orient);
    // Default preferences are ordered (makespan, slowdown, resource usage).
    const auto w = weights_from_binary_matrix(default_criteria_preferences()).normalized;
    const double weights[] = {w[0], w[2], w[1]};

    LabeledMatrix global;
    for (auto k : kinds) global.labels.emplace_back(policy_label(k));
    global.matrix = global_matrix(rel, weights);
    const auto ranking = principal_eigenvector(global.matrix);

    std::ostringstream report;
    report << "Criteria";
    for (const auto& l : global.labels) report << '\t' << l;
    report << '\n';
    const char* names[] = {"Makespan", "System usage", "Slowdown"};
    const int precision[] = {0, 3, 3};
    for (std::size_t c = 0; c < 3; ++c) {
        report << names[c];
        for (const auto& row : table) report << '\t' << format_number(row[c], precision[c]);
        if (rel.degenerate[c]) report << "\t(degenerate)";
        report << '\n';
    }
    report << '\n';
    write_ranking(report, global, ranking);
    out << report.str();

    if (!o.out_dir.empty()) {
        const auto dir = prepare_dir(o.out_dir);
        save(dir / "report.tsv", report.str());
        save(dir / "global_matrix.tsv", write_matrix_tsv(global));
        for (std::size_t i = 0; i < kinds.size(); ++i) {
            save(dir / ("trace_" + std::string(policy_token(kinds[i])) + ".csv"), write_trace(traces[i]));
        }
    }
    return kExitOk;
}

// ---- synth -----------------------------------------------------------------

struct SynthOptions {
    std::string spec_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string truth_path;
};

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("PREDICTSCHED_SEED");
    if (v == nullptr || *v == '\0') return std::nullopt;
    char* end = nullptr;
    const auto seed = std::strtoull(v, &end, 10);
    if (*end != '\0') throw ConfigError("PREDICTSCHED_SEED is not an unsigned integer");
    return seed;
}

int cmd_synth(const SynthOptions& o, std::ostream& out) {
    const auto spec = parse_synth_spec(slurp(o.spec_path));
    std::uint64_t seed = spec.seed;
    if (o.seed) seed = *o.seed;
    if (auto env = env_seed()) seed = *env;

    const auto result = synth_workload(spec, seed);
    const auto text = o.out_path.size() >= 4 && o.out_path.ends_with(".csv") ? write_csv(result.workload)
                                                                             : write_swf(result.workload);
    if (o.out_path.empty()) {
        out << text;
    } else {
        save(o.out_path, text);
        out << "jobs\t" << result.workload.size() << '\n';
        out << "pattern_jobs\t" << result.ground_truth.size() << '\n';
        out << "seed\t" << seed << '\n';
    }
    if (!o.truth_path.empty()) save(o.truth_path, write_ground_truth(result.ground_truth));
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Predictive job scheduling simulator"};
    app.require_subcommand(1);

    AnalyzeOptions analyze;
    auto* a = app.add_subcommand("analyze", "Hurst exponent of a workload series");
    add_workload_options(a, analyze.workload);
    a->add_option("--channel", analyze.channel, "interarrival, job_count or cpu_time");
    a->add_option("--bin", analyze.bin, "Bin width in seconds for binned channels");

    ForecastCmdOptions fc;
    auto* f = app.add_subcommand("forecast", "Mine patterns and predict upcoming jobs");
    add_workload_options(f, fc.workload);
    add_forecast_options(f, fc.forecast);
    f->add_option("--now", fc.now, "Forecast origin, defaults to the last submit time");
    f->add_option("-o,--out", fc.out_path, "Predictions CSV, stdout when omitted");

    SimulateOptions sim;
    auto* s = app.add_subcommand("simulate", "Run one scheduling policy");
    add_workload_options(s, sim.workload);
    add_forecast_options(s, sim.forecast);
    s->add_option("-p,--policy", sim.policy, "Policy token");
    s->add_option("--cpus", sim.cpus, "Cluster size, defaults to the widest job");
    s->add_option("--out-dir", sim.out_dir, "Directory for trace and report files");

    CompareOptions cmp;
    auto* c = app.add_subcommand("compare", "Run several policies and rank them");
    c->add_option("-w,--workload", cmp.workload.path, "Workload trace");
    c->add_option("--format", cmp.workload.format, "auto, swf or csv")->check(CLI::IsMember({"auto", "swf", "csv"}));
    add_forecast_options(c, cmp.forecast);
    c->add_option("-p,--policies", cmp.policies, "Policy tokens")->delimiter(',');
    c->add_option("--cpus", cmp.cpus, "Cluster size, defaults to the widest job");
    c->add_option("--out-dir", cmp.out_dir, "Directory for report and trace files");
    c->add_option("--matrix", cmp.matrix_path, "Rank a comparison matrix read from TSV instead");
    c->add_flag("!--sequential", cmp.parallel, "Run policies one after another");

    SynthOptions syn;
    auto* y = app.add_subcommand("synth", "Generate a synthetic periodic workload");
    y->add_option("--spec", syn.spec_path, "Synthesis spec file")->required();
    y->add_option("--seed", syn.seed, "Random seed (PREDICTSCHED_SEED overrides)");
    y->add_option("-o,--out", syn.out_path, "Output workload (.swf or .csv), stdout when omitted");
    y->add_option("--truth", syn.truth_path, "Ground-truth occurrences CSV");

    std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(reversed.begin(), reversed.end());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (a->parsed()) return cmd_analyze(analyze, out);
        if (f->parsed()) return cmd_forecast(fc, out);
        if (s->parsed()) return cmd_simulate(sim, out);
        if (c->parsed()) return cmd_compare(cmp, out);
        if (y->parsed()) return cmd_synth(syn, out);
    } catch (const FileError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace predictsched
