// Copyright (c) 2026 The lidar_odom Authors
// SPDX-License-Identifier: MIT
#include "cli.hpp"

#include <tbb/global_control.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "lidar_odom/eval.hpp"
#include "lidar_odom/io.hpp"
#include "lidar_odom/pipeline.hpp"

namespace lidar_odom::cli {

namespace {

namespace fs = std::filesystem;

struct RunOptions {
    std::string input;
    std::string format;
    std::string config_path;
    std::string output;
    std::string map_ply;
    std::string threshold_log;
    std::vector<std::string> params;
    std::optional<double> r_max;
    std::optional<double> r_min;
    std::optional<double> dt;
    std::string deskew;
    std::size_t threads = 0;
    int verbosity = 0;
};

struct EvalOptions {
    std::string estimate;
    std::string ground_truth;
    std::string format = "kitti";
    std::string csv;
};

// Files of the input and their format. An explicit format wins; otherwise the extension
// decides and mixed extensions are rejected.
std::pair<std::vector<fs::path>, ScanFormat> resolve(const RunOptions &opt) {
    if (!opt.format.empty()) {
        const ScanFormat format = parse_scan_format(opt.format);
        return {resolve_inputs(opt.input, format), format};
    }
    std::vector<fs::path> files;
    if (fs::is_directory(opt.input)) {
        for (const auto format : {ScanFormat::kKittiBin, ScanFormat::kPly, ScanFormat::kXyzCsv}) {
            const auto found = resolve_inputs(opt.input, format);
            files.insert(files.end(), found.begin(), found.end());
        }
    } else {
        files = resolve_inputs(opt.input, ScanFormat::kKittiBin);
    }
    std::set<ScanFormat> formats;
    for (const auto &f : files) {
        const auto format = format_from_extension(f);
        if (!format) {
            throw std::invalid_argument("cannot infer the format of " + f.string() +
                                        "; pass --format");
        }
        formats.insert(*format);
    }
    if (formats.size() > 1) {
        throw std::invalid_argument("input mixes file formats; pass --format");
    }
    std::sort(files.begin(), files.end());
    return {files, formats.empty() ? ScanFormat::kKittiBin : *formats.begin()};
}

Config build_config(const RunOptions &opt) {
    Config config;
    if (!opt.config_path.empty()) config = load_config(opt.config_path, config);
    for (const auto &kv : opt.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--param expects key=value: " + kv);
        config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opt.r_max) config.r_max = *opt.r_max;
    if (opt.r_min) config.r_min = *opt.r_min;
    if (opt.dt) config.dt = *opt.dt;
    if (!opt.deskew.empty()) config.deskew_enabled = opt.deskew == "on";
    config.validate();
    return config;
}

void write_outputs(const RunOptions &opt, const Trajectory &trajectory, double dt) {
    std::vector<double> stamps;
    for (const auto &e : trajectory.entries()) stamps.push_back(dt * static_cast<double>(e.index));
    write_trajectory_kitti(trajectory, fs::path(opt.output + ".kitti.txt"));
    write_trajectory_tum(trajectory, stamps, fs::path(opt.output + ".tum.txt"));
}

void print_rate(const std::vector<FrameStats> &stats, std::ostream &out) {
    std::vector<double> hz;
    for (const auto &s : stats) {
        if (s.seconds > 0.0) hz.push_back(1.0 / s.seconds);
    }
    out << "frames: " << stats.size();
    if (!hz.empty()) {
        double mean_seconds = 0.0;
        for (const auto &s : stats) mean_seconds += s.seconds;
        mean_seconds /= static_cast<double>(stats.size());
        std::sort(hz.begin(), hz.end());
        const std::size_t n = hz.size();
        const double median = n % 2 ? hz[n / 2] : 0.5 * (hz[n / 2 - 1] + hz[n / 2]);
        out << std::fixed << std::setprecision(1) << "  mean: " << 1.0 / mean_seconds
            << " Hz  median: " << median << " Hz" << std::defaultfloat;
    }
    out << '\n';
}

int cmd_run(const RunOptions &opt, std::ostream &out, std::ostream &err) {
    Config config;
    std::vector<fs::path> files;
    ScanFormat format;
    try {
        config = build_config(opt);
        std::tie(files, format) = resolve(opt);
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    if (files.empty()) {
        err << "error: no input frames match '" << opt.input << "'\n";
        return kNoInput;
    }

    std::unique_ptr<tbb::global_control> threads;
    if (opt.threads > 0) {
        threads = std::make_unique<tbb::global_control>(
            tbb::global_control::max_allowed_parallelism, opt.threads);
    }

    FileListSource source(files, format);
    OdometryPipeline pipeline(config);
    std::vector<FrameStats> stats;
    SequenceSinks sinks;
    sinks.on_stats = [&](const FrameStats &s) {
        stats.push_back(s);
        if (opt.verbosity > 0) {
            err << "frame " << s.index << ": " << s.registration_points << " pts, "
                << s.iterations << " it, tau " << s.threshold << ", " << to_string(s.status)
                << '\n';
        }
    };

    int code = kOk;
    Trajectory trajectory;
    try {
        trajectory = run_sequence(source, pipeline, sinks);
    } catch (const SequenceError &e) {
        err << "error: " << e.what() << " (" << files[std::min(e.frame_index(), files.size() - 1)]
            << ")\n";
        trajectory = e.partial();
        code = kFailure;
    }

    try {
        write_outputs(opt, trajectory, config.dt);
        if (!opt.map_ply.empty()) write_ply(pipeline.map().points(), opt.map_ply);
        if (!opt.threshold_log.empty()) {
            std::ofstream log(opt.threshold_log);
            write_threshold_csv(stats, log);
            if (!log) throw std::runtime_error("failed writing " + opt.threshold_log);
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    print_rate(stats, out);
    return code;
}

Trajectory read_trajectory(const std::string &path, const std::string &format) {
    return format == "tum" ? read_trajectory_tum(fs::path(path)) : read_trajectory_kitti(fs::path(path));
}

int cmd_eval(const EvalOptions &opt, std::ostream &out, std::ostream &err) {
    try {
        const auto estimate = read_trajectory(opt.estimate, opt.format).poses();
        const auto truth = read_trajectory(opt.ground_truth, opt.format).poses();
        if (estimate.size() != truth.size()) {
            err << "error: length mismatch: estimate has " << estimate.size()
                << " poses, ground truth has " << truth.size() << " poses\n";
            return kFailure;
        }
        const auto relative = relative_errors(estimate, truth);
        const auto absolute = ate(estimate, truth);
        print_report(relative, absolute, out);
        if (!opt.csv.empty()) {
            std::ofstream csv(opt.csv);
            write_report_csv(relative, absolute, csv);
            if (!csv) throw std::runtime_error("failed writing " + opt.csv);
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"LiDAR odometry from point cloud sequences", "lidar_odom"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto *run_cmd = app.add_subcommand("run", "Estimate a trajectory from a sequence of scans");
    run_cmd->add_option("-i,--input", run_opt.input, "Directory, glob pattern or single file")
        ->required();
    run_cmd->add_option("-f,--format", run_opt.format, "Scan format (default: from extension)")
        ->check(CLI::IsMember({"kitti-bin", "bin", "ply", "xyz", "csv"}));
    run_cmd->add_option("-c,--config", run_opt.config_path, "key = value parameter file")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("-o,--output", run_opt.output,
                        "Output stem; writes <stem>.kitti.txt and <stem>.tum.txt")
        ->required();
    run_cmd->add_option("--r-max", run_opt.r_max, "Maximum sensor range [m]")->required();
    run_cmd->add_option("--r-min", run_opt.r_min, "Minimum range [m]");
    run_cmd->add_option("--dt", run_opt.dt, "Sweep duration [s]");
    run_cmd->add_option("--deskew", run_opt.deskew, "Motion compensation (on|off)")
        ->check(CLI::IsMember({"on", "off"}));
    run_cmd->add_option("-p,--param", run_opt.params, "Override a parameter, key=value");
    run_cmd->add_option("--map-ply", run_opt.map_ply, "Write the final local map as PLY");
    run_cmd->add_option("--threshold-log", run_opt.threshold_log,
                        "Write per-frame deviation/sigma/tau CSV");
    run_cmd->add_option("-j,--threads", run_opt.threads, "Worker threads (default: all)");
    run_cmd->add_flag("-v,--verbose", run_opt.verbosity, "Per-frame diagnostics on stderr");

    EvalOptions eval_opt;
    auto *eval_cmd = app.add_subcommand("eval", "Compare an estimated trajectory to ground truth");
    eval_cmd->add_option("estimate", eval_opt.estimate, "Estimated trajectory")->required();
    eval_cmd->add_option("ground_truth", eval_opt.ground_truth, "Ground-truth trajectory")
        ->required();
    eval_cmd->add_option("--format", eval_opt.format, "Trajectory format")
        ->check(CLI::IsMember({"kitti", "tum"}));
    eval_cmd->add_option("--csv", eval_opt.csv, "Also write the report as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }
    if (run_cmd->parsed()) return cmd_run(run_opt, out, err);
    return cmd_eval(eval_opt, out, err);
}

}  // namespace lidar_odom::cli
