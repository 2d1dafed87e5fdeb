#pragma once

// Batch front end behind the qkham CLI: run, verify, dump.
//
// Exit codes: 0 success with passing diagnostics, 1 operational failure,
// 2 diagnostics threshold violation.

#include <algorithm>
#include <filesystem>
#include <future>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qkham/config.hpp"
#include "qkham/diagnostics.hpp"
#include "qkham/dynamics.hpp"
#include "qkham/forms.hpp"
#include "qkham/io.hpp"
#include "qkham/structures.hpp"

namespace qkham {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitThreshold = 2;

struct RunOptions {
    double tolerance_scale = 1.0;
    bool symplectic_sweep = false;
};

struct RunPaths {
    std::filesystem::path csv;
    std::filesystem::path partial_csv;
    std::filesystem::path diagnostics;
    std::filesystem::path plot;
    std::filesystem::path png;
    std::filesystem::path error_log;

    explicit RunPaths(const std::string& prefix)
        : csv(prefix + ".trajectory.csv"),
          partial_csv(prefix + ".trajectory.csv.partial"),
          diagnostics(prefix + ".diagnostics.json"),
          plot(prefix + ".plot.gp"),
          png(prefix + ".phase.png"),
          error_log(prefix + ".error.log") {}
};

namespace detail {

inline void try_write_error_log(const RunPaths& paths, const std::string& message) {
    std::ofstream log(paths.error_log, std::ios::trunc);
    if (log) log << message << "\n";
}

}  // namespace detail

inline int run(const SimulationConfig& cfg, const RunOptions& options, std::ostream& log) {
    const RunPaths paths(cfg.output_prefix);
    std::vector<std::filesystem::path> written;
    auto fail = [&](const std::string& message) {
        std::error_code ec;
        for (const auto& p : written) std::filesystem::remove(p, ec);
        detail::try_write_error_log(paths, message);
        log << "error: " << message << "\n";
        return kExitFailure;
    };

    const HamiltonianSystem system(cfg.structure, parse(cfg.hamiltonian, BlockDim(cfg.n)));

    std::error_code ec;
    const auto parent = paths.csv.parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent, ec);
        if (ec) return fail("cannot create output directory '" + parent.string() + "': " + ec.message());
    }

    Trajectory traj;
    try {
        traj = integrate(system, PhasePoint(cfg.initial, 0.0), cfg.dt, cfg.steps, cfg.method);
    } catch (const IntegrationError& e) {
        std::string msg = std::string("integration aborted: ") + e.what();
        try {
            write_file_atomic(paths.partial_csv, trajectory_to_csv(e.partial(), system.hamiltonian()));
            msg += " (partial trajectory in '" + paths.partial_csv.string() + "')";
        } catch (const std::exception& inner) {
            msg += std::string(" (partial trajectory not written: ") + inner.what() + ")";
        }
        detail::try_write_error_log(paths, msg);
        log << "error: " << msg << "\n";
        return kExitFailure;
    }

    Thresholds thresholds;
    thresholds.tolerance_scale = options.tolerance_scale;
    try {
        const std::string csv = trajectory_to_csv(traj, system.hamiltonian());
        DiagnosticsOptions diag_options;
        diag_options.symplectic_sweep = options.symplectic_sweep;
        const DiagnosticsReport report = full_report(traj, system, diag_options);
        const std::string json = report_to_json(report, cfg, thresholds).dump(2) + "\n";

        write_file_atomic(paths.csv, csv);
        written.push_back(paths.csv);
        write_file_atomic(paths.diagnostics, json);
        written.push_back(paths.diagnostics);
        if (cfg.emit_plot) {
            write_file_atomic(paths.plot, gnuplot_script(cfg, paths.csv.filename().string(),
                                                         paths.png.filename().string()));
            written.push_back(paths.plot);
        }

        const bool pass = report.passes(thresholds, cfg.dt);
        log << "wrote " << paths.csv.string() << " (" << traj.size() << " points), " << paths.diagnostics.string()
            << "\n"
            << "energy drift " << format_full(report.energy_drift_max) << ", eom residual "
            << (report.eom_residual_max ? format_full(*report.eom_residual_max) : std::string("n/a")) << ", symplecticity " << format_full(report.symplecticity_residual)
            << ", algebra " << report.algebra.max() << " -> " << (pass ? "PASS" : "THRESHOLD VIOLATION") << "\n";
        return pass ? kExitOk : kExitThreshold;
    } catch (const std::exception& e) {
        return fail(e.what());
    }
}

/// Loads and runs one config file, mapping every error to an exit code.
inline int run_config_file(const std::filesystem::path& path, const RunOptions& options, std::ostream& log) {
    try {
        return run(load_config(path), options, log);
    } catch (const std::exception& e) {
        log << "error: " << path.string() << ": " << e.what() << "\n";
        return kExitFailure;
    }
}

/// Runs every *.json in dir concurrently, one trajectory per task. Logs are
/// emitted in file-name order. Result is 1 if any run failed operationally,
/// else 2 if any violated thresholds, else 0.
inline int run_batch(const std::filesystem::path& dir, const RunOptions& options, std::ostream& log) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        log << "error: batch directory '" << dir.string() << "' does not exist\n";
        return kExitFailure;
    }
    std::vector<std::filesystem::path> configs;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") configs.push_back(entry.path());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        log << "error: no *.json configs in '" << dir.string() << "'\n";
        return kExitFailure;
    }

    struct Outcome {
        int code;
        std::string text;
    };
    std::vector<std::future<Outcome>> jobs;
    jobs.reserve(configs.size());
    for (const auto& path : configs) {
        jobs.push_back(std::async(std::launch::async, [path, options] {
            std::ostringstream out;
            const int code = run_config_file(path, options, out);
            return Outcome{code, out.str()};
        }));
    }

    bool any_failure = false;
    bool any_threshold = false;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const Outcome o = jobs[i].get();
        log << "[" << configs[i].filename().string() << "] exit " << o.code << "\n" << o.text;
        any_failure = any_failure || o.code == kExitFailure;
        any_threshold = any_threshold || o.code == kExitThreshold;
    }
    return any_failure ? kExitFailure : any_threshold ? kExitThreshold : kExitOk;
}

/// Quaternion relations for both triples and metric compatibility of all six
/// structures. corrupt_h swaps the H tensors for F's matrix (negative control).
inline int verify(int n, bool corrupt_h, std::ostream& out) {
    const BlockDim dim(n);
    const EuclideanMetric metric{dim};
    bool all_zero = true;

    out << "n = " << n << " (dimension " << dim.size() << ")\n";
    out << "space      F^2+I  G^2+I  H^2+I  FGH+I\n";
    for (Space space : {Space::Tangent, Space::Cotangent}) {
        const auto f = build_structure({Label::F, space}, dim);
        const auto g = build_structure({Label::G, space}, dim);
        const auto h = corrupt_h ? StructureTensor({Label::H, space}, dim, f.matrix())
                                 : build_structure({Label::H, space}, dim);
        const AlgebraReport r = verify_quaternion_relations(f, g, h);
        all_zero = all_zero && r.exact();
        std::string name(to_string(space));
        name.resize(10, ' ');
        out << name << " " << r.f_squared << "      " << r.g_squared << "      " << r.h_squared << "      " << r.fgh
            << "\n";
    }
    out << "metric compatibility |M^T + M|:\n";
    for (Space space : {Space::Tangent, Space::Cotangent}) {
        for (Label label : kLabels) {
            const auto t = corrupt_h && label == Label::H ? build_structure({Label::F, space}, dim)
                                                          : build_structure({label, space}, dim);
            const int residual = verify_metric_compatibility(t, metric);
            all_zero = all_zero && residual == 0;
            out << "  " << to_string(label) << (space == Space::Cotangent ? "*" : " ") << " " << to_string(space)
                << ": " << residual << "\n";
        }
    }
    out << (all_zero ? "all residuals zero\n" : "NONZERO RESIDUALS\n");
    return all_zero ? kExitOk : kExitThreshold;
}

template <typename T>
void write_integer_csv(const Matrix<T>& m, std::ostream& out) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << static_cast<long long>(m(r, c));
        }
        out << '\n';
    }
}

/// what: "structure" (uses space) or "omega" (the symplectic matrix).
inline void dump(std::string_view what, Label label, int n, Space space, std::ostream& out) {
    const BlockDim dim(n);
    if (what == "structure") {
        write_integer_csv(build_structure({label, space}, dim).matrix(), out);
    } else if (what == "omega") {
        write_integer_csv(symplectic_form(label, dim).matrix(), out);
    } else {
        throw std::invalid_argument("unknown dump selector '" + std::string(what) + "' (allowed: structure, omega)");
    }
}

}  // namespace qkham
