#pragma once

// Trajectory CSV, diagnostics JSON and gnuplot script rendering.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qkham/config.hpp"
#include "qkham/diagnostics.hpp"
#include "qkham/dynamics.hpp"
#include "qkham/expression.hpp"

namespace qkham {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 17 significant digits; lossless for IEEE doubles.
inline std::string format_full(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::string trajectory_csv_header(BlockDim dim) {
    std::string h = "t";
    for (std::size_t a = 1; a <= dim.size(); ++a) h += ",x" + std::to_string(a);
    return h + ",energy";
}

/// One row per point: t, x1..x{4n}, H(x).
inline std::string trajectory_to_csv(const Trajectory& traj, const ScalarField& hamiltonian) {
    std::string out = trajectory_csv_header(hamiltonian.dim()) + "\n";
    for (const auto& p : traj.points) {
        out += format_full(p.time());
        for (double x : p.coordinates()) out += "," + format_full(x);
        out += "," + format_full(evaluate(hamiltonian, p.coordinates())) + "\n";
    }
    return out;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("read_csv: empty input");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) table.header.push_back(cell);
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            double v = 0.0;
            auto res = std::from_chars(line.data() + start, line.data() + end, v);
            if (res.ec != std::errc{} || res.ptr != line.data() + end)
                throw IoError("read_csv: bad number on line " + std::to_string(lineno));
            row.push_back(v);
            start = end + 1;
        }
        if (row.size() != table.header.size())
            throw IoError("read_csv: wrong column count on line " + std::to_string(lineno));
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline nlohmann::ordered_json report_to_json(const DiagnosticsReport& report, const SimulationConfig& cfg,
                                             const Thresholds& thresholds) {
    nlohmann::ordered_json j;
    j["structure"] = std::string(to_string(cfg.structure));
    j["n"] = cfg.n;
    j["method"] = std::string(to_string(cfg.method));
    j["dt"] = cfg.dt;
    j["steps"] = cfg.steps;
    j["energy_drift_max"] = report.energy_drift_max;
    if (report.eom_residual_max)
        j["eom_residual_max"] = *report.eom_residual_max;
    else
        j["eom_residual_max"] = nullptr;
    j["symplecticity_residual"] = report.symplecticity_residual;
    j["algebra_residual_f_squared"] = report.algebra.f_squared;
    j["algebra_residual_g_squared"] = report.algebra.g_squared;
    j["algebra_residual_h_squared"] = report.algebra.h_squared;
    j["algebra_residual_fgh"] = report.algebra.fgh;
    j["threshold_energy_drift"] = thresholds.energy();
    j["threshold_eom_residual"] = thresholds.eom(cfg.dt);
    j["threshold_symplecticity"] = thresholds.symplectic();
    j["tolerance_scale"] = thresholds.tolerance_scale;
    j["pass_energy_drift"] = report.energy_drift_max <= thresholds.energy();
    j["pass_eom_residual"] = report.eom_passes(thresholds, cfg.dt);
    j["pass_symplecticity"] = report.symplecticity_residual <= thresholds.symplectic();
    j["pass_algebra"] = report.algebra.exact();
    j["pass"] = report.passes(thresholds, cfg.dt);
    j["energy_drift_series"] = report.energy_drift_series;
    return j;
}

/// Phase portrait (x1, x{n+1}). The CSV is referenced by file name, so run
/// gnuplot from the output directory.
inline std::string gnuplot_script(const SimulationConfig& cfg, const std::string& csv_name,
                                  const std::string& png_name) {
    const int y_col = cfg.n + 2;  // column 1 is t
    std::ostringstream s;
    s << "# phase portrait: x1 vs x" << cfg.n + 1 << "\n"
      << "set datafile separator ','\n"
      << "set terminal pngcairo size 800,800\n"
      << "set output '" << png_name << "'\n"
      << "set title 'structure " << to_string(cfg.structure) << ", " << to_string(cfg.method) << ", dt = "
      << format_full(cfg.dt) << "'\n"
      << "set xlabel 'x1'\n"
      << "set ylabel 'x" << cfg.n + 1 << "'\n"
      << "set size square\n"
      << "plot '" << csv_name << "' skip 1 using 2:" << y_col << " with lines notitle\n";
    return s.str();
}

/// Writes via a sibling temp file and rename so a failed write never leaves a
/// truncated artifact behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

}  // namespace qkham
