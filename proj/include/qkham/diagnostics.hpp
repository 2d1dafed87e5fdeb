#pragma once

// Post-hoc checks on a stored trajectory: energy conservation, agreement of
// the sampled curve with the vector field, and symplecticity of the step map.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include "qkham/dynamics.hpp"
#include "qkham/expression.hpp"
#include "qkham/forms.hpp"
#include "qkham/matrix.hpp"
#include "qkham/structures.hpp"

namespace qkham {

class DiagnosticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnergyDrift {
    std::vector<double> series;  // |H(p_k) - H(p_0)| per stored point
    double max = 0.0;
};

inline EnergyDrift energy_drift(const Trajectory& trajectory, const ScalarField& hamiltonian) {
    EnergyDrift out;
    if (trajectory.points.empty()) return out;
    out.series.reserve(trajectory.size());
    double h0 = 0.0;
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        double h = 0.0;
        try {
            h = evaluate(hamiltonian, trajectory.points[k].coordinates());
        } catch (const EvaluationError& e) {
            throw DiagnosticsError("energy evaluation failed at point " + std::to_string(k) + ": " + e.what());
        }
        if (k == 0) h0 = h;
        const double drift = std::abs(h - h0);
        out.series.push_back(drift);
        out.max = std::max(out.max, drift);
    }
    return out;
}

/// max over interior points of |(p_{k+1} - p_{k-1}) / 2dt - X(p_k)|_max.
template <VectorField Field>
double eom_residual(const Trajectory& trajectory, const Field& field) {
    if (trajectory.size() < 3)
        throw DiagnosticsError("eom_residual: trajectory needs at least 3 points, got " +
                               std::to_string(trajectory.size()));
    const double dt = trajectory.step;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < trajectory.size(); ++k) {
        const auto& prev = trajectory.points[k - 1].coordinates();
        const auto& next = trajectory.points[k + 1].coordinates();
        const Vector x = field(trajectory.points[k].coordinates());
        for (std::size_t a = 0; a < x.size(); ++a)
            worst = std::max(worst, std::abs((next[a] - prev[a]) / (2.0 * dt) - x[a]));
    }
    return worst;
}

/// Central-difference Jacobian of the one-step map x -> step(x).
template <VectorField Field>
RealMatrix step_jacobian(const Field& field, const PhasePoint& point, double dt, Method method,
                         NewtonOptions options = {}, double h = 1e-6) {
    const Vector& x = point.coordinates();
    const std::size_t size = x.size();
    RealMatrix jac(size, size);
    Vector probe = x;
    for (std::size_t c = 0; c < size; ++c) {
        const double hi = x[c] + h;
        const double lo = x[c] - h;
        probe[c] = hi;
        const Vector up = step(field, PhasePoint(probe, point.time()), dt, method, options).coordinates();
        probe[c] = lo;
        const Vector down = step(field, PhasePoint(probe, point.time()), dt, method, options).coordinates();
        probe[c] = x[c];
        for (std::size_t r = 0; r < size; ++r) jac(r, c) = (up[r] - down[r]) / (hi - lo);  // representable spacing, not 2h
    }
    return jac;
}

/// |J^T Omega J - Omega|_max.
inline double symplecticity_residual(const RealMatrix& jacobian, const ConstantTwoForm& phi) {
    const RealMatrix& omega = phi.matrix();
    return max_abs_entry(jacobian.transpose() * omega * jacobian - omega);
}

/// Acceptance thresholds for a run; all scale with tolerance_scale.
struct Thresholds {
    double energy_drift = 1e-8;
    double symplecticity = 1e-6;
    double eom_floor = 1e-6;  // eom threshold is max(eom_floor, dt^2)
    double tolerance_scale = 1.0;

    double energy() const { return energy_drift * tolerance_scale; }
    double symplectic() const { return symplecticity * tolerance_scale; }
    double eom(double dt) const { return std::max(eom_floor, dt * dt) * tolerance_scale; }
};

struct DiagnosticsOptions {
    NewtonOptions newton{};
    bool symplectic_sweep = false;  // probe every step instead of the first
};

struct DiagnosticsReport {
    std::vector<double> energy_drift_series;
    double energy_drift_max = 0.0;
    std::optional<double> eom_residual_max;  // unset when the trajectory has fewer than 3 points
    double symplecticity_residual = 0.0;
    AlgebraReport algebra;  // on the system's cotangent triple F*, G*, H*

    bool passes(const Thresholds& t, double dt) const {
        return energy_drift_max <= t.energy() && eom_passes(t, dt) &&
               symplecticity_residual <= t.symplectic() && algebra.exact();
    }
    bool eom_passes(const Thresholds& t, double dt) const {
        return !eom_residual_max || *eom_residual_max <= t.eom(dt);
    }
};

inline AlgebraReport cotangent_algebra(BlockDim dim) {
    return verify_quaternion_relations(build_structure({Label::F, Space::Cotangent}, dim),
                                       build_structure({Label::G, Space::Cotangent}, dim),
                                       build_structure({Label::H, Space::Cotangent}, dim));
}

inline DiagnosticsReport full_report(const Trajectory& trajectory, const HamiltonianSystem& system,
                                     const DiagnosticsOptions& options = {}) {
    DiagnosticsReport report;
    auto drift = energy_drift(trajectory, system.hamiltonian());
    report.energy_drift_series = std::move(drift.series);
    report.energy_drift_max = drift.max;

    try {
        if (trajectory.size() >= 3) report.eom_residual_max = eom_residual(trajectory, system);
    } catch (const EvaluationError& e) {
        throw DiagnosticsError(std::string("eom_residual: ") + e.what());
    }

    const std::size_t probes =
        options.symplectic_sweep && trajectory.size() > 1 ? trajectory.size() - 1 : std::min<std::size_t>(1, trajectory.size());
    try {
        for (std::size_t k = 0; k < probes; ++k) {
            const RealMatrix jac = step_jacobian(system, trajectory.points[k], trajectory.step, trajectory.method,
                                                 options.newton);
            report.symplecticity_residual =
                std::max(report.symplecticity_residual, symplecticity_residual(jac, system.omega()));
        }
    } catch (const IntegrationError& e) {
        throw DiagnosticsError(std::string("symplecticity probe: ") + e.what());
    }

    report.algebra = cotangent_algebra(system.dim());
    return report;
}

}  // namespace qkham
