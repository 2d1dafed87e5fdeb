#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "qkham/diagnostics.hpp"

namespace qkham {
namespace {

HamiltonianSystem make_system(Label label, const char* text) { return HamiltonianSystem(label, parse(text, BlockDim(1))); }

Trajectory exact_rotation(double dt, std::size_t steps) {
    Trajectory t;
    t.step = dt;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double time = dt * static_cast<double>(k);
        t.points.emplace_back(Vector{std::cos(time), std::sin(time), 0, 0}, time);
    }
    return t;
}

TEST(EnergyDrift, ConstantHamiltonianIsZero) {
    const auto sys = make_system(Label::F, "2.5");
    const auto traj = integrate(sys, PhasePoint({1, 2, 3, 4}, 0.0), 0.1, 20, Method::Rk4);
    const auto drift = energy_drift(traj, sys.hamiltonian());
    ASSERT_EQ(drift.series.size(), traj.size());
    for (double d : drift.series) EXPECT_EQ(d, 0.0);
    EXPECT_EQ(drift.max, 0.0);
}

TEST(EnergyDrift, Rk4ThousandSteps) {
    const auto sys = make_system(Label::F, fixtures::kQuadratic);
    const auto traj = integrate(sys, PhasePoint({1, 0, 0, 0}, 0.0), 0.01, 1000, Method::Rk4);
    EXPECT_LE(energy_drift(traj, sys.hamiltonian()).max, 1e-9);
}

TEST(EnergyDrift, GradientFlowNegativeControl) {
    const auto quad = parse(fixtures::kQuadratic, BlockDim(1));
    auto descent = [&](const Vector& x) {
        Vector g = gradient(quad, x).components;
        for (auto& v : g) v = -v;
        return g;
    };
    const auto traj = integrate(descent, PhasePoint({1, 0, 0, 0}, 0.0), 0.01, 100, Method::Rk4);
    const auto drift = energy_drift(traj, quad);
    for (std::size_t k = 1; k < drift.series.size(); ++k) EXPECT_GT(drift.series[k], drift.series[k - 1]);
    // Energy decays as 1/2 e^{-2t}; at t = 1 the drift is 1/2 (1 - e^{-2}).
    EXPECT_NEAR(drift.max, 0.5 * (1.0 - std::exp(-2.0)), 1e-8);
    EXPECT_GT(drift.max, 0.1);
}

TEST(EnergyDrift, EvaluationFailureNamesPoint) {
    const auto h = parse("1/x1", BlockDim(1));
    Trajectory t;
    t.step = 0.1;
    t.points.emplace_back(Vector{1, 0, 0, 0}, 0.0);
    t.points.emplace_back(Vector{0, 0, 0, 0}, 0.1);
    try {
        energy_drift(t, h);
        FAIL();
    } catch (const DiagnosticsError& e) {
        EXPECT_NE(std::string(e.what()).find("point 1"), std::string::npos);
    }
}

TEST(EomResidual, ExactRotationSampledFinely) {
    const auto sys = make_system(Label::F, fixtures::kQuadratic);
    // Truncation error dt^2/6 |x'''| ~ 1.7e-7.
    EXPECT_LE(eom_residual(exact_rotation(0.001, 1000), sys), 1e-6);
}

TEST(EomResidual, ConstantTrajectoryAndPrecondition) {
    const auto sys = make_system(Label::G, "0");
    Trajectory t;
    t.step = 0.5;
    for (int k = 0; k < 4; ++k) t.points.emplace_back(Vector{1, 2, 3, 4}, 0.5 * k);
    EXPECT_EQ(eom_residual(t, sys), 0.0);
    t.points.erase(t.points.begin() + 2, t.points.end());
    EXPECT_THROW(eom_residual(t, sys), DiagnosticsError);
}

TEST(FullReport, HealthyMidpointRun) {
    const auto sys = make_system(Label::F, fixtures::kQuadratic);
    const auto traj = integrate(sys, PhasePoint({1, 0, 0, 0}, 0.0), 0.01, 100, Method::ImplicitMidpoint);
    const auto r = full_report(traj, sys);
    const Thresholds th;
    EXPECT_LE(r.energy_drift_max, th.energy());
    ASSERT_TRUE(r.eom_residual_max);
    EXPECT_LE(*r.eom_residual_max, th.eom(0.01));
    EXPECT_LE(r.symplecticity_residual, th.symplectic());
    EXPECT_TRUE(r.algebra.exact());
    EXPECT_TRUE(r.passes(th, 0.01));
    EXPECT_EQ(r.energy_drift_series.size(), traj.size());
}

TEST(FullReport, ZeroHamiltonian) {
    const auto sys = make_system(Label::H, "0");
    const auto traj = integrate(sys, PhasePoint({1, -1, 0.5, 2}, 0.0), 0.05, 10, Method::Rk4);
    const auto r = full_report(traj, sys);
    EXPECT_EQ(r.energy_drift_max, 0.0);
    EXPECT_EQ(r.eom_residual_max, 0.0);

    EXPECT_EQ(r.symplecticity_residual, 0.0);
}

TEST(FullReport, DeterministicAndNonMutating) {
    const auto sys = make_system(Label::G, "x1*x2 + x3^4");
    const auto traj = integrate(sys, PhasePoint({0.2, 0.1, -0.4, 0.3}, 0.0), 0.01, 50, Method::ImplicitMidpoint);
    const auto copy = traj.points;
    const auto a = full_report(traj, sys);
    const auto b = full_report(traj, sys);
    EXPECT_EQ(traj.points, copy);
    EXPECT_EQ(a.energy_drift_series, b.energy_drift_series);
    EXPECT_EQ(a.eom_residual_max, b.eom_residual_max);
    EXPECT_EQ(a.symplecticity_residual, b.symplecticity_residual);
}

TEST(FullReport, ShortTrajectorySkipsEom) {
    const auto sys = make_system(Label::F, fixtures::kQuadratic);
    const auto traj = integrate(sys, PhasePoint({1, 0, 0, 0}, 0.0), 0.01, 1, Method::Rk4);
    const auto r = full_report(traj, sys);
    EXPECT_FALSE(r.eom_residual_max);
    EXPECT_TRUE(r.passes(Thresholds{}, 0.01));
}

TEST(FullReport, SweepCoversEveryStep) {
    const auto sys = make_system(Label::F, "sin(x1) + exp(x2)/4");
    const auto traj = integrate(sys, PhasePoint({0.2, 0.1, -0.4, 0.3}, 0.0), 0.01, 5, Method::ImplicitMidpoint);
    DiagnosticsOptions sweep;
    sweep.symplectic_sweep = true;
    const auto one = full_report(traj, sys);
    const auto all = full_report(traj, sys, sweep);
    EXPECT_GE(all.symplecticity_residual, one.symplecticity_residual);
    EXPECT_LE(all.symplecticity_residual, 1e-6);
}

// Invariant sweep: each label with the quadratic H, dt = 0.001, 1000 rk4 steps.
TEST(DiagnosticsProperties, QuadraticAllLabels) {
    for (Label l : kLabels) {
        const auto sys = make_system(l, fixtures::kQuadratic);
        const auto traj = integrate(sys, PhasePoint({1, 0, 0, 0}, 0.0), 0.001, 1000, Method::Rk4);
        const auto r = full_report(traj, sys);
        EXPECT_LE(r.eom_residual_max.value(), 1e-6) << to_string(l);
        EXPECT_LE(r.energy_drift_max, 1e-9) << to_string(l);
        EXPECT_LE(r.symplecticity_residual, 1e-6) << to_string(l);
    }
}

}  // namespace
}  // namespace qkham
