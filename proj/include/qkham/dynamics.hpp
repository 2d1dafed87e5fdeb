#pragma once

// Hamiltonian vector fields for the three quaternionic symplectic forms and
// fixed-step integrators for their flows.
//
// With i_X Phi (v) = Phi(X, v) = X^T Omega v, the equation i_X Phi = dH reads
// Omega^T X = grad H, so X = Omega^{-T} grad H.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qkham/expression.hpp"
#include "qkham/forms.hpp"
#include "qkham/matrix.hpp"
#include "qkham/structures.hpp"

namespace qkham {

class PhasePoint {
public:
    PhasePoint(Vector coordinates, double time) : coordinates_(std::move(coordinates)), time_(time) {
        for (double c : coordinates_)
            if (!std::isfinite(c)) throw std::invalid_argument("PhasePoint: non-finite coordinate");
        if (!std::isfinite(time_)) throw std::invalid_argument("PhasePoint: non-finite time");
    }

    const Vector& coordinates() const noexcept { return coordinates_; }
    double time() const noexcept { return time_; }
    std::size_t size() const noexcept { return coordinates_.size(); }

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;

private:
    Vector coordinates_;
    double time_;
};

/// Anything mapping a state to a tangent vector of the same size.
template <typename F>
concept VectorField = requires(const F& f, const Vector& x) {
    { f(x) } -> std::convertible_to<Vector>;
};

namespace detail {

// Inverse of a signed permutation is its transpose; the inverse transpose is
// then the matrix itself. Computed generically and checked exactly.
inline RealMatrix signed_permutation_inverse_transpose(const RealMatrix& omega) {
    const RealMatrix inv = omega.transpose();
    if (!(inv * omega == RealMatrix::identity(omega.rows())))
        throw std::logic_error("symplectic matrix is not a signed permutation");
    return inv.transpose();
}

}  // namespace detail

/// (R^{4n}, Phi_{label*}, H). Immutable after construction.
class HamiltonianSystem {
public:
    HamiltonianSystem(Label label, ScalarField hamiltonian)
        : dim_(hamiltonian.dim()),
          label_(label),
          hamiltonian_(std::move(hamiltonian)),
          omega_(symplectic_form(label, dim_)),
          omega_inverse_transpose_(detail::signed_permutation_inverse_transpose(omega_.matrix())) {}

    BlockDim dim() const noexcept { return dim_; }
    Label label() const noexcept { return label_; }
    const ScalarField& hamiltonian() const noexcept { return hamiltonian_; }
    const ConstantTwoForm& omega() const noexcept { return omega_; }
    const RealMatrix& omega_inverse_transpose() const noexcept { return omega_inverse_transpose_; }

    double energy(std::span<const double> x) const { return evaluate(hamiltonian_, x); }

    /// X = Omega^{-T} grad H for a given gradient.
    Vector field_from_gradient(std::span<const double> grad) const {
        return multiply(omega_inverse_transpose_, grad);
    }

    /// Hamiltonian vector field at x.
    Vector operator()(const Vector& x) const { return field_from_gradient(gradient(hamiltonian_, x).components); }

private:
    BlockDim dim_;
    Label label_;
    ScalarField hamiltonian_;
    ConstantTwoForm omega_;
    RealMatrix omega_inverse_transpose_;
};

inline Vector hamiltonian_vector_field(const HamiltonianSystem& system, const PhasePoint& point) {
    return system(point.coordinates());
}

/// Direct transcription of the three coordinate formulas for X, blockwise:
///   F: (-H_{n+i},   H_i,        -H_{3n+i},  H_{2n+i})
///   G: (-H_{2n+i},  H_{3n+i},    H_i,      -H_{n+i})
///   H: (-H_{3n+i}, -H_{2n+i},    H_{n+i},   H_i)
/// Kept independent of the Omega solve so the two can be compared.
inline Vector reference_field_formula(Label label, const Gradient& grad) {
    const BlockDim dim = grad.dim;
    require_same_size(dim.size(), grad.components.size(), "reference_field_formula");
    const auto& g = grad.components;
    Vector x(dim.size());
    for (int i = 0; i < dim.n(); ++i) {
        const double h0 = g[dim.index(0, i)];
        const double h1 = g[dim.index(1, i)];
        const double h2 = g[dim.index(2, i)];
        const double h3 = g[dim.index(3, i)];
        double* out[4] = {&x[dim.index(0, i)], &x[dim.index(1, i)], &x[dim.index(2, i)], &x[dim.index(3, i)]};
        switch (label) {
            case Label::F:
                *out[0] = -h1;
                *out[1] = h0;
                *out[2] = -h3;
                *out[3] = h2;
                break;
            case Label::G:
                *out[0] = -h2;
                *out[1] = h3;
                *out[2] = h0;
                *out[3] = -h1;
                break;
            case Label::H:
                *out[0] = -h3;
                *out[1] = -h2;
                *out[2] = h1;
                *out[3] = h0;
                break;
        }
    }
    return x;
}

enum class Method { Rk4, ImplicitMidpoint };

inline std::string_view to_string(Method m) { return m == Method::Rk4 ? "rk4" : "implicit_midpoint"; }

inline Method parse_method(std::string_view s) {
    if (s == "rk4") return Method::Rk4;
    if (s == "implicit_midpoint") return Method::ImplicitMidpoint;
    throw std::invalid_argument("unknown method '" + std::string(s) + "' (allowed: rk4, implicit_midpoint)");
}

struct NewtonOptions {
    double tolerance = 1e-12;
    int max_iterations = 50;
};

struct Trajectory {
    std::vector<PhasePoint> points;
    double step = 0.0;
    Method method = Method::Rk4;

    std::size_t size() const noexcept { return points.size(); }
};

/// Raised when a step fails; carries the step index and, from integrate(),
/// everything computed before the failure.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, std::size_t step_index)
        : std::runtime_error(what), step_index_(step_index) {}

    std::size_t step_index() const noexcept { return step_index_; }
    const Trajectory& partial() const noexcept { return partial_; }
    void attach_partial(Trajectory t) { partial_ = std::move(t); }

private:
    std::size_t step_index_;
    Trajectory partial_;
};

class NewtonDivergence : public IntegrationError {
public:
    NewtonDivergence(double residual, int iterations, std::size_t step_index)
        : IntegrationError("implicit midpoint: Newton iteration did not converge after " +
                               std::to_string(iterations) + " iterations (last residual " +
                               format_number(residual) + ")",
                           step_index),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

namespace detail {

inline void require_positive_step(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step size dt must be finite and > 0");
}

inline PhasePoint checked_point(Vector x, double t, std::size_t step_index) {
    for (double c : x)
        if (!std::isfinite(c))
            throw IntegrationError("non-finite state after step " + std::to_string(step_index), step_index);
    return PhasePoint(std::move(x), t);
}

template <VectorField Field>
Vector evaluate_field(const Field& field, const Vector& x, std::size_t step_index) {
    try {
        return field(x);
    } catch (const EvaluationError& e) {
        throw IntegrationError(std::string("vector field evaluation failed at step ") +
                                   std::to_string(step_index) + ": " + e.what(),
                               step_index);
    }
}

}  // namespace detail

template <VectorField Field>
PhasePoint step_rk4(const Field& field, const PhasePoint& point, double dt, std::size_t step_index = 0) {
    detail::require_positive_step(dt);
    const Vector& x = point.coordinates();
    const Vector k1 = detail::evaluate_field(field, x, step_index);
    const Vector k2 = detail::evaluate_field(field, axpy(0.5 * dt, k1, x), step_index);
    const Vector k3 = detail::evaluate_field(field, axpy(0.5 * dt, k2, x), step_index);
    const Vector k4 = detail::evaluate_field(field, axpy(dt, k3, x), step_index);
    Vector next = x;
    for (std::size_t a = 0; a < next.size(); ++a)
        next[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    return detail::checked_point(std::move(next), point.time() + dt, step_index);
}

struct MidpointStep {
    PhasePoint point;
    int iterations;
    double residual;  // max-norm of the final Newton update
};

/// Solves y = x + dt X((x + y)/2) by Newton iteration with a forward-difference
/// Jacobian of X (h = 1e-7 max(1, |m|)). Converged once the update is below
/// tolerance * max(1, |y|).
template <VectorField Field>
MidpointStep solve_implicit_midpoint(const Field& field, const PhasePoint& point, double dt,
                                     NewtonOptions options = {}, std::size_t step_index = 0) {
    detail::require_positive_step(dt);
    if (!(options.tolerance > 0.0)) throw std::invalid_argument("newton tolerance must be > 0");

    const Vector& x = point.coordinates();
    const std::size_t size = x.size();
    auto midpoint = [&](const Vector& y) {
        Vector m(size);
        for (std::size_t a = 0; a < size; ++a) m[a] = 0.5 * (x[a] + y[a]);
        return m;
    };
    auto residual_of = [&](const Vector& y, const Vector& xm) {
        Vector r(size);
        for (std::size_t a = 0; a < size; ++a) r[a] = y[a] - x[a] - dt * xm[a];
        return r;
    };

    Vector y = x;
    Vector field_mid = detail::evaluate_field(field, midpoint(y), step_index);
    Vector r = residual_of(y, field_mid);
    double last = max_norm(r);

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        const Vector m = midpoint(y);
        const double h = 1e-7 * std::max(1.0, max_norm(m));
        // J = I - dt/2 * dX(m)
        RealMatrix jac = RealMatrix::identity(size);
        Vector probe = m;
        for (std::size_t c = 0; c < size; ++c) {
            probe[c] = m[c] + h;
            const Vector xp = detail::evaluate_field(field, probe, step_index);
            probe[c] = m[c];
            for (std::size_t r_ = 0; r_ < size; ++r_) jac(r_, c) -= 0.5 * dt * (xp[r_] - field_mid[r_]) / h;
        }
        Vector neg_r(size);
        for (std::size_t a = 0; a < size; ++a) neg_r[a] = -r[a];
        Vector delta;
        try {
            delta = solve(std::move(jac), std::move(neg_r));
        } catch (const SingularMatrixError&) {
            throw NewtonDivergence(last, iter, step_index);
        }
        for (std::size_t a = 0; a < size; ++a) y[a] += delta[a];
        last = max_norm(delta);

        field_mid = detail::evaluate_field(field, midpoint(y), step_index);
        r = residual_of(y, field_mid);
        if (!std::isfinite(last)) break;
        if (last < options.tolerance * std::max(1.0, max_norm(y)))
            return {detail::checked_point(std::move(y), point.time() + dt, step_index), iter, last};
    }
    throw NewtonDivergence(last, options.max_iterations, step_index);
}

template <VectorField Field>
PhasePoint step_implicit_midpoint(const Field& field, const PhasePoint& point, double dt, NewtonOptions options = {},
                                  std::size_t step_index = 0) {
    return solve_implicit_midpoint(field, point, dt, options, step_index).point;
}

template <VectorField Field>
PhasePoint step(const Field& field, const PhasePoint& point, double dt, Method method, NewtonOptions options = {},
                std::size_t step_index = 0) {
    return method == Method::Rk4 ? step_rk4(field, point, dt, step_index)
                                 : step_implicit_midpoint(field, point, dt, options, step_index);
}

/// Repeated fixed-size stepping. Times are t0 + k dt (not accumulated), and
/// the returned trajectory holds steps + 1 points including the initial one.
template <VectorField Field>
Trajectory integrate(const Field& field, const PhasePoint& initial, double dt, std::size_t steps, Method method,
                     NewtonOptions options = {}) {
    detail::require_positive_step(dt);
    if (steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
    Trajectory traj{{}, dt, method};
    traj.points.reserve(steps + 1);
    traj.points.push_back(initial);
    for (std::size_t k = 1; k <= steps; ++k) {
        try {
            PhasePoint next = step(field, traj.points.back(), dt, method, options, k);
            traj.points.emplace_back(next.coordinates(), initial.time() + static_cast<double>(k) * dt);
        } catch (IntegrationError& e) {
            e.attach_partial(std::move(traj));
            throw;
        }
    }
    return traj;
}

}  // namespace qkham
