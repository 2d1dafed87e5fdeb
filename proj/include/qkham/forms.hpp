#pragma once

// Affine 1-forms and constant 2-forms on R^{4n}.
//
// Conventions:
//   (dx_a ^ dx_b)(u, v) = u_a v_b - u_b v_a      (no 1/2 factor)
//   i_X Phi (v)         = Phi(X, v)               (X in the first slot)
// A constant 2-form Phi is stored as the skew matrix Omega with
// Phi(u, v) = u^T Omega v.

#include <cmath>
#include <stdexcept>

#include "qkham/matrix.hpp"
#include "qkham/structures.hpp"

namespace qkham {

/// sum_b (sum_a L[b][a] x_a + c[b]) dx_b
class AffineOneForm {
public:
    AffineOneForm(BlockDim dim, RealMatrix linear, Vector constant)
        : dim_(dim), linear_(std::move(linear)), constant_(std::move(constant)) {
        if (linear_.rows() != dim_.size() || linear_.cols() != dim_.size())
            throw DimensionError("AffineOneForm: linear part must be 4n x 4n");
        require_same_size(dim_.size(), constant_.size(), "AffineOneForm constant part");
    }

    static AffineOneForm zero(BlockDim dim) {
        return AffineOneForm(dim, RealMatrix(dim.size(), dim.size()), Vector(dim.size(), 0.0));
    }

    BlockDim dim() const noexcept { return dim_; }
    const RealMatrix& linear() const noexcept { return linear_; }
    const Vector& constant() const noexcept { return constant_; }

    /// Coefficient functions at a point: L x + c.
    Vector coefficients(std::span<const double> point) const {
        require_same_size(dim_.size(), point.size(), "AffineOneForm::coefficients");
        Vector out = multiply(linear_, point);
        for (std::size_t b = 0; b < out.size(); ++b) out[b] += constant_[b];
        return out;
    }

    double operator()(std::span<const double> point, std::span<const double> tangent) const {
        require_same_size(dim_.size(), tangent.size(), "AffineOneForm evaluation");
        return dot(coefficients(point), tangent);
    }

    friend bool operator==(const AffineOneForm&, const AffineOneForm&) = default;

private:
    BlockDim dim_;
    RealMatrix linear_;
    Vector constant_;
};

/// Constant-coefficient 2-form, stored as a skew-symmetric matrix.
class ConstantTwoForm {
public:
    ConstantTwoForm(BlockDim dim, RealMatrix omega) : dim_(dim), omega_(std::move(omega)) {
        if (omega_.rows() != dim_.size() || omega_.cols() != dim_.size())
            throw DimensionError("ConstantTwoForm: matrix must be 4n x 4n");
        for (std::size_t a = 0; a < omega_.rows(); ++a)
            for (std::size_t b = a; b < omega_.cols(); ++b)
                if (omega_(a, b) != -omega_(b, a))
                    throw std::invalid_argument("ConstantTwoForm: matrix is not skew-symmetric");
    }

    BlockDim dim() const noexcept { return dim_; }
    const RealMatrix& matrix() const noexcept { return omega_; }

    double operator()(std::span<const double> u, std::span<const double> v) const {
        require_same_size(dim_.size(), u.size(), "ConstantTwoForm evaluation");
        return dot(u, multiply(omega_, v));
    }

    ConstantTwoForm operator-() const { return ConstantTwoForm(dim_, -omega_); }

    friend bool operator==(const ConstantTwoForm&, const ConstantTwoForm&) = default;

private:
    BlockDim dim_;
    RealMatrix omega_;
};

/// omega = 1/2 sum_a x_a dx_a
inline AffineOneForm canonical_one_form(BlockDim dim) {
    return AffineOneForm(dim, 0.5 * RealMatrix::identity(dim.size()), Vector(dim.size(), 0.0));
}

/// Substitutes dx_a -> phi*(dx_a) = sum_b M[b][a] dx_b in the coefficient
/// expansion, giving L' = M L and c' = M c.
inline AffineOneForm pullback_by_dual(const StructureTensor& structure, const AffineOneForm& form) {
    if (structure.space() != Space::Cotangent)
        throw std::invalid_argument("pullback_by_dual: structure must act on the cotangent space");
    if (!(structure.dim() == form.dim())) throw DimensionError("pullback_by_dual: dimension mismatch");
    const RealMatrix m = structure.matrix().cast<double>();
    return AffineOneForm(form.dim(), m * form.linear(), multiply(m, form.constant()));
}

/// d(sum_b f_b dx_b) with f affine: Omega[a][b] = L[b][a] - L[a][b].
inline ConstantTwoForm exterior_derivative(const AffineOneForm& form) {
    const auto& l = form.linear();
    return ConstantTwoForm(form.dim(), l.transpose() - l);
}

/// Phi_{label*} = -d(label*(omega)).
inline ConstantTwoForm symplectic_form(Label label, BlockDim dim) {
    const auto dual = build_structure({label, Space::Cotangent}, dim);
    return -exterior_derivative(pullback_by_dual(dual, canonical_one_form(dim)));
}

/// Phi(X, Y) = g(T X, Y); Omega[a][b] = g(T e_a, e_b) = M[b][a].
inline ConstantTwoForm metric_kaehler_form(const StructureTensor& structure, const EuclideanMetric& metric) {
    if (structure.space() != Space::Tangent)
        throw std::invalid_argument("metric_kaehler_form: structure must act on the tangent space");
    if (!(structure.dim() == metric.dim)) throw DimensionError("metric_kaehler_form: dimension mismatch");
    // With the flat metric g(T e_a, e_b) is just the (b, a) entry of T.
    return ConstantTwoForm(structure.dim(), structure.matrix().transpose().cast<double>());
}

/// Covector components b -> Phi(X, e_b) = (Omega^T X)_b.
inline Vector interior_product(const ConstantTwoForm& phi, std::span<const double> x) {
    require_same_size(phi.dim().size(), x.size(), "interior_product");
    return multiply(phi.matrix().transpose(), x);
}

}  // namespace qkham
