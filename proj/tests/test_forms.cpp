#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qkham/forms.hpp"

namespace qkham {
namespace {

oracle::IntGrid to_int_grid(const RealMatrix& m) {
    oracle::IntGrid g(m.rows(), std::vector<int>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            EXPECT_EQ(m(r, c), std::trunc(m(r, c))) << "non-integer entry";
            g[r][c] = static_cast<int>(m(r, c));
        }
    return g;
}

// Builds an affine 1-form from (coefficient, x index, dx index) triples, 1-based.
AffineOneForm form_from_terms(BlockDim d, std::initializer_list<std::tuple<double, int, int>> terms) {
    RealMatrix l(d.size(), d.size());
    for (auto [coef, x, dx] : terms) l(static_cast<std::size_t>(dx - 1), static_cast<std::size_t>(x - 1)) += coef;
    return AffineOneForm(d, l, Vector(d.size(), 0.0));
}

TEST(CanonicalOneForm, Examples) {
    const auto w = canonical_one_form(BlockDim(1));
    EXPECT_DOUBLE_EQ(w.coefficients(Vector{3, 5, 7, 9})[1], 2.5);

    const auto w2 = canonical_one_form(BlockDim(2));
    std::mt19937_64 rng(7);
    const Vector origin(8, 0.0);
    for (int k = 0; k < 5; ++k) EXPECT_EQ(w2(origin, oracle::random_vector(rng, 8, -3, 3)), 0.0);

    // 1/2 * sum of eight products 1*1.
    const Vector ones(8, 1.0);
    EXPECT_DOUBLE_EQ(w2(ones, ones), 4.0);
}

TEST(PullbackByDual, FStarGivesLiouvilleForm) {
    const BlockDim d(1);
    const auto lam = pullback_by_dual(build_structure({Label::F, Space::Cotangent}, d), canonical_one_form(d));
    // 1/2 (x1 dx2 - x2 dx1 + x3 dx4 - x4 dx3)
    const auto expected = form_from_terms(d, {{0.5, 1, 2}, {-0.5, 2, 1}, {0.5, 3, 4}, {-0.5, 4, 3}});
    EXPECT_EQ(lam, expected);
}

TEST(PullbackByDual, GStarGivesLiouvilleForm) {
    const BlockDim d(1);
    const auto lam = pullback_by_dual(build_structure({Label::G, Space::Cotangent}, d), canonical_one_form(d));
    // 1/2 (x1 dx3 - x2 dx4 - x3 dx1 + x4 dx2)
    const auto expected = form_from_terms(d, {{0.5, 1, 3}, {-0.5, 2, 4}, {-0.5, 3, 1}, {0.5, 4, 2}});
    EXPECT_EQ(lam, expected);
}

TEST(PullbackByDual, HStarGivesLiouvilleForm) {
    const BlockDim d(1);
    const auto lam = pullback_by_dual(build_structure({Label::H, Space::Cotangent}, d), canonical_one_form(d));
    // 1/2 (x1 dx4 + x2 dx3 - x3 dx2 - x4 dx1)
    const auto expected = form_from_terms(d, {{0.5, 1, 4}, {0.5, 2, 3}, {-0.5, 3, 2}, {-0.5, 4, 1}});
    EXPECT_EQ(lam, expected);
}

TEST(PullbackByDual, ZeroFormStaysZeroAndPreconditions) {
    const BlockDim d(2);
    for (Label l : kLabels)
        EXPECT_EQ(pullback_by_dual(build_structure({l, Space::Cotangent}, d), AffineOneForm::zero(d)),
                  AffineOneForm::zero(d));
    EXPECT_THROW(pullback_by_dual(build_structure({Label::F, Space::Tangent}, d), canonical_one_form(d)),
                 std::invalid_argument);
    EXPECT_THROW(pullback_by_dual(build_structure({Label::F, Space::Cotangent}, BlockDim(1)), canonical_one_form(d)),
                 DimensionError);
}

TEST(ExteriorDerivative, Examples) {
    const BlockDim d(1);
    const auto lam = pullback_by_dual(build_structure({Label::F, Space::Cotangent}, d), canonical_one_form(d));
    const auto dl = exterior_derivative(lam);
    // dx1^dx2 + dx3^dx4
    EXPECT_EQ(dl.matrix(), (RealMatrix{{0, 1, 0, 0}, {-1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}}));

    EXPECT_EQ(max_abs_entry(exterior_derivative(canonical_one_form(d)).matrix()), 0.0);

    // d(x2 dx1) = -dx1^dx2
    const auto dx = exterior_derivative(form_from_terms(d, {{1.0, 2, 1}}));
    EXPECT_EQ(dx.matrix(), (RealMatrix{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}}));
}

TEST(ExteriorDerivative, AgreesWithFiniteDifferenceOracle) {
    std::mt19937_64 rng(11);
    for (int n : {1, 2}) {
        const BlockDim d(n);
        // random affine form
        RealMatrix l(d.size(), d.size());
        for (std::size_t r = 0; r < d.size(); ++r)
            for (std::size_t c = 0; c < d.size(); ++c) l(r, c) = oracle::random_vector(rng, 1, -2, 2)[0];
        const AffineOneForm form(d, l, oracle::random_vector(rng, d.size(), -1, 1));
        const auto omega = exterior_derivative(form);
        oracle::Field coeffs = [&](const std::vector<double>& x) { return form.coefficients(x); };
        for (int trial = 0; trial < 5; ++trial) {
            const auto x = oracle::random_vector(rng, d.size(), -2, 2);
            const auto u = oracle::random_vector(rng, d.size(), -1, 1);
            const auto v = oracle::random_vector(rng, d.size(), -1, 1);
            EXPECT_NEAR(omega(u, v), oracle::fd_exterior_derivative(coeffs, x, u, v, 1e-4), 1e-8);
        }
    }
}

TEST(SymplecticForm, MatchesDisplayedExpansionsN1) {
    const BlockDim d(1);
    EXPECT_EQ(to_int_grid(symplectic_form(Label::F, d).matrix()), oracle::wedge_expansion('F', 1));
    EXPECT_EQ(to_int_grid(symplectic_form(Label::G, d).matrix()), oracle::wedge_expansion('G', 1));
    EXPECT_EQ(to_int_grid(symplectic_form(Label::H, d).matrix()), oracle::wedge_expansion('H', 1));
    // Spot entries, 1-indexed: F has Omega[2][1] = Omega[4][3] = +1.
    const auto f = symplectic_form(Label::F, d).matrix();
    EXPECT_EQ(f(1, 0), 1.0);
    EXPECT_EQ(f(3, 2), 1.0);
    EXPECT_EQ(f(0, 1), -1.0);
}

TEST(SymplecticForm, DerivedPipelineMatchesExpansionForAllSizes) {
    for (int n = 1; n <= 8; ++n)
        for (Label l : kLabels)
            EXPECT_EQ(to_int_grid(symplectic_form(l, BlockDim(n)).matrix()), oracle::wedge_expansion(to_string(l)[0], n))
                << to_string(l) << " n=" << n;
}

TEST(SymplecticForm, NondegenerateSignedPermutationSquaringToMinusI) {
    for (int n = 1; n <= 8; ++n)
        for (Label l : kLabels) {
            const auto om = symplectic_form(l, BlockDim(n)).matrix();
            EXPECT_DOUBLE_EQ(std::abs(determinant(om)), 1.0);
            EXPECT_EQ(om * om, -RealMatrix::identity(om.rows()));
            EXPECT_TRUE(detail::is_signed_permutation(om.cast<int>()));
        }
}

// Omega reconstructed by finite differences of lambda at a point x is an
// x-dependent 2-form field; its exterior derivative (cyclic sum of
// directional derivatives) must vanish.
TEST(SymplecticForm, ClosednessByFiniteDifferences) {
    std::mt19937_64 rng(5);
    const BlockDim d(1);
    for (Label l : kLabels) {
        const auto lam = pullback_by_dual(build_structure({l, Space::Cotangent}, d), canonical_one_form(d));
        oracle::Field coeffs = [&](const std::vector<double>& x) { return lam.coefficients(x); };
        auto phi_at = [&](const std::vector<double>& x, const std::vector<double>& u, const std::vector<double>& v) {
            return -oracle::fd_exterior_derivative(coeffs, x, u, v, 1e-4);
        };
        for (int trial = 0; trial < 10; ++trial) {
            const auto x = oracle::random_vector(rng, 4, -2, 2);
            const auto u = oracle::random_vector(rng, 4, -1, 1);
            const auto v = oracle::random_vector(rng, 4, -1, 1);
            const auto w = oracle::random_vector(rng, 4, -1, 1);
            const double h = 1e-3;
            auto shift = [&](const std::vector<double>& dir, double s) {
                auto p = x;
                for (std::size_t i = 0; i < 4; ++i) p[i] += s * dir[i];
                return p;
            };
            auto deriv = [&](const std::vector<double>& dir, const std::vector<double>& a,
                             const std::vector<double>& b) {
                return (phi_at(shift(dir, h), a, b) - phi_at(shift(dir, -h), a, b)) / (2 * h);
            };
            const double d_phi = deriv(u, v, w) - deriv(v, u, w) + deriv(w, u, v);
            EXPECT_NEAR(d_phi, 0.0, 1e-6);
            // and the reconstruction agrees with the stored matrix
            EXPECT_NEAR(phi_at(x, u, v), symplectic_form(l, d)(u, v), 1e-8);
        }
    }
}

TEST(MetricKaehlerForm, Examples) {
    const BlockDim d(1);
    const EuclideanMetric g{d};
    const auto f = build_structure({Label::F, Space::Tangent}, d);
    const auto phi = metric_kaehler_form(f, g);
    EXPECT_EQ(phi.matrix(), f.matrix().transpose().cast<double>());
    EXPECT_EQ(phi.matrix(), (-f.matrix()).cast<double>());
    for (Label l : kLabels) {
        const auto form = metric_kaehler_form(build_structure({l, Space::Tangent}, d), g);
        EXPECT_EQ(form(Vector{1, 0, 0, 0}, Vector{1, 0, 0, 0}), 0.0);
    }
    EXPECT_THROW(metric_kaehler_form(build_structure({Label::F, Space::Cotangent}, d), g), std::invalid_argument);
}

// Relation between the metric forms g(T., .) and the -d(lambda) symplectic
// forms, built independently: the metric form is the negation.
TEST(MetricKaehlerForm, IsNegatedSymplecticForm) {
    for (int n : {1, 2, 3})
        for (Label l : kLabels) {
            const BlockDim d(n);
            const auto metric_form = metric_kaehler_form(build_structure({l, Space::Tangent}, d), EuclideanMetric{d});
            oracle::IntGrid expected = oracle::wedge_expansion(to_string(l)[0], n);
            for (auto& row : expected)
                for (auto& v : row) v = -v;
            EXPECT_EQ(to_int_grid(metric_form.matrix()), expected);
        }
}

TEST(InteriorProduct, Examples) {
    const BlockDim d(1);
    const auto phi_f = symplectic_form(Label::F, d);
    const Vector x{1.5, -2.0, 3.25, 4.0};
    // (X2, -X1, X4, -X3)
    EXPECT_EQ(interior_product(phi_f, x), (Vector{-2.0, -1.5, 4.0, -3.25}));
    EXPECT_EQ(interior_product(phi_f, Vector(4, 0.0)), Vector(4, 0.0));

    const auto phi_h = symplectic_form(Label::H, d);
    const Vector y{1, 2, 3, 4};
    const auto via_matrix = oracle::mul(
        [&] {
            oracle::Grid t = oracle::zeros(4);
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t c = 0; c < 4; ++c) t[r][c] = phi_h.matrix()(c, r);
            return t;
        }(),
        y);
    EXPECT_EQ(interior_product(phi_h, y), (Vector{4, 3, -2, -1}));
    EXPECT_EQ(interior_product(phi_h, y), via_matrix);
    EXPECT_THROW(interior_product(phi_h, Vector{1, 2}), DimensionError);
}

TEST(InteriorProduct, BilinearityCrossCheck) {
    // Integer-valued random vectors keep every product exact.
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> dist(-9, 9);
    for (int n = 1; n <= 4; ++n)
        for (Label l : kLabels) {
            const BlockDim d(n);
            const auto phi = symplectic_form(l, d);
            for (int trial = 0; trial < 20; ++trial) {
                Vector x(d.size()), v(d.size());
                for (auto& e : x) e = dist(rng);
                for (auto& e : v) e = dist(rng);
                EXPECT_EQ(dot(interior_product(phi, x), v), phi(x, v));
            }
        }
}

TEST(ConstantTwoForm, RejectsNonSkew) {
    EXPECT_THROW(ConstantTwoForm(BlockDim(1), RealMatrix::identity(4)), std::invalid_argument);
}

}  // namespace
}  // namespace qkham
