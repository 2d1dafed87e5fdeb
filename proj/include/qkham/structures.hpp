#pragma once

// Quaternionic structure tensors F, G, H on R^{4n} and their cotangent duals.
//
// Coordinates are four contiguous blocks of size n:
//   (x_1..x_n, x_{n+1}..x_{2n}, x_{2n+1}..x_{3n}, x_{3n+1}..x_{4n}).
// Column a of a structure matrix holds the image of basis element a, so
// applying a structure is a plain matrix-vector product.

#include <array>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qkham/matrix.hpp"

namespace qkham {

/// Block size n; the phase space has dimension 4n.
class BlockDim {
public:
    explicit BlockDim(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("BlockDim: n must be >= 1, got " + std::to_string(n));
    }

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return 4 * static_cast<std::size_t>(n_); }

    /// 0-based index of coordinate i (0-based) in block q (0..3).
    std::size_t index(int block, int i) const noexcept {
        return static_cast<std::size_t>(block * n_ + i);
    }

    friend bool operator==(BlockDim, BlockDim) = default;

private:
    int n_;
};

enum class Label { F, G, H };
enum class Space { Tangent, Cotangent };

inline constexpr std::array<Label, 3> kLabels{Label::F, Label::G, Label::H};

inline constexpr std::string_view to_string(Label l) {
    switch (l) {
        case Label::F: return "F";
        case Label::G: return "G";
        case Label::H: return "H";
    }
    return "?";
}

inline constexpr std::string_view to_string(Space s) {
    return s == Space::Tangent ? "tangent" : "cotangent";
}

inline Label parse_label(std::string_view s) {
    if (s == "F") return Label::F;
    if (s == "G") return Label::G;
    if (s == "H") return Label::H;
    throw std::invalid_argument("unknown structure label '" + std::string(s) + "' (allowed: F, G, H)");
}

inline Space parse_space(std::string_view s) {
    if (s == "tangent") return Space::Tangent;
    if (s == "cotangent") return Space::Cotangent;
    throw std::invalid_argument("unknown space '" + std::string(s) + "' (allowed: tangent, cotangent)");
}

struct StructureKind {
    Label label;
    Space space;
    friend bool operator==(StructureKind, StructureKind) = default;
};

namespace detail {

struct BlockImage {
    int target_block;
    int sign;
};

// Image of block q under each structure, per basis element. The tangent and
// cotangent action tables are identical under dx_a <-> d/dx_a.
inline constexpr std::array<BlockImage, 4> block_images(Label label) {
    switch (label) {
        case Label::F: return {{{1, +1}, {0, -1}, {3, +1}, {2, -1}}};
        case Label::G: return {{{2, +1}, {3, -1}, {0, -1}, {1, +1}}};
        case Label::H: return {{{3, +1}, {2, +1}, {1, -1}, {0, -1}}};
    }
    return {};
}

inline bool is_signed_permutation(const IntMatrix& m) {
    if (m.rows() != m.cols()) return false;
    std::vector<int> col_count(m.cols(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        int row_count = 0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const int e = m(r, c);
            if (e == 0) continue;
            if (e != 1 && e != -1) return false;
            ++row_count;
            ++col_count[c];
        }
        if (row_count != 1) return false;
    }
    for (int k : col_count)
        if (k != 1) return false;
    return true;
}

}  // namespace detail

/// A constant 4n x 4n signed permutation matrix realizing one structure.
class StructureTensor {
public:
    /// Wraps an arbitrary signed permutation under the given kind. Used for
    /// negative controls; the built-in tensors come from build_structure.
    StructureTensor(StructureKind kind, BlockDim dim, IntMatrix matrix)
        : kind_(kind), dim_(dim), matrix_(std::move(matrix)) {
        if (matrix_.rows() != dim_.size() || matrix_.cols() != dim_.size())
            throw DimensionError("StructureTensor: matrix must be 4n x 4n");
        if (!detail::is_signed_permutation(matrix_))
            throw std::invalid_argument("StructureTensor: matrix must be a signed permutation");
    }

    StructureKind kind() const noexcept { return kind_; }
    Label label() const noexcept { return kind_.label; }
    Space space() const noexcept { return kind_.space; }
    BlockDim dim() const noexcept { return dim_; }
    const IntMatrix& matrix() const noexcept { return matrix_; }

private:
    StructureKind kind_;
    BlockDim dim_;
    IntMatrix matrix_;
};

inline StructureTensor build_structure(StructureKind kind, BlockDim dim) {
    const std::size_t size = dim.size();
    IntMatrix m(size, size, 0);
    const auto images = detail::block_images(kind.label);
    for (int block = 0; block < 4; ++block) {
        const auto [target, sign] = images[static_cast<std::size_t>(block)];
        for (int i = 0; i < dim.n(); ++i) m(dim.index(target, i), dim.index(block, i)) = sign;
    }
    return StructureTensor(kind, dim, std::move(m));
}

inline Vector apply(const StructureTensor& t, std::span<const double> v) {
    require_same_size(t.dim().size(), v.size(), "apply");
    return multiply(t.matrix(), v);
}

/// Flat metric g(u, v) = u . v on R^{4n}.
struct EuclideanMetric {
    BlockDim dim;

    double operator()(std::span<const double> u, std::span<const double> v) const {
        require_same_size(dim.size(), u.size(), "metric");
        return dot(u, v);
    }
};

/// Residuals of F^2 + I, G^2 + I, H^2 + I and FGH + I, each measured in the
/// induced infinity norm (max absolute row sum). Exact integers.
struct AlgebraReport {
    int f_squared = 0;
    int g_squared = 0;
    int h_squared = 0;
    int fgh = 0;

    int max() const noexcept { return std::max({f_squared, g_squared, h_squared, fgh}); }
    bool exact() const noexcept { return max() == 0; }
};

inline AlgebraReport verify_quaternion_relations(const StructureTensor& f, const StructureTensor& g,
                                                 const StructureTensor& h) {
    if (!(f.dim() == g.dim() && g.dim() == h.dim()))
        throw DimensionError("verify_quaternion_relations: tensors differ in dimension");
    if (f.space() != g.space() || g.space() != h.space())
        throw std::invalid_argument("verify_quaternion_relations: tensors act on different spaces");
    if (f.label() != Label::F || g.label() != Label::G || h.label() != Label::H)
        throw std::invalid_argument("verify_quaternion_relations: expected labels F, G, H in order");

    const IntMatrix id = IntMatrix::identity(f.dim().size());
    const auto& mf = f.matrix();
    const auto& mg = g.matrix();
    const auto& mh = h.matrix();
    AlgebraReport r;
    r.f_squared = max_row_sum(mf * mf + id);
    r.g_squared = max_row_sum(mg * mg + id);
    r.h_squared = max_row_sum(mh * mh + id);
    // Right-to-left composition: H acts first.
    r.fgh = max_row_sum(mf * (mg * mh) + id);
    return r;
}

/// max over basis pairs of |g(M e_a, e_b) + g(e_a, M e_b)|, i.e. max |M^T + M|.
inline int verify_metric_compatibility(const IntMatrix& m, const EuclideanMetric& metric) {
    require_same_size(metric.dim.size(), m.rows(), "verify_metric_compatibility");
    return max_abs_entry(m.transpose() + m);
}

inline int verify_metric_compatibility(const StructureTensor& t, const EuclideanMetric& metric) {
    return verify_metric_compatibility(t.matrix(), metric);
}

}  // namespace qkham
