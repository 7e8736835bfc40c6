#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "subsurf/errors.hpp"

namespace subsurf {

// Doxel counts and spacings of the 4D grid. Interior indices are 1-based
// within a box padded by one ghost doxel on every face; the time axis is l.
struct GridSpec {
    int n1 = 0, n2 = 0, n3 = 0, n4 = 0;
    double h1 = 1.0, h2 = 1.0, h3 = 1.0, h4 = 1.0;

    GridSpec() = default;
    GridSpec(int n1, int n2, int n3, int n4, double h1, double h2, double h3, double h4);

    static GridSpec cubic(int n1, int n2, int n3, int n4, double h);
    static GridSpec isotropic(int n, double h) { return cubic(n, n, n, n, h); }

    int count(int axis) const;
    double spacing(int axis) const;

    // Set when all four spacings coincide.
    std::optional<double> common_h() const;

    int i_max() const { return n1 + 2; }
    int j_max() const { return n2 + 2; }
    int k_max() const { return n3 + 2; }
    int l_max() const { return n4 + 2; }

    std::size_t padded_size() const {
        return std::size_t(i_max()) * j_max() * k_max() * l_max();
    }
    std::size_t interior_size() const {
        return std::size_t(n1) * n2 * n3 * n4;
    }
    std::size_t frame_interior_size() const { return std::size_t(n1) * n2 * n3; }

    bool operator==(const GridSpec&) const = default;
};

// Index into the ghost-padded box; interior iff 1 <= i <= n1, ..., 1 <= l <= n4.
struct Index4 {
    int i = 0, j = 0, k = 0, l = 0;

    bool operator==(const Index4&) const = default;
};

inline bool in_padded_bounds(const Index4& idx, const GridSpec& spec) {
    return idx.i >= 0 && idx.i <= spec.n1 + 1 && idx.j >= 0 && idx.j <= spec.n2 + 1 &&
           idx.k >= 0 && idx.k <= spec.n3 + 1 && idx.l >= 0 && idx.l <= spec.n4 + 1;
}

inline bool is_interior(const Index4& idx, const GridSpec& spec) {
    return idx.i >= 1 && idx.i <= spec.n1 && idx.j >= 1 && idx.j <= spec.n2 &&
           idx.k >= 1 && idx.k <= spec.n3 && idx.l >= 1 && idx.l <= spec.n4;
}

// ((l*kMax + k)*jMax + j)*iMax + i, i fastest. Throws on out-of-bounds input.
std::size_t linear_index(const Index4& idx, const GridSpec& spec);

Index4 delinearize(std::size_t linear, const GridSpec& spec);

// The 8 face-neighbor offsets, axis-major, negative side first. Offset 2*axis
// has sign -1, offset 2*axis + 1 has sign +1.
struct FaceOffset {
    std::array<int, 4> d;  // (p, q, r, s)
    int axis;              // 0..3
    int sign;              // -1 or +1
};

extern const std::array<FaceOffset, 8> kFaceOffsets;

// The 24 diagonal offsets (exactly two nonzero components). Ordered by axis
// pair (0,1),(0,2),(0,3),(1,2),(1,3),(2,3), signs (-,-),(-,+),(+,-),(+,+).
struct DiagonalOffset {
    std::array<int, 4> d;
    int axis_a, axis_b;
    int sign_a, sign_b;
};

extern const std::array<DiagonalOffset, 24> kDiagonalOffsets;

// Scalar values on the ghost-padded grid, i fastest-varying.
class Field4D {
public:
    Field4D() = default;
    explicit Field4D(const GridSpec& spec, double fill = 0.0)
        : spec_(spec), values_(spec.padded_size(), fill) {}

    const GridSpec& spec() const { return spec_; }

    double& at(int i, int j, int k, int l) { return values_[offset(i, j, k, l)]; }
    double at(int i, int j, int k, int l) const { return values_[offset(i, j, k, l)]; }
    double& operator[](const Index4& idx) { return at(idx.i, idx.j, idx.k, idx.l); }
    double operator[](const Index4& idx) const { return at(idx.i, idx.j, idx.k, idx.l); }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    std::size_t size() const { return values_.size(); }

    std::size_t offset(int i, int j, int k, int l) const {
        return ((std::size_t(l) * spec_.k_max() + k) * spec_.j_max() + j) * spec_.i_max() + i;
    }

    // Strides for neighbor walks in flat loops.
    std::ptrdiff_t stride(int axis) const;
    std::array<std::ptrdiff_t, 8> face_strides() const;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

// Writes `value` into every ghost doxel; interior untouched.
void apply_dirichlet(Field4D& field, double value);

// Mirrors interior values into the ghost layer (zero normal difference),
// axis by axis so edge and corner ghosts get filled as well.
void apply_mirror_ghosts(Field4D& field);

// (min, max) over interior doxels only.
std::pair<double, double> interior_minmax(const Field4D& field);

}  // namespace subsurf
