#include "subsurf/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace subsurf {

GridSpec::GridSpec(int n1, int n2, int n3, int n4, double h1, double h2, double h3, double h4)
    : n1(n1), n2(n2), n3(n3), n4(n4), h1(h1), h2(h2), h3(h3), h4(h4) {
    if (n1 < 1 || n2 < 1 || n3 < 1 || n4 < 1)
        throw ValidationError("GridSpec: doxel counts must be >= 1");
    if (!(h1 > 0.0) || !(h2 > 0.0) || !(h3 > 0.0) || !(h4 > 0.0))
        throw ValidationError("GridSpec: spacings must be > 0");
}

GridSpec GridSpec::cubic(int n1, int n2, int n3, int n4, double h) {
    return GridSpec(n1, n2, n3, n4, h, h, h, h);
}

int GridSpec::count(int axis) const {
    switch (axis) {
        case 0: return n1;
        case 1: return n2;
        case 2: return n3;
        default: return n4;
    }
}

double GridSpec::spacing(int axis) const {
    switch (axis) {
        case 0: return h1;
        case 1: return h2;
        case 2: return h3;
        default: return h4;
    }
}

std::optional<double> GridSpec::common_h() const {
    if (h1 == h2 && h2 == h3 && h3 == h4) return h1;
    return std::nullopt;
}

std::size_t linear_index(const Index4& idx, const GridSpec& spec) {
    if (!in_padded_bounds(idx, spec))
        throw std::out_of_range("linear_index: index (" + std::to_string(idx.i) + "," +
                                std::to_string(idx.j) + "," + std::to_string(idx.k) + "," +
                                std::to_string(idx.l) + ") outside ghost-padded box");
    return ((std::size_t(idx.l) * spec.k_max() + idx.k) * spec.j_max() + idx.j) * spec.i_max() +
           idx.i;
}

Index4 delinearize(std::size_t linear, const GridSpec& spec) {
    if (linear >= spec.padded_size())
        throw std::out_of_range("delinearize: linear index outside grid");
    const int i = int(linear % spec.i_max());
    linear /= spec.i_max();
    const int j = int(linear % spec.j_max());
    linear /= spec.j_max();
    const int k = int(linear % spec.k_max());
    linear /= spec.k_max();
    return Index4{i, j, k, int(linear)};
}

namespace {

constexpr std::array<FaceOffset, 8> make_face_offsets() {
    std::array<FaceOffset, 8> faces{};
    for (int axis = 0; axis < 4; ++axis) {
        for (int s = 0; s < 2; ++s) {
            FaceOffset f{};
            f.axis = axis;
            f.sign = s == 0 ? -1 : +1;
            f.d = {0, 0, 0, 0};
            f.d[axis] = f.sign;
            faces[2 * axis + s] = f;
        }
    }
    return faces;
}

constexpr std::array<DiagonalOffset, 24> make_diagonal_offsets() {
    std::array<DiagonalOffset, 24> diags{};
    int n = 0;
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            for (int sa : {-1, +1}) {
                for (int sb : {-1, +1}) {
                    DiagonalOffset o{};
                    o.axis_a = a;
                    o.axis_b = b;
                    o.sign_a = sa;
                    o.sign_b = sb;
                    o.d = {0, 0, 0, 0};
                    o.d[a] = sa;
                    o.d[b] = sb;
                    diags[n++] = o;
                }
            }
        }
    }
    return diags;
}

}  // namespace

const std::array<FaceOffset, 8> kFaceOffsets = make_face_offsets();
const std::array<DiagonalOffset, 24> kDiagonalOffsets = make_diagonal_offsets();

std::ptrdiff_t Field4D::stride(int axis) const {
    switch (axis) {
        case 0: return 1;
        case 1: return spec_.i_max();
        case 2: return std::ptrdiff_t(spec_.i_max()) * spec_.j_max();
        default: return std::ptrdiff_t(spec_.i_max()) * spec_.j_max() * spec_.k_max();
    }
}

std::array<std::ptrdiff_t, 8> Field4D::face_strides() const {
    std::array<std::ptrdiff_t, 8> out{};
    for (int f = 0; f < 8; ++f)
        out[f] = kFaceOffsets[f].sign * stride(kFaceOffsets[f].axis);
    return out;
}

void apply_dirichlet(Field4D& field, double value) {
    const GridSpec& s = field.spec();
    for (int l = 0; l <= s.n4 + 1; ++l)
        for (int k = 0; k <= s.n3 + 1; ++k)
            for (int j = 0; j <= s.n2 + 1; ++j)
                for (int i = 0; i <= s.n1 + 1; ++i) {
                    const bool ghost = i == 0 || i == s.n1 + 1 || j == 0 || j == s.n2 + 1 ||
                                       k == 0 || k == s.n3 + 1 || l == 0 || l == s.n4 + 1;
                    if (ghost) field.at(i, j, k, l) = value;
                }
}

void apply_mirror_ghosts(Field4D& field) {
    const GridSpec& s = field.spec();
    const int hi[4] = {s.n1 + 1, s.n2 + 1, s.n3 + 1, s.n4 + 1};
    // Mirror one axis at a time over the full padded box; after axis a the
    // ghost planes of axis a hold copies of the adjacent plane, so later axes
    // propagate values into edges and corners.
    for (int axis = 0; axis < 4; ++axis) {
        const std::ptrdiff_t st = field.stride(axis);
        for (int l = 0; l <= s.n4 + 1; ++l)
            for (int k = 0; k <= s.n3 + 1; ++k)
                for (int j = 0; j <= s.n2 + 1; ++j)
                    for (int i = 0; i <= s.n1 + 1; ++i) {
                        const int c[4] = {i, j, k, l};
                        if (c[axis] != 0 && c[axis] != hi[axis]) continue;
                        double* p = field.data() + field.offset(i, j, k, l);
                        *p = c[axis] == 0 ? p[st] : p[-st];
                    }
    }
}

std::pair<double, double> interior_minmax(const Field4D& field) {
    const GridSpec& s = field.spec();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int l = 1; l <= s.n4; ++l)
        for (int k = 1; k <= s.n3; ++k)
            for (int j = 1; j <= s.n2; ++j)
                for (int i = 1; i <= s.n1; ++i) {
                    const double v = field.at(i, j, k, l);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
    return {lo, hi};
}

}  // namespace subsurf
