#include "subsurf/edge.hpp"

#include <cmath>

#include "subsurf/parallel.hpp"

namespace subsurf {

void EdgeParams::validate() const {
    if (K < 0.0) throw ValidationError("EdgeParams: K must be >= 0");
    if (delta < 0.0 || delta > 1.0) throw ValidationError("EdgeParams: delta must be in [0,1]");
    if (vartheta < 0.0 || vartheta > 1.0)
        throw ValidationError("EdgeParams: vartheta must be in [0,1]");
}

double corner_average(const Field4D& u, const Index4& idx, int axis_a, int sign_a, int axis_b,
                      int sign_b) {
    const double* p = u.data() + u.offset(idx.i, idx.j, idx.k, idx.l);
    const std::ptrdiff_t sa = sign_a * u.stride(axis_a);
    const std::ptrdiff_t sb = sign_b * u.stride(axis_b);
    return 0.25 * (p[0] + p[sa] + p[sb] + p[sa + sb]);
}

std::array<double, 24> corner_averages(const Field4D& u, const Index4& idx) {
    std::array<double, 24> out;
    for (std::size_t n = 0; n < kDiagonalOffsets.size(); ++n) {
        const DiagonalOffset& o = kDiagonalOffsets[n];
        out[n] = corner_average(u, idx, o.axis_a, o.sign_a, o.axis_b, o.sign_b);
    }
    return out;
}

std::array<double, 4> face_gradient(const Field4D& u, const GridSpec& spec, const Index4& idx,
                                    int face) {
    const FaceOffset& f = kFaceOffsets[face];
    const double* p = u.data() + u.offset(idx.i, idx.j, idx.k, idx.l);

    std::array<double, 4> grad{};
    // sign * (u_neighbor - u_self) / h along the face normal
    grad[f.axis] = f.sign * (p[f.sign * u.stride(f.axis)] - p[0]) / spec.spacing(f.axis);
    for (int t = 0; t < 4; ++t) {
        if (t == f.axis) continue;
        const double plus = corner_average(u, idx, f.axis, f.sign, t, +1);
        const double minus = corner_average(u, idx, f.axis, f.sign, t, -1);
        grad[t] = (plus - minus) / spec.spacing(t);
    }
    return grad;
}

std::array<double, 8> face_gradient_sq(const Field4D& u, const GridSpec& spec, const Index4& idx) {
    std::array<double, 8> out;
    for (int face = 0; face < 8; ++face) {
        const std::array<double, 4> g = face_gradient(u, spec, idx, face);
        out[face] = g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3];
    }
    return out;
}

FaceGradientField face_gradients(const Field4D& u, const GridSpec& spec) {
    FaceGradientField out(spec);
    for (int l = 1; l <= spec.n4; ++l)
        for (int k = 1; k <= spec.n3; ++k)
            for (int j = 1; j <= spec.n2; ++j)
                for (int i = 1; i <= spec.n1; ++i) {
                    const Index4 idx{i, j, k, l};
                    auto& faces = out.at(idx);
                    for (int face = 0; face < 8; ++face)
                        faces[face] = face_gradient(u, spec, idx, face);
                }
    return out;
}

FaceCoefficientField face_coefficients(const Field4D& smoothed_image,
                                       const Field4D& smoothed_threshold, const EdgeParams& params,
                                       const GridSpec& spec, int workers) {
    params.validate();
    if (smoothed_image.spec() != spec || smoothed_threshold.spec() != spec)
        throw ValidationError("face_coefficients: images must share the grid spec");

    FaceCoefficientField out(spec);
    parallel_for_slices(spec.n4, workers, [&](int l) {
        for (int k = 1; k <= spec.n3; ++k)
            for (int j = 1; j <= spec.n2; ++j)
                for (int i = 1; i <= spec.n1; ++i) {
                    const Index4 idx{i, j, k, l};
                    std::array<double, 8>& g = out.at(i, j, k, l);
                    for (int face = 0; face < 8; ++face) {
                        const auto gi = face_gradient(smoothed_image, spec, idx, face);
                        const auto gt = face_gradient(smoothed_threshold, spec, idx, face);
                        const double ni = std::sqrt(gi[0] * gi[0] + gi[1] * gi[1] +
                                                    gi[2] * gi[2] + gi[3] * gi[3]);
                        const double nt = std::sqrt(gt[0] * gt[0] + gt[1] * gt[1] +
                                                    gt[2] * gt[2] + gt[3] * gt[3]);
                        g[face] = perona_malik(params.delta * ni + params.vartheta * nt, params.K);
                    }
                }
    });
    return out;
}

}  // namespace subsurf
