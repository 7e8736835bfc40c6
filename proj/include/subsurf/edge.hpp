#pragma once

#include <array>
#include <vector>

#include "subsurf/grid.hpp"

namespace subsurf {

// Perona-Malik edge detector parameters. delta weighs the original image's
// gradient, vartheta the locally thresholded image's gradient.
struct EdgeParams {
    double K = 1.0;
    double delta = 1.0;
    double vartheta = 0.0;

    void validate() const;
};

// g(s) = 1 / (1 + K s^2); nonincreasing with g(0) = 1.
inline double perona_malik(double s, double K) { return 1.0 / (1.0 + K * s * s); }

// Mean of the four doxel values around the diamond point y^pqrs: the base
// doxel, its two single-axis neighbors, and the shared diagonal neighbor.
double corner_average(const Field4D& u, const Index4& idx, int axis_a, int sign_a, int axis_b,
                      int sign_b);

// All 24 corner averages of an interior doxel, in kDiagonalOffsets order.
std::array<double, 24> corner_averages(const Field4D& u, const Index4& idx);

// Reduced diamond-cell gradient on one face: the normal component is the
// one-sided difference across the face, the three tangential components are
// centered differences of corner averages.
std::array<double, 4> face_gradient(const Field4D& u, const GridSpec& spec, const Index4& idx,
                                    int face);

// Squared gradient magnitudes on all 8 faces of an interior doxel.
std::array<double, 8> face_gradient_sq(const Field4D& u, const GridSpec& spec, const Index4& idx);

// Materialized per-doxel, per-face gradient vectors (verification-scale use;
// the solver recomputes gradients on the fly).
class FaceGradientField {
public:
    FaceGradientField() = default;
    explicit FaceGradientField(const GridSpec& spec)
        : spec_(spec), values_(spec.padded_size()) {}

    const GridSpec& spec() const { return spec_; }
    std::array<std::array<double, 4>, 8>& at(const Index4& idx) {
        return values_[flat(idx)];
    }
    const std::array<std::array<double, 4>, 8>& at(const Index4& idx) const {
        return values_[flat(idx)];
    }

private:
    std::size_t flat(const Index4& idx) const {
        return ((std::size_t(idx.l) * spec_.k_max() + idx.k) * spec_.j_max() + idx.j) *
                   spec_.i_max() +
               idx.i;
    }
    GridSpec spec_;
    std::vector<std::array<std::array<double, 4>, 8>> values_;
};

FaceGradientField face_gradients(const Field4D& u, const GridSpec& spec);

// Edge coefficients G^pqrs in (0, 1], one per doxel face.
class FaceCoefficientField {
public:
    FaceCoefficientField() = default;
    explicit FaceCoefficientField(const GridSpec& spec)
        : spec_(spec), values_(spec.padded_size(), {1, 1, 1, 1, 1, 1, 1, 1}) {}

    const GridSpec& spec() const { return spec_; }
    std::array<double, 8>& at(int i, int j, int k, int l) {
        return values_[flat(i, j, k, l)];
    }
    const std::array<double, 8>& at(int i, int j, int k, int l) const {
        return values_[flat(i, j, k, l)];
    }
    const std::array<double, 8>* data() const { return values_.data(); }

    std::size_t flat(int i, int j, int k, int l) const {
        return ((std::size_t(l) * spec_.k_max() + k) * spec_.j_max() + j) * spec_.i_max() + i;
    }

private:
    GridSpec spec_;
    std::vector<std::array<double, 8>> values_;
};

// G^pqrs = g(delta |grad I0_sigma| + vartheta |grad ITH_sigma|) per face.
// Both images must share the grid and carry populated ghosts.
FaceCoefficientField face_coefficients(const Field4D& smoothed_image,
                                       const Field4D& smoothed_threshold, const EdgeParams& params,
                                       const GridSpec& spec, int workers = 1);

}  // namespace subsurf
