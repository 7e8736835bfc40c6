#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "subsurf/edge.hpp"
#include "subsurf/grid.hpp"
#include "subsurf/io.hpp"
#include "subsurf/parallel.hpp"
#include "subsurf/preprocess.hpp"
#include "subsurf/seedinit.hpp"

namespace subsurf {

// Scalar knobs of the semi-implicit scheme. epsilon is the regularization
// addend under the root, A^2 = epsilon + |grad u|^2; the verification
// harness ties it to h^2.
struct SolverParams {
    double tau = 1.0;
    double epsilon = 1e-4;
    double omega = 1.85;
    double sor_tol = 1e-8;
    int sor_max_iter = 10000;
    int n_steps = 10;
    bool rescale_each_step = true;

    void validate() const;
};

// One matrix row per interior doxel: diag = 1 - sum(offdiag) by construction,
// every offdiag <= 0, so rows are strictly diagonally dominant with gap 1.
// Off-diagonals are quantized to float32 at assembly (they multiply
// already-approximate face data; the solution itself stays double) so the
// solver can stream color-packed float rows; diag keeps the exact gap.
struct StepCoefficients {
    GridSpec spec;
    std::vector<std::array<double, 8>> offdiag;  // kFaceOffsets order; padded indexing
    std::vector<double> diag;
    std::vector<double> abar;

    std::size_t flat(int i, int j, int k, int l) const {
        return ((std::size_t(l) * spec.k_max() + k) * spec.j_max() + j) * spec.i_max() + i;
    }
};

// Assembles the semi-implicit step linearized at u_prev. G = nullptr means
// unit edge coefficients. Ghosts of u_prev must hold the boundary data of
// the previous time level.
StepCoefficients assemble_step(const Field4D& u_prev, const FaceCoefficientField* G,
                               const SolverParams& params, const GridSpec& spec, int workers = 1);

// Backward-Euler heat step with zero-flux boundary faces (ghost-facing
// couplings are dropped, so ghost values never enter the system).
StepCoefficients assemble_heat_step(const GridSpec& spec, double dt, int workers = 1);

struct SorResult {
    Field4D u;
    int iterations = 0;
    double residual = 0.0;
};

// Red-black SOR over the partitioned time axis. Each worker owns a slab of
// l-slices with one halo slice per internal boundary; halos are refreshed
// after every color phase and the residual is reduced per slice so results
// are bitwise identical for any worker count. Ghost values of u_guess are
// the Dirichlet data and stay fixed. Throws SolverError when the global
// l2 residual fails to reach params.sor_tol within params.sor_max_iter.
SorResult redblack_sor(const StepCoefficients& coeff, const Field4D& rhs, Field4D u_guess,
                       const SolverParams& params, const Partition& partition);

// Discrete minimum-maximum principle over interiors, with optional slack for
// iterative-solver error.
bool check_minmax(const Field4D& u_next, const Field4D& u_prev_rescaled, double slack = 0.0);

// Everything segment() needs beyond the image and seeds.
struct SegmentationParams {
    SolverParams solver;
    SmoothingParams smoothing;
    ThresholdParams threshold;
    EdgeParams edge;
    InitParams init;
    std::optional<double> rescale_radius;  // default: per-row radii
    int workers = 1;
};

// Full segmentation loop: initial function from seeds, local thresholding,
// presmoothing, edge coefficients once, then n_steps semi-implicit solves
// with optional per-step rescaling. Per-step diagnostics (step, iterations,
// residual, interior min/max) go to `diagnostics` when given.
Field4D segment(const Field4D& image, const CentersTable& centers, const SegmentationParams& params,
                std::ostream* diagnostics = nullptr);

}  // namespace subsurf
