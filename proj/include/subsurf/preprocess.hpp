#pragma once

#include "subsurf/grid.hpp"
#include "subsurf/io.hpp"

namespace subsurf {

// Gaussian presmoothing of scale sigma, realized as `steps` implicit heat
// steps covering total time sigma^2/2.
struct SmoothingParams {
    double sigma = 0.0;
    int steps = 1;
    double sor_tol = 1e-10;
    int sor_max_iter = 10000;
    double omega = 1.85;

    void validate() const;
};

// Solves the linear heat equation with zero-Neumann boundaries; sigma = 0 is
// the identity. Mirror ghosts are refreshed on the result so downstream
// gradient stencils see zero normal differences.
Field4D heat_smooth(const Field4D& image, const SmoothingParams& params, int workers = 1);

struct ThresholdParams {
    double lambda = 0.5;
    double background = 0.0;

    void validate() const;
};

// Binarizes intensities to {alpha, beta} inside each seed ball, where alpha
// and beta are the ball's min/max of the raw image and the threshold is
// lambda*alpha + (1-lambda)*beta. Doxels outside every ball get
// params.background. Balls are processed in table order; later writes win.
Field4D local_threshold(const Field4D& image, const CentersTable& centers,
                        const ThresholdParams& params);

}  // namespace subsurf
