#pragma once

#include <optional>

#include "subsurf/grid.hpp"
#include "subsurf/io.hpp"

namespace subsurf {

enum class InitProfile { peak, linear };

// Shape of the initial segmentation function around each seed. The peak
// profile is 1/(|x-s|+v) - 1/(R+v) inside the ball and 0 outside, so 1/v
// controls the peak height; the linear profile is 1 - |x-s|/R.
struct InitParams {
    double v = 1.0;
    double R = 10.0;
    InitProfile profile = InitProfile::peak;

    void validate() const;
};

// Builds u0 by stacking per-frame 3D profiles; overlapping balls combine by
// pointwise maximum. Ghosts are zero (Dirichlet).
Field4D build_initial(const CentersTable& centers, const InitParams& params,
                      const GridSpec& spec);

// Affinely maps u to [0,1] inside each ball (min -> 0, max -> 1), leaving
// constant balls and everything outside all balls unchanged. Balls are
// processed in table order, sequentially, so overlaps are deterministic.
// `radius`, when set, overrides the per-row radii.
void local_rescale(Field4D& u, const CentersTable& centers,
                   std::optional<double> radius = std::nullopt);

}  // namespace subsurf
