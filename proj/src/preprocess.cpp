#include "subsurf/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subsurf/solver.hpp"

namespace subsurf {

void SmoothingParams::validate() const {
    if (sigma < 0.0) throw ValidationError("SmoothingParams: sigma must be >= 0");
    if (steps < 1) throw ValidationError("SmoothingParams: steps must be >= 1");
    if (!(sor_tol > 0.0)) throw ValidationError("SmoothingParams: sor_tol must be > 0");
    if (sor_max_iter < 1) throw ValidationError("SmoothingParams: sor_max_iter must be >= 1");
    if (!(omega > 0.0) || !(omega < 2.0))
        throw ValidationError("SmoothingParams: omega must lie in (0,2)");
}

void ThresholdParams::validate() const {
    if (lambda < 0.0 || lambda > 1.0)
        throw ValidationError("ThresholdParams: lambda must be in [0,1]");
}

Field4D heat_smooth(const Field4D& image, const SmoothingParams& params, int workers) {
    params.validate();
    Field4D u = image;
    if (params.sigma == 0.0) {
        apply_mirror_ghosts(u);
        return u;
    }

    const GridSpec& spec = image.spec();
    const double dt = 0.5 * params.sigma * params.sigma / params.steps;
    const StepCoefficients coeff = assemble_heat_step(spec, dt, workers);

    SolverParams sp;
    sp.tau = dt;
    sp.omega = params.omega;
    sp.sor_tol = params.sor_tol;
    sp.sor_max_iter = params.sor_max_iter;

    const Partition partition =
        Partition::create(spec.n4, Partition::clamp_workers(spec.n4, workers));
    for (int s = 0; s < params.steps; ++s) {
        SorResult sor = redblack_sor(coeff, u, u, sp, partition);
        u = std::move(sor.u);
    }
    apply_mirror_ghosts(u);
    return u;
}

Field4D local_threshold(const Field4D& image, const CentersTable& centers,
                        const ThresholdParams& params) {
    params.validate();
    const GridSpec& spec = image.spec();
    validate_centers(centers, spec);

    Field4D out(spec, params.background);
    for (std::size_t n = 0; n < centers.rows.size(); ++n) {
        const CenterRow& c = centers.rows[n];
        const int l = c.frame + 1;
        const double r_sq = c.radius * c.radius;
        const int i0 = std::max(1, int(std::ceil(c.x - c.radius)) + 1);
        const int i1 = std::min(spec.n1, int(std::floor(c.x + c.radius)) + 1);
        const int j0 = std::max(1, int(std::ceil(c.y - c.radius)) + 1);
        const int j1 = std::min(spec.n2, int(std::floor(c.y + c.radius)) + 1);
        const int k0 = std::max(1, int(std::ceil(c.z - c.radius)) + 1);
        const int k1 = std::min(spec.n3, int(std::floor(c.z + c.radius)) + 1);

        auto in_ball = [&](int i, int j, int k) {
            const double dx = (i - 1) - c.x;
            const double dy = (j - 1) - c.y;
            const double dz = (k - 1) - c.z;
            return dx * dx + dy * dy + dz * dz <= r_sq;
        };

        // alpha/beta always come from the raw image, not from earlier balls
        double alpha = std::numeric_limits<double>::infinity();
        double beta = -std::numeric_limits<double>::infinity();
        for (int k = k0; k <= k1; ++k)
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i) {
                    if (!in_ball(i, j, k)) continue;
                    const double v = image.at(i, j, k, l);
                    alpha = std::min(alpha, v);
                    beta = std::max(beta, v);
                }
        if (alpha > beta)
            throw ValidationError("local_threshold: ball in centers row " + std::to_string(n + 1) +
                                  " covers no doxels");

        const double th = params.lambda * alpha + (1.0 - params.lambda) * beta;
        for (int k = k0; k <= k1; ++k)
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i) {
                    if (!in_ball(i, j, k)) continue;
                    out.at(i, j, k, l) = image.at(i, j, k, l) >= th ? beta : alpha;
                }
    }
    return out;
}

}  // namespace subsurf
