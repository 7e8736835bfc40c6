#include "subsurf/seedinit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subsurf {

void InitParams::validate() const {
    if (!(v > 0.0)) throw ValidationError("InitParams: v must be > 0");
    if (!(R > 0.0)) throw ValidationError("InitParams: R must be > 0");
}

namespace {

struct BallBounds {
    int i0, i1, j0, j1, k0, k1;
};

// Interior index box covering the ball; doxel (i,j,k) sits at coordinates
// (i-1, j-1, k-1).
BallBounds ball_bounds(const CenterRow& c, double radius, const GridSpec& spec) {
    BallBounds b;
    b.i0 = std::max(1, int(std::ceil(c.x - radius)) + 1);
    b.i1 = std::min(spec.n1, int(std::floor(c.x + radius)) + 1);
    b.j0 = std::max(1, int(std::ceil(c.y - radius)) + 1);
    b.j1 = std::min(spec.n2, int(std::floor(c.y + radius)) + 1);
    b.k0 = std::max(1, int(std::ceil(c.z - radius)) + 1);
    b.k1 = std::min(spec.n3, int(std::floor(c.z + radius)) + 1);
    return b;
}

double dist_sq(const CenterRow& c, int i, int j, int k) {
    const double dx = (i - 1) - c.x;
    const double dy = (j - 1) - c.y;
    const double dz = (k - 1) - c.z;
    return dx * dx + dy * dy + dz * dz;
}

}  // namespace

Field4D build_initial(const CentersTable& centers, const InitParams& params,
                      const GridSpec& spec) {
    params.validate();
    validate_centers(centers, spec);

    Field4D u(spec, 0.0);
    const double R = params.R;
    const double floor_value = 1.0 / (R + params.v);
    for (const CenterRow& c : centers.rows) {
        const int l = c.frame + 1;
        const BallBounds b = ball_bounds(c, R, spec);
        for (int k = b.k0; k <= b.k1; ++k)
            for (int j = b.j0; j <= b.j1; ++j)
                for (int i = b.i0; i <= b.i1; ++i) {
                    const double d = std::sqrt(dist_sq(c, i, j, k));
                    if (d > R) continue;
                    const double value = params.profile == InitProfile::peak
                                             ? 1.0 / (d + params.v) - floor_value
                                             : 1.0 - d / R;
                    double& cell = u.at(i, j, k, l);
                    cell = std::max(cell, value);
                }
    }
    return u;
}

void local_rescale(Field4D& u, const CentersTable& centers, std::optional<double> radius) {
    const GridSpec& spec = u.spec();
    validate_centers(centers, spec);

    for (const CenterRow& c : centers.rows) {
        const double r = radius.value_or(c.radius);
        const int l = c.frame + 1;
        const BallBounds b = ball_bounds(c, r, spec);
        const double r_sq = r * r;

        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int k = b.k0; k <= b.k1; ++k)
            for (int j = b.j0; j <= b.j1; ++j)
                for (int i = b.i0; i <= b.i1; ++i) {
                    if (dist_sq(c, i, j, k) > r_sq) continue;
                    const double v = u.at(i, j, k, l);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
        if (!(hi > lo)) continue;  // constant or empty ball carries no information

        const double scale = 1.0 / (hi - lo);
        for (int k = b.k0; k <= b.k1; ++k)
            for (int j = b.j0; j <= b.j1; ++j)
                for (int i = b.i0; i <= b.i1; ++i) {
                    if (dist_sq(c, i, j, k) > r_sq) continue;
                    double& v = u.at(i, j, k, l);
                    v = (v - lo) * scale;
                }
    }
}

}  // namespace subsurf
