#include <doctest.h>

#include <cmath>
#include <random>

#include "subsurf/eoc.hpp"

using namespace subsurf;

TEST_CASE("exact solution point values") {
    CHECK(exact_u({0, 0, 0, 0}, 0.0) == doctest::Approx(-1.0 / 6.0));
    CHECK(exact_u({1, 0, 0, 0}, 0.0) == doctest::Approx(0.0));
    CHECK(exact_u({0.5, 0.5, 0.5, 0.5}, 0.0) == doctest::Approx(0.0));
    CHECK(exact_u({1, 0, 0, 0}, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("exact solution satisfies the level-set equation") {
    // u_t = |grad u| div(grad u / |grad u|) checked by finite differences
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coord(-1.2, 1.2);
    const double fd = 1e-4;
    for (int trial = 0; trial < 25; ++trial) {
        std::array<double, 4> x{coord(rng), coord(rng), coord(rng), coord(rng)};
        const double norm =
            std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
        if (norm < 0.2) continue;  // curvature term is singular at the origin

        const double t = 0.3;
        const double ut = (exact_u(x, t + fd) - exact_u(x, t - fd)) / (2 * fd);

        // div(grad u/|grad u|) via centered differences of the normalized gradient
        auto unit_grad = [&](std::array<double, 4> p, int comp) {
            std::array<double, 4> g;
            double sum = 0.0;
            for (int a = 0; a < 4; ++a) {
                std::array<double, 4> lo = p, hi = p;
                lo[a] -= fd;
                hi[a] += fd;
                g[a] = (exact_u(hi, t) - exact_u(lo, t)) / (2 * fd);
                sum += g[a] * g[a];
            }
            return g[comp] / std::sqrt(sum);
        };
        double div = 0.0;
        for (int a = 0; a < 4; ++a) {
            std::array<double, 4> lo = x, hi = x;
            lo[a] -= fd;
            hi[a] += fd;
            div += (unit_grad(hi, a) - unit_grad(lo, a)) / (2 * fd);
        }
        const double grad_norm = norm / 3.0;
        CHECK(std::abs(ut - grad_norm * div) <= 1e-6);
    }
}

TEST_CASE("eoc value") {
    CHECK(eoc_value(1.680403e-2, 4.653133e-3) == doctest::Approx(1.852533).epsilon(1e-4));
    CHECK(eoc_value(4.653133e-3, 1.208771e-3) == doctest::Approx(1.944661).epsilon(1e-4));
    CHECK(eoc_value(4.0, 1.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(eoc_value(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(eoc_value(1.0, -2.0), std::domain_error);
}

TEST_CASE("space-time norm") {
    EocConfig cfg;
    const int n = 4;
    const double h = (cfg.domain_max - cfg.domain_min) / n;
    const GridSpec spec = GridSpec::isotropic(n, h);

    auto exact_field = [&](double t) {
        Field4D u(spec);
        for (int l = 1; l <= n; ++l)
            for (int k = 1; k <= n; ++k)
                for (int j = 1; j <= n; ++j)
                    for (int i = 1; i <= n; ++i)
                        u.at(i, j, k, l) = exact_u({cfg.domain_min + (i - 0.5) * h,
                                                    cfg.domain_min + (j - 0.5) * h,
                                                    cfg.domain_min + (k - 0.5) * h,
                                                    cfg.domain_min + (l - 0.5) * h},
                                                   t);
        return u;
    };

    SUBCASE("numerical equal to exact samples gives zero") {
        std::vector<Field4D> steps;
        const double tau = cfg.total_time / 2;
        steps.push_back(exact_field(tau));
        steps.push_back(exact_field(2 * tau));
        CHECK(space_time_l2(steps, cfg) == doctest::Approx(0.0));
    }

    SUBCASE("constant offset has norm c sqrt(T |Omega|)") {
        const double c = 0.37;
        std::vector<Field4D> steps;
        const double tau = cfg.total_time / 2;
        for (int s = 1; s <= 2; ++s) {
            Field4D u = exact_field(s * tau);
            for (double* p = u.data(); p != u.data() + u.size(); ++p) *p += c;
            steps.push_back(std::move(u));
        }
        const double volume = std::pow(cfg.domain_max - cfg.domain_min, 4);
        CHECK(space_time_l2(steps, cfg) ==
              doctest::Approx(c * std::sqrt(cfg.total_time * volume)).epsilon(1e-10));
    }

    SUBCASE("single doxel error e gives e sqrt(tau h^4)") {
        EocConfig tiny = cfg;
        std::vector<Field4D> steps;
        Field4D u = exact_field(cfg.total_time);
        u.at(2, 2, 2, 2) += 0.11;
        steps.push_back(std::move(u));
        CHECK(space_time_l2(steps, tiny) ==
              doctest::Approx(0.11 * std::sqrt(cfg.total_time) * h * h).epsilon(1e-10));
    }
}

TEST_CASE("schedule") {
    CHECK(EocConfig::steps_for(10) == 1);
    CHECK(EocConfig::steps_for(160) == 256);
    CHECK_THROWS_AS(EocConfig::steps_for(15), ValidationError);
}

// paper-reported verification rows; n = 40 runs in the acceptance suite
TEST_CASE("refinement rows n=10 and n=20") {
    EocConfig cfg;
    cfg.workers = 2;

    const double e10 = run_levelset_row(10, cfg);
    CHECK(std::abs(e10 - 1.680403e-2) / 1.680403e-2 < 0.05);

    const double e20 = run_levelset_row(20, cfg);
    CHECK(std::abs(e20 - 4.653133e-3) / 4.653133e-3 < 0.05);

    CHECK(eoc_value(e10, e20) == doctest::Approx(1.852533).epsilon(0.05));
}
