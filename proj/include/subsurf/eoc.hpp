#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "subsurf/grid.hpp"

namespace subsurf {

// Verification run against the exact level-set solution
// u(x, t) = (|x|^2 - 1)/6 + t on [-1.25, 1.25]^4. Time steps quadruple as the
// grid halves (tau proportional to h^2) and epsilon = h^2.
struct EocConfig {
    double domain_min = -1.25;
    double domain_max = 1.25;
    double total_time = 0.0625;
    double omega = 1.5;  // near-optimal for this stencil at tau = h^2
    double sor_tol = 1e-8;
    int sor_max_iter = 10000;
    int workers = 1;

    // (grid size, time steps) refinement schedule
    static const std::vector<std::pair<int, int>>& schedule();
    static int steps_for(int n);  // throws ValidationError for n not in the schedule
};

struct EocRow {
    int n = 0;
    double h = 0.0;
    int final_step = 0;
    double l2_error = 0.0;
    std::optional<double> eoc;  // defined from the second row
};

struct ErrorReport {
    std::vector<EocRow> rows;
};

double exact_u(const std::array<double, 4>& x, double t);

// Pure level-set step (G = 1), no rescaling, Dirichlet ghosts from the exact
// solution; returns the space-time L2 error against exact_u.
double run_levelset_row(int n, const EocConfig& cfg);

// sqrt( sum_n tau * sum_doxels h^4 (u^n - exact(center, t_n))^2 ), one field
// per completed step.
double space_time_l2(const std::vector<Field4D>& u_steps, const EocConfig& cfg);

// log2(err_h / err_h2); both must be positive.
double eoc_value(double err_h, double err_h2);

ErrorReport run_eoc(int max_n, const EocConfig& cfg);
void print_report(const ErrorReport& report, std::ostream& out);

}  // namespace subsurf
