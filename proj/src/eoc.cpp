#include "subsurf/eoc.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "subsurf/parallel.hpp"
#include "subsurf/solver.hpp"

namespace subsurf {

const std::vector<std::pair<int, int>>& EocConfig::schedule() {
    static const std::vector<std::pair<int, int>> s = {
        {10, 1}, {20, 4}, {40, 16}, {80, 64}, {160, 256}};
    return s;
}

int EocConfig::steps_for(int n) {
    for (const auto& [size, steps] : schedule())
        if (size == n) return steps;
    throw ValidationError("EOC schedule has no row n=" + std::to_string(n) +
                          " (valid: 10, 20, 40, 80, 160)");
}

double exact_u(const std::array<double, 4>& x, double t) {
    return (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - 1.0) / 6.0 + t;
}

namespace {

// doxel-center coordinate of padded index v (interior is 1..n)
inline double center_coord(int v, double domain_min, double h) {
    return domain_min + (v - 0.5) * h;
}

void fill_all(Field4D& u, const EocConfig& cfg, double h, double t) {
    const GridSpec& spec = u.spec();
    for (int l = 0; l <= spec.n4 + 1; ++l) {
        const double xl = center_coord(l, cfg.domain_min, h);
        for (int k = 0; k <= spec.n3 + 1; ++k) {
            const double xk = center_coord(k, cfg.domain_min, h);
            for (int j = 0; j <= spec.n2 + 1; ++j) {
                const double xj = center_coord(j, cfg.domain_min, h);
                for (int i = 0; i <= spec.n1 + 1; ++i)
                    u.at(i, j, k, l) =
                        exact_u({center_coord(i, cfg.domain_min, h), xj, xk, xl}, t);
            }
        }
    }
}

// Dirichlet data: every ghost doxel gets the exact solution at time t.
void fill_ghosts(Field4D& u, const EocConfig& cfg, double h, double t) {
    const GridSpec& spec = u.spec();
    const int n = spec.n1;
    for (int l = 0; l <= spec.n4 + 1; ++l) {
        const double xl = center_coord(l, cfg.domain_min, h);
        const bool l_ghost = l == 0 || l == spec.n4 + 1;
        for (int k = 0; k <= spec.n3 + 1; ++k) {
            const double xk = center_coord(k, cfg.domain_min, h);
            const bool kl_ghost = l_ghost || k == 0 || k == spec.n3 + 1;
            for (int j = 0; j <= spec.n2 + 1; ++j) {
                const double xj = center_coord(j, cfg.domain_min, h);
                const bool jkl_ghost = kl_ghost || j == 0 || j == spec.n2 + 1;
                if (jkl_ghost) {
                    for (int i = 0; i <= n + 1; ++i)
                        u.at(i, j, k, l) =
                            exact_u({center_coord(i, cfg.domain_min, h), xj, xk, xl}, t);
                } else {
                    u.at(0, j, k, l) = exact_u({center_coord(0, cfg.domain_min, h), xj, xk, xl}, t);
                    u.at(n + 1, j, k, l) =
                        exact_u({center_coord(n + 1, cfg.domain_min, h), xj, xk, xl}, t);
                }
            }
        }
    }
}

}  // namespace

double run_levelset_row(int n, const EocConfig& cfg) {
    const int steps = EocConfig::steps_for(n);
    const double h = (cfg.domain_max - cfg.domain_min) / n;
    const double tau = cfg.total_time / steps;
    const GridSpec spec = GridSpec::isotropic(n, h);

    SolverParams sp;
    sp.tau = tau;
    sp.epsilon = h * h;
    sp.omega = cfg.omega;
    sp.sor_tol = cfg.sor_tol;
    sp.sor_max_iter = cfg.sor_max_iter;
    sp.rescale_each_step = false;

    const int workers = Partition::clamp_workers(n, cfg.workers);
    const Partition partition = Partition::create(n, workers);

    Field4D u(spec);
    fill_all(u, cfg, h, 0.0);

    const double cell_measure = h * h * h * h;
    double err_sq = 0.0;
    std::vector<double> slice_err(std::size_t(n) + 2, 0.0);
    for (int step = 1; step <= steps; ++step) {
        const double t_n = step * tau;
        // coefficients are linearized at u^{n-1}, whose ghosts still hold the
        // previous time level; the solve then gets fresh Dirichlet data
        const StepCoefficients coeff = assemble_step(u, nullptr, sp, spec, workers);
        fill_ghosts(u, cfg, h, t_n);
        SorResult sor = redblack_sor(coeff, u, u, sp, partition);
        u = std::move(sor.u);

        parallel_for_slices(n, workers, [&](int l) {
            const double xl = center_coord(l, cfg.domain_min, h);
            double sum = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double xk = center_coord(k, cfg.domain_min, h);
                for (int j = 1; j <= n; ++j) {
                    const double xj = center_coord(j, cfg.domain_min, h);
                    for (int i = 1; i <= n; ++i) {
                        const double e =
                            u.at(i, j, k, l) -
                            exact_u({center_coord(i, cfg.domain_min, h), xj, xk, xl}, t_n);
                        sum += e * e;
                    }
                }
            }
            slice_err[l] = sum;
        });
        double step_sum = 0.0;
        for (int l = 1; l <= n; ++l) step_sum += slice_err[l];
        err_sq += tau * cell_measure * step_sum;
    }
    return std::sqrt(err_sq);
}

double space_time_l2(const std::vector<Field4D>& u_steps, const EocConfig& cfg) {
    if (u_steps.empty()) return 0.0;
    const GridSpec& spec = u_steps.front().spec();
    const int n = spec.n1;
    const double h = (cfg.domain_max - cfg.domain_min) / n;
    const double tau = cfg.total_time / double(u_steps.size());
    const double cell_measure = h * h * h * h;

    double err_sq = 0.0;
    for (std::size_t s = 0; s < u_steps.size(); ++s) {
        const double t_n = double(s + 1) * tau;
        const Field4D& u = u_steps[s];
        double sum = 0.0;
        for (int l = 1; l <= spec.n4; ++l)
            for (int k = 1; k <= spec.n3; ++k)
                for (int j = 1; j <= spec.n2; ++j)
                    for (int i = 1; i <= spec.n1; ++i) {
                        const double e = u.at(i, j, k, l) -
                                         exact_u({center_coord(i, cfg.domain_min, h),
                                                  center_coord(j, cfg.domain_min, h),
                                                  center_coord(k, cfg.domain_min, h),
                                                  center_coord(l, cfg.domain_min, h)},
                                                 t_n);
                        sum += e * e;
                    }
        err_sq += tau * cell_measure * sum;
    }
    return std::sqrt(err_sq);
}

double eoc_value(double err_h, double err_h2) {
    if (!(err_h > 0.0) || !(err_h2 > 0.0))
        throw std::domain_error("eoc_value: errors must be positive");
    return std::log2(err_h / err_h2);
}

ErrorReport run_eoc(int max_n, const EocConfig& cfg) {
    EocConfig::steps_for(max_n);  // reject sizes outside the schedule

    ErrorReport report;
    for (const auto& [n, steps] : EocConfig::schedule()) {
        if (n > max_n) break;
        EocRow row;
        row.n = n;
        row.h = (cfg.domain_max - cfg.domain_min) / n;
        row.final_step = steps;
        row.l2_error = run_levelset_row(n, cfg);
        if (!report.rows.empty())
            row.eoc = eoc_value(report.rows.back().l2_error, row.l2_error);
        report.rows.push_back(row);
    }
    return report;
}

void print_report(const ErrorReport& report, std::ostream& out) {
    out << "   n          h  final step         error        EOC\n";
    for (const EocRow& row : report.rows) {
        out << std::setw(4) << row.n << "  " << std::setw(9) << row.h << "  " << std::setw(10)
            << row.final_step << "  " << std::scientific << std::setprecision(6) << row.l2_error
            << std::defaultfloat;
        if (row.eoc) out << "   " << std::fixed << std::setprecision(6) << *row.eoc
                         << std::defaultfloat;
        out << "\n";
    }
}

}  // namespace subsurf
