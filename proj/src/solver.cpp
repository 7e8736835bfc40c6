#include "subsurf/solver.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstring>
#include <ostream>
#include <thread>

namespace subsurf {

void SolverParams::validate() const {
    if (tau < 0.0) throw ValidationError("SolverParams: tau must be >= 0");
    if (!(epsilon > 0.0)) throw ValidationError("SolverParams: epsilon must be > 0");
    if (!(omega > 0.0) || !(omega < 2.0))
        throw ValidationError("SolverParams: omega must lie in (0,2)");
    if (!(sor_tol > 0.0)) throw ValidationError("SolverParams: sor_tol must be > 0");
    if (sor_max_iter < 1) throw ValidationError("SolverParams: sor_max_iter must be >= 1");
    if (n_steps < 1) throw ValidationError("SolverParams: n_steps must be >= 1");
}

StepCoefficients assemble_step(const Field4D& u_prev, const FaceCoefficientField* G,
                               const SolverParams& params, const GridSpec& spec, int workers) {
    params.validate();
    if (u_prev.spec() != spec) throw ValidationError("assemble_step: field/spec mismatch");
    if (G && G->spec() != spec) throw ValidationError("assemble_step: G/spec mismatch");

    StepCoefficients coeff;
    coeff.spec = spec;
    coeff.offdiag.resize(spec.padded_size());
    coeff.diag.resize(spec.padded_size());
    coeff.abar.resize(spec.padded_size());

    const double eps = params.epsilon;
    double tau_over_h2[4];
    for (int a = 0; a < 4; ++a)
        tau_over_h2[a] = params.tau / (spec.spacing(a) * spec.spacing(a));

    std::atomic<bool> bad{false};
    parallel_for_slices(spec.n4, workers, [&](int l) {
        for (int k = 1; k <= spec.n3; ++k)
            for (int j = 1; j <= spec.n2; ++j)
                for (int i = 1; i <= spec.n1; ++i) {
                    const Index4 idx{i, j, k, l};
                    const std::array<double, 8> g2 = face_gradient_sq(u_prev, spec, idx);

                    // A_f^2 = eps + |grad_f u|^2; Abar^2 = eps + mean(A_f^2).
                    double a_face[8];
                    double a_sq_sum = 0.0;
                    for (int f = 0; f < 8; ++f) {
                        const double a_sq = eps + g2[f];
                        a_face[f] = std::sqrt(a_sq);
                        a_sq_sum += a_sq;
                    }
                    const double abar = std::sqrt(eps + 0.125 * a_sq_sum);

                    const std::array<double, 8>* gptr =
                        G ? G->data() + G->flat(i, j, k, l) : nullptr;
                    const std::size_t at = coeff.flat(i, j, k, l);
                    std::array<double, 8>& off = coeff.offdiag[at];
                    double sum = 0.0;
                    for (int f = 0; f < 8; ++f) {
                        const double g = gptr ? (*gptr)[f] : 1.0;
                        off[f] = double(
                            float(-(tau_over_h2[kFaceOffsets[f].axis] * abar * g / a_face[f])));
                        sum += off[f];
                    }
                    coeff.diag[at] = 1.0 - sum;
                    coeff.abar[at] = abar;
                    if (!std::isfinite(coeff.diag[at])) bad.store(true, std::memory_order_relaxed);
                }
    });
    if (bad.load())
        throw NumericalError("assemble_step: non-finite coefficient (bad input field?)");
    return coeff;
}

StepCoefficients assemble_heat_step(const GridSpec& spec, double dt, int workers) {
    if (!(dt > 0.0)) throw ValidationError("assemble_heat_step: dt must be > 0");

    StepCoefficients coeff;
    coeff.spec = spec;
    coeff.offdiag.resize(spec.padded_size());
    coeff.diag.resize(spec.padded_size());
    coeff.abar.resize(spec.padded_size());

    double dt_over_h2[4];
    for (int a = 0; a < 4; ++a) dt_over_h2[a] = dt / (spec.spacing(a) * spec.spacing(a));
    const int hi[4] = {spec.n1, spec.n2, spec.n3, spec.n4};

    parallel_for_slices(spec.n4, workers, [&](int l) {
        for (int k = 1; k <= spec.n3; ++k)
            for (int j = 1; j <= spec.n2; ++j)
                for (int i = 1; i <= spec.n1; ++i) {
                    const std::size_t at = coeff.flat(i, j, k, l);
                    std::array<double, 8>& off = coeff.offdiag[at];
                    const int c[4] = {i, j, k, l};
                    double sum = 0.0;
                    for (int f = 0; f < 8; ++f) {
                        const FaceOffset& face = kFaceOffsets[f];
                        const int nb = c[face.axis] + face.sign;
                        // zero-flux boundary: couplings into ghosts are dropped
                        if (nb < 1 || nb > hi[face.axis]) {
                            off[f] = 0.0;
                        } else {
                            off[f] = double(float(-dt_over_h2[face.axis]));
                            sum += off[f];
                        }
                    }
                    coeff.diag[at] = 1.0 - sum;
                    coeff.abar[at] = 1.0;
                }
    });
    return coeff;
}

namespace {

// The partition's logical workers (slabs, halo exchanges, residual slices)
// are scheduled onto at most hardware_concurrency OS threads; each thread
// runs a contiguous block of workers through every phase, with barriers
// between phases. The iterates are identical for any worker or thread count.
class SorRun {
public:
    SorRun(const StepCoefficients& coeff, const Field4D& rhs, Field4D& u,
           const SolverParams& params, const Partition& partition)
        : coeff_(coeff),
          rhs_(rhs),
          u_(u),
          params_(params),
          partition_(partition),
          spec_(u.spec()),
          plane_(std::size_t(spec_.i_max()) * spec_.j_max() * spec_.k_max()),
          stride_((u.spec().n1 + 1) / 2),
          slabs_(partition.worker_count()),
          slice_residual_sq_(std::size_t(spec_.n4) + 2, 0.0),
          slice_black_sq_(std::size_t(spec_.n4) + 2, 0.0) {
        const std::size_t rows = std::size_t(spec_.l_max()) * spec_.k_max() * spec_.j_max();
        packed_[0].resize(rows * stride_);
        packed_[1].resize(rows * stride_);
    }

    void execute() {
        const int np = partition_.worker_count();
        const int hw = std::max(1u, std::thread::hardware_concurrency());
        const int threads = std::min(np, hw);
        std::barrier<> sync(threads);

        std::vector<std::thread> pool;
        pool.reserve(threads - 1);
        for (int t = 1; t < threads; ++t)
            pool.emplace_back([this, &sync, t, threads] { thread_main(sync, t, threads); });
        thread_main(sync, 0, threads);
        for (std::thread& t : pool) t.join();
    }

    int iterations = 0;
    double residual = 0.0;
    bool converged = false;

private:
    void thread_main(std::barrier<>& sync, int tid, int threads) {
        const int np = partition_.worker_count();
        const int per_thread = (np + threads - 1) / threads;
        const int w_begin = tid * per_thread;
        const int w_end = std::min(np, w_begin + per_thread);

        for (int w = w_begin; w < w_end; ++w) {
            scatter(w);
            pack_coefficients(w);
        }
        sync.arrive_and_wait();

        const double tol = params_.sor_tol;
        const int max_iter = params_.sor_max_iter;
        int iter = 0;
        bool done = false;
        double res = 0.0;
        while (true) {
            for (int w = w_begin; w < w_end; ++w) sweep(w, 0);  // RED: (i+j+k+l) even
            sync.arrive_and_wait();
            for (int w = w_begin; w < w_end; ++w) pull_halos(w);
            sync.arrive_and_wait();
            // black updates see final red values, so black residuals come out
            // of the sweep itself; only red rows need the extra pass
            for (int w = w_begin; w < w_end; ++w) sweep(w, 1);
            sync.arrive_and_wait();
            for (int w = w_begin; w < w_end; ++w) {
                pull_halos(w);
                red_residuals(w);
            }
            sync.arrive_and_wait();

            // all-reduce: every thread forms the same sum in the same order,
            // so the stopping decision is identical everywhere
            double total = 0.0;
            for (int l = 1; l <= spec_.n4; ++l) total += slice_residual_sq_[l];
            res = std::sqrt(total);
            ++iter;
            if (res <= tol) {
                done = true;
                break;
            }
            if (iter >= max_iter) break;
        }

        for (int w = w_begin; w < w_end; ++w) gather(w);
        if (tid == 0) {
            iterations = iter;
            residual = res;
            converged = done;
        }
    }

    void scatter(int w) {
        const Partition::Range range = partition_.range(w);
        std::vector<double>& slab = slabs_[w];
        slab.resize(plane_ * std::size_t(range.count() + 2));
        // owned slices plus halo/ghost planes on both sides
        std::memcpy(slab.data(), u_.data() + std::size_t(range.l_begin - 1) * plane_,
                    slab.size() * sizeof(double));
    }

    void gather(int w) {
        const Partition::Range range = partition_.range(w);
        std::memcpy(u_.data() + std::size_t(range.l_begin) * plane_, slabs_[w].data() + plane_,
                    std::size_t(range.count()) * plane_ * sizeof(double));
    }

    // Color-packed float copies of the owned slices' matrix rows; sweeps then
    // stream them sequentially instead of striding over the double array.
    void pack_coefficients(int w) {
        const Partition::Range range = partition_.range(w);
        const std::array<double, 8>* off = coeff_.offdiag.data();
        for (int gl = range.l_begin; gl <= range.l_end; ++gl)
            for (int k = 1; k <= spec_.n3; ++k)
                for (int j = 1; j <= spec_.n2; ++j) {
                    const std::size_t row =
                        (std::size_t(gl) * spec_.k_max() + k) * spec_.j_max() + j;
                    const std::size_t base = row * spec_.i_max();
                    for (int color = 0; color < 2; ++color) {
                        std::array<float, 8>* out = packed_[color].data() + row * stride_;
                        const int i0 = (((1 + j + k + gl + color) & 1) == 0) ? 1 : 2;
                        for (int i = i0; i <= spec_.n1; i += 2, ++out)
                            for (int f = 0; f < 8; ++f) (*out)[f] = float(off[base + i][f]);
                    }
                }
    }

    // Post-phase exchange: copy the neighbors' owned boundary slices into the
    // local halo planes. Pull model; barriers on both sides make it safe.
    void pull_halos(int w) {
        const Partition::Range range = partition_.range(w);
        std::vector<double>& slab = slabs_[w];
        if (w > 0) {
            const int left_count = partition_.range(w - 1).count();
            std::memcpy(slab.data(), slabs_[w - 1].data() + std::size_t(left_count) * plane_,
                        plane_ * sizeof(double));
        }
        if (w < partition_.worker_count() - 1) {
            std::memcpy(slab.data() + std::size_t(range.count() + 1) * plane_,
                        slabs_[w + 1].data() + plane_, plane_ * sizeof(double));
        }
    }

    void sweep(int w, int color) {
        const Partition::Range range = partition_.range(w);
        const int n1 = spec_.n1, n2 = spec_.n2, n3 = spec_.n3;
        const std::ptrdiff_t sj = spec_.i_max();
        const std::ptrdiff_t sk = sj * spec_.j_max();
        const std::ptrdiff_t sl = std::ptrdiff_t(plane_);
        const double omega = params_.omega;
        const double keep = 1.0 - omega;
        const double* rhs = rhs_.data();
        const std::array<float, 8>* packed = packed_[color].data();
        std::vector<double>& slab = slabs_[w];

        for (int ll = 1; ll <= range.count(); ++ll) {
            const int gl = range.l_begin + ll - 1;
            double res_sum = 0.0;
            for (int k = 1; k <= n3; ++k)
                for (int j = 1; j <= n2; ++j) {
                    const std::size_t row =
                        (std::size_t(gl) * spec_.k_max() + k) * spec_.j_max() + j;
                    double* uu = slab.data() +
                                 ((std::size_t(ll) * spec_.k_max() + k) * spec_.j_max() + j) *
                                     spec_.i_max();
                    const double* rr = rhs + row * spec_.i_max();
                    const std::array<float, 8>* cp = packed + row * stride_;
                    const int i0 = (((1 + j + k + gl + color) & 1) == 0) ? 1 : 2;
                    for (int i = i0; i <= n1; i += 2, ++cp) {
                        const std::array<float, 8>& c = *cp;
                        const double c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3];
                        const double c4 = c[4], c5 = c[5], c6 = c[6], c7 = c[7];
                        const double diag = 1.0 - (c0 + c1 + c2 + c3 + c4 + c5 + c6 + c7);
                        double acc = rr[i];
                        acc -= c0 * uu[i - 1];
                        acc -= c1 * uu[i + 1];
                        acc -= c2 * uu[i - sj];
                        acc -= c3 * uu[i + sj];
                        acc -= c4 * uu[i - sk];
                        acc -= c5 * uu[i + sk];
                        acc -= c6 * uu[i - sl];
                        acc -= c7 * uu[i + sl];
                        const double ubar = acc / diag;
                        const double unew = omega * ubar + keep * uu[i];
                        uu[i] = unew;
                        // during the black phase all neighbors are final, so
                        // this is the doxel's post-iteration residual
                        const double res = diag * (unew - ubar);
                        res_sum += res * res;
                    }
                }
            if (color == 1) slice_black_sq_[gl] = res_sum;
        }
    }

    void red_residuals(int w) {
        const Partition::Range range = partition_.range(w);
        const int n1 = spec_.n1, n2 = spec_.n2, n3 = spec_.n3;
        const std::ptrdiff_t sj = spec_.i_max();
        const std::ptrdiff_t sk = sj * spec_.j_max();
        const std::ptrdiff_t sl = std::ptrdiff_t(plane_);
        const double* rhs = rhs_.data();
        const std::array<float, 8>* packed = packed_[0].data();
        std::vector<double>& slab = slabs_[w];

        for (int ll = 1; ll <= range.count(); ++ll) {
            const int gl = range.l_begin + ll - 1;
            double sum = 0.0;
            for (int k = 1; k <= n3; ++k)
                for (int j = 1; j <= n2; ++j) {
                    const std::size_t row =
                        (std::size_t(gl) * spec_.k_max() + k) * spec_.j_max() + j;
                    const double* uu = slab.data() +
                                       ((std::size_t(ll) * spec_.k_max() + k) * spec_.j_max() + j) *
                                           spec_.i_max();
                    const double* rr = rhs + row * spec_.i_max();
                    const std::array<float, 8>* cp = packed + row * stride_;
                    const int i0 = (((1 + j + k + gl) & 1) == 0) ? 1 : 2;
                    for (int i = i0; i <= n1; i += 2, ++cp) {
                        const std::array<float, 8>& c = *cp;
                        const double c0 = c[0], c1 = c[1], c2 = c[2], c3 = c[3];
                        const double c4 = c[4], c5 = c[5], c6 = c[6], c7 = c[7];
                        const double diag = 1.0 - (c0 + c1 + c2 + c3 + c4 + c5 + c6 + c7);
                        double res = diag * uu[i] - rr[i];
                        res += c0 * uu[i - 1];
                        res += c1 * uu[i + 1];
                        res += c2 * uu[i - sj];
                        res += c3 * uu[i + sj];
                        res += c4 * uu[i - sk];
                        res += c5 * uu[i + sk];
                        res += c6 * uu[i - sl];
                        res += c7 * uu[i + sl];
                        sum += res * res;
                    }
                }
            slice_residual_sq_[gl] = slice_black_sq_[gl] + sum;
        }
    }

    const StepCoefficients& coeff_;
    const Field4D& rhs_;
    Field4D& u_;
    const SolverParams& params_;
    const Partition& partition_;
    const GridSpec& spec_;
    const std::size_t plane_;
    const std::size_t stride_;
    std::vector<std::vector<double>> slabs_;
    std::array<std::vector<std::array<float, 8>>, 2> packed_;
    std::vector<double> slice_residual_sq_;
    std::vector<double> slice_black_sq_;
};

}  // namespace

SorResult redblack_sor(const StepCoefficients& coeff, const Field4D& rhs, Field4D u_guess,
                       const SolverParams& params, const Partition& partition) {
    params.validate();
    const GridSpec& spec = u_guess.spec();
    if (coeff.spec != spec || rhs.spec() != spec)
        throw ValidationError("redblack_sor: grid mismatch between coefficients and fields");
    if (partition.n4() != spec.n4)
        throw ValidationError("redblack_sor: partition built for a different time axis");

    SorRun run(coeff, rhs, u_guess, params, partition);
    run.execute();

    if (!run.converged)
        throw SolverError("redblack_sor: no convergence after " +
                              std::to_string(run.iterations) + " iterations (residual " +
                              std::to_string(run.residual) + ")",
                          run.residual, run.iterations);
    return SorResult{std::move(u_guess), run.iterations, run.residual};
}

bool check_minmax(const Field4D& u_next, const Field4D& u_prev_rescaled, double slack) {
    const auto [next_min, next_max] = interior_minmax(u_next);
    const auto [prev_min, prev_max] = interior_minmax(u_prev_rescaled);
    return prev_min - slack <= next_min && next_max <= prev_max + slack;
}

Field4D segment(const Field4D& image, const CentersTable& centers, const SegmentationParams& params,
                std::ostream* diagnostics) {
    const GridSpec& spec = image.spec();
    params.solver.validate();
    params.smoothing.validate();
    params.threshold.validate();
    params.edge.validate();
    params.init.validate();
    validate_centers(centers, spec);
    const int workers = Partition::clamp_workers(spec.n4, params.workers);

    Field4D u = build_initial(centers, params.init, spec);
    local_rescale(u, centers, params.rescale_radius);

    const Field4D thresholded = local_threshold(image, centers, params.threshold);
    const Field4D image_s = heat_smooth(image, params.smoothing, workers);
    const Field4D thresholded_s = heat_smooth(thresholded, params.smoothing, workers);
    const FaceCoefficientField G =
        face_coefficients(image_s, thresholded_s, params.edge, spec, workers);

    apply_dirichlet(u, 0.0);
    const Partition partition = Partition::create(spec.n4, workers);

    for (int step = 1; step <= params.solver.n_steps; ++step) {
        const StepCoefficients coeff = assemble_step(u, &G, params.solver, spec, workers);
        SorResult sor = redblack_sor(coeff, u, u, params.solver, partition);
        u = std::move(sor.u);
        if (params.solver.rescale_each_step) local_rescale(u, centers, params.rescale_radius);
        if (diagnostics) {
            const auto [lo, hi] = interior_minmax(u);
            (*diagnostics) << "step " << step << "/" << params.solver.n_steps
                           << " sor_iters=" << sor.iterations << " residual=" << sor.residual
                           << " min=" << lo << " max=" << hi << "\n";
        }
    }
    return u;
}

}  // namespace subsurf
