#pragma once

#include <functional>
#include <vector>

#include "subsurf/errors.hpp"

namespace subsurf {

// Splits the time axis l = 1..N4 into contiguous worker ranges. Workers
// 0..n_p-2 get ceil(N4/n_p) slices each and the last worker takes the
// remainder, which must stay >= 1.
class Partition {
public:
    struct Range {
        int l_begin;  // first owned slice, 1-based
        int l_end;    // last owned slice, inclusive
        int count() const { return l_end - l_begin + 1; }
    };

    Partition() : n4_(1), workers_(1), chunk_(1), last_(1) {}

    static Partition create(int n4, int workers);

    // Largest worker count <= requested that yields a valid partition.
    static int clamp_workers(int n4, int requested);

    int worker_count() const { return workers_; }
    int n4() const { return n4_; }
    int chunk() const { return chunk_; }

    Range range(int worker) const;

private:
    Partition(int n4, int workers, int chunk, int last)
        : n4_(n4), workers_(workers), chunk_(chunk), last_(last) {}

    int n4_, workers_, chunk_, last_;
};

// Runs fn(worker, range) on worker_count threads (worker 0 on the caller).
void run_partitioned(const Partition& partition,
                     const std::function<void(int, Partition::Range)>& fn);

// Parallel loop over l = 1..n4 in contiguous chunks; partition-independent
// results since every slice is processed exactly once.
void parallel_for_slices(int n4, int workers, const std::function<void(int l)>& fn);

}  // namespace subsurf
