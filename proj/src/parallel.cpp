#include "subsurf/parallel.hpp"

#include <string>
#include <mutex>
#include <thread>

namespace subsurf {

Partition Partition::create(int n4, int workers) {
    if (n4 < 1) throw ValidationError("Partition: n4 must be >= 1");
    if (workers < 1) throw ValidationError("Partition: worker count must be >= 1");
    const int chunk = (n4 + workers - 1) / workers;  // ceil(N4 / n_p)
    const int last = n4 - (workers - 1) * chunk;
    if (last < 1)
        throw ValidationError("Partition: " + std::to_string(workers) +
                              " workers leave the last one with " + std::to_string(last) +
                              " slices of " + std::to_string(n4));
    return Partition(n4, workers, chunk, last);
}

int Partition::clamp_workers(int n4, int requested) {
    for (int w = std::min(requested, n4); w > 1; --w) {
        const int chunk = (n4 + w - 1) / w;
        if (n4 - (w - 1) * chunk >= 1) return w;
    }
    return 1;
}

Partition::Range Partition::range(int worker) const {
    const int begin = worker * chunk_ + 1;
    const int count = worker == workers_ - 1 ? last_ : chunk_;
    return Range{begin, begin + count - 1};
}

void run_partitioned(const Partition& partition,
                     const std::function<void(int, Partition::Range)>& fn) {
    const int np = partition.worker_count();
    std::vector<std::thread> threads;
    threads.reserve(np - 1);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 1; w < np; ++w)
        threads.emplace_back([&, w] {
            try {
                fn(w, partition.range(w));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    try {
        fn(0, partition.range(0));
    } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
    }
    for (std::thread& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

void parallel_for_slices(int n4, int workers, const std::function<void(int l)>& fn) {
    const Partition partition = Partition::create(n4, Partition::clamp_workers(n4, workers));
    run_partitioned(partition, [&](int, Partition::Range r) {
        for (int l = r.l_begin; l <= r.l_end; ++l) fn(l);
    });
}

}  // namespace subsurf
