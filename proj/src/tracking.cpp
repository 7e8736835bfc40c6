#include "subsurf/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

namespace subsurf {

namespace {

struct Neighbor26 {
    int dx, dy, dz;
};

std::vector<Neighbor26> neighbors26() {
    std::vector<Neighbor26> out;
    out.reserve(26);
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
                if (dx || dy || dz) out.push_back({dx, dy, dz});
    return out;
}

const std::vector<Neighbor26>& nbs26() {
    static const std::vector<Neighbor26> n = neighbors26();
    return n;
}

}  // namespace

MaskFrames extract_mask(const Field4D& u, double level) {
    const GridSpec& spec = u.spec();
    MaskFrames mask;
    mask.n1 = spec.n1;
    mask.n2 = spec.n2;
    mask.n3 = spec.n3;
    mask.frames.resize(spec.n4);
    for (int l = 1; l <= spec.n4; ++l) {
        std::vector<std::uint8_t>& frame = mask.frames[l - 1];
        frame.resize(mask.frame_size());
        std::size_t n = 0;
        for (int k = 1; k <= spec.n3; ++k)
            for (int j = 1; j <= spec.n2; ++j)
                for (int i = 1; i <= spec.n1; ++i)
                    frame[n++] = u.at(i, j, k, l) >= level ? 1 : 0;
    }
    return mask;
}

MaskFrames mask_from_labels(const LabelField& labels) {
    MaskFrames mask;
    mask.n1 = labels.n1;
    mask.n2 = labels.n2;
    mask.n3 = labels.n3;
    mask.frames.resize(labels.frames.size());
    for (std::size_t f = 0; f < labels.frames.size(); ++f) {
        mask.frames[f].resize(mask.frame_size());
        for (std::size_t v = 0; v < mask.frame_size(); ++v)
            mask.frames[f][v] = labels.frames[f][v] > 0 ? 1 : 0;
    }
    return mask;
}

LabelField label_components(const MaskFrames& mask) {
    LabelField out;
    out.n1 = mask.n1;
    out.n2 = mask.n2;
    out.n3 = mask.n3;
    out.frames.resize(mask.frames.size());
    out.labels_per_frame.resize(mask.frames.size(), 0);

    const int n1 = mask.n1, n2 = mask.n2, n3 = mask.n3;
    for (std::size_t f = 0; f < mask.frames.size(); ++f) {
        const std::vector<std::uint8_t>& fg = mask.frames[f];
        std::vector<std::int32_t>& lab = out.frames[f];
        lab.assign(mask.frame_size(), 0);

        // BFS flood fill, provisional labels in scan order
        struct Component {
            std::int32_t provisional;
            std::size_t count;
            std::size_t first_voxel;
        };
        std::vector<Component> comps;
        std::deque<std::array<int, 3>> queue;
        std::int32_t next = 0;
        for (int z = 0; z < n3; ++z)
            for (int y = 0; y < n2; ++y)
                for (int x = 0; x < n1; ++x) {
                    const std::size_t v = mask.voxel(x, y, z);
                    if (!fg[v] || lab[v]) continue;
                    ++next;
                    lab[v] = next;
                    std::size_t count = 0;
                    queue.push_back({x, y, z});
                    while (!queue.empty()) {
                        const auto [cx, cy, cz] = queue.front();
                        queue.pop_front();
                        ++count;
                        for (const Neighbor26& d : nbs26()) {
                            const int nx = cx + d.dx, ny = cy + d.dy, nz = cz + d.dz;
                            if (nx < 0 || nx >= n1 || ny < 0 || ny >= n2 || nz < 0 || nz >= n3)
                                continue;
                            const std::size_t nv = mask.voxel(nx, ny, nz);
                            if (!fg[nv] || lab[nv]) continue;
                            lab[nv] = next;
                            queue.push_back({nx, ny, nz});
                        }
                    }
                    comps.push_back({next, count, v});
                }

        // final labels 1..k by decreasing voxel count, ties by first voxel
        std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
            if (a.count != b.count) return a.count > b.count;
            return a.first_voxel < b.first_voxel;
        });
        std::vector<std::int32_t> remap(std::size_t(next) + 1, 0);
        for (std::size_t r = 0; r < comps.size(); ++r)
            remap[comps[r].provisional] = std::int32_t(r + 1);
        for (std::int32_t& v : lab)
            if (v) v = remap[v];
        out.labels_per_frame[f] = int(comps.size());
    }
    return out;
}

namespace {

// Multi-source BFS distance to background over an arbitrary foreground set;
// voxels outside the volume count as background.
std::vector<std::int32_t> bfs_distance(const std::vector<std::uint8_t>& fg, int n1, int n2,
                                       int n3) {
    std::vector<std::int32_t> dist(fg.size(), 0);
    std::deque<std::size_t> queue;
    auto voxel = [&](int x, int y, int z) { return (std::size_t(z) * n2 + y) * n1 + x; };

    for (int z = 0; z < n3; ++z)
        for (int y = 0; y < n2; ++y)
            for (int x = 0; x < n1; ++x) {
                const std::size_t v = voxel(x, y, z);
                if (!fg[v]) continue;
                bool boundary = false;
                for (const Neighbor26& d : nbs26()) {
                    const int nx = x + d.dx, ny = y + d.dy, nz = z + d.dz;
                    if (nx < 0 || nx >= n1 || ny < 0 || ny >= n2 || nz < 0 || nz >= n3 ||
                        !fg[voxel(nx, ny, nz)]) {
                        boundary = true;
                        break;
                    }
                }
                if (boundary) {
                    dist[v] = 1;
                    queue.push_back(v);
                }
            }

    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        const int x = int(v % n1);
        const int y = int((v / n1) % n2);
        const int z = int(v / (std::size_t(n1) * n2));
        const std::int32_t next = dist[v] + 1;
        for (const Neighbor26& d : nbs26()) {
            const int nx = x + d.dx, ny = y + d.dy, nz = z + d.dz;
            if (nx < 0 || nx >= n1 || ny < 0 || ny >= n2 || nz < 0 || nz >= n3) continue;
            const std::size_t nv = voxel(nx, ny, nz);
            if (!fg[nv] || dist[nv]) continue;
            dist[nv] = next;
            queue.push_back(nv);
        }
    }
    return dist;
}

}  // namespace

std::vector<CellRecord> distance_centers(const LabelField& labels) {
    std::vector<CellRecord> out;
    const int n1 = labels.n1, n2 = labels.n2, n3 = labels.n3;
    for (std::size_t f = 0; f < labels.frames.size(); ++f) {
        const std::vector<std::int32_t>& lab = labels.frames[f];
        std::vector<std::uint8_t> fg(lab.size());
        for (std::size_t v = 0; v < lab.size(); ++v) fg[v] = lab[v] > 0;
        const std::vector<std::int32_t> dist = bfs_distance(fg, n1, n2, n3);

        const int k = labels.labels_per_frame[f];
        std::vector<CellRecord> records(static_cast<std::size_t>(k));
        for (int lb = 1; lb <= k; ++lb) {
            records[lb - 1].frame = int(f);
            records[lb - 1].label = lb;
            records[lb - 1].max_distance = 0;
        }
        for (int z = 0; z < n3; ++z)
            for (int y = 0; y < n2; ++y)
                for (int x = 0; x < n1; ++x) {
                    const std::size_t v = labels.voxel(x, y, z);
                    if (lab[v] <= 0) continue;
                    CellRecord& r = records[lab[v] - 1];
                    ++r.voxel_count;
                    if (dist[v] > r.max_distance) {  // scan order breaks ties
                        r.max_distance = dist[v];
                        r.center = {x, y, z};
                    }
                }
        for (CellRecord& r : records) out.push_back(r);
    }
    return out;
}

namespace {

struct Chain {
    std::vector<CellRecord> reversed;  // decreasing frames while building
};

}  // namespace

std::vector<Trajectory> backtrack_link(const std::vector<CellRecord>& records,
                                       const LabelField& labels) {
    const int frame_count = int(labels.frames.size());
    // records indexed by (frame, label)
    std::vector<std::vector<const CellRecord*>> by_frame(frame_count);
    for (std::size_t f = 0; f < by_frame.size(); ++f)
        by_frame[f].resize(std::size_t(labels.labels_per_frame[f]), nullptr);
    for (const CellRecord& r : records) by_frame[r.frame][r.label - 1] = &r;

    std::vector<Chain> chains;
    // chain currently ending at (current frame, label), or -1
    std::vector<int> tails;

    for (int f = frame_count - 1; f >= 0; --f) {
        const int k = labels.labels_per_frame[f];
        if (f == frame_count - 1) tails.assign(std::size_t(k), -1);

        // cells not reached by a link from frame f+1 start new partials
        for (int lb = 1; lb <= k; ++lb) {
            if (tails[lb - 1] >= 0 || !by_frame[f][lb - 1]) continue;
            chains.push_back(Chain{{*by_frame[f][lb - 1]}});
            tails[lb - 1] = int(chains.size()) - 1;
        }
        if (f == 0) break;

        const std::vector<std::int32_t>& lab = labels.frames[f];
        const std::vector<std::int32_t>& prev = labels.frames[f - 1];
        const int kp = labels.labels_per_frame[f - 1];
        std::vector<int> next_tails(std::size_t(kp), -1);
        std::vector<std::uint8_t> claimed(std::size_t(kp), 0);

        // claim predecessors in decreasing-size order
        std::vector<int> order(static_cast<std::size_t>(k));
        std::iota(order.begin(), order.end(), 1);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const CellRecord* ra = by_frame[f][a - 1];
            const CellRecord* rb = by_frame[f][b - 1];
            if (ra->voxel_count != rb->voxel_count) return ra->voxel_count > rb->voxel_count;
            return a < b;
        });

        for (int lb : order) {
            const CellRecord* cell = by_frame[f][lb - 1];
            const int chain = tails[lb - 1];

            // center projection into the previous frame
            const std::size_t cv = labels.voxel(cell->center[0], cell->center[1], cell->center[2]);
            int target = prev[cv] > 0 ? prev[cv] : 0;

            if (target == 0) {
                // overlap rule: distance-transform center of the overlap region
                std::vector<std::uint8_t> overlap(lab.size(), 0);
                bool any = false;
                for (std::size_t v = 0; v < lab.size(); ++v)
                    if (lab[v] == lb && prev[v] > 0) {
                        overlap[v] = 1;
                        any = true;
                    }
                if (any) {
                    const std::vector<std::int32_t> dist =
                        bfs_distance(overlap, labels.n1, labels.n2, labels.n3);
                    std::int32_t best = 0;
                    std::size_t best_v = 0;
                    for (std::size_t v = 0; v < dist.size(); ++v)
                        if (dist[v] > best) {
                            best = dist[v];
                            best_v = v;
                        }
                    target = prev[best_v];
                }
            }

            if (target > 0 && !claimed[target - 1]) {
                claimed[target - 1] = 1;
                chains[chain].reversed.push_back(*by_frame[f - 1][target - 1]);
                next_tails[target - 1] = chain;
            }
            // otherwise the partial trajectory ends here
        }
        tails = std::move(next_tails);
    }

    std::vector<Trajectory> out;
    out.reserve(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c) {
        Trajectory t;
        t.id = int(c) + 1;
        t.records.assign(chains[c].reversed.rbegin(), chains[c].reversed.rend());
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

std::array<double, 3> to_point(const CellRecord& r) {
    return {double(r.center[0]), double(r.center[1]), double(r.center[2])};
}

double dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

std::vector<Trajectory> prolong_and_merge(std::vector<Trajectory> partials, int window,
                                          double radius) {
    const int np = int(partials.size());
    struct Candidate {
        int gap;
        double dist;
        int a, b;  // a's end connects to b's start
    };
    std::vector<Candidate> candidates;

    for (int a = 0; a < np; ++a) {
        for (int b = 0; b < np; ++b) {
            if (a == b) continue;
            const Trajectory& A = partials[a];
            const Trajectory& B = partials[b];
            const CellRecord& a_last = A.records.back();
            const CellRecord& b_first = B.records.front();
            const int gap = b_first.frame - a_last.frame;
            if (gap < 1 || gap > window) continue;

            double best = std::numeric_limits<double>::infinity();
            if (A.records.size() >= 2) {  // forward prolongation of A
                const auto p1 = to_point(A.records[A.records.size() - 2]);
                const auto p2 = to_point(a_last);
                const std::array<double, 3> pred = {p2[0] + gap * (p2[0] - p1[0]),
                                                    p2[1] + gap * (p2[1] - p1[1]),
                                                    p2[2] + gap * (p2[2] - p1[2])};
                best = std::min(best, dist3(pred, to_point(b_first)));
            }
            if (B.records.size() >= 2) {  // backward prolongation of B
                const auto q1 = to_point(b_first);
                const auto q2 = to_point(B.records[1]);
                const std::array<double, 3> pred = {q1[0] - gap * (q2[0] - q1[0]),
                                                    q1[1] - gap * (q2[1] - q1[1]),
                                                    q1[2] - gap * (q2[2] - q1[2])};
                best = std::min(best, dist3(pred, to_point(a_last)));
            }
            if (best <= radius) candidates.push_back({gap, best, a, b});
        }
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
        if (x.gap != y.gap) return x.gap < y.gap;
        if (x.dist != y.dist) return x.dist < y.dist;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });

    std::vector<int> next(np, -1);
    std::vector<std::uint8_t> end_used(np, 0), start_used(np, 0);
    for (const Candidate& c : candidates) {
        if (end_used[c.a] || start_used[c.b]) continue;
        end_used[c.a] = 1;
        start_used[c.b] = 1;
        next[c.a] = c.b;
    }

    std::vector<Trajectory> out;
    for (int h = 0; h < np; ++h) {
        if (start_used[h]) continue;  // not a head
        Trajectory merged;
        for (int cur = h; cur != -1; cur = next[cur])
            merged.records.insert(merged.records.end(), partials[cur].records.begin(),
                                  partials[cur].records.end());
        merged.id = int(out.size()) + 1;
        out.push_back(std::move(merged));
    }
    return out;
}

std::vector<Trajectory> track_cells(const Field4D& u, const TrackParams& params) {
    const MaskFrames mask = extract_mask(u, params.level);
    const LabelField labels = label_components(mask);
    const std::vector<CellRecord> records = distance_centers(labels);
    std::vector<Trajectory> partials = backtrack_link(records, labels);
    std::vector<Trajectory> merged = prolong_and_merge(std::move(partials), params.window,
                                                       params.radius);

    std::sort(merged.begin(), merged.end(), [&](const Trajectory& a, const Trajectory& b) {
        const CellRecord& ra = a.records.front();
        const CellRecord& rb = b.records.front();
        if (ra.frame != rb.frame) return ra.frame < rb.frame;
        const std::size_t va = labels.voxel(ra.center[0], ra.center[1], ra.center[2]);
        const std::size_t vb = labels.voxel(rb.center[0], rb.center[1], rb.center[2]);
        return va < vb;
    });
    for (std::size_t t = 0; t < merged.size(); ++t) merged[t].id = int(t) + 1;
    return merged;
}

TrajectoryFile track(const Field4D& u, const TrackParams& params) {
    TrajectoryFile file;
    for (const Trajectory& t : track_cells(u, params))
        for (const CellRecord& r : t.records)
            file.points.push_back({t.id, r.frame, double(r.center[0]), double(r.center[1]),
                                   double(r.center[2])});
    return file;
}

}  // namespace subsurf
