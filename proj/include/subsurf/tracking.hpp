#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "subsurf/grid.hpp"
#include "subsurf/io.hpp"

namespace subsurf {

// Per-frame binary volumes, 0-based voxel indexing, x fastest.
struct MaskFrames {
    int n1 = 0, n2 = 0, n3 = 0;
    std::vector<std::vector<std::uint8_t>> frames;

    std::size_t voxel(int x, int y, int z) const {
        return (std::size_t(z) * n2 + y) * n1 + x;
    }
    std::size_t frame_size() const { return std::size_t(n1) * n2 * n3; }
};

// Integer labels per voxel, 0 = background. Labels within a frame are
// 1..k ordered by decreasing voxel count; each region is 26-connected.
struct LabelField {
    int n1 = 0, n2 = 0, n3 = 0;
    std::vector<std::vector<std::int32_t>> frames;
    std::vector<int> labels_per_frame;

    std::size_t voxel(int x, int y, int z) const {
        return (std::size_t(z) * n2 + y) * n1 + x;
    }
    std::size_t frame_size() const { return std::size_t(n1) * n2 * n3; }
};

struct CellRecord {
    int frame = 0;  // 0-based
    int label = 0;
    std::array<int, 3> center{};  // voxel coordinates
    int max_distance = 0;         // 26-neighborhood BFS distance to background
    std::size_t voxel_count = 0;
};

struct Trajectory {
    int id = 0;
    std::vector<CellRecord> records;  // frames strictly increasing
};

struct TrackParams {
    double level = 0.5;  // closed superlevel set u >= level is foreground
    int window = 3;      // prolongation window in frames
    double radius = 5.0; // merge neighborhood in voxels
};

MaskFrames extract_mask(const Field4D& u, double level = 0.5);

MaskFrames mask_from_labels(const LabelField& labels);  // foreground = labeled

LabelField label_components(const MaskFrames& mask);

// 26-neighborhood unit-cost distance from the nearest background voxel
// (outside the volume counts as background); one record per label with the
// max-distance voxel as center, ties broken by smallest linear index.
std::vector<CellRecord> distance_centers(const LabelField& labels);

// Backward-in-time linking: project each cell center to the previous frame,
// fall back to the overlap region's distance center, stop when neither
// applies. Cells claim predecessors in decreasing-size order, one each.
std::vector<Trajectory> backtrack_link(const std::vector<CellRecord>& records,
                                       const LabelField& labels);

// Concatenates partial trajectories whose one-sided tangent prolongation
// (up to `window` frames) lands within `radius` of another partial's
// opposite endpoint; greedy by smallest gap, each endpoint used once.
std::vector<Trajectory> prolong_and_merge(std::vector<Trajectory> partials, int window,
                                          double radius);

// Full pipeline; trajectory ids are assigned in (first frame, first center)
// order for reproducible output.
std::vector<Trajectory> track_cells(const Field4D& u, const TrackParams& params = {});
TrajectoryFile track(const Field4D& u, const TrackParams& params = {});

}  // namespace subsurf
