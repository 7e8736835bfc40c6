#pragma once

#include <array>
#include <string>
#include <vector>

#include "subsurf/grid.hpp"

namespace subsurf {

// Sidecar header for the raw 4D image format.
struct ImageHeader {
    std::array<int, 4> dims{};       // n1..n4
    std::array<double, 4> spacing{};
    std::string dtype = "f32le";
    std::string order = "i-fastest";

    GridSpec grid_spec() const;
};

// One seed per row: frame is the 0-based time index (l - 1); x,y,z are
// 0-based doxel coordinates within the frame; radius is in doxel units.
struct CenterRow {
    int frame = 0;
    double x = 0.0, y = 0.0, z = 0.0;
    double radius = 0.0;
};

struct CentersTable {
    std::vector<CenterRow> rows;

    std::vector<CenterRow> for_frame(int frame) const;
    bool empty() const { return rows.empty(); }
};

struct TrajectoryPoint {
    int trajectory_id = 0;
    int frame = 0;
    double x = 0.0, y = 0.0, z = 0.0;
};

struct TrajectoryFile {
    std::vector<TrajectoryPoint> points;  // frames strictly increasing per id
};

ImageHeader read_image_header(const std::string& header_path);
void write_image_header(const ImageHeader& header, const std::string& header_path);

// Interior filled in i-fastest order, ghosts zeroed. Throws FormatError on a
// payload length mismatch; NumericalError on non-finite samples.
Field4D read_image4d(const std::string& header_path, const std::string& data_path);

// Interior serialized as little-endian 32-bit floats, i fastest.
void write_image4d(const Field4D& field, const std::string& header_path,
                   const std::string& data_path);

// CSV with header line "frame,x,y,z,radius". Rows are validated against the
// grid: frame in range, center inside the volume, radius > 0.
CentersTable read_centers(const std::string& path, const GridSpec& spec);
void validate_centers(const CentersTable& table, const GridSpec& spec);

void write_trajectories(const TrajectoryFile& trajectories, const std::string& path);
TrajectoryFile read_trajectories(const std::string& path);

// Legacy ASCII STRUCTURED_POINTS file holding the n1 x n2 x n3 scalars of
// interior frame l (1-based).
void export_frame_vtk(const Field4D& field, int l, const std::string& path);

}  // namespace subsurf
