#include "subsurf/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace subsurf {

static_assert(std::endian::native == std::endian::little,
              "raw image format assumes a little-endian host");

GridSpec ImageHeader::grid_spec() const {
    return GridSpec(dims[0], dims[1], dims[2], dims[3], spacing[0], spacing[1], spacing[2],
                    spacing[3]);
}

ImageHeader read_image_header(const std::string& header_path) {
    std::ifstream in(header_path);
    if (!in) throw IoError("cannot open image header: " + header_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad image header " + header_path + ": " + e.what());
    }
    ImageHeader h;
    try {
        auto dims = j.at("dims");
        auto spacing = j.at("spacing");
        if (dims.size() != 4 || spacing.size() != 4)
            throw FormatError("image header needs 4 dims and 4 spacings: " + header_path);
        for (int a = 0; a < 4; ++a) {
            h.dims[a] = dims.at(a).get<int>();
            h.spacing[a] = spacing.at(a).get<double>();
        }
        h.dtype = j.at("dtype").get<std::string>();
        h.order = j.at("order").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad image header " + header_path + ": " + e.what());
    }
    if (h.dtype != "f32le") throw FormatError("unsupported dtype \"" + h.dtype + "\"");
    if (h.order != "i-fastest") throw FormatError("unsupported order \"" + h.order + "\"");
    for (int a = 0; a < 4; ++a) {
        if (h.dims[a] < 1) throw FormatError("non-positive dim in header: " + header_path);
        if (!(h.spacing[a] > 0.0)) throw FormatError("non-positive spacing: " + header_path);
    }
    return h;
}

void write_image_header(const ImageHeader& header, const std::string& header_path) {
    nlohmann::json j;
    j["dims"] = header.dims;
    j["spacing"] = header.spacing;
    j["dtype"] = header.dtype;
    j["order"] = header.order;
    std::ofstream out(header_path);
    if (!out) throw IoError("cannot write image header: " + header_path);
    out << j.dump(2) << "\n";
}

Field4D read_image4d(const std::string& header_path, const std::string& data_path) {
    const ImageHeader header = read_image_header(header_path);
    const GridSpec spec = header.grid_spec();

    std::ifstream in(data_path, std::ios::binary);
    if (!in) throw IoError("cannot open image data: " + data_path);
    in.seekg(0, std::ios::end);
    const std::size_t bytes = std::size_t(in.tellg());
    in.seekg(0);

    const std::size_t expected = spec.interior_size() * sizeof(float);
    if (bytes != expected)
        throw FormatError("image data " + data_path + ": payload is " + std::to_string(bytes) +
                          " bytes, header implies " + std::to_string(expected));

    std::vector<float> buf(spec.interior_size());
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(expected));
    if (!in) throw IoError("short read on " + data_path);

    Field4D field(spec, 0.0);
    std::size_t n = 0;
    for (int l = 1; l <= spec.n4; ++l)
        for (int k = 1; k <= spec.n3; ++k)
            for (int j = 1; j <= spec.n2; ++j)
                for (int i = 1; i <= spec.n1; ++i) {
                    const float v = buf[n++];
                    if (!std::isfinite(v))
                        throw NumericalError("non-finite sample in " + data_path);
                    field.at(i, j, k, l) = double(v);
                }
    return field;
}

void write_image4d(const Field4D& field, const std::string& header_path,
                   const std::string& data_path) {
    const GridSpec& spec = field.spec();
    ImageHeader header;
    header.dims = {spec.n1, spec.n2, spec.n3, spec.n4};
    header.spacing = {spec.h1, spec.h2, spec.h3, spec.h4};
    write_image_header(header, header_path);

    std::vector<float> buf;
    buf.reserve(spec.interior_size());
    for (int l = 1; l <= spec.n4; ++l)
        for (int k = 1; k <= spec.n3; ++k)
            for (int j = 1; j <= spec.n2; ++j)
                for (int i = 1; i <= spec.n1; ++i) buf.push_back(float(field.at(i, j, k, l)));

    std::ofstream out(data_path, std::ios::binary);
    if (!out) throw IoError("cannot write image data: " + data_path);
    out.write(reinterpret_cast<const char*>(buf.data()),
              std::streamsize(buf.size() * sizeof(float)));
    if (!out) throw IoError("short write on " + data_path);
}

std::vector<CenterRow> CentersTable::for_frame(int frame) const {
    std::vector<CenterRow> out;
    for (const CenterRow& r : rows)
        if (r.frame == frame) out.push_back(r);
    return out;
}

void validate_centers(const CentersTable& table, const GridSpec& spec) {
    for (std::size_t n = 0; n < table.rows.size(); ++n) {
        const CenterRow& r = table.rows[n];
        const std::string where = "centers row " + std::to_string(n + 1);
        if (r.frame < 0 || r.frame >= spec.n4)
            throw ValidationError(where + ": frame " + std::to_string(r.frame) +
                                  " out of range [0," + std::to_string(spec.n4 - 1) + "]");
        if (!(r.radius > 0.0)) throw ValidationError(where + ": radius must be > 0");
        if (r.x < 0.0 || r.x > spec.n1 - 1 || r.y < 0.0 || r.y > spec.n2 - 1 || r.z < 0.0 ||
            r.z > spec.n3 - 1)
            throw ValidationError(where + ": center outside volume bounds");
    }
}

CentersTable read_centers(const std::string& path, const GridSpec& spec) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open centers file: " + path);

    CentersTable table;
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (first && line.rfind("frame", 0) == 0) {
            first = false;
            continue;  // header line
        }
        first = false;
        std::istringstream ss(line);
        CenterRow r;
        char c1, c2, c3, c4;
        if (!(ss >> r.frame >> c1 >> r.x >> c2 >> r.y >> c3 >> r.z >> c4 >> r.radius) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',')
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected frame,x,y,z,radius");
        table.rows.push_back(r);
    }
    validate_centers(table, spec);
    return table;
}

void write_trajectories(const TrajectoryFile& trajectories, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trajectories: " + path);
    out << "trajectory_id,frame,x,y,z\n";
    for (const TrajectoryPoint& p : trajectories.points)
        out << p.trajectory_id << ',' << p.frame << ',' << p.x << ',' << p.y << ',' << p.z << "\n";
    if (!out) throw IoError("short write on " + path);
}

TrajectoryFile read_trajectories(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trajectories: " + path);
    TrajectoryFile t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.rfind("trajectory_id", 0) == 0) continue;
        std::istringstream ss(line);
        TrajectoryPoint p;
        char c1, c2, c3, c4;
        if (!(ss >> p.trajectory_id >> c1 >> p.frame >> c2 >> p.x >> c3 >> p.y >> c4 >> p.z))
            throw FormatError(path + ":" + std::to_string(lineno) + ": bad trajectory row");
        t.points.push_back(p);
    }
    return t;
}

void export_frame_vtk(const Field4D& field, int l, const std::string& path) {
    const GridSpec& spec = field.spec();
    if (l < 1 || l > spec.n4)
        throw std::out_of_range("export_frame_vtk: frame " + std::to_string(l) +
                                " outside [1," + std::to_string(spec.n4) + "]");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write VTK file: " + path);
    out << "# vtk DataFile Version 3.0\n";
    out << "frame " << l << "\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << spec.n1 << ' ' << spec.n2 << ' ' << spec.n3 << "\n";
    out << "ORIGIN 0 0 0\n";
    out << "SPACING " << spec.h1 << ' ' << spec.h2 << ' ' << spec.h3 << "\n";
    out << "POINT_DATA " << spec.frame_interior_size() << "\n";
    out << "SCALARS u float 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int k = 1; k <= spec.n3; ++k)
        for (int j = 1; j <= spec.n2; ++j) {
            for (int i = 1; i <= spec.n1; ++i) {
                out << float(field.at(i, j, k, l));
                out << (i == spec.n1 ? '\n' : ' ');
            }
        }
    if (!out) throw IoError("short write on " + path);
}

}  // namespace subsurf
