#include "subsurf/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "subsurf/eoc.hpp"
#include "subsurf/solver.hpp"
#include "subsurf/tracking.hpp"

namespace subsurf {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Config {
public:
    Config() = default;
    explicit Config(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw ValidationError("config: missing required key \"" + key + "\"");
        return it->second;
    }
    std::string str_or(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }
    double num(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw ValidationError("config: key \"" + key + "\" is not a number: " + it->second);
        }
    }
    int integer(const std::string& key, int fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            return std::stoi(it->second);
        } catch (const std::exception&) {
            throw ValidationError("config: key \"" + key + "\" is not an integer: " + it->second);
        }
    }
    bool boolean(const std::string& key, bool fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        const std::string& v = it->second;
        if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
        if (v == "0" || v == "false" || v == "no" || v == "off") return false;
        throw ValidationError("config: key \"" + key + "\" is not a boolean: " + v);
    }

private:
    std::map<std::string, std::string> kv_;
};

SegmentationParams segmentation_params(const Config& cfg, const GridSpec& spec, int workers) {
    SegmentationParams p;
    p.solver.tau = cfg.num("tau", 1.0);
    const double h = spec.common_h().value_or(spec.h1);
    p.solver.epsilon = cfg.num("epsilon", h * h);
    p.solver.omega = cfg.num("omega", 1.85);
    p.solver.sor_tol = cfg.num("sor_tol", 1e-8);
    p.solver.sor_max_iter = cfg.integer("sor_max_iter", 10000);
    p.solver.n_steps = cfg.integer("n_steps", 10);
    p.solver.rescale_each_step = cfg.boolean("rescale_each_step", true);

    p.smoothing.sigma = cfg.num("sigma", 0.0);
    p.smoothing.steps = cfg.integer("smooth_steps", 1);

    p.threshold.lambda = cfg.num("lambda", 0.5);
    p.threshold.background = cfg.num("background", 0.0);

    p.edge.K = cfg.num("K", 1.0);
    p.edge.delta = cfg.num("delta", 1.0);
    p.edge.vartheta = cfg.num("vartheta", 0.0);

    p.init.v = cfg.num("init_v", 1.0);
    p.init.R = cfg.num("init_R", 10.0);
    const std::string profile = cfg.str_or("init_profile", "peak");
    if (profile == "peak")
        p.init.profile = InitProfile::peak;
    else if (profile == "linear")
        p.init.profile = InitProfile::linear;
    else
        throw ValidationError("config: init_profile must be peak or linear, got " + profile);

    if (cfg.has("rescale_radius")) p.rescale_radius = cfg.num("rescale_radius", 0.0);
    p.workers = workers;
    return p;
}

int clamped_workers(int requested, int n4) {
    const int w = Partition::clamp_workers(n4, requested);
    if (w != requested)
        std::cerr << "note: " << requested << " workers cannot tile " << n4
                  << " time slices; using " << w << "\n";
    return w;
}

int cmd_segment(const std::string& config_path, int workers, const std::string& output_override) {
    const Config cfg(parse_config_file(config_path));
    const Field4D image = read_image4d(cfg.str("input_header"), cfg.str("input_data"));
    const CentersTable centers = read_centers(cfg.str("centers"), image.spec());

    const int w = clamped_workers(workers > 0 ? workers : cfg.integer("workers", 1),
                                  image.spec().n4);
    const SegmentationParams params = segmentation_params(cfg, image.spec(), w);

    const std::string output =
        output_override.empty() ? cfg.str("output") : output_override;
    const Field4D u = segment(image, centers, params, &std::cerr);
    write_image4d(u, output + ".json", output + ".raw");

    if (cfg.boolean("export_vtk", false))
        for (int l = 1; l <= image.spec().n4; ++l)
            export_frame_vtk(u, l, output + "_f" + std::to_string(l - 1) + ".vtk");
    return 0;
}

int cmd_threshold_preview(const std::string& config_path, const std::string& output_override) {
    const Config cfg(parse_config_file(config_path));
    const Field4D image = read_image4d(cfg.str("input_header"), cfg.str("input_data"));
    const CentersTable centers = read_centers(cfg.str("centers"), image.spec());

    ThresholdParams params;
    params.lambda = cfg.num("lambda", 0.5);
    params.background = cfg.num("background", 0.0);
    const Field4D out = local_threshold(image, centers, params);

    const std::string output =
        output_override.empty() ? cfg.str("output") : output_override;
    write_image4d(out, output + ".json", output + ".raw");
    return 0;
}

int cmd_eoc(int max_n, int workers) {
    EocConfig cfg;
    cfg.workers = workers;
    const ErrorReport report = run_eoc(max_n, cfg);
    print_report(report, std::cout);
    return 0;
}

int cmd_track(const std::string& config_path, const std::string& output_override) {
    const Config cfg(parse_config_file(config_path));
    const Field4D u = read_image4d(cfg.str("input_header"), cfg.str("input_data"));

    TrackParams params;
    params.level = cfg.num("level", 0.5);
    params.window = cfg.integer("window", 3);
    params.radius = cfg.num("radius", 5.0);

    const std::string output =
        output_override.empty() ? cfg.str("output") : output_override;
    write_trajectories(track(u, params), output);

    if (cfg.has("vtk_prefix")) {
        const LabelField labels = label_components(extract_mask(u, params.level));
        const GridSpec& spec = u.spec();
        Field4D label_field(spec, 0.0);
        for (int l = 1; l <= spec.n4; ++l)
            for (int k = 1; k <= spec.n3; ++k)
                for (int j = 1; j <= spec.n2; ++j)
                    for (int i = 1; i <= spec.n1; ++i)
                        label_field.at(i, j, k, l) =
                            double(labels.frames[l - 1][labels.voxel(i - 1, j - 1, k - 1)]);
        for (int l = 1; l <= spec.n4; ++l)
            export_frame_vtk(label_field, l,
                             cfg.str("vtk_prefix") + "_f" + std::to_string(l - 1) + ".vtk");
    }
    return 0;
}

}  // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw FormatError(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"4D (3D+time) image segmentation with the generalized "
                 "subjective-surface model, plus EOC verification and cell tracking"};
    app.require_subcommand(1);

    std::string config_path, output_override;
    int workers = 0;
    int max_n = 40;

    CLI::App* seg = app.add_subcommand("segment", "run the 4D segmentation pipeline");
    seg->add_option("--config", config_path, "key = value config file")->required();
    seg->add_option("--workers", workers, "worker threads (default: config key workers, else 1)");
    seg->add_option("--output", output_override, "output path prefix (overrides config)");

    CLI::App* eoc = app.add_subcommand("eoc", "grid-refinement verification table");
    eoc->add_option("--max-n", max_n, "largest grid size; one of 10, 20, 40, 80, 160")
        ->default_val(40);
    eoc->add_option("--workers", workers, "worker threads")->default_val(1);

    CLI::App* thr = app.add_subcommand("threshold-preview",
                                       "write the locally thresholded image and exit");
    thr->add_option("--config", config_path, "key = value config file")->required();
    thr->add_option("--output", output_override, "output path prefix (overrides config)");

    CLI::App* trk = app.add_subcommand("track", "extract cell trajectories from a segmentation");
    trk->add_option("--config", config_path, "key = value config file")->required();
    trk->add_option("--output", output_override, "trajectory CSV path (overrides config)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (seg->parsed()) return cmd_segment(config_path, workers, output_override);
        if (eoc->parsed()) return cmd_eoc(max_n, std::max(workers, 1));
        if (thr->parsed()) return cmd_threshold_preview(config_path, output_override);
        if (trk->parsed()) return cmd_track(config_path, output_override);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace subsurf
