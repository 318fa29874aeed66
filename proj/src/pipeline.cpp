#include "candleseg/pipeline.hpp"

#include "candleseg/image_io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <cmath>
#include <sstream>
#include <thread>

namespace candleseg {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, sep);) {
        const auto first = part.find_first_not_of(" \t");
        const auto last = part.find_last_not_of(" \t");
        parts.push_back(first == std::string::npos ? std::string{} : part.substr(first, last - first + 1));
    }
    return parts;
}

ConfigError bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    return ConfigError("invalid value '" + value + "' for key '" + key + "': expected " + expected, key);
}

long long to_integer(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used == value.size()) {
            return v;
        }
    } catch (const std::logic_error&) {
    }
    throw bad_value(key, value, "an integer");
}

int to_int(const std::string& key, const std::string& value) {
    const long long v = to_integer(key, value);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw bad_value(key, value, "a 32-bit integer");
    }
    return static_cast<int>(v);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size() && std::isfinite(v)) {
            return v;
        }
    } catch (const std::logic_error&) {
    }
    throw bad_value(key, value, "a number");
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "on" || value == "yes" || value == "1") return true;
    if (value == "false" || value == "off" || value == "no" || value == "0") return false;
    throw bad_value(key, value, "true or false");
}

std::vector<double> to_doubles(const std::string& key, const std::string& value, std::size_t count) {
    const auto parts = split(value, ',');
    if (parts.size() != count) {
        throw bad_value(key, value, std::to_string(count) + " comma-separated numbers");
    }
    std::vector<double> out;
    for (const auto& p : parts) {
        out.push_back(to_double(key, p));
    }
    return out;
}

std::vector<Region> to_regions(const std::string& key, const std::string& value) {
    std::vector<Region> out;
    for (const auto& part : split(value, ',')) {
        const auto region = parse_region(part);
        if (!region) {
            throw bad_value(key, value, "region names from background, egg, yolk");
        }
        out.push_back(*region);
    }
    return out;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"input", [](PipelineConfig& c, const std::string&, const std::string& v) { c.input = v; }},
        {"output", [](PipelineConfig& c, const std::string&, const std::string& v) { c.output_dir = v; }},
        {"crop",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v.empty() || v == "none") {
                 c.crop.reset();
                 return;
             }
             const auto parts = split(v, ',');
             if (parts.size() != 4) {
                 throw bad_value(k, v, "x0,y0,w,h");
             }
             c.crop = Rect{to_int(k, parts[0]), to_int(k, parts[1]), to_int(k, parts[2]), to_int(k, parts[3])};
         }},
        {"white_point",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v == "d65" || v == "D65") {
                 c.white_point = kD65;
                 return;
             }
             const auto xyz = to_doubles(k, v, 3);
             c.white_point = WhitePoint{xyz[0], xyz[1], xyz[2]};
         }},
        {"k", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.segmentation.k = to_int(k, v); }},
        {"seed",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             const long long s = to_integer(k, v);
             if (s < 0) {
                 throw bad_value(k, v, "a non-negative integer");
             }
             c.segmentation.seed = static_cast<std::uint64_t>(s);
         }},
        {"kmeans_tol",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.segmentation.kmeans.tol = to_double(k, v);
         }},
        {"kmeans_max_iters",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.segmentation.kmeans.max_iters = to_int(k, v);
         }},
        {"feature_mode",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             const auto mode = parse_feature_mode(v);
             if (!mode) {
                 throw bad_value(k, v, "ab or lab");
             }
             c.segmentation.feature_mode = *mode;
         }},
        {"region_rank",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             const auto regions = to_regions(k, v);
             if (regions.size() != 3) {
                 throw bad_value(k, v, "three regions ordered dark to bright");
             }
             std::copy(regions.begin(), regions.end(), c.segmentation.rank_order.begin());
         }},
        {"retain", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.retain = to_regions(k, v); }},
        {"clahe_tiles",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             const auto parts = split(v, 'x');
             if (parts.size() != 2) {
                 throw bad_value(k, v, "<cols>x<rows>");
             }
             c.clahe.tiles_x = to_int(k, parts[0]);
             c.clahe.tiles_y = to_int(k, parts[1]);
         }},
        {"clahe_alpha",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.clahe.clip_alpha = to_double(k, v); }},
        {"clahe_smax",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.clahe.s_max = to_double(k, v); }},
        {"strel", [](PipelineConfig& c, const std::string&, const std::string& v) { c.strel = v; }},
        {"thicken_iterations",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.thicken_iterations = to_int(k, v); }},
        {"canny_sigma",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             c.canny.gaussian_sigma = to_double(k, v);
         }},
        {"canny_low",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.canny.low_ratio = to_double(k, v); }},
        {"canny_high",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.canny.high_ratio = to_double(k, v); }},
        {"min_edge_size",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.canny.min_edge_size = to_int(k, v); }},
        {"ssim_window",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.ssim.window = to_int(k, v); }},
        {"ssim_sigma",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.ssim.sigma = to_double(k, v); }},
        {"ssim_k1", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.ssim.k1 = to_double(k, v); }},
        {"ssim_k2", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.ssim.k2 = to_double(k, v); }},
        {"ssim_exponents",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             const auto e = to_doubles(k, v, 3);
             c.ssim.exp_luminance = e[0];
             c.ssim.exp_contrast = e[1];
             c.ssim.exp_structure = e[2];
         }},
        {"mse_scale",
         [](PipelineConfig& c, const std::string& k, const std::string& v) {
             if (v == "unit") {
                 c.mse_scale = MseScale::unit;
             } else if (v == "byte") {
                 c.mse_scale = MseScale::byte;
             } else {
                 throw bad_value(k, v, "unit or byte");
             }
         }},
        {"stage_he", [](PipelineConfig& c, const std::string& k, const std::string& v) { c.stages.he = to_bool(k, v); }},
        {"stage_clahe",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.stages.clahe = to_bool(k, v); }},
        {"stage_morphology",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.stages.morphology = to_bool(k, v); }},
        {"stage_edges",
         [](PipelineConfig& c, const std::string& k, const std::string& v) { c.stages.edges = to_bool(k, v); }},
    };
    return table;
}

template <typename Body>
auto guarded(const std::string& stage, Body&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

class StageRunner {
public:
    StageRunner(const PipelineConfig& config, StageArtifacts& artifacts) : config_(config), artifacts_(artifacts) {}

    /// Computes a stage, saves `artifact(value)` under the stage's file name and records timing.
    template <typename Body, typename Artifact>
    auto run(const std::string& stage, Body&& body, Artifact&& artifact) {
        const auto start = std::chrono::steady_clock::now();
        auto value = guarded(stage, body);
        const fs::path path = config_.output_dir / artifact_name(stage, config_.segmentation.k);
        guarded(stage, [&] {
            save_image(artifact(value), path);
            return 0;
        });
        const auto elapsed = std::chrono::steady_clock::now() - start;
        artifacts_.stages.push_back({stage, path, std::chrono::duration<double, std::milli>(elapsed).count()});
        return value;
    }

    template <typename Body>
    auto run(const std::string& stage, Body&& body) {
        return run(stage, std::forward<Body>(body), [](const auto& v) -> const auto& { return v; });
    }

private:
    const PipelineConfig& config_;
    StageArtifacts& artifacts_;
};

bool is_image_file(const fs::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

}  // namespace

void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value) {
    const auto& table = setters();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& entry) { return entry.first == key; });
    if (it == table.end()) {
        throw ConfigError("unknown config key '" + key + "'", key);
    }
    it->second(config, key, value);
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& entry : setters()) {
            out.push_back(entry.first);
        }
        return out;
    }();
    return keys;
}

void PipelineConfig::validate() const {
    if (segmentation.k < 2) {
        throw ConfigError("k must be >= 2", "k");
    }
    if (segmentation.kmeans.max_iters < 1) {
        throw ConfigError("kmeans_max_iters must be >= 1", "kmeans_max_iters");
    }
    if (!(segmentation.kmeans.tol >= 0.0)) {
        throw ConfigError("kmeans_tol must be >= 0", "kmeans_tol");
    }
    {
        auto order = segmentation.rank_order;
        std::sort(order.begin(), order.end());
        if (order != kAllRegions) {
            throw ConfigError("region_rank must name background, egg and yolk once each", "region_rank");
        }
    }
    if (retain.empty()) {
        throw ConfigError("retain must name at least one region", "retain");
    }
    white_point.validate();
    clahe.validate();
    parse_strel(strel);
    if (thicken_iterations < 0) {
        throw ConfigError("thicken_iterations must be >= 0", "thicken_iterations");
    }
    canny.validate();
    ssim.validate();
    if (crop && (crop->x0 < 0 || crop->y0 < 0 || crop->w < 1 || crop->h < 1)) {
        throw ConfigError("crop needs non-negative origin and positive extent", "crop");
    }
    if (!input.empty() && !output_dir.empty()) {
        std::error_code ec;
        if (fs::weakly_canonical(input, ec) == fs::weakly_canonical(output_dir, ec)) {
            throw ConfigError("output directory must differ from the input path", "output");
        }
    }
}

PipelineConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": parse error: " + e.msg);
    }
    PipelineConfig config;
    if (root.IsNull()) {
        return config;
    }
    if (!root.IsMap()) {
        throw ConfigError(source + ":" + std::to_string(root.Mark().line + 1) +
                          ": parse error: expected a mapping of key: value settings");
    }
    for (const auto& entry : root) {
        const std::string key = entry.first.as<std::string>();
        const int line = entry.first.Mark().line + 1;
        if (!entry.second.IsScalar() && !entry.second.IsNull()) {
            throw ConfigError(source + ":" + std::to_string(line) + ": value of '" + key + "' must be a scalar", key);
        }
        const std::string value = entry.second.IsNull() ? std::string{} : entry.second.as<std::string>();
        try {
            apply_setting(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(line) + ": " + e.what(), e.key());
        }
    }
    try {
        config.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what(), e.key());
    }
    return config;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(IoErrorKind::file_missing, path, "cannot open config");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

std::vector<std::string> stage_names(int k) {
    std::vector<std::string> names = {"crop", "lab", "cluster_map"};
    for (int i = 1; i <= k; ++i) {
        names.push_back("cluster_" + std::to_string(i));
    }
    for (const char* s : {"color_segmented", "gray", "he", "clahe", "bw", "dilate", "thicken", "edges"}) {
        names.emplace_back(s);
    }
    return names;
}

std::string artifact_name(const std::string& stage, int k) {
    const auto names = stage_names(k);
    const auto it = std::find(names.begin(), names.end(), stage);
    if (it == names.end()) {
        throw ConfigError("unknown stage '" + stage + "'");
    }
    const auto index = static_cast<int>(it - names.begin());
    return (index < 10 ? "0" : "") + std::to_string(index) + "_" + stage + ".png";
}

PipelineResult run_pipeline(const PipelineConfig& config) {
    try {
        config.validate();
        if (config.input.empty()) {
            throw ConfigError("no input image given", "input");
        }
        if (config.output_dir.empty()) {
            throw ConfigError("no output directory given", "output");
        }
    } catch (const ConfigError& e) {
        throw StageError("config", e.what());
    }

    PipelineResult result;
    StageRunner runner(config, result.artifacts);
    const int k = config.segmentation.k;

    const RasterImage loaded = guarded("load", [&] {
        RasterImage image = load_image(config.input);
        std::error_code ec;
        fs::create_directories(config.output_dir, ec);
        if (ec) {
            throw IoError(IoErrorKind::io_failure, config.output_dir, ec.message());
        }
        return image;
    });
    const RasterImage source = config.crop ? runner.run("crop", [&] { return crop(loaded, *config.crop); }) : loaded;

    const LabImage lab = runner.run(
        "lab", [&] { return rgb_to_lab(source, config.white_point); },
        [](const LabImage& image) { return lab_visualization(image); });

    const SegmentationResult seg = runner.run(
        "cluster_map", [&] { return segment_lab(lab, config.segmentation); },
        [](const SegmentationResult& s) { return label_visualization(s.label_map); });
    for (int cluster = 0; cluster < k; ++cluster) {
        runner.run("cluster_" + std::to_string(cluster + 1),
                   [&] { return masked_composite(source, seg.cluster_mask(cluster)); });
    }
    const RasterImage composite =
        runner.run("color_segmented", [&] { return masked_composite(source, region_union(seg, config.retain)); });

    GrayImage enhanced = runner.run("gray", [&] { return rgb_to_gray(composite); });
    if (config.stages.he) {
        enhanced = runner.run("he", [&] { return equalize(enhanced); });
    }
    if (config.stages.clahe) {
        enhanced = runner.run("clahe", [&] { return clahe(enhanced, config.clahe); });
    }

    BinaryMask final_mask = runner.run("bw", [&] { return binarize_otsu(enhanced); });
    if (config.stages.morphology) {
        const Strel strel = parse_strel(config.strel);
        final_mask = runner.run("dilate", [&] { return dilate(final_mask, strel); });
        final_mask = runner.run("thicken", [&] { return thicken(final_mask, config.thicken_iterations); });
        if (config.stages.edges) {
            final_mask = runner.run("edges", [&] { return canny(mask_to_gray(final_mask), config.canny); });
        }
    }

    result.report = guarded("report", [&] {
        const BinaryMask reference = binarize_otsu(rgb_to_gray(source));
        MetricsReport report = evaluate(reference, final_mask, config.ssim, config.mse_scale);
        const fs::path path = config.output_dir / "report.json";
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << to_json(report).dump(2) << "\n";
        if (!out) {
            throw IoError(IoErrorKind::io_failure, path, "cannot write report");
        }
        result.artifacts.stages.push_back({"report", path, 0.0});
        return report;
    });
    return result;
}

namespace {

int batch_threads(std::size_t jobs) {
    unsigned threads = std::max(1U, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("CANDLESEG_THREADS")) {
        const long parsed = std::strtol(cap, nullptr, 10);
        if (parsed >= 1) {
            threads = std::min(threads, static_cast<unsigned>(parsed));
        }
    }
    return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(threads, jobs)));
}

}  // namespace

std::vector<BatchItem> run_batch(const PipelineConfig& config, const fs::path& input_dir) {
    std::error_code ec;
    if (!fs::is_directory(input_dir, ec)) {
        throw StageError("batch", "input directory " + input_dir.string() + " does not exist");
    }
    std::vector<BatchItem> items;
    for (const auto& entry : fs::directory_iterator(input_dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
            items.push_back({entry.path(), std::nullopt, {}});
        }
    }
    std::sort(items.begin(), items.end(), [](const BatchItem& a, const BatchItem& b) { return a.input < b.input; });

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            PipelineConfig job = config;
            job.input = items[i].input;
            job.output_dir = config.output_dir / items[i].input.stem();
            try {
                items[i].result = run_pipeline(job);
            } catch (const std::exception& e) {
                items[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int threads = batch_threads(items.size());
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    return items;
}

}  // namespace candleseg
