#include "candleseg/cli.hpp"

#include "candleseg/image_io.hpp"
#include "candleseg/phantom.hpp"
#include "candleseg/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>

namespace candleseg {

namespace {

namespace fs = std::filesystem;

/// Command-line flags that map one-to-one onto config keys.
class SettingFlags {
public:
    void add(CLI::App* app, const std::string& key, const std::string& help) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        app->add_option(flag, values_[key], help);
    }

    void apply(PipelineConfig& config) const {
        for (const auto& [key, value] : values_) {
            if (value) {
                apply_setting(config, key, *value);
            }
        }
    }

private:
    std::map<std::string, std::optional<std::string>> values_;
};

void add_segmentation_flags(SettingFlags& flags, CLI::App* app) {
    flags.add(app, "k", "number of clusters (default 3)");
    flags.add(app, "seed", "k-means seed (default 42)");
    flags.add(app, "kmeans_tol", "centroid displacement tolerance (default 1e-4)");
    flags.add(app, "kmeans_max_iters", "iteration cap (default 100)");
    flags.add(app, "feature_mode", "lab or ab (default lab)");
    flags.add(app, "region_rank", "regions from darkest to brightest cluster (default background,yolk,egg)");
    flags.add(app, "retain", "regions kept in the color composite (default yolk)");
    flags.add(app, "white_point", "d65 or X,Y,Z");
}

void add_clahe_flags(SettingFlags& flags, CLI::App* app) {
    flags.add(app, "clahe_tiles", "tile grid <cols>x<rows> (default 8x8)");
    flags.add(app, "clahe_alpha", "clip factor in [0,100] (default 40)");
    flags.add(app, "clahe_smax", "maximum slope (default 4)");
}

void add_canny_flags(SettingFlags& flags, CLI::App* app) {
    flags.add(app, "canny_sigma", "Gaussian sigma (default 1.4)");
    flags.add(app, "canny_low", "low threshold ratio (default 0.10)");
    flags.add(app, "canny_high", "high threshold ratio (default 0.25)");
    flags.add(app, "min_edge_size", "smallest kept edge component in pixels (default 4)");
}

void add_metrics_flags(SettingFlags& flags, CLI::App* app) {
    flags.add(app, "mse_scale", "unit or byte (default unit)");
    flags.add(app, "ssim_window", "Gaussian window side (default 11)");
    flags.add(app, "ssim_sigma", "Gaussian window sigma (default 1.5)");
    flags.add(app, "ssim_exponents", "luminance,contrast,structure exponents (default 1,1,1)");
}

/// Loads any supported file as grayscale; color pixels go through the luma weights.
GrayImage load_as_gray(const fs::path& path) {
    const RasterImage image = load_image(path);
    const bool gray = std::all_of(image.pixels().begin(), image.pixels().end(),
                                  [](const Rgb& p) { return p.r == p.g && p.g == p.b; });
    if (!gray) {
        return rgb_to_gray(image);
    }
    std::vector<std::uint8_t> out(image.size());
    std::transform(image.pixels().begin(), image.pixels().end(), out.begin(), [](const Rgb& p) { return p.r; });
    return GrayImage(image.width(), image.height(), std::move(out));
}

void print_stages(const PipelineResult& result, std::ostream& out) {
    for (const StageRecord& s : result.artifacts.stages) {
        out << std::left << std::setw(16) << s.stage << std::right << std::setw(10) << std::fixed
            << std::setprecision(1) << s.wall_ms << " ms  " << s.path.string() << "\n";
    }
    out.unsetf(std::ios::floatfield);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Egg candling segmentation: Lab k-means, enhancement, morphology and quality metrics"};
    app.name("candleseg");
    app.require_subcommand(1);
    app.fallthrough(false);

    // pipeline
    std::optional<std::string> pipeline_input;
    std::optional<std::string> pipeline_output;
    std::optional<std::string> config_path;
    std::optional<std::string> batch_dir;
    std::vector<std::string> overrides;
    SettingFlags pipeline_flags;
    auto* pipeline = app.add_subcommand("pipeline", "run every stage and write NN_<stage>.png artifacts plus report.json");
    pipeline->add_option("input", pipeline_input, "input PNG/PNM image");
    pipeline->add_option("-o,--output", pipeline_output, "output directory");
    pipeline->add_option("-c,--config", config_path, "YAML config file (flat key: value)");
    pipeline->add_option("--batch", batch_dir, "process every image in this directory into <output>/<stem>/");
    pipeline->add_option("--set", overrides, "extra key=value config overrides");
    pipeline_flags.add(pipeline, "crop", "x0,y0,w,h crop rectangle (width x height order)");
    add_segmentation_flags(pipeline_flags, pipeline);
    add_clahe_flags(pipeline_flags, pipeline);
    pipeline_flags.add(pipeline, "strel", "dilation element line:<len>:<deg> or square:<side> (default line:1:45)");
    pipeline_flags.add(pipeline, "thicken_iterations", "thickening passes (default 1)");
    add_canny_flags(pipeline_flags, pipeline);
    add_metrics_flags(pipeline_flags, pipeline);

    // lab
    std::string lab_input;
    std::string lab_output;
    SettingFlags lab_flags;
    auto* lab = app.add_subcommand("lab", "convert to CIELAB and write the packed L/a/b visualization");
    lab->add_option("input", lab_input, "input image")->required();
    lab->add_option("-o,--output", lab_output, "output image")->required();
    lab_flags.add(lab, "white_point", "d65 or X,Y,Z");
    lab_flags.add(lab, "crop", "x0,y0,w,h crop rectangle");

    // segment
    std::string seg_input;
    std::string seg_output;
    SettingFlags seg_flags;
    auto* segment = app.add_subcommand("segment", "k-means on Lab features; writes cluster map, clusters, composite");
    segment->add_option("input", seg_input, "input image")->required();
    segment->add_option("-o,--output", seg_output, "output directory")->required();
    add_segmentation_flags(seg_flags, segment);
    seg_flags.add(segment, "crop", "x0,y0,w,h crop rectangle");

    // gray
    std::string gray_input;
    std::string gray_output;
    auto* gray = app.add_subcommand("gray", "weighted grayscale conversion");
    gray->add_option("input", gray_input, "input image")->required();
    gray->add_option("-o,--output", gray_output, "output image")->required();

    // enhance
    std::string enh_input;
    std::string enh_output;
    std::string enh_method = "he+clahe";
    SettingFlags enh_flags;
    auto* enhance = app.add_subcommand("enhance", "histogram equalization and/or CLAHE");
    enhance->add_option("input", enh_input, "grayscale input")->required();
    enhance->add_option("-o,--output", enh_output, "output image")->required();
    enhance->add_option("--method", enh_method, "he, clahe or he+clahe")
        ->check(CLI::IsMember({"he", "clahe", "he+clahe"}))
        ->capture_default_str();
    add_clahe_flags(enh_flags, enhance);

    // morph
    std::string morph_input;
    std::string morph_output;
    std::string morph_op = "bw";
    SettingFlags morph_flags;
    auto* morph = app.add_subcommand("morph", "Otsu binarization, dilation or thickening");
    morph->add_option("input", morph_input, "grayscale image (bw) or mask, nonzero = foreground (dilate, thicken)")
        ->required();
    morph->add_option("-o,--output", morph_output, "output mask")->required();
    morph->add_option("--op", morph_op, "bw, dilate or thicken")
        ->check(CLI::IsMember({"bw", "dilate", "thicken"}))
        ->capture_default_str();
    morph_flags.add(morph, "strel", "line:<len>:<deg> or square:<side> (default line:1:45)");
    morph_flags.add(morph, "thicken_iterations", "thickening passes (default 1)");

    // edges
    std::string edge_input;
    std::string edge_output;
    SettingFlags edge_flags;
    auto* edges = app.add_subcommand("edges", "Canny edge detection");
    edges->add_option("input", edge_input, "grayscale image or mask")->required();
    edges->add_option("-o,--output", edge_output, "output mask")->required();
    add_canny_flags(edge_flags, edges);

    // metrics
    std::string met_a;
    std::string met_b;
    std::optional<std::string> met_output;
    SettingFlags met_flags;
    auto* metrics = app.add_subcommand("metrics", "MSE and SSIM between two images; prints the JSON report");
    metrics->add_option("reference", met_a, "first image")->required();
    metrics->add_option("test", met_b, "second image")->required();
    metrics->add_option("-o,--output", met_output, "also write the report to this file");
    add_metrics_flags(met_flags, metrics);

    // phantom
    PhantomOptions phantom_opts;
    std::string phantom_output;
    std::optional<std::string> truth_dir;
    auto* phantom = app.add_subcommand("phantom", "write the synthetic egg phantom");
    phantom->add_option("-o,--output", phantom_output, "output image")->required();
    phantom->add_option("--width", phantom_opts.width, "width in pixels")->capture_default_str();
    phantom->add_option("--height", phantom_opts.height, "height in pixels")->capture_default_str();
    phantom->add_option("--seed", phantom_opts.seed, "noise and vessel seed")->capture_default_str();
    phantom->add_option("--noise", phantom_opts.noise, "per-channel noise amplitude")->capture_default_str();
    phantom->add_option("--truth-dir", truth_dir, "also write background/egg/yolk ground-truth masks here");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return kExitUsage;
    }

    try {
        if (pipeline->parsed()) {
            PipelineConfig config = config_path ? load_config(*config_path) : PipelineConfig{};
            if (pipeline_input) config.input = *pipeline_input;
            if (pipeline_output) config.output_dir = *pipeline_output;
            pipeline_flags.apply(config);
            for (const std::string& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    throw ConfigError("--set expects key=value, got '" + kv + "'");
                }
                apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (batch_dir) {
                if (config.output_dir.empty()) {
                    throw StageError("config", "batch mode needs --output");
                }
                int failures = 0;
                for (const BatchItem& item : run_batch(config, *batch_dir)) {
                    if (item.result) {
                        out << item.input.string() << ": mse=" << item.result->report.mse
                            << " mssim=" << item.result->report.mssim << "\n";
                    } else {
                        err << "error: " << item.input.string() << ": " << item.error << "\n";
                        ++failures;
                    }
                }
                return failures == 0 ? kExitOk : kExitProcessing;
            }
            const PipelineResult result = run_pipeline(config);
            print_stages(result, out);
            out << to_json(result.report).dump(2) << "\n";
        } else if (lab->parsed()) {
            PipelineConfig config;
            lab_flags.apply(config);
            RasterImage image = load_image(lab_input);
            if (config.crop) image = crop(image, *config.crop);
            save_image(lab_visualization(rgb_to_lab(image, config.white_point)), lab_output);
        } else if (segment->parsed()) {
            PipelineConfig config;
            seg_flags.apply(config);
            config.validate();
            RasterImage image = load_image(seg_input);
            if (config.crop) image = crop(image, *config.crop);
            const SegmentationResult seg = segment_lab(rgb_to_lab(image, config.white_point), config.segmentation);
            const int k = config.segmentation.k;
            const fs::path dir = seg_output;
            fs::create_directories(dir);
            save_image(label_visualization(seg.label_map), dir / artifact_name("cluster_map", k));
            for (int c = 0; c < k; ++c) {
                const std::string stage = "cluster_" + std::to_string(c + 1);
                save_image(masked_composite(image, seg.cluster_mask(c)), dir / artifact_name(stage, k));
            }
            save_image(masked_composite(image, region_union(seg, config.retain)), dir / artifact_name("color_segmented", k));
            for (int c = 0; c < k; ++c) {
                out << "cluster " << c + 1 << ": " << to_string(seg.cluster_region[static_cast<std::size_t>(c)])
                    << " (mean L* " << seg.cluster_mean_l[static_cast<std::size_t>(c)] << ")\n";
            }
            out << "iterations: " << seg.model.iterations << (seg.model.converged ? " (converged)" : "") << "\n";
        } else if (gray->parsed()) {
            save_image(rgb_to_gray(load_image(gray_input)), gray_output);
        } else if (enhance->parsed()) {
            PipelineConfig config;
            enh_flags.apply(config);
            GrayImage image = load_as_gray(enh_input);
            if (enh_method == "he" || enh_method == "he+clahe") image = equalize(image);
            if (enh_method == "clahe" || enh_method == "he+clahe") image = clahe(image, config.clahe);
            save_image(image, enh_output);
        } else if (morph->parsed()) {
            PipelineConfig config;
            morph_flags.apply(config);
            config.validate();
            const GrayImage image = load_as_gray(morph_input);
            if (morph_op == "bw") {
                save_image(binarize_otsu(image), morph_output);
            } else if (morph_op == "dilate") {
                save_image(dilate(gray_to_mask(image), parse_strel(config.strel)), morph_output);
            } else {
                save_image(thicken(gray_to_mask(image), config.thicken_iterations), morph_output);
            }
        } else if (edges->parsed()) {
            PipelineConfig config;
            edge_flags.apply(config);
            save_image(canny(load_as_gray(edge_input), config.canny), edge_output);
        } else if (metrics->parsed()) {
            PipelineConfig config;
            met_flags.apply(config);
            const MetricsReport report =
                evaluate(load_as_gray(met_a), load_as_gray(met_b), config.ssim, config.mse_scale);
            const std::string json = to_json(report).dump(2);
            out << json << "\n";
            if (met_output) {
                std::ofstream file(*met_output, std::ios::binary | std::ios::trunc);
                file << json << "\n";
                if (!file) {
                    throw IoError(IoErrorKind::io_failure, *met_output, "cannot write report");
                }
            }
        } else if (phantom->parsed()) {
            const EggPhantom egg = make_egg_phantom(phantom_opts);
            save_image(egg.image, phantom_output);
            if (truth_dir) {
                const fs::path dir = *truth_dir;
                fs::create_directories(dir);
                save_image(egg.background, dir / "truth_background.png");
                save_image(egg.egg, dir / "truth_egg.png");
                save_image(egg.yolk, dir / "truth_yolk.png");
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitProcessing;
    }
    return kExitOk;
}

}  // namespace candleseg
