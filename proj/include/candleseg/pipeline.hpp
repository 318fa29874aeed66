#pragma once

#include "candleseg/canny.hpp"
#include "candleseg/colorspace.hpp"
#include "candleseg/enhance.hpp"
#include "candleseg/metrics.hpp"
#include "candleseg/morphology.hpp"
#include "candleseg/segmentation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace candleseg {

struct StageToggles {
    bool he = true;
    bool clahe = true;
    /// Dilation, thickening and edge detection.
    bool morphology = true;
    bool edges = true;
};

struct PipelineConfig {
    std::filesystem::path input;
    std::filesystem::path output_dir;
    std::optional<Rect> crop;
    WhitePoint white_point = kD65;
    SegmentationOptions segmentation;
    /// Regions whose source pixels survive into the color-segmented composite.
    std::vector<Region> retain = {Region::yolk};
    ClaheParams clahe;
    std::string strel = "line:1:45";
    int thicken_iterations = 1;
    CannyParams canny;
    SsimParams ssim;
    MseScale mse_scale = MseScale::unit;
    StageToggles stages;

    /// Throws ConfigError naming the first offending key.
    void validate() const;
};

/// Applies one `key = value` setting; throws ConfigError for unknown keys or bad values.
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value);

/// Every key accepted by apply_setting, in documentation order.
const std::vector<std::string>& config_keys();

/**
 * Parses a flat YAML mapping of scalar settings on top of the defaults.
 * Syntax errors carry the line number; unknown keys are rejected.
 */
PipelineConfig parse_config(const std::string& text, const std::string& source = "<config>");
PipelineConfig load_config(const std::filesystem::path& path);

struct StageRecord {
    std::string stage;
    std::filesystem::path path;
    double wall_ms = 0.0;
};

struct StageArtifacts {
    std::vector<StageRecord> stages;
};

/// Stage names in execution order for a given cluster count.
std::vector<std::string> stage_names(int k);

/// "NN_<stage>.png" with the stage's fixed position in stage_names(k).
std::string artifact_name(const std::string& stage, int k);

struct PipelineResult {
    StageArtifacts artifacts;
    MetricsReport report;
};

/// Runs every enabled stage, writing artifacts and report.json into config.output_dir.
/// Failures surface as StageError tagged with the failing stage.
PipelineResult run_pipeline(const PipelineConfig& config);

struct BatchItem {
    std::filesystem::path input;
    std::optional<PipelineResult> result;
    std::string error;
};

/// Runs the pipeline for every PNG/PNM file in `input_dir`, each into output_dir/<stem>/.
/// Parallelism is capped by CANDLESEG_THREADS when set.
std::vector<BatchItem> run_batch(const PipelineConfig& config, const std::filesystem::path& input_dir);

}  // namespace candleseg
