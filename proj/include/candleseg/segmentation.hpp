#pragma once

#include "candleseg/colorspace.hpp"
#include "candleseg/kmeans.hpp"
#include "candleseg/raster.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace candleseg {

enum class FeatureMode { ab, lab };

/// Semantic regions of a candled egg image.
enum class Region { background = 0, egg = 1, yolk = 2 };

inline constexpr std::array<Region, 3> kAllRegions = {Region::background, Region::egg, Region::yolk};

std::string to_string(Region region);
std::optional<Region> parse_region(const std::string& name);
std::string to_string(FeatureMode mode);
std::optional<FeatureMode> parse_feature_mode(const std::string& name);

struct SegmentationOptions {
    int k = 3;
    std::uint64_t seed = 42;
    KMeansOptions kmeans;
    FeatureMode feature_mode = FeatureMode::lab;
    /// Regions ordered from darkest to brightest mean L*. The first entry takes
    /// the darkest cluster, the last the brightest, the middle one everything between.
    std::array<Region, 3> rank_order = {Region::background, Region::yolk, Region::egg};
};

struct SegmentationResult {
    LabelMap label_map;
    ClusterModel model;
    /// Mean L* of each cluster, indexed by cluster id.
    std::vector<double> cluster_mean_l;
    /// Region of each cluster, indexed by cluster id.
    std::vector<Region> cluster_region;
    /// One mask per Region (indexed by its enum value); disjoint and covering.
    std::vector<BinaryMask> region_masks;

    const BinaryMask& region_mask(Region region) const { return region_masks[static_cast<std::size_t>(region)]; }
    BinaryMask cluster_mask(int cluster) const;
    /// Clusters mapped to `region`, ascending.
    std::vector<int> clusters_of(Region region) const;
};

/// Features per pixel: (a, b) or (L, a, b).
FeatureMatrix lab_features(const LabImage& image, FeatureMode mode);

/// Clusters the Lab image and names clusters by their L* ranking.
SegmentationResult segment_lab(const LabImage& image, const SegmentationOptions& opts = {});

/// Union of the masks of `regions`.
BinaryMask region_union(const SegmentationResult& seg, const std::vector<Region>& regions);

/// Cluster ids scaled by 80 (clamped to 255) for viewing.
GrayImage label_visualization(const LabelMap& labels);

/// Keeps source pixels under `keep`, blacks out the rest.
RasterImage masked_composite(const RasterImage& source, const BinaryMask& keep);

}  // namespace candleseg
