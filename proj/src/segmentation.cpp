#include "candleseg/segmentation.hpp"

#include <algorithm>
#include <numeric>

namespace candleseg {

std::string to_string(Region region) {
    switch (region) {
        case Region::background: return "background";
        case Region::egg: return "egg";
        case Region::yolk: return "yolk";
    }
    return "unknown";
}

std::optional<Region> parse_region(const std::string& name) {
    for (Region r : kAllRegions) {
        if (to_string(r) == name) {
            return r;
        }
    }
    return std::nullopt;
}

std::string to_string(FeatureMode mode) { return mode == FeatureMode::ab ? "ab" : "lab"; }

std::optional<FeatureMode> parse_feature_mode(const std::string& name) {
    if (name == "ab") return FeatureMode::ab;
    if (name == "lab" || name == "Lab") return FeatureMode::lab;
    return std::nullopt;
}

BinaryMask SegmentationResult::cluster_mask(int cluster) const {
    std::vector<std::uint8_t> out(label_map.size());
    auto labels = label_map.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = labels[i] == cluster ? 1 : 0;
    }
    return BinaryMask(label_map.width(), label_map.height(), std::move(out));
}

std::vector<int> SegmentationResult::clusters_of(Region region) const {
    std::vector<int> out;
    for (std::size_t j = 0; j < cluster_region.size(); ++j) {
        if (cluster_region[j] == region) {
            out.push_back(static_cast<int>(j));
        }
    }
    return out;
}

FeatureMatrix lab_features(const LabImage& image, FeatureMode mode) {
    const std::size_t d = mode == FeatureMode::lab ? 3 : 2;
    FeatureMatrix features(image.size(), d);
    for (std::size_t i = 0; i < image.size(); ++i) {
        auto row = features.row(i);
        if (mode == FeatureMode::lab) {
            row[0] = image.l[i];
            row[1] = image.a[i];
            row[2] = image.b[i];
        } else {
            row[0] = image.a[i];
            row[1] = image.b[i];
        }
    }
    return features;
}

SegmentationResult segment_lab(const LabImage& image, const SegmentationOptions& opts) {
    if (opts.k < 2) {
        throw ConfigError("k must be >= 2 for region segmentation", "k");
    }
    {
        auto order = opts.rank_order;
        std::sort(order.begin(), order.end());
        if (order != kAllRegions) {
            throw ConfigError("region rank order must name each region exactly once", "region_rank");
        }
    }

    ClusterModel model = kmeans(lab_features(image, opts.feature_mode), opts.k, opts.seed, opts.kmeans);
    const auto k = static_cast<std::size_t>(opts.k);

    std::vector<double> sum_l(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < image.size(); ++i) {
        const auto j = static_cast<std::size_t>(model.labels[i]);
        sum_l[j] += image.l[i];
        ++count[j];
    }
    std::vector<double> mean_l(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        mean_l[j] = count[j] > 0 ? sum_l[j] / static_cast<double>(count[j]) : 0.0;
    }

    std::vector<std::size_t> by_lightness(k);
    std::iota(by_lightness.begin(), by_lightness.end(), std::size_t{0});
    std::stable_sort(by_lightness.begin(), by_lightness.end(),
                     [&](std::size_t x, std::size_t y) { return mean_l[x] < mean_l[y]; });
    std::vector<Region> cluster_region(k, opts.rank_order[1]);
    cluster_region[by_lightness.front()] = opts.rank_order[0];
    cluster_region[by_lightness.back()] = opts.rank_order[2];

    std::vector<std::vector<std::uint8_t>> region_bits(3, std::vector<std::uint8_t>(image.size(), 0));
    for (std::size_t i = 0; i < image.size(); ++i) {
        const Region r = cluster_region[static_cast<std::size_t>(model.labels[i])];
        region_bits[static_cast<std::size_t>(r)][i] = 1;
    }

    LabelMap label_map(image.width, image.height, std::vector<std::int32_t>(model.labels));
    std::vector<BinaryMask> masks;
    masks.reserve(3);
    for (auto& bits : region_bits) {
        masks.emplace_back(image.width, image.height, std::move(bits));
    }
    return SegmentationResult{std::move(label_map), std::move(model), std::move(mean_l), std::move(cluster_region),
                              std::move(masks)};
}

BinaryMask region_union(const SegmentationResult& seg, const std::vector<Region>& regions) {
    BinaryMask keep(seg.label_map.width(), seg.label_map.height(), false);
    auto dst = keep.pixels();
    for (Region r : regions) {
        auto src = seg.region_mask(r).pixels();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = static_cast<std::uint8_t>(dst[i] | src[i]);
        }
    }
    return keep;
}

GrayImage label_visualization(const LabelMap& labels) {
    std::vector<std::uint8_t> out(labels.size());
    auto src = labels.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(std::clamp(src[i] * 80, 0, 255));
    }
    return GrayImage(labels.width(), labels.height(), std::move(out));
}

RasterImage masked_composite(const RasterImage& source, const BinaryMask& keep) {
    if (!source.same_shape(keep)) {
        throw DimensionError("composite mask does not match image size");
    }
    std::vector<Rgb> out(source.size());
    auto src = source.pixels();
    auto bits = keep.pixels();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = bits[i] ? src[i] : Rgb{};
    }
    return RasterImage(source.width(), source.height(), std::move(out));
}

}  // namespace candleseg
