#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace candleseg {

/// Dense row-major n x d matrix of feature vectors. Also used for k x d centroid sets.
struct FeatureMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> values;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t rows, std::size_t dims);
    FeatureMatrix(std::size_t rows, std::size_t dims, std::vector<double> data);

    std::span<const double> row(std::size_t i) const { return {values.data() + i * d, d}; }
    std::span<double> row(std::size_t i) { return {values.data() + i * d, d}; }
};

struct KMeansOptions {
    int max_iters = 100;
    /// Stop once no centroid moves farther than this (feature units).
    double tol = 1e-4;
};

struct ClusterModel {
    int k = 0;
    FeatureMatrix centroids;
    std::vector<std::int32_t> labels;
    /// Sum of squared point-to-centroid distances after each centroid update.
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;

    friend bool operator==(const ClusterModel& lhs, const ClusterModel& rhs) {
        return lhs.k == rhs.k && lhs.centroids.values == rhs.centroids.values && lhs.labels == rhs.labels &&
               lhs.objective_trace == rhs.objective_trace && lhs.iterations == rhs.iterations &&
               lhs.converged == rhs.converged && lhs.seed == rhs.seed;
    }
};

/// Throws DimensionError when the vectors differ in length.
double euclidean_distance(std::span<const double> x, std::span<const double> y);
double squared_distance(std::span<const double> x, std::span<const double> y);

/// Nearest centroid per point; ties go to the lowest centroid index.
std::vector<std::int32_t> assign_labels(const FeatureMatrix& points, const FeatureMatrix& centroids);

/**
 * Mean of the points carrying each label.
 *
 * A cluster with no points is re-seeded to the point lying farthest from its
 * own (freshly computed) centroid; several empty clusters take successive
 * farthest points, never the same one twice.
 */
FeatureMatrix update_centroids(const FeatureMatrix& points, std::span<const std::int32_t> labels, int k);

double clustering_objective(const FeatureMatrix& points, std::span<const std::int32_t> labels,
                            const FeatureMatrix& centroids);

/// Number of distinct rows, counting no further than `limit`.
std::size_t count_distinct_rows(const FeatureMatrix& points, std::size_t limit);

/**
 * Lloyd iteration from k distinct, uniformly sampled seed points.
 *
 * Stops when the largest centroid displacement drops below opts.tol and a
 * re-assignment leaves every label unchanged, or after opts.max_iters rounds.
 * Throws InfeasibleKError when the data hold fewer than k distinct points.
 */
ClusterModel kmeans(const FeatureMatrix& points, int k, std::uint64_t seed, const KMeansOptions& opts = {});

}  // namespace candleseg
