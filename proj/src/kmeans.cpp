#include "candleseg/kmeans.hpp"

#include "candleseg/error.hpp"
#include "candleseg/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace candleseg {

namespace {

bool rows_equal(std::span<const double> x, std::span<const double> y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end());
}

bool is_new_row(const FeatureMatrix& points, const std::vector<std::size_t>& chosen, std::size_t candidate) {
    return std::none_of(chosen.begin(), chosen.end(),
                        [&](std::size_t c) { return rows_equal(points.row(c), points.row(candidate)); });
}

std::vector<std::size_t> sample_distinct(const FeatureMatrix& points, std::size_t k, SplitMix64& rng) {
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    const std::size_t max_draws = 64 * k;
    for (std::size_t draw = 0; draw < max_draws && chosen.size() < k; ++draw) {
        const auto idx = static_cast<std::size_t>(rng.below(points.n));
        if (is_new_row(points, chosen, idx)) {
            chosen.push_back(idx);
        }
    }
    if (chosen.size() < k) {
        // Heavily duplicated data: fall back to a full scan from a random offset.
        const auto start = static_cast<std::size_t>(rng.below(points.n));
        for (std::size_t i = 0; i < points.n && chosen.size() < k; ++i) {
            const std::size_t idx = (start + i) % points.n;
            if (is_new_row(points, chosen, idx)) {
                chosen.push_back(idx);
            }
        }
    }
    return chosen;
}

double max_displacement(const FeatureMatrix& before, const FeatureMatrix& after) {
    double worst = 0.0;
    for (std::size_t j = 0; j < before.n; ++j) {
        worst = std::max(worst, euclidean_distance(before.row(j), after.row(j)));
    }
    return worst;
}

}  // namespace

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t dims) : n(rows), d(dims), values(rows * dims, 0.0) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t dims, std::vector<double> data)
    : n(rows), d(dims), values(std::move(data)) {
    if (values.size() != n * d) {
        throw DimensionError("feature matrix expects " + std::to_string(n * d) + " values, got " +
                             std::to_string(values.size()));
    }
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("distance between vectors of length " + std::to_string(x.size()) + " and " +
                             std::to_string(y.size()));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        sum += diff * diff;
    }
    return sum;
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
    return std::sqrt(squared_distance(x, y));
}

std::vector<std::int32_t> assign_labels(const FeatureMatrix& points, const FeatureMatrix& centroids) {
    if (centroids.n < 1) {
        throw DomainError("assign_labels needs at least one centroid");
    }
    if (centroids.d != points.d) {
        throw DimensionError("centroid dimension " + std::to_string(centroids.d) + " != point dimension " +
                             std::to_string(points.d));
    }
    std::vector<std::int32_t> labels(points.n, 0);
    for (std::size_t i = 0; i < points.n; ++i) {
        const auto x = points.row(i);
        double best = squared_distance(x, centroids.row(0));
        std::int32_t best_j = 0;
        for (std::size_t j = 1; j < centroids.n; ++j) {
            const double dist = squared_distance(x, centroids.row(j));
            if (dist < best) {
                best = dist;
                best_j = static_cast<std::int32_t>(j);
            }
        }
        labels[i] = best_j;
    }
    return labels;
}

FeatureMatrix update_centroids(const FeatureMatrix& points, std::span<const std::int32_t> labels, int k) {
    if (k < 1) {
        throw DomainError("k must be positive");
    }
    if (labels.size() != points.n) {
        throw DimensionError("label count does not match point count");
    }
    const auto kk = static_cast<std::size_t>(k);
    FeatureMatrix centroids(kk, points.d);
    std::vector<std::size_t> counts(kk, 0);
    for (std::size_t i = 0; i < points.n; ++i) {
        const auto j = static_cast<std::size_t>(labels[i]);
        if (labels[i] < 0 || j >= kk) {
            throw DomainError("label " + std::to_string(labels[i]) + " outside [0, " + std::to_string(k) + ")");
        }
        auto c = centroids.row(j);
        const auto x = points.row(i);
        for (std::size_t t = 0; t < points.d; ++t) {
            c[t] += x[t];
        }
        ++counts[j];
    }
    for (std::size_t j = 0; j < kk; ++j) {
        if (counts[j] == 0) {
            continue;
        }
        for (double& v : centroids.row(j)) {
            v /= static_cast<double>(counts[j]);
        }
    }

    std::vector<std::size_t> taken;
    for (std::size_t j = 0; j < kk; ++j) {
        if (counts[j] != 0) {
            continue;
        }
        double farthest = -1.0;
        std::size_t pick = points.n;
        for (std::size_t i = 0; i < points.n; ++i) {
            if (std::find(taken.begin(), taken.end(), i) != taken.end()) {
                continue;
            }
            const auto own = static_cast<std::size_t>(labels[i]);
            if (counts[own] == 0) {
                continue;
            }
            const double dist = squared_distance(points.row(i), centroids.row(own));
            if (dist > farthest) {
                farthest = dist;
                pick = i;
            }
        }
        if (pick == points.n) {
            continue;  // no points at all; leave the zero centroid
        }
        taken.push_back(pick);
        std::copy_n(points.row(pick).begin(), points.d, centroids.row(j).begin());
    }
    return centroids;
}

double clustering_objective(const FeatureMatrix& points, std::span<const std::int32_t> labels,
                            const FeatureMatrix& centroids) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.n; ++i) {
        total += squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
    }
    return total;
}

std::size_t count_distinct_rows(const FeatureMatrix& points, std::size_t limit) {
    std::vector<std::size_t> seen;
    for (std::size_t i = 0; i < points.n && seen.size() < limit; ++i) {
        if (is_new_row(points, seen, i)) {
            seen.push_back(i);
        }
    }
    return seen.size();
}

ClusterModel kmeans(const FeatureMatrix& points, int k, std::uint64_t seed, const KMeansOptions& opts) {
    if (k < 1) {
        throw DomainError("k must be positive, got " + std::to_string(k));
    }
    if (opts.max_iters < 1 || !(opts.tol >= 0.0)) {
        throw ConfigError("k-means needs max_iters >= 1 and tol >= 0");
    }
    if (points.n == 0 || points.d == 0) {
        throw InfeasibleKError("k-means on an empty point set");
    }

    SplitMix64 rng(seed);
    const auto kk = static_cast<std::size_t>(k);
    const auto seeds = sample_distinct(points, kk, rng);
    if (seeds.size() < kk) {
        throw InfeasibleKError("k = " + std::to_string(k) + " exceeds the " + std::to_string(seeds.size()) +
                               " distinct points available");
    }

    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.centroids = FeatureMatrix(kk, points.d);
    for (std::size_t j = 0; j < kk; ++j) {
        std::copy_n(points.row(seeds[j]).begin(), points.d, model.centroids.row(j).begin());
    }

    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        model.labels = assign_labels(points, model.centroids);
        FeatureMatrix next = update_centroids(points, model.labels, k);
        model.objective_trace.push_back(clustering_objective(points, model.labels, next));
        const double moved = max_displacement(model.centroids, next);
        model.centroids = std::move(next);
        model.iterations = iter;
        if (moved < opts.tol && assign_labels(points, model.centroids) == model.labels) {
            model.converged = true;
            break;
        }
    }
    return model;
}

}  // namespace candleseg
