#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qd::cluster {

/// Row-major n x d matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    [[nodiscard]] const double* row(std::size_t i) const { return data.data() + i * cols; }
    double* row(std::size_t i) { return data.data() + i * cols; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

/// Serial is the reference path; Parallel splits per-point work across
/// OpenMP threads and produces bit-identical results.
enum class Exec { Serial, Parallel };

double squared_distance(const double* a, const double* b, std::size_t d);
double euclidean_distance(const double* a, const double* b, std::size_t d);

/// Nearest centroid per point (ties to the lower index). Returns the
/// inertia (sum of squared distances) of the assignment.
double assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment, Exec exec);

struct KMeansResult {
    std::vector<int> assignment;
    Matrix centroids;
    double inertia = 0;
    int iterations = 0;
    std::vector<double> inertia_history;  // after each assignment step
};

struct KMeansOptions {
    int max_iterations = 300;
    Exec exec = Exec::Parallel;
};

/// Lloyd iterations from k-means++ seeding. An empty cluster is re-seeded at
/// the point farthest from its current centroid. Throws InputError unless
/// 1 <= k <= n.
KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, KMeansOptions options = {});

/// s(i) per point: a = mean distance to the rest of its cluster, b = lowest
/// mean distance to another cluster, s = (b - a) / max(a, b); 0 for
/// singletons. Throws InputError with fewer than two non-empty clusters.
std::vector<double> silhouette_scores(const Matrix& points, const std::vector<int>& assignment, Exec exec = Exec::Parallel);

struct KScore {
    std::size_t k = 0;
    double mean_silhouette = 0;
    double inertia = 0;
};

struct RejectionReason {
    std::string predicate;  // "P1", "P2", "P3"
    std::string message;
};

struct ClusterResult {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<int> assignment;
    Matrix centroids;
    double inertia = 0;
    std::vector<double> point_silhouette;
    std::vector<double> cluster_silhouette;
    std::vector<std::size_t> cluster_size;
    double mean_silhouette = 0;
    std::vector<KScore> scores;  // one per candidate k
    std::vector<std::size_t> retained;
    std::map<std::size_t, std::vector<RejectionReason>> rejection_reasons;
};

/// Fills the per-cluster silhouette and size tables from assignment and
/// point silhouettes.
void summarize_silhouettes(ClusterResult& result);

/// For each k in [k_min, k_max], keeps the best of `restarts` runs by
/// inertia and scores it by mean silhouette; returns the best-scoring k
/// (ties to the smaller k). Requires 2 <= k_min <= k_max <= n - 1.
ClusterResult select_k(const Matrix& points, std::size_t k_min, std::size_t k_max, std::size_t restarts,
                       std::uint64_t seed, Exec exec = Exec::Parallel);

/// Default candidate range 2 .. min(50, n / 5), clamped to n - 1.
std::pair<std::size_t, std::size_t> default_k_range(std::size_t n);

/// Retains cluster c iff its silhouette exceeds the overall mean (P1), it
/// has at least `min_size` members (P2) and its members come from at least
/// two repositories (P3). `repo_of` is aligned with the assignment.
void evaluate_clusters(ClusterResult& result, const std::vector<std::string>& repo_of, std::size_t min_size = 5);

/// Column-wise z-scores; constant columns become 0.
Matrix standardize(const Matrix& points);

}  // namespace qd::cluster
