#include "qd/cluster/kmeans.hpp"

#include "qd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace qd::cluster {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::size_t k, std::size_t restart) {
    return splitmix64(splitmix64(seed + k) + restart);
}

std::size_t nearest(const Matrix& points, std::size_t i, const Matrix& centroids, double& best) {
    std::size_t arg = 0;
    best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.rows; ++c) {
        const double d = squared_distance(points.row(i), centroids.row(c), points.cols);
        if (d < best) {
            best = d;
            arg = c;
        }
    }
    return arg;
}

Matrix plus_plus_init(const Matrix& points, std::size_t k, std::mt19937_64& rng) {
    const auto n = points.rows;
    Matrix centroids(k, points.cols);
    std::vector<char> chosen(n, 0);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    auto take = [&](std::size_t c, std::size_t idx) {
        chosen[idx] = 1;
        std::copy_n(points.row(idx), points.cols, centroids.row(c));
        for (std::size_t i = 0; i < n; ++i)
            d2[i] = std::min(d2[i], squared_distance(points.row(i), points.row(idx), points.cols));
    };

    take(0, std::min(n - 1, static_cast<std::size_t>(unit(rng) * static_cast<double>(n))));
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0;
        for (double v : d2) total += v;
        std::size_t pick = n;
        if (total > 0) {
            const double target = unit(rng) * total;
            double cum = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0) continue;
                cum += d2[i];
                pick = i;
                if (cum > target) break;
            }
        } else {
            for (std::size_t i = 0; i < n && pick == n; ++i)
                if (!chosen[i]) pick = i;
        }
        take(c, pick);
    }
    return centroids;
}

}  // namespace

double squared_distance(const double* a, const double* b, std::size_t d) {
    double s = 0;
    for (std::size_t j = 0; j < d; ++j) {
        const double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

double euclidean_distance(const double* a, const double* b, std::size_t d) { return std::sqrt(squared_distance(a, b, d)); }

double assign_points(const Matrix& points, const Matrix& centroids, std::vector<int>& assignment, Exec exec) {
    const auto n = static_cast<std::ptrdiff_t>(points.rows);
    assignment.resize(points.rows);
    std::vector<double> dist(points.rows);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            assignment[i] = static_cast<int>(nearest(points, static_cast<std::size_t>(i), centroids, dist[i]));
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            assignment[i] = static_cast<int>(nearest(points, static_cast<std::size_t>(i), centroids, dist[i]));
    }
    double inertia = 0;
    for (double d : dist) inertia += d;
    return inertia;
}

KMeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, KMeansOptions options) {
    const auto n = points.rows;
    if (k < 1 || k > n) throw InputError("k must be between 1 and the number of points (" + std::to_string(n) + ")");
    for (double v : points.data)
        if (!std::isfinite(v)) throw InputError("k-means input contains a non-finite value");

    std::mt19937_64 rng(seed);
    KMeansResult r;
    r.centroids = plus_plus_init(points, k, rng);
    r.inertia = assign_points(points, r.centroids, r.assignment, options.exec);
    r.inertia_history.push_back(r.inertia);

    std::vector<int> previous;
    std::vector<std::size_t> counts(k);
    for (int it = 0; it < options.max_iterations; ++it) {
        r.iterations = it + 1;
        // Update step: means in point order so the reduction order is fixed.
        std::fill(r.centroids.data.begin(), r.centroids.data.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(r.assignment[i]);
            ++counts[c];
            const double* p = points.row(i);
            double* m = r.centroids.row(c);
            for (std::size_t j = 0; j < points.cols; ++j) m[j] += p[j];
        }
        std::vector<std::size_t> empty;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                empty.push_back(c);
                continue;
            }
            double* m = r.centroids.row(c);
            for (std::size_t j = 0; j < points.cols; ++j) m[j] /= static_cast<double>(counts[c]);
        }
        if (!empty.empty()) {
            std::vector<std::pair<double, std::size_t>> far;
            for (std::size_t i = 0; i < n; ++i) {
                const auto c = static_cast<std::size_t>(r.assignment[i]);
                if (counts[c] == 0) continue;
                far.emplace_back(squared_distance(points.row(i), r.centroids.row(c), points.cols), i);
            }
            std::stable_sort(far.begin(), far.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
            for (std::size_t e = 0; e < empty.size() && e < far.size(); ++e)
                std::copy_n(points.row(far[e].second), points.cols, r.centroids.row(empty[e]));
        }

        previous = r.assignment;
        r.inertia = assign_points(points, r.centroids, r.assignment, options.exec);
        r.inertia_history.push_back(r.inertia);
        if (r.assignment == previous && empty.empty()) break;
    }
    return r;
}

std::vector<double> silhouette_scores(const Matrix& points, const std::vector<int>& assignment, Exec exec) {
    if (assignment.size() != points.rows) throw InputError("assignment size does not match the number of points");
    const std::size_t k = assignment.empty() ? 0 : static_cast<std::size_t>(*std::max_element(assignment.begin(), assignment.end())) + 1;
    std::vector<std::size_t> size(k, 0);
    for (int c : assignment) {
        if (c < 0) throw InputError("negative cluster index");
        ++size[static_cast<std::size_t>(c)];
    }
    if (std::count_if(size.begin(), size.end(), [](std::size_t s) { return s > 0; }) < 2)
        throw InputError("silhouette is undefined for a single cluster");

    const auto n = static_cast<std::ptrdiff_t>(points.rows);
    std::vector<double> s(points.rows, 0.0);
    auto score = [&](std::size_t i, std::vector<double>& sums) {
        const auto own = static_cast<std::size_t>(assignment[i]);
        if (size[own] <= 1) {
            s[i] = 0.0;
            return;
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t j = 0; j < points.rows; ++j)
            if (j != i) sums[static_cast<std::size_t>(assignment[j])] += euclidean_distance(points.row(i), points.row(j), points.cols);
        const double a = sums[own] / static_cast<double>(size[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != own && size[c] > 0) b = std::min(b, sums[c] / static_cast<double>(size[c]));
        const double m = std::max(a, b);
        s[i] = m == 0.0 ? 0.0 : (b - a) / m;
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel
        {
            std::vector<double> sums(k);
#pragma omp for schedule(static)
            for (std::ptrdiff_t i = 0; i < n; ++i) score(static_cast<std::size_t>(i), sums);
        }
    } else {
        std::vector<double> sums(k);
        for (std::ptrdiff_t i = 0; i < n; ++i) score(static_cast<std::size_t>(i), sums);
    }
    return s;
}

void summarize_silhouettes(ClusterResult& result) {
    result.cluster_silhouette.assign(result.k, 0.0);
    result.cluster_size.assign(result.k, 0);
    double total = 0;
    for (std::size_t i = 0; i < result.assignment.size(); ++i) {
        const auto c = static_cast<std::size_t>(result.assignment[i]);
        result.cluster_silhouette[c] += result.point_silhouette[i];
        ++result.cluster_size[c];
        total += result.point_silhouette[i];
    }
    for (std::size_t c = 0; c < result.k; ++c)
        if (result.cluster_size[c] > 0) result.cluster_silhouette[c] /= static_cast<double>(result.cluster_size[c]);
    result.mean_silhouette = result.assignment.empty() ? 0.0 : total / static_cast<double>(result.assignment.size());
}

ClusterResult select_k(const Matrix& points, std::size_t k_min, std::size_t k_max, std::size_t restarts,
                       std::uint64_t seed, Exec exec) {
    const auto n = points.rows;
    if (k_min < 2 || k_min > k_max || n < 1 || k_max > n - 1)
        throw InputError("k range must satisfy 2 <= k_min <= k_max <= n - 1 (n = " + std::to_string(n) + ")");
    restarts = std::max<std::size_t>(1, restarts);

    ClusterResult best;
    bool have = false;
    std::vector<KScore> scores;
    for (std::size_t k = k_min; k <= k_max; ++k) {
        KMeansResult run;
        bool have_run = false;
        for (std::size_t r = 0; r < restarts; ++r) {
            auto candidate = kmeans(points, k, derive_seed(seed, k, r), {300, exec});
            if (!have_run || candidate.inertia < run.inertia) {
                run = std::move(candidate);
                have_run = true;
            }
        }
        ClusterResult cr;
        cr.k = k;
        cr.seed = seed;
        cr.assignment = run.assignment;
        cr.centroids = run.centroids;
        cr.inertia = run.inertia;
        cr.point_silhouette = silhouette_scores(points, cr.assignment, exec);
        summarize_silhouettes(cr);
        scores.push_back({k, cr.mean_silhouette, cr.inertia});
        if (!have || cr.mean_silhouette > best.mean_silhouette) {
            best = std::move(cr);
            have = true;
        }
    }
    best.scores = std::move(scores);
    return best;
}

std::pair<std::size_t, std::size_t> default_k_range(std::size_t n) {
    if (n < 3) throw InputError("clustering needs at least 3 impact vectors, got " + std::to_string(n));
    std::size_t hi = std::min<std::size_t>(50, n / 5);
    hi = std::clamp<std::size_t>(hi, 2, n - 1);
    return {2, hi};
}

void evaluate_clusters(ClusterResult& result, const std::vector<std::string>& repo_of, std::size_t min_size) {
    if (repo_of.size() != result.assignment.size()) throw InputError("repository list does not match the assignment");
    if (result.cluster_size.size() != result.k) summarize_silhouettes(result);
    std::vector<std::set<std::string>> repos(result.k);
    for (std::size_t i = 0; i < repo_of.size(); ++i) repos[static_cast<std::size_t>(result.assignment[i])].insert(repo_of[i]);

    result.retained.clear();
    result.rejection_reasons.clear();
    for (std::size_t c = 0; c < result.k; ++c) {
        std::vector<RejectionReason> reasons;
        if (!(result.cluster_silhouette[c] > result.mean_silhouette))
            reasons.push_back({"P1", "cluster silhouette is not above the overall mean silhouette"});
        if (result.cluster_size[c] < min_size)
            reasons.push_back({"P2", "fewer than " + std::to_string(min_size) + " modifications"});
        if (repos[c].size() < 2) reasons.push_back({"P3", "all modifications come from a single repository"});
        if (reasons.empty())
            result.retained.push_back(c);
        else
            result.rejection_reasons[c] = std::move(reasons);
    }
}

Matrix standardize(const Matrix& points) {
    Matrix out = points;
    if (points.rows == 0) return out;
    for (std::size_t j = 0; j < points.cols; ++j) {
        double mean = 0;
        for (std::size_t i = 0; i < points.rows; ++i) mean += points.at(i, j);
        mean /= static_cast<double>(points.rows);
        double var = 0;
        for (std::size_t i = 0; i < points.rows; ++i) var += (points.at(i, j) - mean) * (points.at(i, j) - mean);
        const double sd = std::sqrt(var / static_cast<double>(points.rows));
        for (std::size_t i = 0; i < points.rows; ++i) out.at(i, j) = sd > 0 ? (points.at(i, j) - mean) / sd : 0.0;
    }
    return out;
}

}  // namespace qd::cluster
