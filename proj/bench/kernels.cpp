#include "qd/cluster/kmeans.hpp"

#include <benchmark/benchmark.h>

#include <random>

using qd::cluster::Exec;
using qd::cluster::Matrix;

namespace {

// Impact vectors are 32-dimensional.
Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 10.0);
    Matrix m(rows, cols);
    for (auto& x : m.data) x = g(rng);
    return m;
}

std::vector<int> random_assignment(std::size_t n, int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<int>(i < static_cast<std::size_t>(k) ? i : rng() % k);
    return a;
}

void assign(benchmark::State& state, Exec exec) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto points = random_matrix(n, 32, 1);
    const auto centroids = random_matrix(33, 32, 2);
    std::vector<int> assignment;
    for (auto _ : state) benchmark::DoNotOptimize(qd::cluster::assign_points(points, centroids, assignment, exec));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void silhouette(benchmark::State& state, Exec exec) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto points = random_matrix(n, 32, 3);
    const auto assignment = random_assignment(n, 12, 4);
    for (auto _ : state) benchmark::DoNotOptimize(qd::cluster::silhouette_scores(points, assignment, exec));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

void kmeans(benchmark::State& state, Exec exec) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto points = random_matrix(n, 32, 5);
    for (auto _ : state) benchmark::DoNotOptimize(qd::cluster::kmeans(points, 12, 7, {300, exec}).inertia);
}

}  // namespace

BENCHMARK_CAPTURE(assign, serial, Exec::Serial)->Arg(1000)->Arg(10000)->Arg(100000)->UseRealTime();
BENCHMARK_CAPTURE(assign, parallel, Exec::Parallel)->Arg(1000)->Arg(10000)->Arg(100000)->UseRealTime();
BENCHMARK_CAPTURE(silhouette, serial, Exec::Serial)->Arg(500)->Arg(2000)->Arg(5000)->UseRealTime();
BENCHMARK_CAPTURE(silhouette, parallel, Exec::Parallel)->Arg(500)->Arg(2000)->Arg(5000)->UseRealTime();
BENCHMARK_CAPTURE(kmeans, serial, Exec::Serial)->Arg(5000)->UseRealTime();
BENCHMARK_CAPTURE(kmeans, parallel, Exec::Parallel)->Arg(5000)->UseRealTime();

BENCHMARK_MAIN();
