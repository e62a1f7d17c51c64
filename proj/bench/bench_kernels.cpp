// OpenMP kernels against their serial references.

#include "hhrp/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace hhrp;

namespace {

arma::cx_mat random_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  arma::cx_mat m(n, n);
  for (auto& v : m) v = {g(rng), g(rng)};
  return m;
}

arma::vec sorted_energies(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  arma::vec e(n);
  for (auto& v : e) v = u(rng);
  return arma::sort(e) - arma::min(e);
}

kernels::ColumnFn tridiagonal(std::size_t dim) {
  return [dim](std::size_t col, std::vector<kernels::Entry>& out) {
    out.clear();
    if (col > 0) out.push_back({col - 1, {-1.0, 0.0}});
    out.push_back({col, {2.0, 0.0}});
    if (col + 1 < dim) out.push_back({col + 1, {-1.0, 0.0}});
  };
}

template <bool Parallel>
void BM_midpoint_sum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    const double v = Parallel ? kernels::midpoint_inverse_dispersion_sum(3, n)
                              : kernels::reference::midpoint_inverse_dispersion_sum(3, n);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}

template <bool Parallel>
void BM_duhamel_sum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, 1);
  const auto b = random_matrix(n, 2);
  const auto e = sorted_energies(n, 3);
  for (auto _ : state) {
    const auto v = Parallel ? kernels::duhamel_sum(a, b, e, e, 1.3) : kernels::reference::duhamel_sum(a, b, e, e, 1.3);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_weighted_diagonal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto op = random_matrix(n, 4);
  const auto vecs = random_matrix(n, 5);
  const arma::vec w = arma::normalise(arma::exp(-sorted_energies(n, 6)), 1);
  for (auto _ : state) {
    const auto v = Parallel ? kernels::weighted_diagonal(op, vecs, w) : kernels::reference::weighted_diagonal(op, vecs, w);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_assemble_columns(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto fn = tridiagonal(n);
  for (auto _ : state) {
    const auto m = Parallel ? kernels::assemble_columns(n, fn) : kernels::reference::assemble_columns(n, fn);
    benchmark::DoNotOptimize(m.n_nonzero);
  }
}

}  // namespace

BENCHMARK(BM_midpoint_sum<true>)->Arg(64)->Arg(128);
BENCHMARK(BM_midpoint_sum<false>)->Arg(64)->Arg(128);
BENCHMARK(BM_duhamel_sum<true>)->Arg(128)->Arg(256);
BENCHMARK(BM_duhamel_sum<false>)->Arg(128)->Arg(256);
BENCHMARK(BM_weighted_diagonal<true>)->Arg(64)->Arg(128);
BENCHMARK(BM_weighted_diagonal<false>)->Arg(64)->Arg(128);
BENCHMARK(BM_assemble_columns<true>)->Arg(4096)->Arg(65536);
BENCHMARK(BM_assemble_columns<false>)->Arg(4096)->Arg(65536);

BENCHMARK_MAIN();
