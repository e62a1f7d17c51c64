#include "doctest.h"

#include "hhrp/kernels.hpp"

#include <cmath>
#include <random>

using namespace hhrp;
using kernels::cplx;

namespace {

arma::cx_mat random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> n01;
  arma::cx_mat m(r, c);
  for (auto& v : m) v = {n01(rng), n01(rng)};
  return m;
}

}  // namespace

TEST_CASE("assemble_columns matches reference") {
  const std::size_t dim = 97;
  auto fn = [](std::size_t col, std::vector<kernels::Entry>& out) {
    out.push_back({col, cplx(static_cast<double>(col), 1.0)});
    out.push_back({(col * 7 + 3) % 97, cplx(0.5, -0.25)});
    out.push_back({(col * 7 + 3) % 97, cplx(0.5, 0.25)});  // duplicates are summed
  };
  const arma::sp_cx_mat a = kernels::assemble_columns(dim, fn);
  const arma::sp_cx_mat b = kernels::reference::assemble_columns(dim, fn);
  CHECK(arma::abs(arma::cx_mat(a) - arma::cx_mat(b)).max() == 0.0);
  CHECK(std::abs(cplx(a(10, 10)) - cplx(10.0, 1.0)) == 0.0);
  CHECK(std::abs(cplx(a(73, 10)) - cplx(1.0, 0.0)) == 0.0);
}

TEST_CASE("midpoint sum matches reference") {
  for (int nu : {1, 2, 3}) {
    for (std::size_t n : {1u, 4u, 9u}) {
      const double p = kernels::midpoint_inverse_dispersion_sum(nu, n);
      const double s = kernels::reference::midpoint_inverse_dispersion_sum(nu, n);
      CHECK(p == doctest::Approx(s).epsilon(1e-13));
    }
  }
  // one point per axis at p = pi/2: E = nu
  CHECK(kernels::midpoint_inverse_dispersion_sum(3, 1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("duhamel weight") {
  const double beta = 2.0;
  CHECK(kernels::duhamel_weight(0.3, 0.3, beta) == doctest::Approx(std::exp(-0.6)));
  const double x = 0.1, y = 0.9;
  const double exact = (std::exp(-beta * x) - std::exp(-beta * y)) / (beta * (y - x));
  CHECK(kernels::duhamel_weight(x, y, beta) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(kernels::duhamel_weight(y, x, beta) == doctest::Approx(exact).epsilon(1e-14));
  // continuity across the series cutoff
  for (double d : {0.99e-6, 1.01e-6}) {
    const double w = kernels::duhamel_weight(1.0, 1.0 + d / beta, beta);
    const double closed = std::exp(-beta) * (-std::expm1(-d)) / d;
    CHECK(std::abs(w - closed) < 1e-15);
  }
}

TEST_CASE("duhamel and weighted-diagonal sums match references") {
  std::mt19937_64 rng(3);
  const arma::cx_mat a = random_matrix(rng, 23, 31);
  const arma::cx_mat b = random_matrix(rng, 23, 31);
  arma::vec er = arma::sort(arma::randu<arma::vec>(23));
  arma::vec ec = arma::sort(arma::randu<arma::vec>(31));
  er(3) = ec(5);  // exercise the degenerate branch
  const cplx p = kernels::duhamel_sum(a, b, er, ec, 3.0);
  const cplx s = kernels::reference::duhamel_sum(a, b, er, ec, 3.0);
  CHECK(std::abs(p - s) < 1e-11 * std::abs(s));

  const arma::cx_mat op = random_matrix(rng, 17, 17);
  const arma::cx_mat v = random_matrix(rng, 17, 9);
  const arma::vec w = arma::randu<arma::vec>(9);
  const cplx wp = kernels::weighted_diagonal(op, v, w);
  const cplx ws = kernels::reference::weighted_diagonal(op, v, w);
  CHECK(std::abs(wp - ws) < 1e-11 * std::abs(ws));
}

TEST_CASE("parallel results do not depend on the worker count") {
  std::mt19937_64 rng(5);
  const arma::cx_mat a = random_matrix(rng, 40, 200);
  arma::vec er = arma::linspace(0, 2, 40);
  arma::vec ec = arma::linspace(0, 3, 200);
  const int before = kernels::workers();
  kernels::set_workers(1);
  const cplx one = kernels::duhamel_sum(a, a, er, ec, 1.5);
  const double m1 = kernels::midpoint_inverse_dispersion_sum(3, 16);
  kernels::set_workers(4);
  const cplx four = kernels::duhamel_sum(a, a, er, ec, 1.5);
  const double m4 = kernels::midpoint_inverse_dispersion_sum(3, 16);
  kernels::set_workers(before);
  CHECK(one == four);
  CHECK(m1 == m4);
}

TEST_CASE("dense backend self-check passes and is idempotent") {
  CHECK_NOTHROW(kernels::check_dense_backend());
  CHECK_NOTHROW(kernels::check_dense_backend());
}
