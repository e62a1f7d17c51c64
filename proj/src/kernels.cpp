#include "hhrp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hhrp::kernels {

namespace {

constexpr std::size_t kChunks = 64;

arma::sp_cx_mat from_columns(std::size_t dim, const std::vector<std::vector<Entry>>& cols) {
  std::size_t nnz = 0;
  for (const auto& c : cols) nnz += c.size();
  arma::umat loc(2, nnz);
  arma::cx_vec val(nnz);
  std::size_t k = 0;
  for (std::size_t col = 0; col < cols.size(); ++col) {
    for (const auto& e : cols[col]) {
      loc(0, k) = e.row;
      loc(1, k) = col;
      val(k) = e.value;
      ++k;
    }
  }
  // add_values = true: repeated (row, col) pairs are summed
  return arma::sp_cx_mat(true, loc, val, dim, dim, true, false);
}

std::vector<double> midpoint_terms(std::size_t n_half) {
  const double h = std::numbers::pi / static_cast<double>(n_half);
  std::vector<double> c(n_half);
  for (std::size_t k = 0; k < n_half; ++k) c[k] = 1.0 - std::cos((k + 0.5) * h);
  return c;
}

// Sum of 1 / (base + sum_j c[k_j]) over the remaining `depth` coordinates.
double odometer_sum(const std::vector<double>& c, int depth, double base) {
  if (depth == 0) return 1.0 / base;
  double acc = 0.0;
  if (depth == 1) {
    for (double ck : c) acc += 1.0 / (base + ck);
    return acc;
  }
  for (double ck : c) acc += odometer_sum(c, depth - 1, base + ck);
  return acc;
}

}  // namespace

void set_workers(int w) {
#ifdef _OPENMP
  if (w > 0) omp_set_num_threads(w);
#else
  (void)w;
#endif
}

int workers() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double duhamel_weight(double x, double y, double beta, double series_cutoff) {
  const double lo = std::min(x, y);
  const double d = beta * std::abs(x - y);
  const double base = std::exp(-beta * lo);
  if (d < series_cutoff) return base * (1.0 - d / 2.0 + d * d / 6.0);
  return base * (-std::expm1(-d)) / d;
}

void check_dense_backend() {
  static std::once_flag once;
  static std::string failure;
  std::call_once(once, [] {
    constexpr arma::uword n = 256;
    arma::mat a(n, n);
    arma::mat b(n, n);
    for (arma::uword j = 0; j < n; ++j) {
      for (arma::uword i = 0; i < n; ++i) {
        a(i, j) = std::sin(0.37 * double(i) + 1.3 * double(j));
        b(i, j) = std::cos(0.11 * double(i * j) + 0.5 * double(i));
      }
    }
    const arma::mat c = a * b;
    double err = 0.0;
    for (arma::uword j = 0; j < n; ++j) {
      for (arma::uword i = 0; i < n; ++i) {
        double acc = 0.0;
        for (arma::uword k = 0; k < n; ++k) acc += a(i, k) * b(k, j);
        err = std::max(err, std::abs(acc - c(i, j)));
      }
    }
    if (!(err < 1e-9)) {
      failure = "dense BLAS backend returns wrong matrix products (error " + std::to_string(err) +
                "); set OPENBLAS_CORETYPE=Haswell";
      return;
    }
    const arma::mat s = a + a.t();
    arma::vec e;
    arma::mat v;
    if (!arma::eig_sym(e, v, s) || !(arma::abs(s * v - v * arma::diagmat(e)).max() < 1e-9)) {
      failure = "dense LAPACK backend returns wrong eigenvectors; set OPENBLAS_CORETYPE=Haswell";
    }
  });
  if (!failure.empty()) throw std::runtime_error(failure);
}

arma::sp_cx_mat assemble_columns(std::size_t dim, const ColumnFn& column) {
  std::vector<std::vector<Entry>> cols(dim);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t col = 0; col < static_cast<std::ptrdiff_t>(dim); ++col) {
    column(static_cast<std::size_t>(col), cols[static_cast<std::size_t>(col)]);
  }
  return from_columns(dim, cols);
}

double midpoint_inverse_dispersion_sum(int nu, std::size_t n_half) {
  const auto c = midpoint_terms(n_half);
  std::vector<double> partial(n_half, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n_half); ++k) {
    partial[static_cast<std::size_t>(k)] = odometer_sum(c, nu - 1, c[static_cast<std::size_t>(k)]);
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

cplx duhamel_sum(const arma::cx_mat& a, const arma::cx_mat& b, const arma::vec& e_row,
                 const arma::vec& e_col, double beta, double series_cutoff) {
  const std::size_t ncol = a.n_cols;
  const std::size_t chunk = std::max<std::size_t>(1, (ncol + kChunks - 1) / kChunks);
  std::vector<cplx> partial(kChunks, cplx{0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ch = 0; ch < static_cast<std::ptrdiff_t>(kChunks); ++ch) {
    const std::size_t begin = static_cast<std::size_t>(ch) * chunk;
    const std::size_t end = std::min(ncol, begin + chunk);
    cplx acc{0.0, 0.0};
    for (std::size_t m = begin; m < end; ++m) {
      for (std::size_t n = 0; n < a.n_rows; ++n) {
        const cplx prod = std::conj(a(n, m)) * b(n, m);
        if (prod == cplx{0.0, 0.0}) continue;
        acc += prod * duhamel_weight(e_col(m), e_row(n), beta, series_cutoff);
      }
    }
    partial[static_cast<std::size_t>(ch)] = acc;
  }
  cplx total{0.0, 0.0};
  for (const auto& p : partial) total += p;
  return total;
}

cplx weighted_diagonal(const arma::cx_mat& op, const arma::cx_mat& vectors,
                       const arma::vec& weights) {
  const arma::cx_mat image = op * vectors;
  const std::size_t n = vectors.n_cols;
  std::vector<cplx> terms(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    terms[kk] = weights(kk) * arma::cdot(vectors.col(kk), image.col(kk));
  }
  cplx total{0.0, 0.0};
  for (const auto& t : terms) total += t;
  return total;
}

namespace reference {

arma::sp_cx_mat assemble_columns(std::size_t dim, const ColumnFn& column) {
  std::vector<std::vector<Entry>> cols(dim);
  for (std::size_t col = 0; col < dim; ++col) column(col, cols[col]);
  return from_columns(dim, cols);
}

double midpoint_inverse_dispersion_sum(int nu, std::size_t n_half) {
  const double h = std::numbers::pi / static_cast<double>(n_half);
  std::vector<std::size_t> k(static_cast<std::size_t>(nu), 0);
  double acc = 0.0;
  while (true) {
    double e = 0.0;
    for (auto kj : k) e += 1.0 - std::cos((kj + 0.5) * h);
    acc += 1.0 / e;
    int j = nu - 1;
    while (j >= 0 && ++k[static_cast<std::size_t>(j)] == n_half) {
      k[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return acc;
}

cplx duhamel_sum(const arma::cx_mat& a, const arma::cx_mat& b, const arma::vec& e_row,
                 const arma::vec& e_col, double beta, double series_cutoff) {
  cplx acc{0.0, 0.0};
  for (std::size_t n = 0; n < a.n_rows; ++n) {
    for (std::size_t m = 0; m < a.n_cols; ++m) {
      acc += std::conj(a(n, m)) * b(n, m) * duhamel_weight(e_col(m), e_row(n), beta, series_cutoff);
    }
  }
  return acc;
}

cplx weighted_diagonal(const arma::cx_mat& op, const arma::cx_mat& vectors,
                       const arma::vec& weights) {
  cplx acc{0.0, 0.0};
  for (std::size_t k = 0; k < vectors.n_cols; ++k) {
    for (std::size_t i = 0; i < op.n_rows; ++i) {
      for (std::size_t j = 0; j < op.n_cols; ++j) {
        acc += weights(k) * std::conj(vectors(i, k)) * op(i, j) * vectors(j, k);
      }
    }
  }
  return acc;
}

}  // namespace reference
}  // namespace hhrp::kernels
