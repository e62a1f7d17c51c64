#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP implementation in
// hhrp::kernels and a plain serial one in hhrp::kernels::reference; the test
// suite checks they agree and bench/ compares their speed.
//
// Parallel reductions accumulate into fixed-size per-chunk partials that are
// summed in chunk order, so results do not depend on the thread count.

#include <armadillo>

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace hhrp::kernels {

using cplx = std::complex<double>;

struct Entry {
  std::size_t row;
  cplx value;
};

/// Fills `out` with the nonzero entries of column `col`.
using ColumnFn = std::function<void(std::size_t col, std::vector<Entry>& out)>;

/// Number of OpenMP threads used by the parallel kernels (<= 0 keeps the
/// runtime default).
void set_workers(int workers);
int workers();

arma::sp_cx_mat assemble_columns(std::size_t dim, const ColumnFn& column);

/// Checks once per process that the dense BLAS/LAPACK backend multiplies and
/// diagonalizes 256 x 256 matrices correctly; throws std::runtime_error if
/// not. Some OpenBLAS builds pick a faulty kernel on AVX-512 hosts and need
/// OPENBLAS_CORETYPE=Haswell.
void check_dense_backend();

/// Sum over the shifted midpoint grid (k + 1/2) h, h = pi / n_half, of
/// [0, pi]^nu of 1 / E(p). Never samples p = 0.
double midpoint_inverse_dispersion_sum(int nu, std::size_t n_half);

/// sum_{n,m} conj(a(n,m)) b(n,m) K(e_col(m), e_row(n)) where
/// K(x, y) = (e^{-beta x} - e^{-beta y}) / (beta (y - x)) with the
/// degenerate-gap series below `series_cutoff` in beta |x - y|.
/// Energies are expected already shifted by the ground-state energy.
cplx duhamel_sum(const arma::cx_mat& a, const arma::cx_mat& b, const arma::vec& e_row,
                 const arma::vec& e_col, double beta, double series_cutoff = 1e-6);

/// Weighted diagonal sum sum_k w_k <v_k|A|v_k> for the columns v_k of `vectors`.
cplx weighted_diagonal(const arma::cx_mat& op, const arma::cx_mat& vectors,
                       const arma::vec& weights);

/// Duhamel kernel K(x, y) as above; exposed for tests.
double duhamel_weight(double x, double y, double beta, double series_cutoff = 1e-6);

namespace reference {

arma::sp_cx_mat assemble_columns(std::size_t dim, const ColumnFn& column);
double midpoint_inverse_dispersion_sum(int nu, std::size_t n_half);
cplx duhamel_sum(const arma::cx_mat& a, const arma::cx_mat& b, const arma::vec& e_row,
                 const arma::vec& e_col, double beta, double series_cutoff = 1e-6);
cplx weighted_diagonal(const arma::cx_mat& op, const arma::cx_mat& vectors,
                       const arma::vec& weights);

}  // namespace reference
}  // namespace hhrp::kernels
