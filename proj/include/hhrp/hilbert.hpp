#pragma once

#include "hhrp/lattice.hpp"

#include <armadillo>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hhrp {

/// Operators are sparse complex matrices on the flat basis index space.
using Operator = arma::sp_cx_mat;
using StateVector = arma::cx_vec;

enum class Spin { up, down };
enum class BosonKind { annihilate, create, position, momentum, number };

class DimensionCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Occupation-number basis of F (x) P with phonons truncated at n_max per
/// site.
///
/// The space is laid out as H_L (x) H_R with H_half = F_half (x) P_half, so
///   index = ((f_L * B_L + p_L) * dim_R) + f_R * B_R + p_R
/// and arma::kron(A_L, B_R) is the operator A_L (x) B_R. Fermionic modes are
/// numbered 2 * site + (spin == down); left sites come first, so the
/// Jordan-Wigner string of a right mode always contains the full (-1)^{N_L}.
class HilbertBasis {
 public:
  static constexpr std::size_t kDefaultCap = 16384;

  static HilbertBasis for_lattice(const Lattice& lattice, int n_max,
                                  std::size_t cap = kDefaultCap);
  /// Bare basis without geometry (e.g. a single site, or one half of a
  /// lattice). Sites [0, n_left) form the left factor.
  static HilbertBasis for_sites(std::size_t n_left, std::size_t n_right, int n_max,
                                std::size_t cap = kDefaultCap);

  struct Config {
    std::uint64_t fermions;  // bit k = occupation of mode k
    std::size_t phonons_left;
    std::size_t phonons_right;
  };

  std::size_t sites() const { return n_left_ + n_right_; }
  std::size_t left_sites() const { return n_left_; }
  std::size_t right_sites() const { return n_right_; }
  std::size_t modes() const { return 2 * sites(); }
  int n_max() const { return n_max_; }
  std::size_t levels() const { return static_cast<std::size_t>(n_max_) + 1; }

  std::size_t dim() const { return left_dim_ * right_dim_; }
  std::size_t left_dim() const { return left_dim_; }
  std::size_t right_dim() const { return right_dim_; }
  std::size_t fermion_dim() const { return std::size_t{1} << modes(); }
  std::size_t boson_dim() const { return boson_left_ * boson_right_; }

  static std::size_t mode(std::size_t site, Spin s) { return 2 * site + (s == Spin::down ? 1 : 0); }

  Config decode(std::size_t index) const;
  std::size_t encode(const Config& c) const;

  int phonons(const Config& c, std::size_t site) const;
  Config with_phonons(Config c, std::size_t site, int n) const;
  int total_phonons(const Config& c) const;

  static bool occupied(const Config& c, std::size_t mode) { return (c.fermions >> mode) & 1U; }
  int site_charge(const Config& c, std::size_t site) const;  // n_x - 1

 private:
  HilbertBasis() = default;

  std::size_t n_left_ = 0;
  std::size_t n_right_ = 0;
  int n_max_ = 0;
  std::size_t boson_left_ = 1;
  std::size_t boson_right_ = 1;
  std::size_t left_dim_ = 1;
  std::size_t right_dim_ = 1;
  std::vector<std::size_t> radix_;  // B^k
};

// Elementary operators.
Operator identity(const HilbertBasis& basis);
Operator annihilate(const HilbertBasis& basis, std::size_t mode);
Operator create(const HilbertBasis& basis, std::size_t mode);
Operator number(const HilbertBasis& basis, std::size_t mode);
Operator site_number(const HilbertBasis& basis, std::size_t site);
/// q_x = n_x - 1.
Operator charge(const HilbertBasis& basis, std::size_t site);
/// s_x = n_{x up} - n_{x down}.
Operator spin_density(const HilbertBasis& basis, std::size_t site);
/// (-1)^{sum of occupations over the listed modes}.
Operator fermion_parity(const HilbertBasis& basis, const std::vector<std::size_t>& modes);
/// (-1)^{N_L}, parity of all left-half modes.
Operator left_parity(const HilbertBasis& basis);

/// Truncated single-site ladder matrices.
arma::cx_mat ladder_matrix(int n_max);
arma::cx_mat boson_matrix(int n_max, BosonKind kind, double omega);

/// Embeds a (n_max+1)x(n_max+1) matrix acting on the phonon of `site`.
Operator site_phonon_operator(const HilbertBasis& basis, std::size_t site, const arma::cx_mat& m);
Operator boson(const HilbertBasis& basis, std::size_t site, BosonKind kind, double omega = 1.0);
/// N_p = sum_x b_x^* b_x.
Operator phonon_number(const HilbertBasis& basis);

/// e^{i theta m} for a Hermitian matrix m, via its eigendecomposition.
arma::cx_mat exp_i_hermitian(const arma::cx_mat& m, double theta);

/// e^{i theta phi_x} with phi_x = (b + b^*) / sqrt(2 omega), built from the
/// eigendecomposition of the truncated (Hermitian) phi, hence exactly unitary.
arma::cx_mat phase_matrix(int n_max, double theta, double omega);
Operator phase(const HilbertBasis& basis, std::size_t site, double theta, double omega);

/// Unitary U with U c_X U^{-1} = c_{perm[X]} for every mode X.
Operator mode_permutation(const HilbertBasis& basis, const std::vector<std::size_t>& perm);

/// Operator that maps a basis configuration to at most one configuration
/// with a coefficient; used for diagonal and permutation-like operators.
StateVector basis_state(const HilbertBasis& basis, std::size_t index);
StateVector vacuum(const HilbertBasis& basis);

// Algebra.
Operator adjoint(const Operator& a);
Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);
/// Largest |a_ij - b_ij|.
double max_abs_diff(const Operator& a, const Operator& b);
double max_abs(const Operator& a);
bool is_hermitian(const Operator& a, double tol);
/// max |(A A^* - 1)_ij|.
double unitarity_residual(const Operator& u);
/// A (x) B on H_L (x) H_R.
Operator tensor(const Operator& left, const Operator& right);

}  // namespace hhrp
