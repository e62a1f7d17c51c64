#pragma once

#include "hhrp/hilbert.hpp"
#include "hhrp/model.hpp"

#include <complex>
#include <vector>

namespace hhrp {

/// Partition of the basis into blocks of equal sector label.
struct BlockPartition {
  std::vector<std::vector<arma::uword>> blocks;
  std::vector<arma::uword> block_of;  // basis index -> block

  static BlockPartition from_labels(const std::vector<int>& labels, std::size_t dim);
  static BlockPartition single(std::size_t dim);
  std::size_t size() const { return blocks.size(); }
  /// True if every nonzero of `op` lies inside a diagonal block.
  bool block_diagonal(const Operator& op) const;
};

/// Eigenpairs of a Hermitian operator, block by block, with the partition
/// function at one inverse temperature.
class SpectralData {
 public:
  struct Block {
    std::vector<arma::uword> indices;
    arma::vec eigenvalues;
    arma::cx_mat eigenvectors;  // columns; empty when only values were requested
  };

  /// Falls back to a single block when `h` is not block diagonal for the
  /// labels (or no labels are given).
  static SpectralData compute(const Operator& h, double beta, const std::vector<int>& labels = {},
                              bool with_vectors = true);

  double beta() const { return beta_; }
  std::size_t dim() const { return dim_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  bool has_vectors() const { return has_vectors_; }

  /// All eigenvalues, ascending.
  arma::vec eigenvalues() const;
  double ground_energy() const { return e0_; }
  /// ln Tr e^{-beta H}, evaluated as -beta E0 + ln sum e^{-beta (E - E0)}.
  double log_z() const { return log_z_; }
  /// Boltzmann weights e^{-beta (E - E0)} / sum, per block.
  const std::vector<arma::vec>& weights() const { return weights_; }

  /// max |H - Q diag(E) Q*| over all entries (needs vectors).
  double reconstruction_residual(const Operator& h) const;

 private:
  double beta_ = 0.0;
  std::size_t dim_ = 0;
  bool has_vectors_ = false;
  double e0_ = 0.0;
  double log_z_ = 0.0;
  std::vector<Block> blocks_;
  std::vector<arma::vec> weights_;
};

/// ln Tr e^{-beta H} together with the ground energy, from eigenvalues only.
double log_partition(const arma::vec& eigenvalues, double beta);

/// Dense diagonal blocks of a fixed operator M, so that ln Tr e^{-beta(M + diag d)}
/// can be evaluated repeatedly for diagonal shifts d that respect the blocks.
class BlockedOperator {
 public:
  BlockedOperator(const Operator& m, const std::vector<int>& labels);
  double log_z(const arma::vec& diagonal, double beta) const;
  arma::vec eigenvalues(const arma::vec& diagonal) const;
  const BlockPartition& partition() const { return partition_; }

 private:
  BlockPartition partition_;
  std::vector<arma::cx_mat> blocks_;
};

/// Tr[A e^{-beta H}] / Z.
std::complex<double> thermal_expectation(const Operator& a, const SpectralData& spec);

/// Duhamel two-point function
/// (A, B) = Z^{-1} int_0^1 dx Tr[e^{-x beta H} A* e^{-(1-x) beta H} B].
std::complex<double> duhamel(const Operator& a, const Operator& b, const SpectralData& spec);

/// Sorted eigenvalues of a Hermitian operator, computed block by block.
arma::vec block_eigenvalues(const Operator& h, const std::vector<int>& labels = {});

enum class Frame { H, H1, H2 };

/// Thermal state of one of H, H1 or H2 for a model.
struct ThermalState {
  Frame frame;
  SpectralData spec;
};
ThermalState thermal_state(const Model& model, Frame frame, bool with_vectors = true);

/// <q_x q_y> in the given thermal state.
double charge_correlation(const Model& model, const ThermalState& state, std::size_t x, std::size_t y);

/// A = <q|(-Delta) h> = sum_x q_x ((-Delta) h)_x
Operator charge_mode(const Model& model, const arma::cx_vec& h);

/// Closed form of [A, [H'', A*]] for A = <q|f>, f = (-Delta) h:
/// sum over pairing terms X = e^{-i alpha(phi_e - phi_o)} c*_e c*_o of
/// sign * t |f_e + f_o|^2 (X + X*). The commutator evaluates to sign = +1.
Operator nested_commutator_closed_form(const Model& model, const arma::cx_vec& h, double sign = +1.0);

struct QuadraticForms {
  double g = 0.0;  // <A* A>''
  double b = 0.0;  // (A, A)''
  double c = 0.0;  // beta <[A, [H'', A*]]>''
  double g_imag = 0.0;
  double b_imag = 0.0;
  double c_imag = 0.0;
  /// max entry of direct nested commutator minus the closed form
  double closed_form_residual = 0.0;
  /// same, against the closed form with the opposite overall sign
  double closed_form_residual_flipped = 0.0;
};

/// `h2` is H'' of `model` and `h2_state` its thermal state (with vectors).
QuadraticForms quadratic_form_quantities(const Model& model, const Operator& h2,
                                         const ThermalState& h2_state, const arma::cx_vec& h);

}  // namespace hhrp
