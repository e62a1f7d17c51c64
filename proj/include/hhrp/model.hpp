#pragma once

#include "hhrp/hilbert.hpp"
#include "hhrp/lattice.hpp"

#include <complex>
#include <vector>

namespace hhrp {

struct ModelParams {
  double t = 1.0;
  double U = 1.0;
  double V = 1.0;
  double g = 0.0;
  double omega = 1.0;
  double beta = 1.0;
  int n_max = 1;

  /// Throws std::invalid_argument unless t, U, V, omega > 0, beta >= 0 and
  /// n_max >= 0.
  void validate() const;
  /// alpha = sqrt(2) omega^{-3/2} g
  double alpha() const;
  /// U_eff = U - 2 g^2 / omega
  double u_eff() const;
};

/// Quantum numbers used to block-diagonalize Hamiltonians.
enum class SectorKind {
  none,
  /// (N_up, N_down): conserved by H, H' and the hole-particle transform of H.
  particle_numbers,
  /// (Q_up, Q_down) with Q_s = sum_even n_xs - sum_odd n_xs: conserved by
  /// the pairing form H'' and H''(h).
  staggered_charges,
};

/// Hamiltonians and transformations of the extended Holstein-Hubbard model
/// on one lattice and basis. Elementary operators are cached; the builders
/// return fresh matrices.
///
/// Naming: T, P, I, K are the pieces of H; T1, P1, H1 the Lang-Firsov form;
/// T2, P2, H2 the pairing (zigzag) form.
class Model {
 public:
  Model(const Lattice& lattice, const ModelParams& params,
        std::size_t cap = HilbertBasis::kDefaultCap);

  const Lattice& lattice() const { return lattice_; }
  const HilbertBasis& basis() const { return basis_; }
  const ModelParams& params() const { return params_; }
  std::size_t dim() const { return basis_.dim(); }

  const Operator& c(std::size_t site, Spin s) const { return c_[HilbertBasis::mode(site, s)]; }
  const Operator& c(std::size_t mode) const { return c_.at(mode); }
  const Operator& q(std::size_t site) const { return q_.at(site); }
  const Operator& phi(std::size_t site) const { return phi_.at(site); }
  /// e^{i theta phi_x}
  Operator phase(std::size_t site, double theta) const;

  Operator T() const;
  Operator P() const;
  Operator I() const;
  Operator K() const;
  Operator H() const;

  Operator T1() const { return T1(params_.alpha()); }
  Operator T1(double alpha) const;
  Operator P1() const { return P1(params_.u_eff()); }
  Operator P1(double u_eff) const;
  Operator H1() const { return H1(params_.alpha(), params_.u_eff()); }
  Operator H1(double alpha, double u_eff) const;

  /// e^{-i pi N_p / 2} e^{L}, L = -i omega^{-3/2} g sum_x q_x pi_x; the second
  /// factor is exponentiated site by site on each charge eigenspace.
  Operator lang_firsov() const;

  /// Zigzag unitary prod_{x odd} v_{x up} v_{x down} in site order, with
  /// v_{x s} = prod_{z != x} (-1)^{n_{z s}} (c*_{x s} + c_{x s}).
  Operator zigzag() const;

  Operator T2() const;
  Operator P2() const;
  Operator H2() const;
  /// Diagonal of P''(h) in the occupation basis.
  arma::vec P2_diagonal(const arma::vec& h) const;
  Operator P2(const arma::vec& h) const;
  Operator H2(const arma::vec& h) const;

  /// a_X = c_X (-1)^{N_L} for a mode X on the left half.
  Operator a(std::size_t mode) const;

  /// u with u c_{x up} u^{-1} = c_{x up}, u c_{x down} u^{-1} = (-1)^{|x|} c*_{x down}.
  Operator hole_particle() const;
  /// Spin swap on every site composed with b_x -> -b_x.
  Operator spin_flip() const;
  /// T + K
  Operator hp_free() const;
  /// U sum s^2 + V sum s_x s_y + g sum s_x (b_x + b*_x)
  Operator hp_interaction() const;

  /// Sector label per basis index.
  std::vector<int> sector_labels(SectorKind kind) const;

  /// Sum over one bond of the pairing hopping
  /// (-t)(e^{-i alpha(phi_e - phi_o)} c*_e c*_o + h.c.), e the even endpoint.
  Operator pairing_bond(const Bond& b) const;

 private:
  Operator klein(std::size_t mode) const;

  Lattice lattice_;
  ModelParams params_;
  HilbertBasis basis_;
  std::vector<Operator> c_;
  std::vector<Operator> q_;
  std::vector<Operator> phi_;
};

/// Constants measured from the explicit Lang-Firsov unitary, next to the
/// ones used to build H1.
struct LangFirsovDiagnostics {
  int n_max = 0;
  double unitarity = 0.0;
  /// U b_x U^{-1} ~ b_phase * b_x + displacement * q_x
  std::complex<double> b_phase;
  std::complex<double> displacement;
  double displayed_displacement = 0.0;  // -g / omega
  double measured_alpha = 0.0;
  double displayed_alpha = 0.0;
  /// Lowest energies at t = V = 0 on one site: E(q = +-1) - E(q = 0).
  double measured_u_eff = 0.0;
  double displayed_u_eff = 0.0;
  /// max |E_k(H1) - E_k(U H U^{-1})| over the ten lowest levels, with the
  /// displayed constants and with the polaron constants sqrt(2/omega) g and
  /// the measured U_eff.
  double spectrum_mismatch_displayed = 0.0;
  double spectrum_mismatch_measured = 0.0;
  /// Unitary invariance: max |spec(U H U^{-1}) - spec(H)|.
  double spectrum_invariance = 0.0;
  bool matches_display = false;
};

/// Requires n_max >= 1 (the phonon matrix elements used are between the
/// lowest two levels).
LangFirsovDiagnostics lang_firsov_diagnostics(const Model& model, double tol = 1e-6);

}  // namespace hhrp
