#pragma once

#include "hhrp/hilbert.hpp"
#include "hhrp/model.hpp"
#include "hhrp/report.hpp"
#include "hhrp/thermo.hpp"

#include <cstdint>
#include <vector>

namespace hhrp {

/// Antilinear isometry v -> W conj(v) between two spaces of equal dimension.
class AntiunitaryMap {
 public:
  explicit AntiunitaryMap(Operator w);
  const Operator& unitary_part() const { return w_; }
  arma::cx_vec apply(const arma::cx_vec& v) const;
  /// theta A theta^{-1} = W conj(A) W*
  Operator conjugate(const Operator& a) const;
  /// theta^{-1} B theta
  Operator conjugate_inverse(const Operator& b) const;

 private:
  Operator w_;
};

/// lambda (C (x) theta D theta^{-1} + h.c.) enters H with a minus sign.
struct CutTerm {
  double lambda = 0.0;
  Operator c;  // on H_L
  Operator d;  // on H_L
};

/// Factorization H = H_L (x) H_R for one model: the half bases, the
/// reflection theta : H_L -> H_R and the pieces of H''(h).
///
/// Left operators act on the basis of the left sites (global site index).
/// Right operators act on the basis of the right sites; they take the global
/// site index as well.
class ReflectionSetup {
 public:
  explicit ReflectionSetup(const Model& model);

  const Model& model() const { return model_; }
  const HilbertBasis& left_basis() const { return left_; }
  const HilbertBasis& right_basis() const { return right_; }
  const AntiunitaryMap& theta() const { return theta_; }

  Operator left_c(std::size_t site, Spin s) const;
  /// a = c (-1)^{N_L}
  Operator left_a(std::size_t site, Spin s) const;
  Operator right_c(std::size_t site, Spin s) const;
  Operator left_q(std::size_t site) const;
  Operator right_q(std::size_t site) const;
  Operator left_boson(std::size_t site, BosonKind kind) const;
  Operator right_boson(std::size_t site, BosonKind kind) const;
  Operator left_phase(std::size_t site, double theta) const;
  Operator right_phase(std::size_t site, double theta) const;

  /// Pairing terms of the bonds inside one half.
  Operator T2_left() const;
  Operator T2_right() const;
  /// (U_eff - nu V) sum q^2 + V/2 sum (q_x - h_x - q_y + h_y)^2 over the
  /// bonds inside the half, plus V/2 (q_x - h_x)^2 for every cut bond at x.
  /// `h` is indexed by global site and only its entries on the half are read.
  Operator P2_left(const arma::vec& h) const;
  Operator P2_right(const arma::vec& h) const;
  Operator K_left() const;
  Operator K_right() const;

  /// Cut-bond pieces on the full space.
  Operator T2_cut() const;
  Operator P2_cut(const arma::vec& h) const;
  /// The same sums restricted to cut bonds whose right endpoint is even.
  Operator T2_cut_even_right() const;
  Operator P2_cut_even_right(const arma::vec& h) const;

  /// Cut terms of H''(h): the pairing terms with lambda = t when the right
  /// endpoint is even and lambda = -t otherwise, and the charge terms
  /// C = q_l - h_l, D = q_l - h_{r^{-1}(l)} with lambda = V/2.
  std::vector<CutTerm> cut_terms(const arma::vec& h) const;
  /// A (x) 1 + 1 (x) theta B theta^{-1} - sum lambda (C (x) theta D theta^{-1} + h.c.)
  Operator dls_form(const Operator& a, const Operator& b, const std::vector<CutTerm>& terms) const;

  /// (h_L, r^{-1}(h_L)) and (r(h_R), h_R).
  arma::vec symmetric_from_left(const arma::vec& h) const;
  arma::vec symmetric_from_right(const arma::vec& h) const;
  /// r(h_R) written as a field on the left sites (other entries zero).
  arma::vec reflect_right_field(const arma::vec& h) const;

  Operator embed_left(const Operator& a) const;
  Operator embed_right(const Operator& b) const;

 private:
  Operator pairing_half(const HilbertBasis& basis, bool left) const;
  Operator charge_half(const HilbertBasis& basis, bool left, const arma::vec& h) const;
  std::size_t local(std::size_t site) const;

  const Model& model_;
  HilbertBasis left_;
  HilbertBasis right_;
  AntiunitaryMap theta_;
};

/// theta from a_{r(X)} -> c_X on fermions and the site relabelling on phonons.
AntiunitaryMap build_theta(const Lattice& lattice, const HilbertBasis& left, const HilbertBasis& right);

/// Generic reflection-positivity instance on C^n (x) C^n with theta = complex
/// conjugation.
struct DLSInstance {
  arma::cx_mat a;
  arma::cx_mat b;
  std::vector<arma::cx_mat> c;
  std::vector<arma::cx_mat> d;
  std::vector<double> lambda;
  double beta = 1.0;
};

struct DLSResult {
  double log_z_ab = 0.0;  // ln Z(A, B, C, D)
  double log_z_aa = 0.0;  // ln Z(A, A, C, C)
  double log_z_bb = 0.0;  // ln Z(B, B, D, D)
  /// ln Z(A,A,C,C) + ln Z(B,B,D,D) - 2 ln Z(A,B,C,D)
  double slack = 0.0;
  /// max over the instance operators of |Tr[X (x) conj X] - |Tr X|^2|
  double basic_residual = 0.0;
};

DLSInstance random_dls_instance(std::uint64_t seed, std::size_t max_dim = 8);
arma::cx_mat dls_hamiltonian(const arma::cx_mat& a, const arma::cx_mat& b, const std::vector<arma::cx_mat>& c,
                             const std::vector<arma::cx_mat>& d, const std::vector<double>& lambda);
DLSResult dls_check(const DLSInstance& inst);

/// ln Z(h) = ln Tr e^{-beta H''(h)} with T'' + K diagonalized block by block
/// once and P''(h) added as a diagonal.
class FieldPartition {
 public:
  explicit FieldPartition(const Model& model);
  double log_z(const arma::vec& h) const;

 private:
  const Model& model_;
  BlockedOperator fixed_;
};

struct Suite {
  std::vector<CheckRecord> records;
  bool pass() const { return all_pass(records); }
};

/// theta relations, the L/R splits of T'', P''(h), K and the DLS form of H''(h).
Suite theta_suite(const Model& model, std::uint64_t seed, double tol = 1e-10);
/// Literal splits whose cut sums only contain bonds with an even right
/// endpoint; returns max |T'' - split| and max |P''(h) - split|.
std::pair<double, double> even_right_split_residuals(const ReflectionSetup& setup, const arma::vec& h);

Suite dls_suite(std::uint64_t seed, std::size_t count = 1000, double tol = 1e-10, double equality_tol = 1e-12);
/// Reflection inequality and its symmetric equality case for `count` random fields.
Suite rp_suite(const Model& model, std::uint64_t seed, std::size_t count = 100, double tol = 1e-9);
/// Z(h) <= Z(0) for `count` random fields and Z(h0) = Z(0) for constants.
Suite gauss_suite(const Model& model, std::uint64_t seed, std::size_t count = 200, double tol = 1e-9,
                  double equality_tol = 1e-10);
/// Both reflection and Gaussian-domination checks sharing one FieldPartition.
Suite rp_gauss_suite(const Model& model, std::uint64_t seed, std::size_t count, double tol = 1e-9,
                     double equality_tol = 1e-10);

/// The infrared chain for `count` random complex fields.
Suite infrared_suite(const Model& model, std::uint64_t seed, std::size_t count = 100, double tol = 1e-9);

struct InfraredValues {
  QuadraticForms forms;
  double d1 = 0.0;  // <h|(-Delta) h>
  double d2 = 0.0;  // <f|tau^{-1}(-Delta)tau f>, f = (-Delta) h
  double b0 = 0.0;  // (beta V)^{-1} d1 / 2
  double b_sharp = 0.0;  // (beta V)^{-1} d1
  double c0 = 0.0;  // 4 beta t d2
  double falk_bruch = 0.0;  // (1/2) sqrt(bc) coth sqrt(c / 4b)
  double ginq_displayed = 0.0;
  double ginq_from_b0 = 0.0;
  double ginq_sharp = 0.0;
};
InfraredValues infrared_values(const Model& model, const Operator& h2, const ThermalState& h2_state,
                               const arma::cx_vec& h);
/// (1/2) sqrt(bc) coth sqrt(c / 4b), continued to its limit b when c -> 0 and
/// to 0 when b -> 0.
double falk_bruch_bound(double b, double c);

/// <n_x> = 1 under H for random parameter draws, plus u H u^{-1} = h0 + W
/// and D (h0 + W) D^{-1} = h0 + W.
Suite halffill_suite(const Lattice& lattice, std::uint64_t seed, std::size_t draws, int max_n_max,
                     double tol = 1e-10);
double max_density_deviation(const Model& model);

/// Lower-bound chain for <q_o^2>''.
Suite q2_suite(const Model& model, std::uint64_t seed, std::size_t pairs = 500, double tol = 1e-9);
/// Convexity bound on random (B, C): ln Tr e^{-(B+C)} <= <-B> + ln Tr e^{-C}; returns the slack.
double convexity_slack(const arma::cx_mat& b, const arma::cx_mat& c);

struct Q2Values {
  double gap = 0.0;  // nu V - U_eff
  double q2 = 0.0;   // <q_o^2>''
  double psi_energy = 0.0;
  double log_z = 0.0;
  double minus_m_per_site = 0.0;  // <-M>''/|Lambda|, M = H'' - K
  double t_per_site = 0.0;        // |<T''>''|/|Lambda|
  double lower_sharp = 0.0;       // with the 1/beta on the entropy term
  double lower_displayed = 0.0;
};
Q2Values q2_values(const Model& model);

}  // namespace hhrp
