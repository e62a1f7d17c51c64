#pragma once

#include "hhrp/model.hpp"
#include "hhrp/report.hpp"
#include "hhrp/thermo.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace hhrp {

/// U - 2 g^2 / omega; throws std::invalid_argument unless omega > 0.
double u_eff(const ModelParams& params);

/// int_{(-pi, pi)^nu} dp / E(p) by shifted-midpoint grids and Richardson
/// extrapolation.
struct TorusIntegral {
  int nu = 0;
  double value = 0.0;
  double error = 0.0;  // |best extrapolant - runner-up|
  bool converged = false;  // error < 1e-4 |value|
  std::vector<std::size_t> grids;  // points per axis on [0, pi]
  std::vector<double> raw;         // plain midpoint values per grid
  std::vector<double> exponents;   // h-powers eliminated, in order
  std::vector<double> extrapolants;  // last entry of each Richardson column
};

/// Grids n0, 2 n0, ..., 2^{refinements-1} n0 points per half axis. grid_n = 0
/// picks n0 so the finest grid has at most 2^25 points. Throws
/// std::domain_error "integral diverges for ν ≤ 2" for nu <= 2 and
/// std::invalid_argument for refinements < 3.
TorusIntegral torus_integral(int nu, std::size_t grid_n = 0, int refinements = 4);

/// Same integral from 1/E = int_0^inf e^{-sE} ds:
/// (2 pi)^nu int_0^inf (e^{-s} I_0(s))^nu ds, with the large-s asymptotic
/// series for the tail.
double torus_integral_bessel(int nu);

/// Gamma-function closed form of the simple cubic Green function at the
/// origin, pi^{-3} int_{[0,pi]^3} dp / (1 - sum_j cos p_j / 3); equals
/// 3 (2 pi)^{-3} int_{(-pi,pi)^3} dp / E(p).
double watson_constant();

/// Process-wide cache of torus_integral(nu) with default grids.
const TorusIntegral& cached_torus_integral(int nu);

struct BoundReport {
  int nu = 0;
  ModelParams params;
  double u_eff = 0.0;
  double gap = 0.0;           // nu V - U_eff
  double entropy_term = 0.0;  // beta^-1 gap^-1 ln[4 / (1 - e^{-beta omega})]
  double hopping_term = 0.0;  // 8 nu t / gap
  double ir_term = 0.0;       // gamma1 int dp / E(p)
  double gamma2_term = 0.0;   // sqrt(t / V) / 4
  double rhs = 0.0;           // 1 - entropy - hopping - ir - gamma2
  bool certified = false;     // rhs > 0, gap > 0, nu >= 3
  std::string reason;         // empty when certified
};

/// gamma1 = (2 pi)^{-nu} ((beta V)^-1 + sqrt(t / V)) / 2
double gamma1(const ModelParams& params, int nu);
double gamma2(const ModelParams& params);

/// Evaluates the lower bound on the staggered charge correlation. For
/// nu <= 2 the infrared term is +inf. Throws std::invalid_argument on invalid
/// parameters or nu < 1.
BoundReport main_bound(const ModelParams& params, int nu);
/// Same with a precomputed value of int dp / E(p) (ignored for nu <= 2).
BoundReport main_bound(const ModelParams& params, int nu, double torus_value);

/// Parameter ranges; rows run over t, U, V, g, omega, beta with beta fastest.
struct SweepGrid {
  std::vector<double> t;
  std::vector<double> U;
  std::vector<double> V;
  std::vector<double> g;
  std::vector<double> omega;
  std::vector<double> beta;
  std::size_t size() const;
};

std::vector<BoundReport> phase_sweep(const SweepGrid& grid, int nu);

/// Header: t,U,V,g,omega,beta,u_eff,gap,entropy_term,hopping_term,ir_term,gamma2_term,rhs,certified
void write_sweep_csv(std::ostream& out, const std::vector<BoundReport>& rows);

/// Momentum-space forms of g, <h|(-Delta)h> and <f|tau^-1(-Delta)tau f>
/// (f = (-Delta)h) against real-space evaluation in the H'' state.
///
/// With hat h(p) = (2 pi)^{-nu/2} sum_x e^{-ixp} h_x and
/// S(p) = sum_z e^{-izp} <q_z q_o>'', the exact identities are
///   g  = (2 pi)^nu / |Lambda| sum_p 4 E^2 S |hat h|^2
///   D1 = (2 pi)^nu / |Lambda| sum_p 2 E |hat h|^2
///   D2 = (2 pi)^nu / |Lambda| sum_p 8 E^2 F |hat h|^2
/// since -Delta has eigenvalue 2 E(p). The forms with E, E^2, E^2 F in place
/// of 2E, 4E^2, 8E^2 F are reported through their ratios.
struct FourierCheck {
  double g_real = 0.0, g_fourier = 0.0, g_ratio_displayed = 0.0;
  double d1_real = 0.0, d1_fourier = 0.0, d1_ratio_displayed = 0.0;
  double d2_real = 0.0, d2_fourier = 0.0, d2_ratio_displayed = 0.0;
  /// S(p) = (2 pi)^{nu/2} hat G(p) per grid point, from <q_z q_o>'' and
  /// from <A_p* A_p>'' / |Lambda| with A_p = sum_x e^{ixp} q_x.
  std::vector<double> structure_factor;
  std::vector<double> structure_factor_direct;
  /// <q_o^2>'' = |Lambda|^-1 sum_p S(p)
  double q2 = 0.0;
  double condensate = 0.0;  // S(0) / |Lambda|
  /// condensate + |Lambda|^-1 sum_{p != 0} of the per-momentum bound on S(p):
  /// (2 pi)^{nu/2} [gamma1 / E + (2 pi)^{-nu} gamma2 F] from the displayed
  /// combination, and ((beta V)^-1 + sqrt(t/V)/2) / (2E) + sqrt(t/V) F from
  /// the Gaussian-domination combination with the exact identities.
  double qbound_displayed = 0.0;
  double qbound_sharp = 0.0;
  /// Largest violation of the per-momentum sharp bound over p != 0 (<= 0 if
  /// it holds everywhere).
  double sharp_pointwise_excess = 0.0;
  std::vector<CheckRecord> records;
  bool pass() const { return all_pass(records); }
};

/// `h2_state` must be the H'' thermal state of `model` with vectors.
FourierCheck finite_volume_fourier_check(const Model& model, const ThermalState& h2_state, const arma::cx_vec& h,
                                         double tol = 1e-9);

}  // namespace hhrp
