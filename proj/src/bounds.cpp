#include "hhrp/bounds.hpp"

#include "hhrp/kernels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <stdexcept>

namespace hhrp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kConvergedRel = 1e-4;
constexpr double kMaxGridPoints = 33554432.0;  // 2^25

void require_divergence_free(int nu) {
  if (nu <= 2) throw std::domain_error("integral diverges for ν ≤ 2");
}

/// Error expansion of the shifted-midpoint rule for 1/E: the singular part
/// contributes h^{nu-2+2j}, the smooth part h^{2j}.
std::vector<double> richardson_exponents(int nu, std::size_t count) {
  std::set<int> e;
  for (int j = 0; static_cast<int>(e.size()) < static_cast<int>(count) + 4; ++j) {
    e.insert(nu - 2 + 2 * j);
    if (j > 0) e.insert(2 * j);
  }
  std::vector<double> out;
  for (int v : e) {
    if (out.size() == count) break;
    out.push_back(v);
  }
  return out;
}

std::size_t default_base_grid(int nu, int refinements) {
  std::size_t n0 = 2;
  while (true) {
    const double finest = static_cast<double>(2 * n0) * std::pow(2.0, refinements - 1);
    if (std::pow(finest, nu) > kMaxGridPoints) break;
    n0 *= 2;
  }
  return n0;
}

/// Coefficients of (sum_k a_k s^-k)^nu up to s^-order.
std::vector<double> series_power(const std::vector<double>& a, int nu) {
  std::vector<double> out(a.size(), 0.0);
  out[0] = 1.0;
  for (int r = 0; r < nu; ++r) {
    std::vector<double> next(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; i + j < a.size(); ++j) next[i + j] += out[i] * a[j];
    out = next;
  }
  return out;
}

void check_params(const ModelParams& params, int nu) {
  if (nu < 1) throw std::invalid_argument("nu must be >= 1");
  params.validate();
}

}  // namespace

double u_eff(const ModelParams& params) {
  if (!(params.omega > 0.0)) throw std::invalid_argument("omega must be > 0");
  return params.u_eff();
}

TorusIntegral torus_integral(int nu, std::size_t grid_n, int refinements) {
  require_divergence_free(nu);
  if (refinements < 3) throw std::invalid_argument("torus_integral needs at least 3 refinements");
  const std::size_t n0 = grid_n == 0 ? default_base_grid(nu, refinements) : grid_n;
  TorusIntegral r;
  r.nu = nu;
  for (int k = 0; k < refinements; ++k) {
    const std::size_t n = n0 << k;
    const double h = std::numbers::pi / static_cast<double>(n);
    r.grids.push_back(n);
    r.raw.push_back(std::pow(2.0 * h, nu) * kernels::midpoint_inverse_dispersion_sum(nu, n));
  }
  r.exponents = richardson_exponents(nu, r.raw.size() - 1);
  std::vector<double> col = r.raw;
  r.extrapolants.push_back(col.back());
  for (double p : r.exponents) {
    const double w = std::pow(2.0, p);
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < col.size(); ++i) next.push_back((w * col[i + 1] - col[i]) / (w - 1.0));
    col = next;
    r.extrapolants.push_back(col.back());
  }
  r.value = r.extrapolants.back();
  r.error = std::abs(r.value - r.extrapolants[r.extrapolants.size() - 2]);
  r.converged = r.error < kConvergedRel * std::abs(r.value);
  return r;
}

double torus_integral_bessel(int nu) {
  require_divergence_free(nu);
  constexpr double cut = 100.0;
  const auto f = [nu](double s) { return std::pow(std::exp(-s) * std::cyl_bessel_i(0.0, s), nu); };
  const double body = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, cut, 20, 1e-14);
  // e^{-s} I_0(s) ~ (2 pi s)^{-1/2} sum_k a_k s^-k, a_k = ((2k-1)!!)^2 / (8^k k!)
  const std::vector<double> a{1.0, 1.0 / 8.0, 9.0 / 128.0, 225.0 / 3072.0, 11025.0 / 98304.0};
  const auto c = series_power(a, nu);
  const double half = nu / 2.0;
  double tail = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double e = half + static_cast<double>(k) - 1.0;
    tail += c[k] * std::pow(cut, -e) / e;
  }
  tail *= std::pow(kTwoPi, -half);
  return std::pow(kTwoPi, nu) * (body + tail);
}

double watson_constant() {
  const double pi3 = std::pow(std::numbers::pi, 3);
  return std::sqrt(6.0) / (32.0 * pi3) * std::tgamma(1.0 / 24.0) * std::tgamma(5.0 / 24.0) *
         std::tgamma(7.0 / 24.0) * std::tgamma(11.0 / 24.0);
}

const TorusIntegral& cached_torus_integral(int nu) {
  static std::mutex mu;
  static std::map<int, TorusIntegral> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(nu);
  if (it == cache.end()) it = cache.emplace(nu, torus_integral(nu)).first;
  return it->second;
}

double gamma1(const ModelParams& params, int nu) {
  return std::pow(kTwoPi, -nu) * 0.5 * (1.0 / (params.beta * params.V) + std::sqrt(params.t / params.V));
}

double gamma2(const ModelParams& params) { return 0.25 * std::sqrt(params.t / params.V); }

BoundReport main_bound(const ModelParams& params, int nu) {
  check_params(params, nu);
  return main_bound(params, nu, nu <= 2 ? std::numeric_limits<double>::infinity() : cached_torus_integral(nu).value);
}

BoundReport main_bound(const ModelParams& params, int nu, double torus_value) {
  check_params(params, nu);
  const double inf = std::numeric_limits<double>::infinity();
  BoundReport r;
  r.nu = nu;
  r.params = params;
  r.u_eff = u_eff(params);
  r.gap = nu * params.V - r.u_eff;
  if (r.gap > 0.0) {
    const double log_term = std::log(4.0 / (1.0 - std::exp(-params.beta * params.omega)));
    r.entropy_term = params.beta > 0.0 ? log_term / (params.beta * r.gap) : inf;
    r.hopping_term = 8.0 * nu * params.t / r.gap;
  } else {
    r.entropy_term = inf;
    r.hopping_term = inf;
  }
  r.ir_term = nu <= 2 ? inf : gamma1(params, nu) * torus_value;
  r.gamma2_term = gamma2(params);
  r.rhs = 1.0;
  r.rhs -= r.entropy_term;
  r.rhs -= r.hopping_term;
  r.rhs -= r.ir_term;
  r.rhs -= r.gamma2_term;
  if (nu <= 2) {
    r.reason = "nu <= 2: the infrared integral diverges";
  } else if (!(r.gap > 0.0)) {
    r.reason = "gap = nu V - U_eff <= 0";
  } else if (!(r.rhs > 0.0)) {
    r.reason = "rhs <= 0";
  }
  r.certified = r.reason.empty();
  return r;
}

std::size_t SweepGrid::size() const { return t.size() * U.size() * V.size() * g.size() * omega.size() * beta.size(); }

std::vector<BoundReport> phase_sweep(const SweepGrid& grid, int nu) {
  if (nu < 1) throw std::invalid_argument("nu must be >= 1");
  const double torus = nu <= 2 ? std::numeric_limits<double>::infinity() : cached_torus_integral(nu).value;
  const std::size_t n = grid.size();
  std::vector<ModelParams> points;
  points.reserve(n);
  for (double t : grid.t)
    for (double u : grid.U)
      for (double v : grid.V)
        for (double g : grid.g)
          for (double w : grid.omega)
            for (double b : grid.beta) {
              ModelParams p;
              p.t = t;
              p.U = u;
              p.V = v;
              p.g = g;
              p.omega = w;
              p.beta = b;
              p.validate();
              points.push_back(p);
            }
  std::vector<BoundReport> rows(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    rows[static_cast<std::size_t>(i)] = main_bound(points[static_cast<std::size_t>(i)], nu, torus);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<BoundReport>& rows) {
  out << "t,U,V,g,omega,beta,u_eff,gap,entropy_term,hopping_term,ir_term,gamma2_term,rhs,certified\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : rows) {
    const auto& p = r.params;
    out << p.t << ',' << p.U << ',' << p.V << ',' << p.g << ',' << p.omega << ',' << p.beta << ',' << r.u_eff << ','
        << r.gap << ',' << r.entropy_term << ',' << r.hopping_term << ',' << r.ir_term << ',' << r.gamma2_term << ','
        << r.rhs << ',' << (r.certified ? "true" : "false") << '\n';
  }
  out.precision(old_precision);
}

FourierCheck finite_volume_fourier_check(const Model& model, const ThermalState& h2_state, const arma::cx_vec& h,
                                         double tol) {
  if (h2_state.frame != Frame::H2) throw std::invalid_argument("finite_volume_fourier_check needs the H'' state");
  const auto& lat = model.lattice();
  const auto& par = model.params();
  const std::size_t n = lat.size();
  if (h.n_elem != n) throw std::invalid_argument("field size does not match the lattice");
  const int nu = lat.nu();
  const double vol = static_cast<double>(n);
  const double norm = std::pow(kTwoPi, nu) / vol;
  const MomentumGrid grid(lat);
  const std::size_t o = lat.origin();

  arma::mat G(n, n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y) G(x, y) = G(y, x) = charge_correlation(model, h2_state, x, y);

  FourierCheck r;
  const arma::cx_vec f = -lat.laplacian(h);
  const arma::cx_vec tf = lat.stagger(f);
  r.g_real = arma::cdot(f, arma::cx_vec(G * f)).real();
  r.d1_real = arma::cdot(h, f).real();
  r.d2_real = arma::cdot(f, lat.stagger(arma::cx_vec(-lat.laplacian(tf)))).real();

  const arma::cx_vec hat = grid.fourier(h);
  arma::cx_vec gcol(n);
  for (std::size_t z = 0; z < n; ++z) gcol(z) = G(z, o);
  // S(p) = sum_z e^{-izp} G(z) = (2 pi)^{nu/2} hat G(p)
  const arma::cx_vec s_hat = std::pow(kTwoPi, nu / 2.0) * grid.fourier(gcol);

  const double rt = std::sqrt(par.t / par.V);
  const double g1 = gamma1(par, nu);
  const double g2 = gamma2(par);
  double g_disp = 0.0, d1_disp = 0.0, d2_disp = 0.0;
  double sum_s = 0.0, tail_disp = 0.0, tail_sharp = 0.0;
  double s_imag = 0.0;
  double direct_residual = 0.0;
  r.sharp_pointwise_excess = -std::numeric_limits<double>::infinity();
  double min_s = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = grid.point(i);
    const auto [e, fdisp] = dispersion(p);
    const double w = std::norm(hat(i));
    const double s = s_hat(i).real();
    s_imag = std::max(s_imag, std::abs(s_hat(i).imag()));
    r.structure_factor.push_back(s);
    min_s = std::min(min_s, s);

    Operator ap(model.dim(), model.dim());
    for (std::size_t x = 0; x < n; ++x) {
      double phase = 0.0;
      for (int j = 0; j < nu; ++j) phase += lat.coord(x)[static_cast<std::size_t>(j)] * p(static_cast<arma::uword>(j));
      ap += std::polar(1.0, phase) * model.q(x);
    }
    const double direct = thermal_expectation(Operator(ap.t() * ap), h2_state.spec).real() / vol;
    r.structure_factor_direct.push_back(direct);
    direct_residual = std::max(direct_residual, std::abs(direct - s));

    r.g_fourier += norm * 4.0 * e * e * s * w;
    r.d1_fourier += norm * 2.0 * e * w;
    r.d2_fourier += norm * 8.0 * e * e * fdisp * w;
    g_disp += norm * e * e * s * w;
    d1_disp += norm * e * w;
    d2_disp += norm * e * e * fdisp * w;

    sum_s += s;
    if (e > 0.0) {
      tail_disp += std::pow(kTwoPi, nu / 2.0) * (g1 / e + std::pow(kTwoPi, -nu) * g2 * fdisp);
      const double sharp = (1.0 / (par.beta * par.V) + 0.5 * rt) / (2.0 * e) + rt * fdisp;
      tail_sharp += sharp;
      r.sharp_pointwise_excess = std::max(r.sharp_pointwise_excess, s - sharp);
    } else {
      r.condensate = s / vol;
    }
  }
  r.q2 = sum_s / vol;
  r.qbound_displayed = r.condensate + tail_disp / vol;
  r.qbound_sharp = r.condensate + tail_sharp / vol;
  const auto ratio = [](double a, double b) { return b == 0.0 ? std::numeric_limits<double>::quiet_NaN() : a / b; };
  r.g_ratio_displayed = ratio(r.g_real, g_disp);
  r.d1_ratio_displayed = ratio(r.d1_real, d1_disp);
  r.d2_ratio_displayed = ratio(r.d2_real, d2_disp);

  // Relative to the magnitude once it exceeds 1.
  const double scale_g = std::max(1.0, std::abs(r.g_real));
  const double scale_1 = std::max(1.0, std::abs(r.d1_real));
  const double scale_2 = std::max(1.0, std::abs(r.d2_real));
  r.records.push_back(equality("fourier_g", "g = (2pi)^nu/|Lambda| sum_p 4 E(p)^2 S(p) |hat h(p)|^2", r.g_real, r.g_fourier,
                               tol * scale_g));
  r.records.push_back(equality("fourier_d1", "<h|(-Delta)h> = (2pi)^nu/|Lambda| sum_p 2 E(p) |hat h(p)|^2",
                               r.d1_real, r.d1_fourier, tol * scale_1));
  r.records.push_back(equality("fourier_d2",
                               "<f|tau^-1(-Delta)tau f> = (2pi)^nu/|Lambda| sum_p 8 E(p)^2 F(p) |hat h(p)|^2, f = (-Delta)h",
                               r.d2_real, r.d2_fourier, tol * scale_2));
  r.records.push_back(inequality("structure_factor_nonnegative", "(2pi)^{nu/2} hat G(p) >= 0 at every grid p", 0.0, min_s, tol));
  r.records.push_back(identity("structure_factor_real", "Im (2pi)^{nu/2} hat G(p) = 0", s_imag, tol));
  r.records.push_back(identity("structure_factor_direct", "(2pi)^{nu/2} hat G(p) = <A_p* A_p>''/|Lambda|, A_p = sum_x e^{ixp} q_x",
                               direct_residual, tol));
  r.records.push_back(equality("structure_factor_sum", "<q_o^2>'' = |Lambda|^-1 sum_p (2pi)^{nu/2} hat G(p)", G(o, o), r.q2, tol));
  return r;
}

}  // namespace hhrp
