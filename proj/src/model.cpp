#include "hhrp/model.hpp"

#include "hhrp/kernels.hpp"
#include "hhrp/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hhrp {

namespace {

template <typename F>
Operator diagonal(const HilbertBasis& basis, F value) {
  return kernels::assemble_columns(basis.dim(), [&](std::size_t col, std::vector<kernels::Entry>& out) {
    const double v = value(basis.decode(col));
    if (v != 0.0) out.push_back({col, v});
  });
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(name) + " must be a finite number > 0");
  }
}

std::size_t even_end(const Lattice& lat, const Bond& b) { return lat.is_even(b.from) ? b.from : b.to; }
std::size_t odd_end(const Lattice& lat, const Bond& b) { return lat.is_even(b.from) ? b.to : b.from; }

}  // namespace

void ModelParams::validate() const {
  require_positive(t, "t");
  require_positive(U, "U");
  require_positive(V, "V");
  require_positive(omega, "omega");
  if (!std::isfinite(g)) throw std::invalid_argument("g must be finite");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be finite and >= 0");
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
}

double ModelParams::alpha() const { return std::sqrt(2.0) * std::pow(omega, -1.5) * g; }

double ModelParams::u_eff() const { return U - 2.0 * g * g / omega; }

Model::Model(const Lattice& lattice, const ModelParams& params, std::size_t cap)
    : lattice_(lattice), params_(params), basis_(HilbertBasis::for_lattice(lattice, params.n_max, cap)) {
  params_.validate();
  c_.reserve(basis_.modes());
  for (std::size_t m = 0; m < basis_.modes(); ++m) c_.push_back(annihilate(basis_, m));
  for (std::size_t x = 0; x < basis_.sites(); ++x) {
    q_.push_back(charge(basis_, x));
    phi_.push_back(boson(basis_, x, BosonKind::position, params_.omega));
  }
}

Operator Model::phase(std::size_t site, double theta) const {
  return hhrp::phase(basis_, site, theta, params_.omega);
}

Operator Model::T() const {
  Operator out(dim(), dim());
  for (const auto& b : lattice_.bonds()) {
    for (Spin s : {Spin::up, Spin::down}) {
      const Operator hop = adjoint(c(b.from, s)) * c(b.to, s);
      out += -params_.t * (hop + adjoint(hop));
    }
  }
  return out;
}

Operator Model::P() const {
  Operator out(dim(), dim());
  for (std::size_t x = 0; x < basis_.sites(); ++x) out += params_.U * (q(x) * q(x));
  for (const auto& b : lattice_.bonds()) out += params_.V * (q(b.from) * q(b.to));
  return out;
}

Operator Model::I() const {
  Operator out(dim(), dim());
  for (std::size_t x = 0; x < basis_.sites(); ++x) {
    const Operator bb = boson(basis_, x, BosonKind::annihilate) + boson(basis_, x, BosonKind::create);
    out += params_.g * (q(x) * bb);
  }
  return out;
}

Operator Model::K() const { return params_.omega * phonon_number(basis_); }

Operator Model::H() const { return T() + P() + I() + K(); }

Operator Model::T1(double alpha) const {
  Operator out(dim(), dim());
  for (const auto& b : lattice_.bonds()) {
    const Operator ph = phase(b.from, -alpha) * phase(b.to, alpha);
    for (Spin s : {Spin::up, Spin::down}) {
      const Operator term = ph * (adjoint(c(b.from, s)) * c(b.to, s));
      out += -params_.t * (term + adjoint(term));
    }
  }
  return out;
}

Operator Model::P1(double u_eff) const {
  Operator out(dim(), dim());
  for (std::size_t x = 0; x < basis_.sites(); ++x) out += u_eff * (q(x) * q(x));
  for (const auto& b : lattice_.bonds()) out += params_.V * (q(b.from) * q(b.to));
  return out;
}

Operator Model::H1(double alpha, double u_eff) const { return T1(alpha) + P1(u_eff) + K(); }

Operator Model::lang_firsov() const {
  const double kappa = std::pow(params_.omega, -1.5) * params_.g;
  const arma::cx_mat pi = boson_matrix(params_.n_max, BosonKind::momentum, params_.omega);
  Operator eL = identity(basis_);
  for (std::size_t x = 0; x < basis_.sites(); ++x) {
    Operator factor(dim(), dim());
    for (int qv = -1; qv <= 1; ++qv) {
      const Operator proj = diagonal(basis_, [&](const HilbertBasis::Config& c) {
        return basis_.site_charge(c, x) == qv ? 1.0 : 0.0;
      });
      factor += proj * site_phonon_operator(basis_, x, exp_i_hermitian(pi, -kappa * qv));
    }
    eL = eL * factor;
  }
  const Operator rot = kernels::assemble_columns(dim(), [&](std::size_t col, std::vector<kernels::Entry>& out) {
    const int n = basis_.total_phonons(basis_.decode(col));
    out.push_back({col, std::polar(1.0, -std::numbers::pi * n / 2.0)});
  });
  return rot * eL;
}

Operator Model::klein(std::size_t mode) const {
  std::vector<std::size_t> others;
  for (std::size_t m = 0; m < basis_.modes(); ++m) {
    if (m != mode) others.push_back(m);
  }
  return fermion_parity(basis_, others);
}

Operator Model::zigzag() const {
  Operator out = identity(basis_);
  for (std::size_t x = 0; x < basis_.sites(); ++x) {
    if (lattice_.is_even(x)) continue;
    for (Spin s : {Spin::up, Spin::down}) {
      std::vector<std::size_t> same;
      for (std::size_t z = 0; z < basis_.sites(); ++z) {
        if (z != x) same.push_back(HilbertBasis::mode(z, s));
      }
      const std::size_t m = HilbertBasis::mode(x, s);
      out = out * (fermion_parity(basis_, same) * (adjoint(c(m)) + c(m)));
    }
  }
  return out;
}

Operator Model::pairing_bond(const Bond& b) const {
  const std::size_t e = even_end(lattice_, b);
  const std::size_t o = odd_end(lattice_, b);
  const double alpha = params_.alpha();
  const Operator ph = phase(e, -alpha) * phase(o, alpha);
  Operator out(dim(), dim());
  for (Spin s : {Spin::up, Spin::down}) {
    const Operator x = ph * (adjoint(c(e, s)) * adjoint(c(o, s)));
    out += -params_.t * (x + adjoint(x));
  }
  return out;
}

Operator Model::T2() const {
  Operator out(dim(), dim());
  for (const auto& b : lattice_.bonds()) out += pairing_bond(b);
  return out;
}

Operator Model::P2() const {
  Operator out(dim(), dim());
  const double ue = params_.u_eff();
  for (std::size_t x = 0; x < basis_.sites(); ++x) out += ue * (q(x) * q(x));
  for (const auto& b : lattice_.bonds()) out -= params_.V * (q(b.from) * q(b.to));
  return out;
}

Operator Model::H2() const { return T2() + P2() + K(); }

arma::vec Model::P2_diagonal(const arma::vec& h) const {
  if (h.n_elem != lattice_.size()) throw std::invalid_argument("field length does not match lattice");
  const double nu = lattice_.nu();
  const double onsite = params_.u_eff() - nu * params_.V;
  const double half_v = 0.5 * params_.V;
  const auto& bonds = lattice_.bonds();
  arma::vec d(dim());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(dim());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto c = basis_.decode(static_cast<std::size_t>(i));
    double acc = 0.0;
    for (std::size_t x = 0; x < basis_.sites(); ++x) {
      const double qx = basis_.site_charge(c, x);
      acc += onsite * qx * qx;
    }
    for (const auto& b : bonds) {
      const double w = basis_.site_charge(c, b.from) - h(b.from) - basis_.site_charge(c, b.to) + h(b.to);
      acc += half_v * w * w;
    }
    d(static_cast<arma::uword>(i)) = acc;
  }
  return d;
}

Operator Model::P2(const arma::vec& h) const {
  const arma::vec d = P2_diagonal(h);
  return kernels::assemble_columns(dim(), [&](std::size_t col, std::vector<kernels::Entry>& out) {
    if (d(col) != 0.0) out.push_back({col, d(col)});
  });
}

Operator Model::H2(const arma::vec& h) const { return T2() + P2(h) + K(); }

Operator Model::a(std::size_t mode) const {
  if (mode >= 2 * basis_.left_sites()) {
    throw std::invalid_argument("a_X is defined for left-half modes only");
  }
  return c(mode) * left_parity(basis_);
}

Operator Model::hole_particle() const {
  Operator out = identity(basis_);
  const std::complex<double> i(0.0, 1.0);
  for (std::size_t x = 0; x < basis_.sites(); ++x) {
    const std::size_t m = HilbertBasis::mode(x, Spin::down);
    const Operator cd = adjoint(c(m));
    // c -> c* for even x, c -> -c* for odd x
    const Operator gamma = lattice_.is_even(x) ? Operator(cd + c(m)) : Operator(i * (cd - c(m)));
    out = out * (klein(m) * gamma);
  }
  return out;
}

Operator Model::spin_flip() const {
  std::vector<std::size_t> perm(basis_.modes());
  for (std::size_t x = 0; x < basis_.sites(); ++x) {
    perm[HilbertBasis::mode(x, Spin::up)] = HilbertBasis::mode(x, Spin::down);
    perm[HilbertBasis::mode(x, Spin::down)] = HilbertBasis::mode(x, Spin::up);
  }
  const Operator parity = diagonal(basis_, [&](const HilbertBasis::Config& c) {
    return basis_.total_phonons(c) % 2 == 0 ? 1.0 : -1.0;
  });
  return mode_permutation(basis_, perm) * parity;
}

Operator Model::hp_free() const { return T() + K(); }

Operator Model::hp_interaction() const {
  Operator out(dim(), dim());
  std::vector<Operator> s;
  for (std::size_t x = 0; x < basis_.sites(); ++x) s.push_back(spin_density(basis_, x));
  for (std::size_t x = 0; x < basis_.sites(); ++x) {
    out += params_.U * (s[x] * s[x]);
    const Operator bb = boson(basis_, x, BosonKind::annihilate) + boson(basis_, x, BosonKind::create);
    out += params_.g * (s[x] * bb);
  }
  for (const auto& b : lattice_.bonds()) out += params_.V * (s[b.from] * s[b.to]);
  return out;
}

std::vector<int> Model::sector_labels(SectorKind kind) const {
  std::vector<int> labels(dim(), 0);
  if (kind == SectorKind::none) return labels;
  const int n = static_cast<int>(basis_.sites());
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto c = basis_.decode(i);
    int a = 0;
    int b = 0;
    for (std::size_t x = 0; x < basis_.sites(); ++x) {
      const int w = (kind == SectorKind::staggered_charges) ? lattice_.sign(x) : 1;
      a += w * HilbertBasis::occupied(c, HilbertBasis::mode(x, Spin::up));
      b += w * HilbertBasis::occupied(c, HilbertBasis::mode(x, Spin::down));
    }
    labels[i] = (a + n) * (2 * n + 1) + (b + n);
  }
  return labels;
}

LangFirsovDiagnostics lang_firsov_diagnostics(const Model& model, double tol) {
  if (model.params().n_max < 1) throw std::invalid_argument("Lang-Firsov diagnostics need n_max >= 1");
  const auto& basis = model.basis();
  const auto& p = model.params();
  LangFirsovDiagnostics d;
  d.n_max = p.n_max;
  const Operator u = model.lang_firsov();
  const Operator ui = adjoint(u);
  d.unitarity = unitarity_residual(u);

  // Site 0; all other sites empty, phonon vacuum.
  const std::size_t up = HilbertBasis::mode(0, Spin::up);
  const std::size_t dn = HilbertBasis::mode(0, Spin::down);
  auto state = [&](std::uint64_t fermions, int n0) {
    HilbertBasis::Config c{fermions, 0, 0};
    return basis.encode(basis.with_phonons(c, 0, n0));
  };
  const std::uint64_t doubly = (std::uint64_t{1} << up) | (std::uint64_t{1} << dn);
  const std::uint64_t single = std::uint64_t{1} << up;

  const Operator ub = u * boson(basis, 0, BosonKind::annihilate) * ui;
  const std::complex<double> plus = ub(state(doubly, 0), state(doubly, 0));   // q_0 = +1
  const std::complex<double> minus = ub(state(0, 0), state(0, 0));           // q_0 = -1
  d.displacement = 0.5 * (plus - minus);
  d.b_phase = ub(state(single, 0), state(single, 1));
  d.displayed_displacement = -p.g / p.omega;

  // U c U^{-1} = e^{i a phi} c exactly at any truncation; recover a from the
  // single-site block in the eigenbasis of phi.
  const Operator uc = u * model.c(up) * ui;
  const std::size_t B = basis.levels();
  arma::cx_mat m(B, B);
  for (std::size_t r = 0; r < B; ++r) {
    for (std::size_t k = 0; k < B; ++k) m(r, k) = uc(state(0, static_cast<int>(r)), state(single, static_cast<int>(k)));
  }
  arma::vec lam;
  arma::cx_mat vec;
  arma::eig_sym(lam, vec, boson_matrix(p.n_max, BosonKind::position, p.omega));
  const arma::cx_mat diag = vec.t() * m * vec;
  const double ratio = (m(1, 0) / m(0, 0)).imag() * std::sqrt(2.0 * p.omega);  // first-order estimate
  std::size_t best = 0;
  for (std::size_t k = 0; k < B; ++k) {
    if (std::abs(lam(k)) > 1e-12 && (std::abs(lam(best)) < 1e-12 || std::abs(lam(k)) < std::abs(lam(best)))) best = k;
  }
  const double base = std::arg(diag(best, best)) / lam(best);
  const double period = 2.0 * std::numbers::pi / std::abs(lam(best));
  d.measured_alpha = base + period * std::round((ratio - base) / period);
  d.displayed_alpha = p.alpha();

  // One site at t = V = 0: lowest level for q = 0 and q = +1.
  const arma::cx_mat b = ladder_matrix(p.n_max);
  auto lowest = [&](int qv) {
    const arma::cx_mat h = p.U * qv * qv * arma::eye<arma::cx_mat>(B, B) + p.g * qv * (b + b.t()) + p.omega * (b.t() * b);
    arma::vec e = arma::eig_sym(h);
    return e(0);
  };
  d.measured_u_eff = lowest(1) - lowest(0);
  d.displayed_u_eff = p.u_eff();

  const auto labels = model.sector_labels(SectorKind::particle_numbers);
  const Operator h = model.H();
  const arma::vec spec_h = block_eigenvalues(h, labels);
  const arma::vec spec_conj = block_eigenvalues(Operator(u * h * ui), labels);
  const arma::vec spec_disp = block_eigenvalues(model.H1(), labels);
  const double polaron_alpha = std::sqrt(2.0 / p.omega) * p.g;
  const arma::vec spec_meas = block_eigenvalues(model.H1(polaron_alpha, d.measured_u_eff), labels);
  const arma::uword low = std::min<arma::uword>(spec_h.n_elem, 10) - 1;
  d.spectrum_invariance = arma::abs(spec_conj - spec_h).max();
  d.spectrum_mismatch_displayed = arma::abs(spec_disp.head(low + 1) - spec_conj.head(low + 1)).max();
  d.spectrum_mismatch_measured = arma::abs(spec_meas.head(low + 1) - spec_conj.head(low + 1)).max();
  d.matches_display = std::abs(d.displacement - d.displayed_displacement) < tol &&
                      std::abs(d.b_phase - 1.0) < tol &&
                      std::abs(d.measured_alpha - d.displayed_alpha) < tol &&
                      std::abs(d.measured_u_eff - d.displayed_u_eff) < tol;
  return d;
}

}  // namespace hhrp
