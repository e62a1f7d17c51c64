#include "hhrp/rpverify.hpp"

#include "hhrp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace hhrp {

namespace {

std::string indexed(const char* name, std::size_t k) { return std::string(name) + "[" + std::to_string(k) + "]"; }

arma::cx_mat random_hermitian(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  arma::cx_mat m(n, n);
  for (auto& v : m) v = {gauss(rng), gauss(rng)};
  return scale * 0.5 * (m + m.t());
}

arma::cx_mat random_complex(std::mt19937_64& rng, std::size_t n, double scale) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  arma::cx_mat m(n, n);
  for (auto& v : m) v = {scale * gauss(rng), scale * gauss(rng)};
  return m;
}

double log_trace_exp(const arma::cx_mat& h, double beta) {
  arma::vec e;
  if (!arma::eig_sym(e, arma::cx_mat(0.5 * (h + h.t())))) throw std::runtime_error("Hermitian eigendecomposition failed");
  return log_partition(e, beta);
}

arma::vec random_field(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  arma::vec h(n);
  for (auto& v : h) v = gauss(rng);
  return h;
}

Operator diagonal_on(const HilbertBasis& basis, const std::function<double(const HilbertBasis::Config&)>& value) {
  return kernels::assemble_columns(basis.dim(), [&](std::size_t col, std::vector<kernels::Entry>& out) {
    const double v = value(basis.decode(col));
    if (v != 0.0) out.push_back({col, v});
  });
}

}  // namespace

AntiunitaryMap::AntiunitaryMap(Operator w) : w_(std::move(w)) {
  if (w_.n_rows != w_.n_cols) throw std::invalid_argument("antiunitary map needs a square unitary part");
}

arma::cx_vec AntiunitaryMap::apply(const arma::cx_vec& v) const { return w_ * arma::cx_vec(arma::conj(v)); }

Operator AntiunitaryMap::conjugate(const Operator& a) const {
  return w_ * Operator(arma::conj(a)) * adjoint(w_);
}

Operator AntiunitaryMap::conjugate_inverse(const Operator& b) const {
  return Operator(arma::conj(Operator(adjoint(w_) * b * w_)));
}

AntiunitaryMap build_theta(const Lattice& lattice, const HilbertBasis& left, const HilbertBasis& right) {
  const std::size_t nl = lattice.num_left();
  if (left.sites() != nl || right.sites() != lattice.num_right() || left.right_sites() != 0 ||
      right.right_sites() != 0 || left.dim() != right.dim()) {
    throw std::invalid_argument("theta needs the left and right half bases of an L/R ordered lattice");
  }
  const Operator pl = left_parity(left);
  std::vector<Operator> a_dag(left.modes());
  std::vector<Operator> c_dag(left.modes());
  for (std::size_t y = 0; y < nl; ++y) {
    const std::size_t x = lattice.reflect_inverse(y) - nl;
    for (Spin s : {Spin::up, Spin::down}) {
      const std::size_t my = HilbertBasis::mode(y, s);
      a_dag[my] = pl * create(left, my);
      c_dag[my] = create(right, HilbertBasis::mode(x, s));
    }
  }
  return AntiunitaryMap(kernels::assemble_columns(left.dim(), [&](std::size_t col, std::vector<kernels::Entry>& out) {
    const auto cfg = left.decode(col);
    HilbertBasis::Config lc{0, cfg.phonons_left, 0};
    HilbertBasis::Config rc{0, 0, 0};
    for (std::size_t x = nl; x < lattice.size(); ++x) {
      rc = right.with_phonons(rc, x - nl, left.phonons(cfg, lattice.reflect(x)));
    }
    arma::cx_vec u = basis_state(left, left.encode(lc));
    arma::cx_vec v = basis_state(right, right.encode(rc));
    for (std::size_t m = left.modes(); m-- > 0;) {
      if (!HilbertBasis::occupied(cfg, m)) continue;
      u = a_dag[m] * u;
      v = c_dag[m] * v;
    }
    const double sigma = u(col).real();
    for (arma::uword k = 0; k < v.n_elem; ++k) {
      if (v(k) != std::complex<double>(0.0, 0.0)) out.push_back({k, sigma * v(k)});
    }
  }));
}

ReflectionSetup::ReflectionSetup(const Model& model)
    : model_(model),
      left_(HilbertBasis::for_sites(model.lattice().num_left(), 0, model.params().n_max, model.dim())),
      right_(HilbertBasis::for_sites(model.lattice().num_right(), 0, model.params().n_max, model.dim())),
      theta_(build_theta(model.lattice(), left_, right_)) {}

std::size_t ReflectionSetup::local(std::size_t site) const {
  const auto& lat = model_.lattice();
  return lat.is_left(site) ? site : site - lat.num_left();
}

Operator ReflectionSetup::left_c(std::size_t site, Spin s) const {
  if (!model_.lattice().is_left(site)) throw std::invalid_argument("site is not in the left half");
  return annihilate(left_, HilbertBasis::mode(site, s));
}

Operator ReflectionSetup::left_a(std::size_t site, Spin s) const { return left_c(site, s) * left_parity(left_); }

Operator ReflectionSetup::right_c(std::size_t site, Spin s) const {
  if (model_.lattice().is_left(site)) throw std::invalid_argument("site is not in the right half");
  return annihilate(right_, HilbertBasis::mode(local(site), s));
}

Operator ReflectionSetup::left_q(std::size_t site) const {
  if (!model_.lattice().is_left(site)) throw std::invalid_argument("site is not in the left half");
  return charge(left_, site);
}

Operator ReflectionSetup::right_q(std::size_t site) const {
  if (model_.lattice().is_left(site)) throw std::invalid_argument("site is not in the right half");
  return charge(right_, local(site));
}

Operator ReflectionSetup::left_boson(std::size_t site, BosonKind kind) const {
  if (!model_.lattice().is_left(site)) throw std::invalid_argument("site is not in the left half");
  return boson(left_, site, kind, model_.params().omega);
}

Operator ReflectionSetup::right_boson(std::size_t site, BosonKind kind) const {
  if (model_.lattice().is_left(site)) throw std::invalid_argument("site is not in the right half");
  return boson(right_, local(site), kind, model_.params().omega);
}

Operator ReflectionSetup::left_phase(std::size_t site, double theta) const {
  if (!model_.lattice().is_left(site)) throw std::invalid_argument("site is not in the left half");
  return phase(left_, site, theta, model_.params().omega);
}

Operator ReflectionSetup::right_phase(std::size_t site, double theta) const {
  if (model_.lattice().is_left(site)) throw std::invalid_argument("site is not in the right half");
  return phase(right_, local(site), theta, model_.params().omega);
}

Operator ReflectionSetup::pairing_half(const HilbertBasis& basis, bool left) const {
  const auto& lat = model_.lattice();
  const double alpha = model_.params().alpha();
  const double t = model_.params().t;
  const double omega = model_.params().omega;
  Operator out(basis.dim(), basis.dim());
  for (const auto& b : lat.bonds()) {
    if (lat.is_left(b.from) != left || lat.is_left(b.to) != left) continue;
    const std::size_t e = lat.is_even(b.from) ? b.from : b.to;
    const std::size_t o = lat.is_even(b.from) ? b.to : b.from;
    const Operator ph = phase(basis, local(e), -alpha, omega) * phase(basis, local(o), alpha, omega);
    for (Spin s : {Spin::up, Spin::down}) {
      const Operator x = ph * (create(basis, HilbertBasis::mode(local(e), s)) * create(basis, HilbertBasis::mode(local(o), s)));
      out += -t * (x + adjoint(x));
    }
  }
  return out;
}

Operator ReflectionSetup::charge_half(const HilbertBasis& basis, bool left, const arma::vec& h) const {
  const auto& lat = model_.lattice();
  if (h.n_elem != lat.size()) throw std::invalid_argument("field length does not match lattice");
  const auto& p = model_.params();
  const double onsite = p.u_eff() - lat.nu() * p.V;
  return diagonal_on(basis, [&](const HilbertBasis::Config& c) {
    double acc = 0.0;
    for (std::size_t x = 0; x < lat.size(); ++x) {
      if (lat.is_left(x) != left) continue;
      const double q = basis.site_charge(c, local(x));
      acc += onsite * q * q;
    }
    for (const auto& b : lat.bonds()) {
      const bool fi = lat.is_left(b.from) == left;
      const bool ti = lat.is_left(b.to) == left;
      if (!fi && !ti) continue;
      double w = 0.0;
      if (fi) w += basis.site_charge(c, local(b.from)) - h(b.from);
      if (ti) w -= basis.site_charge(c, local(b.to)) - h(b.to);
      acc += 0.5 * p.V * w * w;
    }
    return acc;
  });
}

Operator ReflectionSetup::T2_left() const { return pairing_half(left_, true); }
Operator ReflectionSetup::T2_right() const { return pairing_half(right_, false); }
Operator ReflectionSetup::P2_left(const arma::vec& h) const { return charge_half(left_, true, h); }
Operator ReflectionSetup::P2_right(const arma::vec& h) const { return charge_half(right_, false, h); }
Operator ReflectionSetup::K_left() const { return model_.params().omega * phonon_number(left_); }
Operator ReflectionSetup::K_right() const { return model_.params().omega * phonon_number(right_); }

Operator ReflectionSetup::T2_cut() const {
  Operator out(model_.dim(), model_.dim());
  for (const auto& b : model_.lattice().cut_bonds()) out += model_.pairing_bond(b);
  return out;
}

Operator ReflectionSetup::T2_cut_even_right() const {
  const auto& lat = model_.lattice();
  Operator out(model_.dim(), model_.dim());
  for (const auto& b : lat.cut_bonds()) {
    const std::size_t r = lat.is_left(b.from) ? b.to : b.from;
    if (lat.is_even(r)) out += model_.pairing_bond(b);
  }
  return out;
}

Operator ReflectionSetup::P2_cut(const arma::vec& h) const {
  const auto& lat = model_.lattice();
  const Operator id = identity(model_.basis());
  Operator out(model_.dim(), model_.dim());
  for (const auto& b : lat.cut_bonds()) {
    const std::size_t l = lat.is_left(b.from) ? b.from : b.to;
    const std::size_t r = lat.is_left(b.from) ? b.to : b.from;
    out -= model_.params().V * (Operator(model_.q(l) - h(l) * id) * Operator(model_.q(r) - h(r) * id));
  }
  return out;
}

Operator ReflectionSetup::P2_cut_even_right(const arma::vec& h) const {
  const auto& lat = model_.lattice();
  const Operator id = identity(model_.basis());
  Operator out(model_.dim(), model_.dim());
  for (const auto& b : lat.cut_bonds()) {
    const std::size_t l = lat.is_left(b.from) ? b.from : b.to;
    const std::size_t r = lat.is_left(b.from) ? b.to : b.from;
    if (!lat.is_even(r)) continue;
    out -= model_.params().V * (Operator(model_.q(l) - h(l) * id) * Operator(model_.q(r) - h(r) * id));
  }
  return out;
}

std::vector<CutTerm> ReflectionSetup::cut_terms(const arma::vec& h) const {
  const auto& lat = model_.lattice();
  const auto& p = model_.params();
  const double alpha = p.alpha();
  const Operator id = identity(left_);
  std::vector<CutTerm> out;
  for (const auto& b : lat.cut_bonds()) {
    const std::size_t l = lat.is_left(b.from) ? b.from : b.to;
    const std::size_t r = lat.is_left(b.from) ? b.to : b.from;
    const bool even_right = lat.is_even(r);
    for (Spin s : {Spin::up, Spin::down}) {
      const Operator c = left_phase(l, even_right ? alpha : -alpha) * adjoint(left_a(l, s));
      out.push_back({even_right ? p.t : -p.t, c, c});
    }
    out.push_back({0.5 * p.V, Operator(left_q(l) - h(l) * id), Operator(left_q(l) - h(r) * id)});
  }
  return out;
}

Operator ReflectionSetup::embed_left(const Operator& a) const { return tensor(a, identity(right_)); }
Operator ReflectionSetup::embed_right(const Operator& b) const { return tensor(identity(left_), b); }

Operator ReflectionSetup::dls_form(const Operator& a, const Operator& b, const std::vector<CutTerm>& terms) const {
  Operator out = embed_left(a) + embed_right(theta_.conjugate(b));
  for (const auto& term : terms) {
    const Operator x = tensor(term.c, theta_.conjugate(term.d));
    out -= term.lambda * (x + adjoint(x));
  }
  return out;
}

arma::vec ReflectionSetup::symmetric_from_left(const arma::vec& h) const {
  const auto& lat = model_.lattice();
  arma::vec out = h;
  for (std::size_t x = lat.num_left(); x < lat.size(); ++x) out(x) = h(lat.reflect(x));
  return out;
}

arma::vec ReflectionSetup::symmetric_from_right(const arma::vec& h) const {
  const auto& lat = model_.lattice();
  arma::vec out = h;
  for (std::size_t y = 0; y < lat.num_left(); ++y) out(y) = h(lat.reflect_inverse(y));
  return out;
}

arma::vec ReflectionSetup::reflect_right_field(const arma::vec& h) const {
  const auto& lat = model_.lattice();
  arma::vec out(lat.size(), arma::fill::zeros);
  for (std::size_t y = 0; y < lat.num_left(); ++y) out(y) = h(lat.reflect_inverse(y));
  return out;
}

std::pair<double, double> even_right_split_residuals(const ReflectionSetup& setup, const arma::vec& h) {
  const Model& m = setup.model();
  const Operator t_split = setup.embed_left(setup.T2_left()) + setup.embed_right(setup.T2_right()) + setup.T2_cut_even_right();
  const Operator p_split = setup.embed_left(setup.P2_left(h)) + setup.embed_right(setup.P2_right(h)) + setup.P2_cut_even_right(h);
  return {max_abs_diff(m.T2(), t_split), max_abs_diff(m.P2(h), p_split)};
}

Suite theta_suite(const Model& model, std::uint64_t seed, double tol) {
  const auto& lat = model.lattice();
  const ReflectionSetup rs(model);
  const auto& th = rs.theta();
  Suite s;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double anti = 0.0;
  const std::size_t n = rs.left_basis().dim();
  for (int k = 0; k < 100; ++k) {
    arma::cx_vec phi(n);
    arma::cx_vec psi(n);
    for (auto& v : phi) v = {gauss(rng), gauss(rng)};
    for (auto& v : psi) v = {gauss(rng), gauss(rng)};
    const auto lhs = arma::cdot(th.apply(phi), th.apply(psi));
    anti = std::max(anti, std::abs(lhs - std::conj(arma::cdot(phi, psi))));
  }
  s.records.push_back(identity("theta_antiunitary", "<theta phi|theta psi> = conj <phi|psi>", anti, tol));
  s.records.push_back(identity("theta_unitary_part", "W W* = 1", unitarity_residual(th.unitary_part()), tol));

  double ferm = 0.0;
  double pos = 0.0;
  double mom = 0.0;
  double ann = 0.0;
  for (std::size_t x = lat.num_left(); x < lat.size(); ++x) {
    const std::size_t y = lat.reflect(x);
    for (Spin sp : {Spin::up, Spin::down}) {
      ferm = std::max(ferm, max_abs_diff(th.conjugate(rs.left_a(y, sp)), rs.right_c(x, sp)));
    }
    pos = std::max(pos, max_abs_diff(th.conjugate(rs.left_boson(y, BosonKind::position)), rs.right_boson(x, BosonKind::position)));
    mom = std::max(mom, max_abs_diff(th.conjugate(rs.left_boson(y, BosonKind::momentum)),
                                     Operator(-rs.right_boson(x, BosonKind::momentum))));
    ann = std::max(ann, max_abs_diff(th.conjugate(rs.left_boson(y, BosonKind::annihilate)), rs.right_boson(x, BosonKind::annihilate)));
  }
  s.records.push_back(identity("theta_fermions", "theta a_{r(x)s} theta^-1 = c_{xs}, x in Lambda_R", ferm, tol));
  s.records.push_back(identity("theta_phi", "theta phi_{r(x)} theta^-1 = phi_x", pos, tol));
  s.records.push_back(identity("theta_pi", "theta pi_{r(x)} theta^-1 = -pi_x", mom, tol));
  s.records.push_back(identity("theta_b", "theta b_{r(x)} theta^-1 = b_x", ann, tol));
  const double vac = arma::abs(th.apply(vacuum(rs.left_basis())) - vacuum(rs.right_basis())).max();
  s.records.push_back(identity("theta_vacuum", "theta Omega_L = Omega_R", vac, tol));

  // Tensor identification of the full-space operators.
  double emb = 0.0;
  const Operator pl = left_parity(rs.left_basis());
  for (std::size_t x = 0; x < lat.size(); ++x) {
    for (Spin sp : {Spin::up, Spin::down}) {
      const Operator expect = lat.is_left(x) ? rs.embed_left(rs.left_c(x, sp)) : tensor(pl, rs.right_c(x, sp));
      emb = std::max(emb, max_abs_diff(model.c(x, sp), expect));
    }
    const Operator phi = lat.is_left(x) ? rs.embed_left(rs.left_boson(x, BosonKind::position))
                                        : rs.embed_right(rs.right_boson(x, BosonKind::position));
    emb = std::max(emb, max_abs_diff(model.phi(x), phi));
  }
  s.records.push_back(identity("lr_identification", "c_x = c_x (x) 1 on Lambda_L, (-1)^{N_L} (x) c_x on Lambda_R; phi_x likewise", emb, tol));

  const Operator t2l = rs.T2_left();
  const Operator t2r = rs.T2_right();
  s.records.push_back(identity("t2_split", "T'' = T''_L (x) 1 + 1 (x) T''_R + T''_LR",
                               max_abs_diff(model.T2(), Operator(rs.embed_left(t2l) + rs.embed_right(t2r) + rs.T2_cut())), tol));
  s.records.push_back(identity("t2_reflection", "T''_R = theta T''_L theta^-1", max_abs_diff(th.conjugate(t2l), t2r), tol));

  const arma::vec h = random_field(rng, lat.size());
  s.records.push_back(identity("p2_split", "P''(h) = P''_L(h_L) (x) 1 + 1 (x) P''_R(h_R) + P''_LR(h)",
                               max_abs_diff(model.P2(h), Operator(rs.embed_left(rs.P2_left(h)) + rs.embed_right(rs.P2_right(h)) + rs.P2_cut(h))),
                               tol));
  s.records.push_back(identity("p2_reflection", "P''_R(h_R) = theta P''_L(r(h_R)) theta^-1",
                               max_abs_diff(th.conjugate(rs.P2_left(rs.reflect_right_field(h))), rs.P2_right(h)), tol));
  const Operator kl = rs.K_left();
  const Operator kr = rs.K_right();
  s.records.push_back(identity("k_split", "K = K_L (x) 1 + 1 (x) K_R", max_abs_diff(model.K(), Operator(rs.embed_left(kl) + rs.embed_right(kr))), tol));
  s.records.push_back(identity("k_reflection", "K_R = theta K_L theta^-1", max_abs_diff(th.conjugate(kl), kr), tol));

  const Operator a = t2l + rs.P2_left(h) + kl;
  const Operator b = t2l + rs.P2_left(rs.reflect_right_field(h)) + kl;
  const Operator form = rs.dls_form(a, b, rs.cut_terms(h));
  s.records.push_back(identity("h2_reflection_form",
                               "H''(h) = A (x) 1 + 1 (x) theta B theta^-1 - sum lambda (C (x) theta D theta^-1 + h.c.)",
                               max_abs_diff(model.H2(h), form), tol));
  return s;
}

DLSInstance random_dls_instance(std::uint64_t seed, std::size_t max_dim) {
  if (max_dim < 2) throw std::invalid_argument("DLS instances need dimension >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(2, max_dim);
  std::uniform_int_distribution<int> terms(1, 3);
  std::uniform_real_distribution<double> lam(0.0, 2.0);
  std::uniform_real_distribution<double> beta(0.2, 2.0);
  DLSInstance inst;
  const std::size_t n = dim(rng);
  inst.a = random_hermitian(rng, n, 1.0);
  inst.b = random_hermitian(rng, n, 1.0);
  const int m = terms(rng);
  for (int j = 0; j < m; ++j) {
    inst.c.push_back(random_complex(rng, n, 0.5));
    inst.d.push_back(random_complex(rng, n, 0.5));
    inst.lambda.push_back(lam(rng));
  }
  inst.beta = beta(rng);
  return inst;
}

arma::cx_mat dls_hamiltonian(const arma::cx_mat& a, const arma::cx_mat& b, const std::vector<arma::cx_mat>& c,
                             const std::vector<arma::cx_mat>& d, const std::vector<double>& lambda) {
  if (c.size() != d.size() || c.size() != lambda.size()) throw std::invalid_argument("mismatched DLS terms");
  const arma::cx_mat id = arma::eye<arma::cx_mat>(a.n_rows, a.n_rows);
  arma::cx_mat h = arma::kron(a, id) + arma::kron(id, arma::conj(b));
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (lambda[j] < 0.0) throw std::invalid_argument("DLS coefficients must be >= 0");
    const arma::cx_mat x = arma::kron(c[j], arma::conj(d[j]));
    h -= lambda[j] * (x + x.t());
  }
  return h;
}

DLSResult dls_check(const DLSInstance& inst) {
  DLSResult r;
  r.log_z_ab = log_trace_exp(dls_hamiltonian(inst.a, inst.b, inst.c, inst.d, inst.lambda), inst.beta);
  r.log_z_aa = log_trace_exp(dls_hamiltonian(inst.a, inst.a, inst.c, inst.c, inst.lambda), inst.beta);
  r.log_z_bb = log_trace_exp(dls_hamiltonian(inst.b, inst.b, inst.d, inst.d, inst.lambda), inst.beta);
  r.slack = r.log_z_aa + r.log_z_bb - 2.0 * r.log_z_ab;
  auto basic = [](const arma::cx_mat& x) {
    const std::complex<double> tr = arma::trace(x);
    return std::abs(arma::trace(arma::kron(x, arma::conj(x))) - std::norm(tr));
  };
  r.basic_residual = std::max(basic(inst.a), basic(inst.b));
  for (const auto& c : inst.c) r.basic_residual = std::max(r.basic_residual, basic(c));
  return r;
}

Suite dls_suite(std::uint64_t seed, std::size_t count, double tol, double equality_tol) {
  Suite s;
  const std::string ineq = "Z(A,B,C,D)^2 <= Z(A,A,C,C) Z(B,B,D,D)";
  std::vector<CheckRecord> rec(count);
  std::vector<double> basic(count);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(count); ++k) {
    const auto inst = random_dls_instance(seed + static_cast<std::uint64_t>(k));
    const auto r = dls_check(inst);
    rec[static_cast<std::size_t>(k)] = inequality(indexed("dls", static_cast<std::size_t>(k)), ineq, 2.0 * r.log_z_ab,
                                                  r.log_z_aa + r.log_z_bb, tol);
    basic[static_cast<std::size_t>(k)] = r.basic_residual;
  }
  s.records = std::move(rec);
  s.records.push_back(identity("dls_basic_trace", "Tr[A (x) theta A theta^-1] = |Tr A|^2",
                               *std::max_element(basic.begin(), basic.end()), 1e-9));
  double zero_lambda = 0.0;
  double symmetric = 0.0;
  for (std::size_t k = 0; k < 20; ++k) {
    auto inst = random_dls_instance(seed + count + k);
    auto z = inst;
    std::fill(z.lambda.begin(), z.lambda.end(), 0.0);
    zero_lambda = std::max(zero_lambda, std::abs(dls_check(z).slack));
    auto sym = inst;
    sym.b = sym.a;
    sym.d = sym.c;
    symmetric = std::max(symmetric, std::abs(dls_check(sym).slack));
  }
  s.records.push_back(identity("dls_equality_lambda_zero", "lambda = 0: Z(A,B)^2 = Z(A,A) Z(B,B)", zero_lambda, equality_tol));
  s.records.push_back(identity("dls_equality_symmetric", "A = B, C = D: equality", symmetric, equality_tol));
  return s;
}

FieldPartition::FieldPartition(const Model& model)
    : model_(model), fixed_(Operator(model.T2() + model.K()), model.sector_labels(SectorKind::staggered_charges)) {}

double FieldPartition::log_z(const arma::vec& h) const {
  return fixed_.log_z(model_.P2_diagonal(h), model_.params().beta);
}

namespace {

void append_rp(Suite& s, const ReflectionSetup& rs, const FieldPartition& z, const std::vector<arma::vec>& fields,
               const std::vector<double>& log_z, double tol) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const double zl = z.log_z(rs.symmetric_from_left(fields[k]));
    const double zr = z.log_z(rs.symmetric_from_right(fields[k]));
    s.records.push_back(inequality(indexed("rp_reflection", k),
                                   "Z(h_L,h_R)^2 <= Z(h_L, r^-1(h_L)) Z(r(h_R), h_R)", 2.0 * log_z[k], zl + zr, tol));
  }
}

void append_rp_equalities(Suite& s, const ReflectionSetup& rs, const FieldPartition& z, const arma::vec& h,
                          double equality_tol) {
  const arma::vec sym = rs.symmetric_from_left(h);
  const double zs = z.log_z(sym);
  const double zl = z.log_z(rs.symmetric_from_left(sym));
  const double zr = z.log_z(rs.symmetric_from_right(sym));
  s.records.push_back(identity("rp_equality_symmetric", "h = (h_L, r^-1(h_L)): equality in the reflection inequality",
                               2.0 * zs - zl - zr, equality_tol));
}

void append_gauss(Suite& s, const std::vector<arma::vec>& fields, const std::vector<double>& log_z, double log_z0,
                  double tol) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    s.records.push_back(inequality(indexed("gaussian_domination", k), "Z(h) <= Z(0)", log_z[k], log_z0, tol));
  }
}

void append_gauss_constants(Suite& s, const Model& model, const FieldPartition& z, double log_z0, std::mt19937_64& rng,
                            double equality_tol) {
  double worst = 0.0;
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 3; ++k) {
    const arma::vec h0(model.lattice().size(), arma::fill::value(u(rng)));
    worst = std::max(worst, std::abs(z.log_z(h0) - log_z0));
  }
  s.records.push_back(identity("gaussian_constant_field", "Z(h0) = Z(0) for constant h0", worst, equality_tol));
}

std::vector<double> field_log_z(const FieldPartition& z, const std::vector<arma::vec>& fields) {
  std::vector<double> out(fields.size());
  for (std::size_t k = 0; k < fields.size(); ++k) out[k] = z.log_z(fields[k]);
  return out;
}

std::vector<arma::vec> random_fields(std::mt19937_64& rng, std::size_t n, std::size_t count) {
  std::vector<arma::vec> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(random_field(rng, n));
  return out;
}

}  // namespace

Suite rp_suite(const Model& model, std::uint64_t seed, std::size_t count, double tol) {
  const ReflectionSetup rs(model);
  const FieldPartition z(model);
  std::mt19937_64 rng(seed);
  const auto fields = random_fields(rng, model.lattice().size(), count);
  Suite s;
  append_rp(s, rs, z, fields, field_log_z(z, fields), tol);
  append_rp_equalities(s, rs, z, random_field(rng, model.lattice().size()), 1e-10);
  return s;
}

Suite gauss_suite(const Model& model, std::uint64_t seed, std::size_t count, double tol, double equality_tol) {
  const FieldPartition z(model);
  std::mt19937_64 rng(seed);
  const auto fields = random_fields(rng, model.lattice().size(), count);
  const double z0 = z.log_z(arma::vec(model.lattice().size(), arma::fill::zeros));
  Suite s;
  append_gauss(s, fields, field_log_z(z, fields), z0, tol);
  append_gauss_constants(s, model, z, z0, rng, equality_tol);
  return s;
}

Suite rp_gauss_suite(const Model& model, std::uint64_t seed, std::size_t count, double tol, double equality_tol) {
  const ReflectionSetup rs(model);
  const FieldPartition z(model);
  std::mt19937_64 rng(seed);
  const auto fields = random_fields(rng, model.lattice().size(), count);
  const auto lz = field_log_z(z, fields);
  const double z0 = z.log_z(arma::vec(model.lattice().size(), arma::fill::zeros));
  Suite s;
  append_gauss(s, fields, lz, z0, tol);
  append_gauss_constants(s, model, z, z0, rng, equality_tol);
  append_rp(s, rs, z, fields, lz, tol);
  append_rp_equalities(s, rs, z, random_field(rng, model.lattice().size()), equality_tol);
  return s;
}

double falk_bruch_bound(double b, double c) {
  if (!(b > 0.0)) return 0.0;
  if (!(c > 0.0)) return b;
  const double x = std::sqrt(c / (4.0 * b));
  // (1/2) sqrt(bc) coth x = b x coth x
  const double xcoth = x < 1e-6 ? 1.0 + x * x / 3.0 : x / std::tanh(x);
  return b * xcoth;
}

InfraredValues infrared_values(const Model& model, const Operator& h2, const ThermalState& h2_state, const arma::cx_vec& h) {
  const auto& lat = model.lattice();
  const auto& p = model.params();
  InfraredValues v;
  v.forms = quadratic_form_quantities(model, h2, h2_state, h);
  const arma::cx_vec f = -lat.laplacian(h);
  v.d1 = arma::cdot(h, f).real();
  const arma::cx_vec tf = lat.stagger(f);
  v.d2 = arma::cdot(f, lat.stagger(arma::cx_vec(-lat.laplacian(tf)))).real();
  const double bv = p.beta * p.V;
  v.b0 = v.d1 / (2.0 * bv);
  v.b_sharp = v.d1 / bv;
  v.c0 = 4.0 * p.beta * p.t * v.d2;
  v.falk_bruch = falk_bruch_bound(v.forms.b, v.forms.c);
  const double nu = lat.nu();
  const double two_pi = 2.0 * std::numbers::pi;
  const double rt = std::sqrt(p.t / p.V);
  const double gamma1 = std::pow(two_pi, -nu) * 0.5 * (1.0 / bv + rt);
  const double gamma2 = 0.25 * rt;
  v.ginq_displayed = std::pow(two_pi, nu / 2.0) * gamma1 * v.d1 + std::pow(two_pi, -nu / 2.0) * gamma2 * v.d2;
  v.ginq_from_b0 = std::pow(two_pi, nu) * gamma1 * v.d1 + gamma2 * v.d2;
  v.ginq_sharp = (1.0 / bv + 0.5 * rt) * v.d1 + 0.5 * rt * v.d2;
  return v;
}

Suite infrared_suite(const Model& model, std::uint64_t seed, std::size_t count, double tol) {
  const Operator h2 = model.H2();
  const auto st = thermal_state(model, Frame::H2);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Suite s;
  for (std::size_t k = 0; k < count; ++k) {
    arma::cx_vec h(model.lattice().size());
    for (auto& x : h) x = {gauss(rng), gauss(rng)};
    const auto v = infrared_values(model, h2, st, h);
    const auto& q = v.forms;
    s.records.push_back(inequality(indexed("infrared_b", k), "b <= b0 = (beta V)^-1 <h|(-Delta)h> / 2", q.b, v.b0, tol));
    s.records.push_back(inequality(indexed("infrared_b_gaussian", k), "b <= (beta V)^-1 <h|(-Delta)h>", q.b, v.b_sharp, tol));
    s.records.push_back(inequality(indexed("infrared_c", k), "c <= c0 = 4 beta t <(-Delta)h|tau(-Delta)tau^-1(-Delta)h>", q.c, v.c0, tol));
    s.records.push_back(inequality(indexed("falk_bruch", k), "g <= (1/2) sqrt(bc) coth sqrt(c/4b)", q.g, v.falk_bruch, tol));
    s.records.push_back(inequality(indexed("ginq", k),
                                   "g <= (2pi)^{nu/2} gamma1 <h|(-Delta)h> + (2pi)^{-nu/2} gamma2 <(-Delta)h|tau^-1(-Delta)tau(-Delta)h>",
                                   q.g, v.ginq_displayed, tol));
    s.records.push_back(inequality(indexed("ginq_from_b0", k), "g <= (2pi)^nu gamma1 <h|(-Delta)h> + gamma2 <f|tau^-1(-Delta)tau f>",
                                   q.g, v.ginq_from_b0, tol));
    s.records.push_back(inequality(indexed("ginq_gaussian", k),
                                   "g <= ((beta V)^-1 + sqrt(t/V)/2) <h|(-Delta)h> + sqrt(t/V)/2 <f|tau^-1(-Delta)tau f>", q.g,
                                   v.ginq_sharp, tol));
    s.records.push_back(identity(indexed("nested_commutator", k),
                                 "[A,[H'',A*]] = sum t |f_e + f_o|^2 (e^{-i alpha(phi_e - phi_o)} c*_e c*_o + h.c.)",
                                 q.closed_form_residual, tol));
  }
  return s;
}

double max_density_deviation(const Model& model) {
  const auto st = thermal_state(model, Frame::H);
  double worst = 0.0;
  for (std::size_t x = 0; x < model.lattice().size(); ++x) {
    const auto n = thermal_expectation(site_number(model.basis(), x), st.spec);
    worst = std::max(worst, std::abs(n - 1.0));
  }
  return worst;
}

Suite halffill_suite(const Lattice& lattice, std::uint64_t seed, std::size_t draws, int max_n_max, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> t(0.2, 2.0);
  std::uniform_real_distribution<double> u(0.2, 4.0);
  std::uniform_real_distribution<double> v(0.1, 2.0);
  std::uniform_real_distribution<double> g(0.0, 1.5);
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::uniform_real_distribution<double> beta(0.1, 5.0);
  std::uniform_int_distribution<int> nmax(1, std::max(1, max_n_max));
  Suite s;
  for (std::size_t k = 0; k < draws; ++k) {
    ModelParams p;
    p.t = t(rng);
    p.U = u(rng);
    p.V = v(rng);
    p.g = g(rng);
    p.omega = w(rng);
    p.beta = k == 0 ? 0.0 : beta(rng);
    p.n_max = nmax(rng);
    const Model m(lattice, p);
    s.records.push_back(identity(indexed("half_filling", k), "<n_x> = 1 for every x", max_density_deviation(m), tol));
    if (k == 1) {
      const Operator hu = m.hole_particle();
      const Operator hh = m.hp_free() + m.hp_interaction();
      s.records.push_back(identity("hole_particle_form", "u H u^-1 = h0 + W", max_abs_diff(hu * m.H() * adjoint(hu), hh), tol));
      const Operator d = m.spin_flip();
      s.records.push_back(identity("spin_flip_symmetry", "D (h0 + W) D^-1 = h0 + W", max_abs_diff(d * hh * adjoint(d), hh), tol));
      double sd = 0.0;
      for (std::size_t x = 0; x < lattice.size(); ++x) {
        const Operator sx = spin_density(m.basis(), x);
        sd = std::max(sd, max_abs_diff(d * sx * adjoint(d), Operator(-sx)));
      }
      s.records.push_back(identity("spin_flip_density", "D s_x D^-1 = -s_x", sd, tol));
    }
  }
  return s;
}

double convexity_slack(const arma::cx_mat& b, const arma::cx_mat& c) {
  const arma::cx_mat bc = 0.5 * (b + c + (b + c).t());
  arma::vec e;
  arma::cx_mat q;
  if (!arma::eig_sym(e, q, bc)) throw std::runtime_error("Hermitian eigendecomposition failed");
  const double log_z = log_partition(e, 1.0);
  const arma::vec w = arma::exp(-(e - e.min())) / arma::accu(arma::exp(-(e - e.min())));
  const arma::cx_mat bq = q.t() * b * q;
  double minus_b = 0.0;
  for (arma::uword k = 0; k < e.n_elem; ++k) minus_b -= w(k) * bq(k, k).real();
  return minus_b + log_trace_exp(c, 1.0) - log_z;
}

Q2Values q2_values(const Model& model) {
  const auto& lat = model.lattice();
  const auto& p = model.params();
  Q2Values v;
  const double nu = lat.nu();
  const double sites = static_cast<double>(lat.size());
  v.gap = nu * p.V - p.u_eff();
  const Operator h2 = model.H2();
  const auto st = thermal_state(model, Frame::H2);
  const std::size_t o = lat.origin();
  v.q2 = thermal_expectation(Operator(model.q(o) * model.q(o)), st.spec).real();
  HilbertBasis::Config full{(std::uint64_t{1} << model.basis().modes()) - 1, 0, 0};
  const std::size_t psi = model.basis().encode(full);
  v.psi_energy = std::complex<double>(h2(psi, psi)).real();
  v.log_z = st.spec.log_z();
  const Operator m = h2 - model.K();
  v.minus_m_per_site = -thermal_expectation(m, st.spec).real() / sites;
  v.t_per_site = std::abs(thermal_expectation(model.T2(), st.spec).real()) / sites;
  const double entropy = std::log(4.0 / (1.0 - std::exp(-p.beta * p.omega)));
  v.lower_sharp = 1.0 - 8.0 * nu * p.t / v.gap - entropy / (p.beta * v.gap);
  v.lower_displayed = 1.0 - 8.0 * nu * p.t / v.gap - entropy / v.gap;
  return v;
}

Suite q2_suite(const Model& model, std::uint64_t seed, std::size_t pairs, double tol) {
  const auto& lat = model.lattice();
  const auto& p = model.params();
  Suite s;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(2, 32);
  std::uniform_real_distribution<double> scale(0.1, 3.0);
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t n = dim(rng);
    const arma::cx_mat b = random_hermitian(rng, n, scale(rng));
    const arma::cx_mat c = random_hermitian(rng, n, scale(rng));
    const double sl = convexity_slack(b, c);
    s.records.push_back(inequality(indexed("peierls_bogoliubov", k), "ln Tr e^{-(B+C)} <= <-B> + ln Tr e^{-C}", -sl, 0.0, tol));
  }
  const auto v = q2_values(model);
  const double sites = static_cast<double>(lat.size());
  const double nu = lat.nu();
  s.records.push_back(equality("psi_energy", "<Psi|H'' Psi> = -(nu V - U_eff)|Lambda|", v.psi_energy, -v.gap * sites,
                               1e-12 * std::max(1.0, std::abs(v.gap * sites))));
  s.records.push_back(inequality("log_z_lower", "ln Tr e^{-beta H''} >= beta (nu V - U_eff)|Lambda|", p.beta * v.gap * sites, v.log_z, tol));
  if (v.gap > 0.0) {
    s.records.push_back(inequality("hopping_expectation", "|<T''>''| <= 8 nu t |Lambda|", v.t_per_site, 8.0 * nu * p.t, tol));
    s.records.push_back(inequality("hopping_norm", "|<T''>''| <= ||T''|| <= 2 nu t |Lambda|", v.t_per_site, 2.0 * nu * p.t, tol));
    s.records.push_back(inequality("minus_m_upper", "<-M/|Lambda|>'' <= 8 nu t + (nu V - U_eff)<q_o^2>''", v.minus_m_per_site,
                                   8.0 * nu * p.t + v.gap * v.q2, tol));
    const double entropy = std::log(4.0 / (1.0 - std::exp(-p.beta * p.omega)));
    s.records.push_back(inequality("peierls_bogoliubov_model",
                                   "ln Tr e^{-beta H''} <= beta <-M>'' + |Lambda| ln 4(1 - e^{-beta omega})^-1", v.log_z,
                                   p.beta * v.minus_m_per_site * sites + sites * entropy, tol));
    s.records.push_back(inequality("q2_lower",
                                   "<q_o^2>'' >= 1 - 8 nu t/(nu V - U_eff) - (beta(nu V - U_eff))^-1 ln 4(1 - e^{-beta omega})^-1",
                                   v.lower_sharp, v.q2, tol));
    s.records.push_back(inequality("q2_lower_displayed",
                                   "<q_o^2>'' >= 1 - 8 nu t/(nu V - U_eff) - (nu V - U_eff)^-1 ln 4(1 - e^{-beta omega})^-1",
                                   v.lower_displayed, v.q2, tol));
  }
  return s;
}

}  // namespace hhrp
