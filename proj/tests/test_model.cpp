#include "doctest.h"

#include "hhrp/model.hpp"
#include "hhrp/thermo.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <map>

using namespace hhrp;

namespace {

ModelParams params(double g = 0.7, int n_max = 1) {
  ModelParams p;
  p.t = 0.8;
  p.U = 1.3;
  p.V = 0.6;
  p.g = g;
  p.omega = 1.4;
  p.beta = 0.9;
  p.n_max = n_max;
  return p;
}

int below(std::uint64_t f, std::size_t mode) {
  return std::popcount(f & ((std::uint64_t{1} << mode) - 1));
}

/// H assembled entry by entry from occupation numbers, without the operator algebra.
arma::cx_mat hand_hamiltonian(const Lattice& lat, const ModelParams& p) {
  const auto basis = HilbertBasis::for_lattice(lat, p.n_max);
  const std::size_t n = basis.dim();
  arma::cx_mat h(n, n, arma::fill::zeros);
  for (std::size_t col = 0; col < n; ++col) {
    const auto c = basis.decode(col);
    double diag = 0.0;
    for (std::size_t x = 0; x < lat.size(); ++x) {
      const int q = basis.site_charge(c, x);
      diag += p.U * q * q + p.omega * basis.phonons(c, x);
    }
    for (const auto& b : lat.bonds()) diag += p.V * basis.site_charge(c, b.from) * basis.site_charge(c, b.to);
    h(col, col) += diag;
    for (const auto& b : lat.bonds()) {
      for (Spin s : {Spin::up, Spin::down}) {
        const std::size_t mf = HilbertBasis::mode(b.from, s);
        const std::size_t mt = HilbertBasis::mode(b.to, s);
        for (auto [dst, src] : {std::pair{mf, mt}, std::pair{mt, mf}}) {
          if (!((c.fermions >> src) & 1U) || ((c.fermions >> dst) & 1U)) continue;
          std::uint64_t f = c.fermions & ~(std::uint64_t{1} << src);
          double sign = (below(c.fermions, src) % 2) ? -1.0 : 1.0;
          sign *= (below(f, dst) % 2) ? -1.0 : 1.0;
          f |= std::uint64_t{1} << dst;
          HilbertBasis::Config d = c;
          d.fermions = f;
          h(basis.encode(d), col) += -p.t * sign;
        }
      }
    }
    for (std::size_t x = 0; x < lat.size(); ++x) {
      const int q = basis.site_charge(c, x);
      const int k = basis.phonons(c, x);
      if (q == 0) continue;
      if (k < p.n_max) h(basis.encode(basis.with_phonons(c, x, k + 1)), col) += p.g * q * std::sqrt(k + 1.0);
      if (k > 0) h(basis.encode(basis.with_phonons(c, x, k - 1)), col) += p.g * q * std::sqrt(double(k));
    }
  }
  return h;
}

double dense_diff(const Operator& a, const arma::cx_mat& b) { return arma::abs(arma::cx_mat(a) - b).max(); }

}  // namespace

TEST_CASE("parameter validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  p.t = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.beta = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.omega = std::nan("");
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = ModelParams{};
  p.g = 3.0;
  p.omega = 2.0;
  CHECK(p.alpha() == doctest::Approx(std::sqrt(2.0) * 3.0 / std::pow(2.0, 1.5)));
  CHECK(p.u_eff() == doctest::Approx(1.0 - 9.0));
}

TEST_CASE("H matches a hand-assembled matrix") {
  const auto lat = Lattice::build(1, 1);
  const auto p = params(0.7, 2);
  const Model m(lat, p);
  REQUIRE(m.dim() == 144);
  const Operator h = m.H();
  CHECK(dense_diff(h, hand_hamiltonian(lat, p)) < 1e-13);
  CHECK(is_hermitian(h, 1e-13));
}

TEST_CASE("all Hamiltonians are Hermitian") {
  const Model m(Lattice::build(1, 1), params());
  CHECK(is_hermitian(m.H1(), 1e-12));
  CHECK(is_hermitian(m.H2(), 1e-12));
  CHECK(is_hermitian(m.H2(arma::vec{0.3, -0.2}), 1e-12));
  CHECK(is_hermitian(m.hp_interaction(), 1e-12));
}

TEST_CASE("without coupling the Lang-Firsov form equals H") {
  const Model m(Lattice::build(1, 1), params(0.0, 2));
  CHECK(max_abs_diff(m.H1(), m.H()) < 1e-13);
}

TEST_CASE("zigzag conjugations") {
  const auto lat = Lattice::build(2, 1);
  const Model m(lat, params(0.5, 0));
  const Operator v = m.zigzag();
  const Operator vi = adjoint(v);
  CHECK(unitarity_residual(v) < 1e-13);
  for (std::size_t x = 0; x < lat.size(); ++x) {
    for (Spin s : {Spin::up, Spin::down}) {
      const Operator conj = v * m.c(x, s) * vi;
      const Operator expect = lat.is_even(x) ? m.c(x, s) : Operator(adjoint(m.c(x, s)));
      // An overall sign per mode is allowed; the map must still be c -> c or c -> c*.
      const double plus = max_abs_diff(conj, expect);
      const double minus = max_abs_diff(conj, Operator(-expect));
      CHECK(std::min(plus, minus) < 1e-13);
    }
    CHECK(max_abs_diff(v * m.q(x) * vi, Operator(double(lat.sign(x)) * m.q(x))) < 1e-13);
  }
  CHECK(max_abs_diff(v * m.H1() * vi, m.H2()) < 1e-12);
}

TEST_CASE("H2 with zero field equals H2") {
  const Model m(Lattice::build(1, 1), params());
  CHECK(max_abs_diff(m.H2(arma::vec{0.0, 0.0}), m.H2()) < 1e-12);
}

TEST_CASE("H2(h) diagonal part matches the operator form") {
  const auto lat = Lattice::build(1, 1);
  const auto p = params();
  const Model m(lat, p);
  const arma::vec h{0.4, -1.1};
  Operator expect(m.dim(), m.dim());
  const double nu = lat.nu();
  for (std::size_t x = 0; x < lat.size(); ++x) expect += (p.u_eff() - nu * p.V) * (m.q(x) * m.q(x));
  const Operator id = identity(m.basis());
  for (const auto& b : lat.bonds()) {
    const Operator w = m.q(b.from) - h(b.from) * id - m.q(b.to) + h(b.to) * id;
    expect += 0.5 * p.V * (w * w);
  }
  CHECK(max_abs_diff(m.P2(h), expect) < 1e-12);
  CHECK_THROWS_AS(m.P2_diagonal(arma::vec{1.0}), std::invalid_argument);
}

TEST_CASE("left-half a operators satisfy the CAR and commute with right operators") {
  const auto lat = Lattice::build(1, 1);
  const Model m(lat, params(0.5, 0));
  const std::size_t nl = 2 * lat.num_left();
  const Operator id = identity(m.basis());
  for (std::size_t x = 0; x < nl; ++x) {
    for (std::size_t y = 0; y < nl; ++y) {
      CHECK(max_abs(anticommutator(m.a(x), m.a(y))) < 1e-14);
      const Operator e = x == y ? id : Operator(m.dim(), m.dim());
      CHECK(max_abs_diff(anticommutator(m.a(x), adjoint(m.a(y))), e) < 1e-14);
    }
    // c_r (-1)^{N_L} acts on the right factor only
    for (std::size_t r = nl; r < m.basis().modes(); ++r) {
      CHECK(max_abs(commutator(m.a(x), Operator(m.c(r) * left_parity(m.basis())))) < 1e-14);
    }
  }
  CHECK_THROWS_AS(m.a(nl), std::invalid_argument);
}

TEST_CASE("hole-particle transform") {
  const auto lat = Lattice::build(1, 1);
  const Model m(lat, params(0.5, 1));
  const Operator u = m.hole_particle();
  const Operator ui = adjoint(u);
  CHECK(unitarity_residual(u) < 1e-13);
  for (std::size_t x = 0; x < lat.size(); ++x) {
    CHECK(max_abs_diff(u * m.c(x, Spin::up) * ui, m.c(x, Spin::up)) < 1e-13);
    const Operator expect = double(lat.sign(x)) * adjoint(m.c(x, Spin::down));
    CHECK(max_abs_diff(u * m.c(x, Spin::down) * ui, expect) < 1e-13);
    CHECK(max_abs_diff(u * m.q(x) * ui, spin_density(m.basis(), x)) < 1e-13);
  }
  // u H u^{-1} = T + K + W with W the interaction written in spin densities.
  CHECK(max_abs_diff(u * m.H() * ui, Operator(m.hp_free() + m.hp_interaction())) < 1e-12);
  const Operator hh = m.hp_free() + m.hp_interaction();
  const Operator d = m.spin_flip();
  CHECK(unitarity_residual(d) < 1e-13);
  CHECK(max_abs_diff(d * hh * adjoint(d), hh) < 1e-12);
}

TEST_CASE("sector labels are conserved") {
  const Model m(Lattice::build(1, 1), params());
  const auto pn = BlockPartition::from_labels(m.sector_labels(SectorKind::particle_numbers), m.dim());
  const auto sc = BlockPartition::from_labels(m.sector_labels(SectorKind::staggered_charges), m.dim());
  CHECK(pn.size() == 9);
  CHECK(pn.block_diagonal(m.H()));
  CHECK(pn.block_diagonal(m.H1()));
  CHECK_FALSE(pn.block_diagonal(m.H2()));
  CHECK(sc.block_diagonal(m.H2()));
  CHECK(sc.block_diagonal(m.H2(arma::vec{0.2, 0.5})));
}

TEST_CASE("Lang-Firsov unitary constants") {
  const auto lat = Lattice::build(1, 1);
  const auto p = params(0.6, 8);
  const Model m(lat, p);
  const auto d = lang_firsov_diagnostics(m);
  CHECK(d.unitarity < 1e-12);
  CHECK(d.spectrum_invariance < 1e-9);
  CHECK(std::abs(d.b_phase - std::complex<double>(0.0, 1.0)) < 1e-12);
  // U b U^{-1} = i b - (g / (sqrt2 omega)) q
  CHECK(std::abs(d.displacement + p.g / (std::sqrt(2.0) * p.omega)) < 1e-9);
  CHECK(d.measured_alpha == doctest::Approx(p.g / std::sqrt(p.omega)).epsilon(1e-10));
  CHECK(d.displayed_alpha == doctest::Approx(p.alpha()));
  CHECK_FALSE(d.matches_display);
  CHECK(d.measured_u_eff == doctest::Approx(p.U - p.g * p.g / p.omega).epsilon(1e-6));
  // The polaron constants reproduce the low spectrum of H; the displayed ones do not.
  CHECK(d.spectrum_mismatch_measured < 1e-7);
  CHECK(d.spectrum_mismatch_displayed > 0.1);
}
