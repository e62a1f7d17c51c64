#include "doctest.h"

#include "hhrp/hilbert.hpp"

#include <random>

using namespace hhrp;

namespace {

Operator anti(const Operator& a, const Operator& b) { return anticommutator(a, b); }

}  // namespace

TEST_CASE("basis dimensions") {
  CHECK(HilbertBasis::for_sites(1, 0, 1).dim() == 8);
  CHECK(HilbertBasis::for_lattice(Lattice::build(1, 1), 2).dim() == 144);
  CHECK(HilbertBasis::for_lattice(Lattice::build(2, 1), 1).dim() == 4096);
  CHECK_THROWS_AS(HilbertBasis::for_lattice(Lattice::build(2, 1), 2), DimensionCapError);
  CHECK_NOTHROW(HilbertBasis::for_lattice(Lattice::build(2, 1), 2, 1u << 20));
  CHECK_THROWS_AS(HilbertBasis::for_sites(1, 1, -1), std::invalid_argument);
}

TEST_CASE("encode and decode are inverse") {
  auto basis = HilbertBasis::for_sites(2, 1, 2);
  for (std::size_t i = 0; i < basis.dim(); ++i) CHECK(basis.encode(basis.decode(i)) == i);
  auto c = basis.decode(0);
  c = basis.with_phonons(c, 2, 2);
  c = basis.with_phonons(c, 0, 1);
  CHECK(basis.phonons(c, 2) == 2);
  CHECK(basis.phonons(c, 0) == 1);
  CHECK(basis.phonons(c, 1) == 0);
  CHECK(basis.total_phonons(c) == 3);
}

TEST_CASE("canonical anticommutation relations") {
  auto basis = HilbertBasis::for_sites(1, 1, 1);
  const Operator id = identity(basis);
  for (std::size_t x = 0; x < basis.modes(); ++x) {
    const Operator cx = annihilate(basis, x);
    CHECK(max_abs_diff(create(basis, x), adjoint(cx)) == 0.0);
    for (std::size_t y = 0; y < basis.modes(); ++y) {
      const Operator cy = annihilate(basis, y);
      CHECK(max_abs(anti(cx, cy)) == 0.0);
      const Operator expect = x == y ? id : Operator(basis.dim(), basis.dim());
      CHECK(max_abs_diff(anti(cx, adjoint(cy)), expect) == 0.0);
    }
    CHECK(arma::norm(arma::cx_vec(cx * vacuum(basis))) == 0.0);
  }
  CHECK_THROWS_AS(annihilate(basis, 4), std::invalid_argument);
}

TEST_CASE("right-half modes carry the left parity string") {
  auto basis = HilbertBasis::for_sites(1, 1, 0);
  auto left = HilbertBasis::for_sites(1, 0, 0);
  const Operator pl = left_parity(left);
  const Operator c_right = annihilate(basis, 2);  // site 1, up: first right mode
  const Operator local = annihilate(left, 0);     // same mode as the only site of a one-site half
  CHECK(max_abs_diff(c_right, tensor(pl, local)) == 0.0);
  CHECK(max_abs_diff(annihilate(basis, 0), tensor(local, identity(left))) == 0.0);
}

TEST_CASE("number operators are diagonal") {
  auto basis = HilbertBasis::for_sites(1, 1, 1);
  for (std::size_t s = 0; s < 2; ++s) {
    const Operator q = charge(basis, s);
    const Operator n = site_number(basis, s);
    CHECK(max_abs_diff(q, n - identity(basis)) == 0.0);
    const Operator nn = number(basis, 2 * s) + number(basis, 2 * s + 1);
    CHECK(max_abs_diff(nn, n) == 0.0);
    const Operator built = create(basis, 2 * s) * annihilate(basis, 2 * s);
    CHECK(max_abs_diff(built, number(basis, 2 * s)) == 0.0);
    for (auto it = q.begin(); it != q.end(); ++it) CHECK(it.row() == it.col());
  }
  CHECK(max_abs(commutator(charge(basis, 0), charge(basis, 1))) == 0.0);
}

TEST_CASE("truncated bosons") {
  const arma::cx_mat b1 = ladder_matrix(1);
  CHECK(std::abs(b1(0, 1) - 1.0) == 0.0);
  CHECK(arma::accu(arma::abs(b1)) == doctest::Approx(1.0));
  const arma::cx_mat b3 = ladder_matrix(3);
  const arma::cx_mat ccr = b3 * b3.t() - b3.t() * b3;
  const arma::cx_vec expect = {1.0, 1.0, 1.0, -3.0};
  CHECK(arma::abs(ccr - arma::diagmat(expect)).max() < 1e-14);
  for (int n : {0, 1, 2, 5}) {
    const arma::cx_mat phi = boson_matrix(n, BosonKind::position, 0.7);
    const arma::cx_mat pi = boson_matrix(n, BosonKind::momentum, 0.7);
    CHECK(arma::abs(phi - phi.t()).max() < 1e-15);
    CHECK(arma::abs(pi - pi.t()).max() < 1e-15);
    const arma::cx_mat u = phase_matrix(n, 1.3, 0.7);
    CHECK(arma::abs(u * u.t() - arma::eye<arma::cx_mat>(n + 1, n + 1)).max() < 1e-12);
  }
  auto basis = HilbertBasis::for_sites(1, 1, 2);
  const Operator b0 = boson(basis, 0, BosonKind::annihilate);
  const Operator b1s = boson(basis, 1, BosonKind::annihilate);
  CHECK(max_abs(commutator(b0, adjoint(b1s))) == 0.0);
  CHECK(max_abs(commutator(b0, annihilate(basis, 1))) == 0.0);
  const Operator np = adjoint(b0) * b0 + adjoint(b1s) * b1s;
  CHECK(max_abs_diff(np, phonon_number(basis)) < 1e-14);
}

TEST_CASE("mode permutation conjugation") {
  auto basis = HilbertBasis::for_sites(1, 1, 1);
  std::vector<std::size_t> perm = {1, 0, 3, 2};  // spin swap on both sites
  const Operator d = mode_permutation(basis, perm);
  CHECK(unitarity_residual(d) < 1e-14);
  for (std::size_t x = 0; x < basis.modes(); ++x) {
    const Operator lhs = d * annihilate(basis, x) * adjoint(d);
    CHECK(max_abs_diff(lhs, annihilate(basis, perm[x])) < 1e-14);
  }
  std::vector<std::size_t> cyc = {2, 3, 1, 0};
  const Operator e = mode_permutation(basis, cyc);
  for (std::size_t x = 0; x < basis.modes(); ++x) {
    CHECK(max_abs_diff(Operator(e * annihilate(basis, x) * adjoint(e)), annihilate(basis, cyc[x])) < 1e-14);
  }
  CHECK_THROWS_AS(mode_permutation(basis, {0, 0, 1, 2}), std::invalid_argument);
}

TEST_CASE("operator algebra") {
  auto basis = HilbertBasis::for_sites(1, 0, 2);
  const Operator a = annihilate(basis, 0) + 2.0 * boson(basis, 0, BosonKind::create);
  CHECK(max_abs(commutator(a, a)) == 0.0);
  CHECK(max_abs_diff(adjoint(adjoint(a)), a) == 0.0);
  CHECK_FALSE(is_hermitian(a, 1e-12));
  CHECK(is_hermitian(Operator(a + adjoint(a)), 1e-12));
  auto other = HilbertBasis::for_sites(1, 0, 1);
  CHECK_THROWS_AS(commutator(a, identity(other)), std::invalid_argument);
}
