#pragma once

#include <armadillo>

#include <cstddef>
#include <vector>

namespace hhrp {

using Coord = std::vector<int>;

enum class Parity { even, odd };

/// Directed nearest-neighbour pair (from, from + e_dir) on the torus.
struct Bond {
  std::size_t from;
  std::size_t to;
  int direction;  // 1-based, 1..nu
};

/// Hypercubic torus [-L, L)^nu with L odd.
///
/// Sites are stored in lexicographic coordinate order with x_1 most
/// significant. Because x_1 runs from -L upwards, every site with x_1 < 0
/// (the left half) precedes every site with x_1 >= 0 (the right half), so the
/// first num_left() indices are exactly the left half.
class Lattice {
 public:
  static Lattice build(int nu, int ell);

  int nu() const { return nu_; }
  int ell() const { return ell_; }
  std::size_t size() const { return sites_.size(); }
  std::size_t num_left() const { return num_left_; }
  std::size_t num_right() const { return size() - num_left_; }

  const std::vector<Coord>& sites() const { return sites_; }
  const Coord& coord(std::size_t i) const { return sites_.at(i); }

  /// Reduces every component into [-L, L).
  Coord canonical(Coord x) const;
  std::size_t index(const Coord& x) const;
  std::size_t origin() const;

  /// Site x + eps * e_dir, dir 1-based.
  std::size_t neighbor(std::size_t site, int dir, int eps) const;

  /// Parity of sum_j |x_j| on the canonical representative.
  Parity parity(std::size_t site) const;
  bool is_even(std::size_t site) const { return parity(site) == Parity::even; }
  int sign(std::size_t site) const { return is_even(site) ? 1 : -1; }
  bool is_left(std::size_t site) const { return site < num_left_; }

  /// r(x) = (-x_1 - 1, x_2, ..., x_nu) for x in the right half.
  std::size_t reflect(std::size_t right_site) const;
  /// r^{-1} on the left half.
  std::size_t reflect_inverse(std::size_t left_site) const;

  /// Directed enumeration sum_x sum_j (x, x + e_j). For L = 1 the wrap bond
  /// coincides with the direct one, so each pair appears twice.
  const std::vector<Bond>& bonds() const { return bonds_; }

  /// Bonds with one endpoint in each half.
  std::vector<Bond> cut_bonds() const;

  /// Dense matrix of -Delta (periodic).
  arma::mat neg_laplacian() const;
  arma::vec laplacian(const arma::vec& h) const;
  arma::cx_vec laplacian(const arma::cx_vec& h) const;

  /// (tau h)_x = (-1)^{|x|} h_x.
  arma::cx_vec stagger(const arma::cx_vec& h) const;

 private:
  Lattice() = default;
  std::size_t flat(const Coord& canonical_x) const;

  int nu_ = 0;
  int ell_ = 0;
  std::size_t num_left_ = 0;
  std::vector<Coord> sites_;
  std::vector<Bond> bonds_;
};

/// Dual grid p_j = pi k_j / L, k_j in [-L, L), same enumeration order as the
/// lattice sites.
class MomentumGrid {
 public:
  explicit MomentumGrid(const Lattice& lattice);

  std::size_t size() const { return points_.size(); }
  const std::vector<arma::vec>& points() const { return points_; }
  const arma::vec& point(std::size_t i) const { return points_.at(i); }

  /// hat h(p) = (2 pi)^{-nu/2} sum_x e^{-i x.p} h_x.
  arma::cx_vec fourier(const arma::cx_vec& h) const;
  arma::cx_vec inverse_fourier(const arma::cx_vec& hat) const;

 private:
  std::vector<arma::vec> points_;
  arma::cx_mat phases_;  // (p, x) -> e^{-i x.p}
};

/// E(p) = sum_j (1 - cos p_j), F(p) = sum_j (1 + cos p_j).
struct Dispersion {
  double e;
  double f;
};
Dispersion dispersion(const arma::vec& p);

}  // namespace hhrp
