#include "hhrp/lattice.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hhrp {

Lattice Lattice::build(int nu, int ell) {
  if (nu < 1) {
    throw std::invalid_argument("lattice dimension nu must be >= 1, got " + std::to_string(nu));
  }
  if (ell < 1) {
    throw std::invalid_argument("L must be a positive odd integer, got " + std::to_string(ell));
  }
  if (ell % 2 == 0) {
    throw std::invalid_argument("L must be odd, got " + std::to_string(ell));
  }
  Lattice lat;
  lat.nu_ = nu;
  lat.ell_ = ell;
  const int side = 2 * ell;
  std::size_t n = 1;
  for (int j = 0; j < nu; ++j) n *= static_cast<std::size_t>(side);
  lat.sites_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Coord x(nu);
    std::size_t rest = k;
    for (int j = nu - 1; j >= 0; --j) {
      x[j] = static_cast<int>(rest % side) - ell;
      rest /= side;
    }
    lat.sites_.push_back(std::move(x));
  }
  for (const auto& x : lat.sites_) {
    if (x[0] < 0) ++lat.num_left_;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 1; j <= nu; ++j) {
      lat.bonds_.push_back({i, lat.neighbor(i, j, +1), j});
    }
  }
  return lat;
}

Coord Lattice::canonical(Coord x) const {
  const int side = 2 * ell_;
  for (auto& c : x) {
    c = ((c + ell_) % side + side) % side - ell_;
  }
  return x;
}

std::size_t Lattice::flat(const Coord& x) const {
  const std::size_t side = 2 * static_cast<std::size_t>(ell_);
  std::size_t k = 0;
  for (int j = 0; j < nu_; ++j) k = k * side + static_cast<std::size_t>(x[j] + ell_);
  return k;
}

std::size_t Lattice::index(const Coord& x) const {
  if (static_cast<int>(x.size()) != nu_) {
    throw std::invalid_argument("coordinate has wrong dimension");
  }
  return flat(canonical(x));
}

std::size_t Lattice::origin() const { return index(Coord(nu_, 0)); }

std::size_t Lattice::neighbor(std::size_t site, int dir, int eps) const {
  Coord x = sites_.at(site);
  x.at(dir - 1) += eps;
  return index(x);
}

Parity Lattice::parity(std::size_t site) const {
  int s = 0;
  for (int c : sites_.at(site)) s += std::abs(c);
  return s % 2 == 0 ? Parity::even : Parity::odd;
}

std::size_t Lattice::reflect(std::size_t right_site) const {
  if (is_left(right_site)) {
    throw std::invalid_argument("reflection r is defined on the right half (x_1 >= 0) only");
  }
  Coord x = sites_[right_site];
  x[0] = -x[0] - 1;
  return index(x);
}

std::size_t Lattice::reflect_inverse(std::size_t left_site) const {
  if (!is_left(left_site)) {
    throw std::invalid_argument("inverse reflection is defined on the left half (x_1 < 0) only");
  }
  Coord x = sites_[left_site];
  x[0] = -x[0] - 1;
  return index(x);
}

std::vector<Bond> Lattice::cut_bonds() const {
  std::vector<Bond> out;
  for (const auto& b : bonds_) {
    if (is_left(b.from) != is_left(b.to)) out.push_back(b);
  }
  return out;
}

arma::mat Lattice::neg_laplacian() const {
  const std::size_t n = size();
  arma::mat m(n, n, arma::fill::zeros);
  for (std::size_t x = 0; x < n; ++x) {
    m(x, x) += 2.0 * nu_;
    for (int j = 1; j <= nu_; ++j) {
      m(x, neighbor(x, j, +1)) -= 1.0;
      m(x, neighbor(x, j, -1)) -= 1.0;
    }
  }
  return m;
}

template <typename Vec>
static Vec apply_laplacian(const Lattice& lat, const Vec& h) {
  if (h.n_elem != lat.size()) throw std::invalid_argument("field length does not match lattice");
  Vec out(h.n_elem);
  for (std::size_t x = 0; x < lat.size(); ++x) {
    typename Vec::elem_type acc = -2.0 * lat.nu() * h(x);
    for (int j = 1; j <= lat.nu(); ++j) {
      acc += h(lat.neighbor(x, j, +1)) + h(lat.neighbor(x, j, -1));
    }
    out(x) = acc;
  }
  return out;
}

arma::vec Lattice::laplacian(const arma::vec& h) const { return apply_laplacian(*this, h); }
arma::cx_vec Lattice::laplacian(const arma::cx_vec& h) const { return apply_laplacian(*this, h); }

arma::cx_vec Lattice::stagger(const arma::cx_vec& h) const {
  arma::cx_vec out = h;
  for (std::size_t x = 0; x < size(); ++x) out(x) *= static_cast<double>(sign(x));
  return out;
}

MomentumGrid::MomentumGrid(const Lattice& lattice) {
  const double dp = std::numbers::pi / lattice.ell();
  // Same index arithmetic as the sites: k_j in [-L, L).
  for (const auto& x : lattice.sites()) {
    arma::vec p(lattice.nu());
    for (int j = 0; j < lattice.nu(); ++j) p(j) = dp * x[j];
    points_.push_back(std::move(p));
  }
  const std::size_t n = lattice.size();
  phases_.set_size(n, n);
  for (std::size_t ip = 0; ip < n; ++ip) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      double dot = 0.0;
      for (int j = 0; j < lattice.nu(); ++j) dot += points_[ip](j) * lattice.coord(ix)[j];
      phases_(ip, ix) = std::polar(1.0, -dot);
    }
  }
}

arma::cx_vec MomentumGrid::fourier(const arma::cx_vec& h) const {
  const double nu = static_cast<double>(points_.empty() ? 0 : points_[0].n_elem);
  return std::pow(2.0 * std::numbers::pi, -nu / 2.0) * (phases_ * h);
}

arma::cx_vec MomentumGrid::inverse_fourier(const arma::cx_vec& hat) const {
  const double nu = static_cast<double>(points_.empty() ? 0 : points_[0].n_elem);
  const double n = static_cast<double>(points_.size());
  return (std::pow(2.0 * std::numbers::pi, nu / 2.0) / n) * (phases_.t() * hat);
}

Dispersion dispersion(const arma::vec& p) {
  Dispersion d{0.0, 0.0};
  for (double pj : p) {
    d.e += 1.0 - std::cos(pj);
    d.f += 1.0 + std::cos(pj);
  }
  return d;
}

}  // namespace hhrp
