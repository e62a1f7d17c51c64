#include "hhrp/hilbert.hpp"

#include "hhrp/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace hhrp {

using kernels::Entry;

namespace {

std::size_t checked_pow(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (r > cap / base + 1) return cap + 1;
    r *= base;
  }
  return r;
}

void require_same_dim(const Operator& a, const Operator& b) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols) {
    throw std::invalid_argument("operator dimension mismatch: " + std::to_string(a.n_rows) + "x" +
                                std::to_string(a.n_cols) + " vs " + std::to_string(b.n_rows) + "x" +
                                std::to_string(b.n_cols));
  }
}

void require_mode(const HilbertBasis& basis, std::size_t mode) {
  if (mode >= basis.modes()) {
    throw std::invalid_argument("unknown fermionic mode " + std::to_string(mode) + " (basis has " +
                                std::to_string(basis.modes()) + ")");
  }
}

void require_site(const HilbertBasis& basis, std::size_t site) {
  if (site >= basis.sites()) {
    throw std::invalid_argument("unknown site " + std::to_string(site));
  }
}

int jw_sign(std::uint64_t fermions, std::size_t mode) {
  const std::uint64_t below = fermions & ((std::uint64_t{1} << mode) - 1);
  return (std::popcount(below) % 2 == 0) ? 1 : -1;
}

template <typename F>
Operator diagonal_operator(const HilbertBasis& basis, F value) {
  return kernels::assemble_columns(basis.dim(), [&](std::size_t col, std::vector<Entry>& out) {
    const double v = value(basis.decode(col));
    if (v != 0.0) out.push_back({col, v});
  });
}

}  // namespace

HilbertBasis HilbertBasis::for_lattice(const Lattice& lattice, int n_max, std::size_t cap) {
  return for_sites(lattice.num_left(), lattice.num_right(), n_max, cap);
}

HilbertBasis HilbertBasis::for_sites(std::size_t n_left, std::size_t n_right, int n_max,
                                     std::size_t cap) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0, got " + std::to_string(n_max));
  if (n_left + n_right == 0) throw std::invalid_argument("basis needs at least one site");
  if (2 * (n_left + n_right) > 62) throw DimensionCapError("too many fermionic modes");
  HilbertBasis b;
  b.n_left_ = n_left;
  b.n_right_ = n_right;
  b.n_max_ = n_max;
  const std::size_t levels = static_cast<std::size_t>(n_max) + 1;
  const std::size_t big = cap * 4 + 16;
  b.boson_left_ = checked_pow(levels, n_left, big);
  b.boson_right_ = checked_pow(levels, n_right, big);
  const std::size_t fl = checked_pow(4, n_left, big);
  const std::size_t fr = checked_pow(4, n_right, big);
  const double total = static_cast<double>(fl) * static_cast<double>(b.boson_left_) *
                       static_cast<double>(fr) * static_cast<double>(b.boson_right_);
  if (total > static_cast<double>(cap)) {
    throw DimensionCapError("Hilbert space dimension " + std::to_string(static_cast<unsigned long long>(total)) +
                            " exceeds the cap of " + std::to_string(cap) +
                            "; reduce nu, L or n_max (or raise --cap)");
  }
  b.left_dim_ = fl * b.boson_left_;
  b.right_dim_ = fr * b.boson_right_;
  const std::size_t most = std::max(n_left, n_right);
  b.radix_.resize(most + 1);
  b.radix_[0] = 1;
  for (std::size_t k = 1; k <= most; ++k) b.radix_[k] = b.radix_[k - 1] * levels;
  return b;
}

HilbertBasis::Config HilbertBasis::decode(std::size_t index) const {
  const std::size_t left = index / right_dim_;
  const std::size_t right = index % right_dim_;
  Config c{};
  const std::uint64_t fl = left / boson_left_;
  const std::uint64_t fr = right / boson_right_;
  c.fermions = fl | (fr << (2 * n_left_));
  c.phonons_left = left % boson_left_;
  c.phonons_right = right % boson_right_;
  return c;
}

std::size_t HilbertBasis::encode(const Config& c) const {
  const std::uint64_t lmask = (std::uint64_t{1} << (2 * n_left_)) - 1;
  const std::size_t fl = c.fermions & lmask;
  const std::size_t fr = c.fermions >> (2 * n_left_);
  return (fl * boson_left_ + c.phonons_left) * right_dim_ + fr * boson_right_ + c.phonons_right;
}

int HilbertBasis::phonons(const Config& c, std::size_t site) const {
  const std::size_t B = levels();
  if (site < n_left_) return static_cast<int>((c.phonons_left / radix_[site]) % B);
  return static_cast<int>((c.phonons_right / radix_[site - n_left_]) % B);
}

HilbertBasis::Config HilbertBasis::with_phonons(Config c, std::size_t site, int n) const {
  const int old = phonons(c, site);
  if (site < n_left_) {
    c.phonons_left = c.phonons_left + (static_cast<std::size_t>(n) - static_cast<std::size_t>(old)) * radix_[site];
  } else {
    c.phonons_right = c.phonons_right +
                      (static_cast<std::size_t>(n) - static_cast<std::size_t>(old)) * radix_[site - n_left_];
  }
  return c;
}

int HilbertBasis::total_phonons(const Config& c) const {
  int n = 0;
  for (std::size_t s = 0; s < sites(); ++s) n += phonons(c, s);
  return n;
}

int HilbertBasis::site_charge(const Config& c, std::size_t site) const {
  return static_cast<int>(occupied(c, mode(site, Spin::up))) +
         static_cast<int>(occupied(c, mode(site, Spin::down))) - 1;
}

Operator identity(const HilbertBasis& basis) {
  Operator id(basis.dim(), basis.dim());
  id.eye();
  return id;
}

Operator annihilate(const HilbertBasis& basis, std::size_t mode) {
  require_mode(basis, mode);
  return kernels::assemble_columns(basis.dim(), [&](std::size_t col, std::vector<Entry>& out) {
    auto c = basis.decode(col);
    if (!HilbertBasis::occupied(c, mode)) return;
    const int s = jw_sign(c.fermions, mode);
    c.fermions ^= std::uint64_t{1} << mode;
    out.push_back({basis.encode(c), static_cast<double>(s)});
  });
}

Operator create(const HilbertBasis& basis, std::size_t mode) {
  require_mode(basis, mode);
  return kernels::assemble_columns(basis.dim(), [&](std::size_t col, std::vector<Entry>& out) {
    auto c = basis.decode(col);
    if (HilbertBasis::occupied(c, mode)) return;
    const int s = jw_sign(c.fermions, mode);
    c.fermions |= std::uint64_t{1} << mode;
    out.push_back({basis.encode(c), static_cast<double>(s)});
  });
}

Operator number(const HilbertBasis& basis, std::size_t mode) {
  require_mode(basis, mode);
  return diagonal_operator(basis, [mode](const HilbertBasis::Config& c) {
    return HilbertBasis::occupied(c, mode) ? 1.0 : 0.0;
  });
}

Operator site_number(const HilbertBasis& basis, std::size_t site) {
  require_site(basis, site);
  return diagonal_operator(basis, [&](const HilbertBasis::Config& c) {
    return static_cast<double>(basis.site_charge(c, site) + 1);
  });
}

Operator charge(const HilbertBasis& basis, std::size_t site) {
  require_site(basis, site);
  return diagonal_operator(basis, [&](const HilbertBasis::Config& c) {
    return static_cast<double>(basis.site_charge(c, site));
  });
}

Operator spin_density(const HilbertBasis& basis, std::size_t site) {
  require_site(basis, site);
  const std::size_t up = HilbertBasis::mode(site, Spin::up);
  const std::size_t dn = HilbertBasis::mode(site, Spin::down);
  return diagonal_operator(basis, [=](const HilbertBasis::Config& c) {
    return static_cast<double>(HilbertBasis::occupied(c, up)) -
           static_cast<double>(HilbertBasis::occupied(c, dn));
  });
}

Operator fermion_parity(const HilbertBasis& basis, const std::vector<std::size_t>& modes) {
  std::uint64_t mask = 0;
  for (auto m : modes) {
    require_mode(basis, m);
    mask |= std::uint64_t{1} << m;
  }
  return diagonal_operator(basis, [mask](const HilbertBasis::Config& c) {
    return std::popcount(c.fermions & mask) % 2 == 0 ? 1.0 : -1.0;
  });
}

Operator left_parity(const HilbertBasis& basis) {
  std::vector<std::size_t> modes(2 * basis.left_sites());
  for (std::size_t k = 0; k < modes.size(); ++k) modes[k] = k;
  return fermion_parity(basis, modes);
}

arma::cx_mat ladder_matrix(int n_max) {
  const auto n = static_cast<arma::uword>(n_max + 1);
  arma::cx_mat b(n, n, arma::fill::zeros);
  for (arma::uword k = 1; k < n; ++k) b(k - 1, k) = std::sqrt(static_cast<double>(k));
  return b;
}

arma::cx_mat boson_matrix(int n_max, BosonKind kind, double omega) {
  const arma::cx_mat b = ladder_matrix(n_max);
  const arma::cx_mat bd = b.t();
  switch (kind) {
    case BosonKind::annihilate:
      return b;
    case BosonKind::create:
      return bd;
    case BosonKind::position:
      if (omega <= 0) throw std::invalid_argument("omega must be > 0");
      return std::sqrt(1.0 / (2.0 * omega)) * (bd + b);
    case BosonKind::momentum:
      if (omega <= 0) throw std::invalid_argument("omega must be > 0");
      return std::complex<double>(0.0, std::sqrt(omega / 2.0)) * (bd - b);
    case BosonKind::number:
      return bd * b;
  }
  throw std::invalid_argument("unknown boson operator kind");
}

Operator site_phonon_operator(const HilbertBasis& basis, std::size_t site, const arma::cx_mat& m) {
  require_site(basis, site);
  if (m.n_rows != basis.levels() || m.n_cols != basis.levels()) {
    throw std::invalid_argument("single-site phonon matrix must be (n_max+1)x(n_max+1)");
  }
  return kernels::assemble_columns(basis.dim(), [&](std::size_t col, std::vector<Entry>& out) {
    const auto c = basis.decode(col);
    const int d = basis.phonons(c, site);
    for (arma::uword r = 0; r < m.n_rows; ++r) {
      const auto v = m(r, static_cast<arma::uword>(d));
      if (v == std::complex<double>(0.0, 0.0)) continue;
      out.push_back({basis.encode(basis.with_phonons(c, site, static_cast<int>(r))), v});
    }
  });
}

Operator boson(const HilbertBasis& basis, std::size_t site, BosonKind kind, double omega) {
  return site_phonon_operator(basis, site, boson_matrix(basis.n_max(), kind, omega));
}

Operator phonon_number(const HilbertBasis& basis) {
  return diagonal_operator(basis, [&](const HilbertBasis::Config& c) {
    return static_cast<double>(basis.total_phonons(c));
  });
}

arma::cx_mat exp_i_hermitian(const arma::cx_mat& m, double theta) {
  arma::vec evals;
  arma::cx_mat evecs;
  if (!arma::eig_sym(evals, evecs, arma::cx_mat(0.5 * (m + m.t())))) {
    throw std::runtime_error("eigendecomposition failed in exp_i_hermitian");
  }
  arma::cx_vec ph(evals.n_elem);
  for (arma::uword k = 0; k < evals.n_elem; ++k) ph(k) = std::polar(1.0, theta * evals(k));
  return evecs * arma::diagmat(ph) * evecs.t();
}

arma::cx_mat phase_matrix(int n_max, double theta, double omega) {
  return exp_i_hermitian(boson_matrix(n_max, BosonKind::position, omega), theta);
}

Operator phase(const HilbertBasis& basis, std::size_t site, double theta, double omega) {
  return site_phonon_operator(basis, site, phase_matrix(basis.n_max(), theta, omega));
}

Operator mode_permutation(const HilbertBasis& basis, const std::vector<std::size_t>& perm) {
  if (perm.size() != basis.modes()) throw std::invalid_argument("mode permutation has wrong length");
  std::vector<bool> seen(perm.size(), false);
  for (auto p : perm) {
    require_mode(basis, p);
    if (seen[p]) throw std::invalid_argument("mode map is not a permutation");
    seen[p] = true;
  }
  return kernels::assemble_columns(basis.dim(), [&](std::size_t col, std::vector<Entry>& out) {
    auto c = basis.decode(col);
    // c*_{X1} ... c*_{Xn} |0> with X ascending maps to c*_{pi X1} ... c*_{pi Xn} |0>;
    // reorder the image modes ascending and track the permutation sign.
    std::vector<std::size_t> image;
    for (std::size_t k = 0; k < basis.modes(); ++k) {
      if (HilbertBasis::occupied(c, k)) image.push_back(perm[k]);
    }
    int inversions = 0;
    std::uint64_t f = 0;
    for (std::size_t i = 0; i < image.size(); ++i) {
      f |= std::uint64_t{1} << image[i];
      for (std::size_t j = i + 1; j < image.size(); ++j) inversions += image[i] > image[j];
    }
    c.fermions = f;
    out.push_back({basis.encode(c), inversions % 2 == 0 ? 1.0 : -1.0});
  });
}

StateVector basis_state(const HilbertBasis& basis, std::size_t index) {
  if (index >= basis.dim()) throw std::invalid_argument("basis index out of range");
  StateVector v(basis.dim(), arma::fill::zeros);
  v(index) = 1.0;
  return v;
}

StateVector vacuum(const HilbertBasis& basis) { return basis_state(basis, 0); }

Operator adjoint(const Operator& a) { return a.t(); }

Operator commutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b);
  return a * b - b * a;
}

Operator anticommutator(const Operator& a, const Operator& b) {
  require_same_dim(a, b);
  return a * b + b * a;
}

double max_abs(const Operator& a) {
  double m = 0.0;
  for (auto it = a.begin(); it != a.end(); ++it) m = std::max(m, std::abs(static_cast<std::complex<double>>(*it)));
  return m;
}

double max_abs_diff(const Operator& a, const Operator& b) {
  require_same_dim(a, b);
  return max_abs(Operator(a - b));
}

bool is_hermitian(const Operator& a, double tol) {
  if (a.n_rows != a.n_cols) return false;
  return max_abs_diff(a, a.t()) <= tol;
}

double unitarity_residual(const Operator& u) {
  Operator id(u.n_rows, u.n_rows);
  id.eye();
  return max_abs_diff(Operator(u * u.t()), id);
}

Operator tensor(const Operator& left, const Operator& right) { return arma::kron(left, right); }

}  // namespace hhrp
