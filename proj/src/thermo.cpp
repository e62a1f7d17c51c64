#include "hhrp/thermo.hpp"

#include "hhrp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace hhrp {

namespace {

using BlockKey = std::pair<std::size_t, std::size_t>;

/// Local position of every basis index inside its block.
std::vector<arma::uword> local_positions(const BlockPartition& part, std::size_t dim) {
  std::vector<arma::uword> pos(dim, 0);
  for (const auto& blk : part.blocks) {
    for (arma::uword k = 0; k < blk.size(); ++k) pos[blk[k]] = k;
  }
  return pos;
}

/// Dense sub-blocks (row block, column block) holding the nonzeros of `op`.
std::map<BlockKey, arma::cx_mat> dense_blocks(const Operator& op, const BlockPartition& part,
                                              bool diagonal_only) {
  const auto pos = local_positions(part, op.n_rows);
  std::map<BlockKey, arma::cx_mat> out;
  for (auto it = op.begin(); it != op.end(); ++it) {
    const std::size_t br = part.block_of[it.row()];
    const std::size_t bc = part.block_of[it.col()];
    if (diagonal_only && br != bc) continue;
    auto found = out.find({br, bc});
    if (found == out.end()) {
      found = out.emplace(BlockKey{br, bc},
                          arma::cx_mat(part.blocks[br].size(), part.blocks[bc].size(), arma::fill::zeros))
                  .first;
    }
    found->second(pos[it.row()], pos[it.col()]) += static_cast<std::complex<double>>(*it);
  }
  return out;
}

arma::cx_mat hermitian_part(const arma::cx_mat& m) { return 0.5 * (m + m.t()); }

// Real symmetric blocks take the real driver, which is several times faster.
void eig_or_throw(arma::vec& values, arma::cx_mat& vectors, const arma::cx_mat& m) {
  const arma::cx_mat hm = hermitian_part(m);
  const arma::mat im = arma::imag(hm);
  if (im.is_empty() || arma::abs(im).max() == 0.0) {
    arma::mat rv;
    if (!arma::eig_sym(values, rv, arma::mat(arma::real(hm)))) {
      throw std::runtime_error("Hermitian eigendecomposition failed");
    }
    vectors = arma::conv_to<arma::cx_mat>::from(rv);
    return;
  }
  if (!arma::eig_sym(values, vectors, hm)) {
    throw std::runtime_error("Hermitian eigendecomposition failed");
  }
}

void eig_or_throw(arma::vec& values, const arma::cx_mat& m) {
  if (!arma::eig_sym(values, hermitian_part(m))) {
    throw std::runtime_error("Hermitian eigendecomposition failed");
  }
}

BlockPartition partition_for(const Operator& h, const std::vector<int>& labels) {
  if (labels.empty()) return BlockPartition::single(h.n_rows);
  if (labels.size() != h.n_rows) throw std::invalid_argument("sector labels do not match dimension");
  auto part = BlockPartition::from_labels(labels, h.n_rows);
  if (!part.block_diagonal(h)) return BlockPartition::single(h.n_rows);
  return part;
}

}  // namespace

BlockPartition BlockPartition::from_labels(const std::vector<int>& labels, std::size_t dim) {
  if (labels.size() != dim) throw std::invalid_argument("sector labels do not match dimension");
  BlockPartition p;
  std::map<int, std::size_t> id;
  for (int l : labels) id.emplace(l, 0);
  std::size_t k = 0;
  for (auto& [label, idx] : id) idx = k++;
  p.blocks.resize(id.size());
  p.block_of.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t b = id[labels[i]];
    p.blocks[b].push_back(i);
    p.block_of[i] = b;
  }
  return p;
}

BlockPartition BlockPartition::single(std::size_t dim) {
  BlockPartition p;
  p.blocks.resize(1);
  p.blocks[0].resize(dim);
  for (std::size_t i = 0; i < dim; ++i) p.blocks[0][i] = i;
  p.block_of.assign(dim, 0);
  return p;
}

bool BlockPartition::block_diagonal(const Operator& op) const {
  for (auto it = op.begin(); it != op.end(); ++it) {
    if (block_of[it.row()] != block_of[it.col()]) return false;
  }
  return true;
}

double log_partition(const arma::vec& eigenvalues, double beta) {
  if (eigenvalues.is_empty()) throw std::invalid_argument("empty spectrum");
  const double e0 = eigenvalues.min();
  double s = 0.0;
  for (double e : eigenvalues) s += std::exp(-beta * (e - e0));
  return -beta * e0 + std::log(s);
}

SpectralData SpectralData::compute(const Operator& h, double beta, const std::vector<int>& labels,
                                   bool with_vectors) {
  if (h.n_rows != h.n_cols) throw std::invalid_argument("Hamiltonian must be square");
  kernels::check_dense_backend();
  const auto part = partition_for(h, labels);
  auto dense = dense_blocks(h, part, true);
  SpectralData sd;
  sd.beta_ = beta;
  sd.dim_ = h.n_rows;
  sd.has_vectors_ = with_vectors;
  sd.blocks_.resize(part.size());
  for (std::size_t b = 0; b < part.size(); ++b) {
    auto& blk = sd.blocks_[b];
    blk.indices = part.blocks[b];
    const arma::uword n = blk.indices.size();
    auto found = dense.find({b, b});
    const arma::cx_mat m = found == dense.end() ? arma::cx_mat(n, n, arma::fill::zeros) : found->second;
    if (with_vectors) {
      eig_or_throw(blk.eigenvalues, blk.eigenvectors, m);
    } else {
      eig_or_throw(blk.eigenvalues, m);
    }
  }
  sd.e0_ = sd.blocks_.front().eigenvalues.min();
  for (const auto& blk : sd.blocks_) sd.e0_ = std::min(sd.e0_, blk.eigenvalues.min());
  double s = 0.0;
  sd.weights_.resize(sd.blocks_.size());
  for (std::size_t b = 0; b < sd.blocks_.size(); ++b) {
    sd.weights_[b] = arma::exp(-beta * (sd.blocks_[b].eigenvalues - sd.e0_));
    s += arma::accu(sd.weights_[b]);
  }
  for (auto& w : sd.weights_) w /= s;
  sd.log_z_ = -beta * sd.e0_ + std::log(s);
  return sd;
}

arma::vec SpectralData::eigenvalues() const {
  arma::vec all(dim_);
  arma::uword k = 0;
  for (const auto& blk : blocks_) {
    all.subvec(k, k + blk.eigenvalues.n_elem - 1) = blk.eigenvalues;
    k += blk.eigenvalues.n_elem;
  }
  return arma::sort(all);
}

double SpectralData::reconstruction_residual(const Operator& h) const {
  if (!has_vectors_) throw std::logic_error("reconstruction needs eigenvectors");
  BlockPartition part;
  part.blocks.resize(blocks_.size());
  part.block_of.resize(dim_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    part.blocks[b] = blocks_[b].indices;
    for (auto i : blocks_[b].indices) part.block_of[i] = b;
  }
  const auto dense = dense_blocks(h, part, false);
  double r = 0.0;
  for (const auto& [key, m] : dense) {
    if (key.first != key.second) {
      r = std::max(r, arma::abs(m).max());
    }
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const auto& blk = blocks_[b];
    const arma::cx_mat rec = blk.eigenvectors * arma::diagmat(arma::cx_vec(blk.eigenvalues, arma::zeros(blk.eigenvalues.n_elem))) * blk.eigenvectors.t();
    auto found = dense.find({b, b});
    const arma::cx_mat m = found == dense.end() ? arma::cx_mat(rec.n_rows, rec.n_cols, arma::fill::zeros) : found->second;
    r = std::max(r, arma::abs(rec - m).max());
  }
  return r;
}

BlockedOperator::BlockedOperator(const Operator& m, const std::vector<int>& labels)
    : partition_(partition_for(m, labels)) {
  kernels::check_dense_backend();
  auto dense = dense_blocks(m, partition_, true);
  blocks_.resize(partition_.size());
  for (std::size_t b = 0; b < partition_.size(); ++b) {
    const arma::uword n = partition_.blocks[b].size();
    auto found = dense.find({b, b});
    blocks_[b] = found == dense.end() ? arma::cx_mat(n, n, arma::fill::zeros) : hermitian_part(found->second);
  }
}

arma::vec BlockedOperator::eigenvalues(const arma::vec& diagonal) const {
  if (diagonal.n_elem != partition_.block_of.size()) throw std::invalid_argument("diagonal has wrong length");
  std::vector<arma::vec> parts(blocks_.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks_.size()); ++b) {
    const auto bb = static_cast<std::size_t>(b);
    arma::cx_mat m = blocks_[bb];
    const auto& idx = partition_.blocks[bb];
    for (arma::uword k = 0; k < idx.size(); ++k) m(k, k) += diagonal(idx[k]);
    arma::vec v;
    if (!arma::eig_sym(v, m)) throw std::runtime_error("Hermitian eigendecomposition failed");
    parts[bb] = std::move(v);
  }
  arma::vec all(diagonal.n_elem);
  arma::uword k = 0;
  for (const auto& p : parts) {
    all.subvec(k, k + p.n_elem - 1) = p;
    k += p.n_elem;
  }
  return arma::sort(all);
}

double BlockedOperator::log_z(const arma::vec& diagonal, double beta) const {
  return log_partition(eigenvalues(diagonal), beta);
}

std::complex<double> thermal_expectation(const Operator& a, const SpectralData& spec) {
  if (!spec.has_vectors()) throw std::logic_error("thermal expectation needs eigenvectors");
  if (a.n_rows != spec.dim() || a.n_cols != spec.dim()) throw std::invalid_argument("operator dimension mismatch");
  BlockPartition part;
  part.blocks.resize(spec.blocks().size());
  part.block_of.resize(spec.dim());
  for (std::size_t b = 0; b < spec.blocks().size(); ++b) {
    part.blocks[b] = spec.blocks()[b].indices;
    for (auto i : spec.blocks()[b].indices) part.block_of[i] = b;
  }
  const auto dense = dense_blocks(a, part, true);
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [key, m] : dense) {
    const auto& blk = spec.blocks()[key.first];
    acc += kernels::weighted_diagonal(m, blk.eigenvectors, spec.weights()[key.first]);
  }
  return acc;
}

std::complex<double> duhamel(const Operator& a, const Operator& b, const SpectralData& spec) {
  if (!spec.has_vectors()) throw std::logic_error("Duhamel function needs eigenvectors");
  if (a.n_rows != spec.dim() || b.n_rows != spec.dim()) throw std::invalid_argument("operator dimension mismatch");
  BlockPartition part;
  part.blocks.resize(spec.blocks().size());
  part.block_of.resize(spec.dim());
  for (std::size_t k = 0; k < spec.blocks().size(); ++k) {
    part.blocks[k] = spec.blocks()[k].indices;
    for (auto i : spec.blocks()[k].indices) part.block_of[i] = k;
  }
  const auto da = dense_blocks(a, part, false);
  const auto db = dense_blocks(b, part, false);
  // Weights are e^{-beta(E - E0)} / S, so S = 1 / w at the ground state; the
  // kernel is applied to shifted energies and divided by S.
  double s = 0.0;
  for (std::size_t k = 0; k < spec.blocks().size(); ++k) {
    const auto& e = spec.blocks()[k].eigenvalues;
    for (double v : e) s += std::exp(-spec.beta() * (v - spec.ground_energy()));
  }
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [key, ma] : da) {
    auto fb = db.find(key);
    if (fb == db.end()) continue;
    const auto& rn = spec.blocks()[key.first];
    const auto& cm = spec.blocks()[key.second];
    const arma::cx_mat ea = rn.eigenvectors.t() * ma * cm.eigenvectors;
    const arma::cx_mat eb = rn.eigenvectors.t() * fb->second * cm.eigenvectors;
    acc += kernels::duhamel_sum(ea, eb, rn.eigenvalues - spec.ground_energy(),
                                cm.eigenvalues - spec.ground_energy(), spec.beta());
  }
  return acc / s;
}

arma::vec block_eigenvalues(const Operator& h, const std::vector<int>& labels) {
  return SpectralData::compute(h, 0.0, labels, false).eigenvalues();
}

ThermalState thermal_state(const Model& model, Frame frame, bool with_vectors) {
  const double beta = model.params().beta;
  switch (frame) {
    case Frame::H:
      return {frame, SpectralData::compute(model.H(), beta, model.sector_labels(SectorKind::particle_numbers), with_vectors)};
    case Frame::H1:
      return {frame, SpectralData::compute(model.H1(), beta, model.sector_labels(SectorKind::particle_numbers), with_vectors)};
    case Frame::H2:
      return {frame, SpectralData::compute(model.H2(), beta, model.sector_labels(SectorKind::staggered_charges), with_vectors)};
  }
  throw std::invalid_argument("unknown frame");
}

double charge_correlation(const Model& model, const ThermalState& state, std::size_t x, std::size_t y) {
  const auto v = thermal_expectation(Operator(model.q(x) * model.q(y)), state.spec);
  return v.real();
}

Operator charge_mode(const Model& model, const arma::cx_vec& h) {
  const arma::cx_vec f = -model.lattice().laplacian(h);
  Operator a(model.dim(), model.dim());
  for (std::size_t x = 0; x < model.lattice().size(); ++x) {
    if (f(x) != std::complex<double>(0.0, 0.0)) a += f(x) * model.q(x);
  }
  return a;
}

Operator nested_commutator_closed_form(const Model& model, const arma::cx_vec& h, double sign) {
  const auto& lat = model.lattice();
  const arma::cx_vec f = -lat.laplacian(h);
  const double alpha = model.params().alpha();
  const double t = model.params().t;
  Operator out(model.dim(), model.dim());
  for (const auto& b : lat.bonds()) {
    const std::size_t e = lat.is_even(b.from) ? b.from : b.to;
    const std::size_t o = lat.is_even(b.from) ? b.to : b.from;
    const double w = std::norm(f(e) + f(o));
    if (w == 0.0) continue;
    const Operator ph = model.phase(e, -alpha) * model.phase(o, alpha);
    for (Spin s : {Spin::up, Spin::down}) {
      const Operator x = ph * (adjoint(model.c(e, s)) * adjoint(model.c(o, s)));
      out += (sign * t * w) * (x + adjoint(x));
    }
  }
  return out;
}

QuadraticForms quadratic_form_quantities(const Model& model, const Operator& h2,
                                         const ThermalState& h2_state, const arma::cx_vec& h) {
  if (h2_state.frame != Frame::H2) throw std::invalid_argument("quadratic forms are defined for H''");
  QuadraticForms r;
  const Operator a = charge_mode(model, h);
  const Operator as = adjoint(a);
  const auto g = thermal_expectation(Operator(as * a), h2_state.spec);
  const auto b = duhamel(a, a, h2_state.spec);
  const Operator nested = commutator(a, commutator(h2, as));
  const auto c = model.params().beta * thermal_expectation(nested, h2_state.spec);
  r.g = g.real();
  r.g_imag = g.imag();
  r.b = b.real();
  r.b_imag = b.imag();
  r.c = c.real();
  r.c_imag = c.imag();
  r.closed_form_residual = max_abs_diff(nested, nested_commutator_closed_form(model, h, +1.0));
  r.closed_form_residual_flipped = max_abs_diff(nested, nested_commutator_closed_form(model, h, -1.0));
  return r;
}

}  // namespace hhrp
