#include "hhrp/cli.hpp"

#include "hhrp/kernels.hpp"
#include "hhrp/lattice.hpp"
#include "hhrp/report.hpp"
#include "hhrp/rpverify.hpp"
#include "hhrp/thermo.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace hhrp::cli {
namespace {

using nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid number for " + key + ": '" + text + "'");
  }
  return v;
}

template <typename Int>
Int to_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("invalid integer for " + key + ": '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

const std::vector<std::string>& sweep_axes() {
  static const std::vector<std::string> axes{"t", "U", "V", "g", "omega", "beta"};
  return axes;
}

Coord parse_coord(const std::string& text, int nu) {
  Coord x;
  for (const auto& part : split(text, ',')) x.push_back(to_integer<int>("site coordinate", part));
  if (static_cast<int>(x.size()) != nu) {
    throw ConfigError("site '" + text + "' needs " + std::to_string(nu) + " coordinates");
  }
  return x;
}

arma::cx_vec seeded_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  arma::cx_vec h(n);
  for (auto& v : h) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v = {re, im};
  }
  return h;
}

void write_le(std::ostream& out, std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_le(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  write_le(out, bits);
}

/// u64 rows, u64 cols, then row-major (re, im) pairs, all little-endian.
void dump_matrix(const std::string& path, const Operator& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open dump file " + path);
  write_le(f, static_cast<std::uint64_t>(m.n_rows));
  write_le(f, static_cast<std::uint64_t>(m.n_cols));
  const arma::cx_mat d(m);
  for (arma::uword i = 0; i < d.n_rows; ++i) {
    for (arma::uword j = 0; j < d.n_cols; ++j) {
      write_le(f, d(i, j).real());
      write_le(f, d(i, j).imag());
    }
  }
}

int cmd_build(const RunConfig& cfg, const std::string& dump, std::ostream& sink) {
  cfg.validate();
  const Model m(Lattice::build(cfg.nu, cfg.ell), cfg.model, cfg.cap);
  const Operator h = m.H();
  const Operator h1 = m.H1();
  const Operator h2 = m.H2();
  const arma::vec ev = block_eigenvalues(h, m.sector_labels(SectorKind::particle_numbers));
  ordered_json j;
  j["nu"] = cfg.nu;
  j["L"] = cfg.ell;
  j["n_max"] = cfg.model.n_max;
  j["sites"] = m.lattice().size();
  j["total_dim"] = m.dim();
  j["fermion_dim"] = m.basis().fermion_dim();
  j["boson_dim"] = m.basis().boson_dim();
  j["nnz_H"] = h.n_nonzero;
  j["hermiticity_H"] = max_abs_diff(h, Operator(h.t()));
  j["hermiticity_H1"] = max_abs_diff(h1, Operator(h1.t()));
  j["hermiticity_H2"] = max_abs_diff(h2, Operator(h2.t()));
  j["spectral_min"] = ev.min();
  j["spectral_max"] = ev.max();
  sink << j.dump() << '\n';
  if (!dump.empty()) dump_matrix(dump, h);
  return kSuccess;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, std::ostream& sink, std::ostream& err) {
  cfg.validate();
  if (!cfg.seed) throw ConfigError("verify needs a seed (--seed or 'seed' in the config)");
  const std::uint64_t seed = *cfg.seed;
  const bool all = suite == "all";
  const auto want = [&](const char* name) { return all || suite == name; };
  const auto count = [&](std::size_t fallback) { return cfg.count.value_or(fallback); };
  const auto tol = [&](double fallback) { return cfg.tol.value_or(fallback); };

  const Lattice lattice = Lattice::build(cfg.nu, cfg.ell);
  std::optional<Model> model;
  const auto get_model = [&]() -> const Model& {
    if (!model) model.emplace(lattice, cfg.model, cfg.cap);
    return *model;
  };

  std::vector<CheckRecord> records;
  const auto add = [&](const std::vector<CheckRecord>& r) { records.insert(records.end(), r.begin(), r.end()); };
  if (want("theta")) add(theta_suite(get_model(), seed, tol(1e-10)).records);
  if (want("dls")) add(dls_suite(seed, count(1000), tol(1e-10), tol(1e-12)).records);
  if (want("rp")) add(rp_suite(get_model(), seed, count(100), tol(1e-9)).records);
  if (want("gauss")) add(gauss_suite(get_model(), seed, count(200), tol(1e-9), tol(1e-10)).records);
  if (want("infrared")) add(infrared_suite(get_model(), seed, count(100), tol(1e-9)).records);
  if (want("halffill")) add(halffill_suite(lattice, seed, count(20), cfg.model.n_max, tol(1e-10)).records);
  if (want("q2")) add(q2_suite(get_model(), seed, count(500), tol(1e-9)).records);
  if (want("fourier")) {
    const Model& m = get_model();
    const auto st = thermal_state(m, Frame::H2);
    add(finite_volume_fourier_check(m, st, seeded_field(lattice.size(), seed), tol(1e-9)).records);
  }
  write_json_lines(sink, records);
  std::size_t failed = 0;
  for (const auto& r : records) {
    if (!r.pass) {
      ++failed;
      err << "FAIL " << r.name << " slack " << r.slack << '\n';
    }
  }
  if (failed > 0) err << failed << " of " << records.size() << " checks failed\n";
  return failed == 0 ? kSuccess : kCheckFailure;
}

int cmd_correlate(const RunConfig& cfg, const std::string& x_text, const std::string& y_text,
                  const std::string& frame_text, std::ostream& sink) {
  cfg.validate();
  const Lattice lat = Lattice::build(cfg.nu, cfg.ell);
  const auto site = [&](const std::string& text) {
    return text.empty() ? lat.origin() : lat.index(lat.canonical(parse_coord(text, cfg.nu)));
  };
  const std::size_t x = site(x_text);
  const std::size_t y = site(y_text);
  const Frame frame = frame_text == "H1" ? Frame::H1 : frame_text == "H2" ? Frame::H2 : Frame::H;
  const Model m(lat, cfg.model, cfg.cap);
  const auto st = thermal_state(m, frame);
  const double v = charge_correlation(m, st, x, y);
  ordered_json j;
  j["frame"] = frame_text;
  j["x"] = lat.coord(x);
  j["y"] = lat.coord(y);
  j["value"] = v;
  j["staggered_value"] = lat.sign(x) * lat.sign(y) * v;
  sink << j.dump() << '\n';
  return kSuccess;
}

ordered_json bound_json(const BoundReport& r) {
  ordered_json j;
  j["nu"] = r.nu;
  j["t"] = r.params.t;
  j["U"] = r.params.U;
  j["V"] = r.params.V;
  j["g"] = r.params.g;
  j["omega"] = r.params.omega;
  j["beta"] = r.params.beta;
  j["u_eff"] = r.u_eff;
  j["gap"] = r.gap;
  j["entropy_term"] = r.entropy_term;
  j["hopping_term"] = r.hopping_term;
  j["ir_term"] = r.ir_term;
  j["gamma2_term"] = r.gamma2_term;
  j["rhs"] = r.rhs;
  j["certified"] = r.certified;
  j["reason"] = r.reason;
  return j;
}

int cmd_bound(const RunConfig& cfg, int nu, std::ostream& sink) {
  sink << bound_json(main_bound(cfg.model, nu)).dump() << '\n';
  return kSuccess;
}

int cmd_sweep(const RunConfig& cfg, int nu, std::ostream& sink) {
  write_sweep_csv(sink, phase_sweep(cfg.sweep_grid(), nu));
  return kSuccess;
}

int cmd_integral(const RunConfig& cfg, int nu, std::ostream& sink) {
  const double tol = cfg.tol.value_or(1e-4);
  if (!(tol > 0.0)) throw ConfigError("integral tolerance must be > 0");
  constexpr double max_points = 268435456.0;  // 2^28 on the finest grid
  TorusIntegral r = torus_integral(nu);
  while (!(r.error <= tol * std::abs(r.value))) {
    const std::size_t n0 = 2 * r.grids.front();
    if (std::pow(static_cast<double>(n0 << (r.grids.size() - 1)), nu) > max_points) break;
    r = torus_integral(nu, n0, static_cast<int>(r.grids.size()));
  }
  const double oracle = torus_integral_bessel(nu);
  const bool met = r.error <= tol * std::abs(r.value);
  ordered_json j;
  j["nu"] = nu;
  j["value"] = r.value;
  j["error"] = r.error;
  j["tolerance"] = tol;
  j["converged"] = met;
  j["grids"] = r.grids;
  j["raw"] = r.raw;
  j["exponents"] = r.exponents;
  j["bessel_oracle"] = oracle;
  j["relative_difference"] = (r.value - oracle) / oracle;
  sink << j.dump() << '\n';
  return met ? kSuccess : kCheckFailure;
}

}  // namespace

void RunConfig::set(const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "nu") {
    nu = to_integer<int>(key, value);
  } else if (key == "L") {
    ell = to_integer<int>(key, value);
  } else if (key == "n_max") {
    model.n_max = to_integer<int>(key, value);
  } else if (key == "t") {
    model.t = to_double(key, value);
  } else if (key == "U") {
    model.U = to_double(key, value);
  } else if (key == "V") {
    model.V = to_double(key, value);
  } else if (key == "g") {
    model.g = to_double(key, value);
  } else if (key == "omega") {
    model.omega = to_double(key, value);
  } else if (key == "beta") {
    model.beta = to_double(key, value);
  } else if (key == "seed") {
    seed = to_integer<std::uint64_t>(key, value);
  } else if (key == "count") {
    count = to_integer<std::size_t>(key, value);
  } else if (key == "tol") {
    tol = to_double(key, value);
  } else if (key == "cap") {
    cap = to_integer<std::size_t>(key, value);
  } else if (key == "workers") {
    workers = to_integer<int>(key, value);
  } else if (key.rfind("sweep.", 0) == 0) {
    const std::string axis = key.substr(6);
    if (std::find(sweep_axes().begin(), sweep_axes().end(), axis) == sweep_axes().end()) {
      throw ConfigError("unknown sweep axis '" + axis + "'");
    }
    parse_range(value);
    sweep[axis] = trim(value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (nu < 1) throw ConfigError("nu must be >= 1");
  if (ell < 1 || ell % 2 == 0) throw ConfigError("L must be a positive odd integer, got " + std::to_string(ell));
  if (cap == 0) throw ConfigError("cap must be > 0");
  if (tol && !(*tol >= 0.0)) throw ConfigError("tol must be >= 0");
  model.validate();
}

SweepGrid RunConfig::sweep_grid() const {
  const auto axis = [&](const std::string& name, double fallback) {
    const auto it = sweep.find(name);
    return it == sweep.end() ? std::vector<double>{fallback} : parse_range(it->second);
  };
  return SweepGrid{axis("t", model.t),         axis("U", model.U),         axis("V", model.V),
                   axis("g", model.g),         axis("omega", model.omega), axis("beta", model.beta)};
}

std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || trim(line.substr(0, eq)).empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return kv;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file " + path);
  RunConfig cfg;
  for (const auto& [k, v] : read_key_values(f)) cfg.set(k, v);
  return cfg;
}

std::vector<double> parse_range(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("empty range");
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("range '" + text + "' must be start:stop:points");
    const double a = to_double("range start", parts[0]);
    const double b = to_double("range stop", parts[1]);
    const auto n = to_integer<std::size_t>("range points", parts[2]);
    if (n == 0) throw ConfigError("range '" + text + "' needs at least one point");
    if (n == 1) return {a};
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
  }
  std::vector<double> out;
  for (const auto& part : split(t, ',')) out.push_back(to_double("range value", part));
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact finite-lattice checks and charge-order bounds for the extended Holstein-Hubbard model", "hhrp"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> nmax;
  std::optional<std::size_t> cap;
  std::optional<int> workers;
  std::optional<double> tol;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "RNG seed (required by verify)");
  app.add_option("--nmax", nmax, "phonon truncation per site");
  app.add_option("--cap", cap, "maximum Hilbert space dimension");
  app.add_option("--workers", workers, "OpenMP threads (0 keeps the runtime default)");
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_option("--tol", tol, "check tolerance; target relative error for integral");
  app.add_option("--set", sets, "config override key=value (repeatable)");

  auto* build = app.add_subcommand("build", "Hamiltonian summary: dimensions, Hermiticity residuals, spectral range");
  std::string dump;
  build->add_option("--dump", dump, "write H as u64 rows, u64 cols, row-major complex<f64> little-endian");

  auto* verify = app.add_subcommand("verify", "run check suites, JSON-lines report");
  std::string suite = "all";
  verify->add_option("--suite", suite, "check suite")
      ->check(CLI::IsMember({"theta", "dls", "rp", "gauss", "infrared", "halffill", "q2", "fourier", "all"}));
  std::optional<std::size_t> count;
  verify->add_option("--count", count, "instances, fields, draws or pairs per suite");

  auto* correlate = app.add_subcommand("correlate", "thermal charge correlation <q_x q_y>");
  std::string x_text, y_text, frame = "H";
  correlate->add_option("--x", x_text, "site as comma-separated coordinates (default origin)");
  correlate->add_option("--y", y_text, "site as comma-separated coordinates (default origin)");
  correlate->add_option("--frame", frame, "Hamiltonian frame")->check(CLI::IsMember({"H", "H1", "H2"}));

  std::optional<int> nu_opt;
  auto* bound = app.add_subcommand("bound", "evaluate the charge-order lower bound");
  bound->add_option("--nu", nu_opt, "dimension (default: config nu)");
  auto* sweep = app.add_subcommand("sweep", "bound over a parameter grid, CSV");
  sweep->add_option("--nu", nu_opt, "dimension (default: config nu)");
  auto* integral = app.add_subcommand("integral", "int dp / E(p) over the torus");
  integral->add_option("--nu", nu_opt, "dimension (default: config nu)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidInput;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    if (nmax) cfg.model.n_max = *nmax;
    if (cap) cfg.cap = *cap;
    if (workers) cfg.workers = *workers;
    if (tol) cfg.tol = *tol;
    if (count) cfg.count = *count;
    if (cfg.workers > 0) kernels::set_workers(cfg.workers);
    const int nu = nu_opt.value_or(cfg.nu);

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file " + out_path);
    }
    std::ostream& sink = out_path.empty() ? out : file;

    int code = kSuccess;
    if (*build) code = cmd_build(cfg, dump, sink);
    if (*verify) code = cmd_verify(cfg, suite, sink, err);
    if (*correlate) code = cmd_correlate(cfg, x_text, y_text, frame, sink);
    if (*bound) code = cmd_bound(cfg, nu, sink);
    if (*sweep) code = cmd_sweep(cfg, nu, sink);
    if (*integral) code = cmd_integral(cfg, nu, sink);
    sink.flush();
    return code;
  } catch (const DimensionCapError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kCheckFailure;
  }
}

}  // namespace hhrp::cli
