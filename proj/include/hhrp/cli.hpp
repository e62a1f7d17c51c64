#pragma once

#include "hhrp/bounds.hpp"
#include "hhrp/hilbert.hpp"
#include "hhrp/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hhrp::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailure = 1, kInvalidInput = 2 };

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Settings shared by all subcommands. Keys of the flat config file:
///   nu, L, n_max, t, U, V, g, omega, beta      lattice and model
///   seed, count, tol, cap, workers            run control
///   sweep.t, sweep.U, sweep.V, sweep.g, sweep.omega, sweep.beta
/// Sweep values are a number, a comma list, or start:stop:points.
struct RunConfig {
  ModelParams model;
  int nu = 1;
  int ell = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::optional<double> tol;
  std::size_t cap = HilbertBasis::kDefaultCap;
  int workers = 0;
  std::map<std::string, std::string> sweep;  // axis -> range text

  /// Throws ConfigError for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  /// Throws ConfigError (or std::invalid_argument from the model) unless the
  /// lattice and model parameters are admissible.
  void validate() const;
  SweepGrid sweep_grid() const;
};

/// `key = value` lines; blank lines and text after '#' are ignored.
std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in);
RunConfig load_config(const std::string& path);

/// "a" | "a,b,c" | "start:stop:points" (inclusive, evenly spaced).
std::vector<double> parse_range(const std::string& text);

/// Full command line (argv[0] is the program name). Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hhrp::cli
