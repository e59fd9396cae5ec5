#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hartree/hierarchy.hpp"
#include "hartree/potentials.hpp"
#include "hartree/solver.hpp"
#include "hartree/virial.hpp"

namespace hartree::cli {

/// Invalid or missing configuration entry. `path` is the dotted key,
/// e.g. "grid.n" or "ensemble.members[1].width".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct MemberSpec {
  double weight = 1.0;
  GaussianProfile profile;
};

struct ExperimentConfig {
  GridSpec grid;
  Potential potential = Potential::zero();
  std::vector<MemberSpec> members;
  bool radial = false;
  PropagatorConfig propagator;
  /// Blowup threshold as a multiple of the initial gradient norm; used when
  /// propagator.blowup_gradient_threshold is not given.
  std::optional<double> blowup_gradient_factor;
  std::vector<double> cutoff_R_list;
  std::vector<double> hypothesis_R_list{1e2, 1e4, 1e6};
  WeightDerivatives weight_derivatives = WeightDerivatives::analytic;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";

  /// Throws ConfigError("tolerances.<name>") when absent.
  double tolerance(const std::string& name) const;
  Ensemble ensemble() const;
};

/// Applies `key.path=value` overrides to the raw document, then parses.
/// Values that parse as JSON are inserted as such, anything else as a string.
ExperimentConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

}  // namespace hartree::cli
