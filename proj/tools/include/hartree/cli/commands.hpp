#pragma once

#include <stdexcept>
#include <string>

#include "hartree/cli/config.hpp"
#include "hartree/cli/report.hpp"
#include "hartree/observables.hpp"

namespace hartree::cli {

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kRuntimeError = 3 };

/// blowup refuses initial data with E1(0) >= 0.
class PositiveEnergyError : public std::runtime_error {
 public:
  PositiveEnergyError(double E1, const std::string& what) : std::runtime_error(what), E1_(E1) {}
  double E1() const { return E1_; }

 private:
  double E1_;
};

/// Slack between the envelope root and the latest acceptable detection time.
inline constexpr double kBlowupSlack = 2.0;

struct RunOutput {
  Report report;
  std::optional<ObservableSeries> series;
};

RunOutput simulate(const ExperimentConfig& c);
RunOutput blowup(const ExperimentConfig& c);
RunOutput check_identities(const ExperimentConfig& c);
/// The cutoff and pair-bound subset of check_identities.
RunOutput check_cutoff(const ExperimentConfig& c);
RunOutput check_potential(const ExperimentConfig& c);

/// Writes report.json (and series.csv when present) into c.output_dir.
void write_outputs(const ExperimentConfig& c, const RunOutput& out);

}  // namespace hartree::cli
