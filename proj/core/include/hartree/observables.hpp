#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hartree/virial.hpp"

namespace hartree {

struct LocalizedRecord {
  double R = 0.0;
  double trunc_V = 0.0;
  double locrhs = 0.0;
  std::optional<LocalizedBound> terms;
  double lemma40_residual = 0.0;
};

struct ObservableRecord {
  double t = 0.0;
  double mass = 0.0;
  double E1 = 0.0;
  double kinetic = 0.0;
  double interaction = 0.0;
  double V1 = 0.0;
  double V1_dot = 0.0;
  double virial_rhs = 0.0;
  std::vector<LocalizedRecord> localized;
};

/// Uniformly spaced records plus derived second differences.
class ObservableSeries {
 public:
  ObservableSeries(double tau, std::vector<double> R_list);

  void push(ObservableRecord r) { records_.push_back(std::move(r)); }
  const std::vector<ObservableRecord>& records() const { return records_; }
  double interval() const { return tau_; }
  const std::vector<double>& R_list() const { return R_list_; }

  std::vector<double> times() const;
  std::vector<double> V1() const;
  std::vector<double> FD2_V1() const;
  std::vector<double> trunc_V(std::size_t r_index) const;
  std::vector<double> FD2_trunc_V(std::size_t r_index) const;

  /// Columns: t, mass, E1, kinetic, interaction, V1, V1_dot, FD2_V1,
  /// virial_rhs, then per R: truncV_R, FD2_truncV_R, locrhs_R, II_R, IIIa_R,
  /// IIIb_R, IV_R, bound_R. Values use %.17g; missing values are "nan".
  void write_csv(std::ostream& os) const;
  static std::string format_R(double R);

 private:
  double tau_;
  std::vector<double> R_list_;
  std::vector<ObservableRecord> records_;
};

/// Computes one ObservableRecord per snapshot with kernels and weight fields
/// prepared once.
class ObservableRecorder {
 public:
  struct Options {
    int mu = 1;
    std::vector<double> R_list;
    bool localized_terms = false;   ///< compute the bound decomposition (needs radial, mu = -1)
    double truncation_constant = 0.0;
    WeightDerivatives weight_mode = WeightDerivatives::analytic;
  };

  ObservableRecorder(const Potential& V, const GridSpec& grid, Options options);

  ObservableRecord record(double t, const Ensemble& e) const;
  const InteractionKernels& kernels() const { return kernels_; }

 private:
  Options options_;
  InteractionKernels kernels_;
  std::vector<WeightFields> weights_;
  std::vector<SplitKernels> splits_;
};

}  // namespace hartree
