#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hartree/grid.hpp"

namespace hartree {

struct PropagatorConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int mu = 1;  ///< -1 focusing, +1 defocusing
  double blowup_gradient_threshold = std::numeric_limits<double>::infinity();
  double dt_floor = 1e-9;
  int record_every = 1;

  /// Throws InvalidArgument. t_end must be a whole number of record intervals.
  void validate() const;
  double record_interval() const { return dt * record_every; }
  long record_count() const;
};

enum class StepStatus { ok, blowup_detected, dt_underflow };

const char* to_string(StepStatus s);

struct StepOutcome {
  StepStatus status = StepStatus::ok;
  double time = 0.0;           ///< last time at which all fields were accepted
  double gradient_norm = 0.0;  ///< max over members of ||grad phi||_2 (the crossing value on blowup)
  int max_halvings = 0;        ///< deepest dt refinement used by an accepted block
};

/// One Strang step for i d_t phi + Laplacian phi = mu (K * |phi|^2) phi:
/// half free step, potential phase exp(-i mu W dt), half free step.
/// Throws NonFiniteError on NaN/Inf output.
SpectralField strang_step(const SpectralField& phi, const ConvolutionKernel& kernel, double dt, int mu);

/// ||grad phi||_{L^2}.
double gradient_norm(const SpectralField& phi);

/// Called at t = 0 and after each record interval with the current fields.
using EnsembleObserver = std::function<void(double t, std::span<const SpectralField> fields)>;

struct RecordSummary {
  double t = 0.0;
  double gradient_norm = 0.0;
};

struct PropagationResult {
  std::vector<RecordSummary> records;
  StepOutcome outcome;
  std::vector<SpectralField> final_fields;
};

/// Advances several fields in lockstep, record interval by record interval.
///
/// Each interval starts from a checkpoint. If any field's gradient norm ends
/// the interval at or above the threshold, or a step is non-finite, the
/// interval is redone from the checkpoint with twice as many substeps, so
/// the recorded series keeps a uniform spacing. Once the substep falls below
/// dt_floor the run stops with blowup_detected (threshold) or dt_underflow
/// (non-finite), reporting the checkpoint time.
PropagationResult propagate_ensemble(std::vector<SpectralField> fields, const ConvolutionKernel& kernel,
                                     const PropagatorConfig& config,
                                     const EnsembleObserver& observer = {});

using Observer = std::function<void(double t, const SpectralField& phi)>;

PropagationResult propagate(const SpectralField& phi0, const ConvolutionKernel& kernel,
                            const PropagatorConfig& config, const Observer& observer = {});

}  // namespace hartree
