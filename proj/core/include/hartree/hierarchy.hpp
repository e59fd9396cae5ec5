#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hartree/grid.hpp"
#include "hartree/solver.hpp"

namespace hartree {

struct Member {
  double weight = 1.0;
  SpectralField field;
};

/// Finite convex combination of factorized states,
/// gamma^(k) = sum_i w_i prod_j phi_i(x_j) conj(phi_i(x'_j)).
///
/// Construction checks sum w_i = 1 (1e-12), w_i > 0, ||phi_i|| = 1 (1e-8),
/// a common grid, and, when `radial` is requested, invariance of every member
/// under the grid's axis permutations and reflections.
class Ensemble {
 public:
  Ensemble(std::vector<Member> members, bool radial = false);

  static Ensemble singleton(SpectralField phi, bool radial = false);

  const std::vector<Member>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  const GridSpec& grid() const { return members_.front().field.grid(); }
  bool radial() const { return radial_; }

  /// Same weights and radial flag, new fields (in member order).
  Ensemble with_fields(std::vector<SpectralField> fields) const;

 private:
  std::vector<Member> members_;
  bool radial_ = false;
};

/// Largest deviation of |phi| under the hyperoctahedral symmetries of the grid,
/// relative to max |phi|.
double radial_asymmetry(const SpectralField& phi);

struct GaussianProfile {
  double width = 1.0;
  Point center{};
  Point momentum{};
};

/// pi^{-d/4} w^{-d/2} exp(-|x-c|^2 / (2 w^2)) exp(i p.x), rescaled to unit
/// discrete norm.
SpectralField gaussian(const GridSpec& grid, const GaussianProfile& profile);

// evolution

using EnsembleCallback = std::function<void(double t, const Ensemble& snapshot)>;

struct EvolutionResult {
  StepOutcome outcome;
  std::vector<RecordSummary> records;
  Ensemble final_state;
};

/// Evolves every member by the Hartree flow in lockstep; weights are unchanged.
EvolutionResult evolve(const Ensemble& ensemble, const ConvolutionKernel& kernel,
                       const PropagatorConfig& config, const EnsembleCallback& callback = {});

// traces

double mass(const Ensemble& e);
/// Tr(-Laplacian gamma^(1)) = sum_i w_i ||grad phi_i||^2.
double kinetic(const Ensemble& e);
/// Tr(B+ gamma^(2)) = sum_i w_i int (K * |phi_i|^2) |phi_i|^2.
double interaction_trace(const Ensemble& e, const ConvolutionKernel& kernel);

struct EnergyParts {
  double kinetic = 0.0;
  double interaction = 0.0;
  double E1 = 0.0;
};

/// E1 = kinetic / 2 + (mu / 4) interaction.
EnergyParts energy(const Ensemble& e, const ConvolutionKernel& kernel, int mu);
double energy_E1(const Ensemble& e, const ConvolutionKernel& kernel, int mu);
/// k (kinetic / 2 + (mu / 4) interaction).
double energy_Ek(const Ensemble& e, const ConvolutionKernel& kernel, int mu, int k);

/// Direct O(N^2) evaluation of the interaction trace from pointwise kernel
/// samples K(x_a - x_b); coordinates differences are not wrapped.
double interaction_trace_direct(const Ensemble& e, const std::function<double(const Point&)>& kernel_at,
                                double origin_value);

// identities

/// The three traces of A = g (x) conj(h): int (Lap g) conj(h), the same with
/// the Laplacian taken in the primed variable, and -int grad g . grad' conj(h).
struct TraceTriple {
  Complex unprimed;
  Complex primed;
  Complex mixed;
  double max_disagreement() const;
};

TraceTriple check_trace_identity(const SpectralField& g, const SpectralField& h);

/// Max over sample points and index pairs of the three Hermitian derivative
/// residuals of gamma^(1) on the diagonal.
struct HermitianResiduals {
  double first = 0.0;
  double second = 0.0;
  double mixed = 0.0;
  double max() const;
};

HermitianResiduals check_hermitian_derivs(const Ensemble& e, const std::vector<std::size_t>& sample_points);

/// max over sample x of |int gamma^(2)(x,y,x,y) dy - gamma^(1)(x,x)|.
double admissibility_residual(const Ensemble& e, const std::vector<std::size_t>& sample_points);

/// min over grid points x, y of gamma^(2)(x,y,x,y), evaluated on a strided
/// subset when the grid is large.
double min_pair_density(const Ensemble& e, std::size_t stride = 1);

/// gamma^(1)(x,x) = sum_i w_i |phi_i|^2.
RealField diagonal_density(const Ensemble& e);

/// Per-member derived fields reused by several virial functionals.
struct MemberAnalysis {
  double weight = 0.0;
  const SpectralField* field = nullptr;
  std::vector<SpectralField> grad;
  std::vector<SpectralField> hess;  ///< d*d row-major, filled on request
  RealField rho;
  RealField W;                      ///< K * rho
  std::vector<RealField> gradW;     ///< spectral gradient of W
};

struct MixtureAnalysis {
  GridSpec grid;
  std::vector<MemberAnalysis> members;
};

MixtureAnalysis analyze(const Ensemble& e, const ConvolutionKernel& kernel, bool with_hessian);

}  // namespace hartree
