#pragma once

#include <optional>
#include <vector>

#include "hartree/cutoff.hpp"
#include "hartree/hierarchy.hpp"
#include "hartree/potentials.hpp"

namespace hartree {

/// Grid kernels derived from one potential: V, z.grad V and the components
/// of grad V.
struct InteractionKernels {
  Potential potential;
  ConvolutionKernel value;
  ConvolutionKernel moment;
  std::vector<ConvolutionKernel> gradient;

  static InteractionKernels build(const Potential& V, const GridSpec& grid);
};

/// P = sum_i w_i 2 Im(conj(phi_i) grad phi_i), one field per axis.
std::vector<RealField> momentum_density(const Ensemble& e);

/// V1 = sum_i w_i int |x|^2 |phi_i|^2.
double variance(const Ensemble& e);
/// dV1/dt = 2 int x . P.
double variance_rate(const Ensemble& e);

/// 8 Tr(-Lap gamma) - 4 mu sum_i w_i int rho_i x . grad W_i, with W_i = K * rho_i
/// and the gradient taken spectrally. This is the form whose discrete time
/// derivative matches the split-step flow.
double virial_rhs(const MixtureAnalysis& a, int mu);
double virial_rhs(const Ensemble& e, const ConvolutionKernel& value_kernel, int mu);

/// 8 Tr(-Lap gamma) - 2 mu sum_i w_i int rho_i (K_m * rho_i) with K_m the
/// z.grad V kernel; the x <-> y symmetrized double integral.
double virial_rhs_symmetrized(const Ensemble& e, const ConvolutionKernel& moment_kernel, int mu);

/// Tr(psi_R gamma^(1)).
double localized_trace(const Ensemble& e, const CutoffProfile& p, double R);

/// How the derivatives of psi_R are formed on the grid. `analytic` samples the
/// closed-form derivatives pointwise. `spectral` differentiates the sampled
/// psi_R spectrally, which makes summation by parts against other spectral
/// derivatives exact; the analytic samples are aliased when sqrt(R) is only a
/// few cells wide. Spectral mode needs psi_R flat at the box faces,
/// sqrt(3R) < L/2, and throws InvalidArgument otherwise.
enum class WeightDerivatives { analytic, spectral };

/// Pointwise samples of psi_R and its derivatives, reused across calls.
struct WeightFields {
  double R = 0.0;
  RealField value;
  std::vector<RealField> gradient;  ///< d fields
  std::vector<RealField> hessian;   ///< d*d fields, row-major
  RealField bilaplacian;
  RealField cumulative;             ///< Phi(|x|^2/R)
  RealField rho;                    ///< rho(|x|^2/R)
  RealField s;                      ///< |x|^2/R
};

WeightFields weight_fields(const GridSpec& grid, const CutoffProfile& p, double R,
                           WeightDerivatives mode = WeightDerivatives::analytic);

/// 2 Re int H(psi_R) : (H_{x,x'} gamma - H_{x,x} gamma) - 2 mu sum_i w_i int rho_i grad psi_R . grad W_i.
/// Requires an analysis built with Hessians.
double localized_virial_rhs(const MixtureAnalysis& a, const WeightFields& w, int mu);
double localized_virial_rhs(const Ensemble& e, const ConvolutionKernel& value_kernel, int mu,
                            const CutoffProfile& p, double R,
                            WeightDerivatives mode = WeightDerivatives::analytic);

/// The three integrals of the bilaplacian identity, evaluated independently.
struct BilaplacianIdentity {
  double hessian_diag = 0.0;   ///< 2 Re int H(psi) : H_{x,x} gamma
  double bilaplacian = 0.0;    ///< int Delta^2 psi gamma(x,x)
  double hessian_cross = 0.0;  ///< 2 Re int H(psi) : H_{x',x} gamma
  double residual() const;     ///< |hessian_diag - (bilaplacian - hessian_cross)|
};

BilaplacianIdentity lemma40_check(const MixtureAnalysis& a, const WeightFields& w);
BilaplacianIdentity lemma40_check(const Ensemble& e, const CutoffProfile& p, double R,
                                  WeightDerivatives mode = WeightDerivatives::analytic);

/// Masked kernels used to split the commutator term at |x - y| = sqrt(R).
struct SplitKernels {
  double R = 0.0;
  std::vector<ConvolutionKernel> gradient_far;  ///< grad V on |z| > sqrt(R)
  ConvolutionKernel abs_far;                    ///< |z||grad V| on |z| > sqrt(R)
  ConvolutionKernel abs_near;                   ///< |z||grad V| on |z| <= sqrt(R)

  static SplitKernels build(const Potential& V, const GridSpec& grid, double R);
};

/// Decomposition of the localized virial bound for focusing radial mixtures.
struct LocalizedBound {
  double R = 0.0;
  double sixteen_E1 = 0.0;
  double II = 0.0;     ///< -8 int (Phi + 2 s rho) |grad phi|^2, s = |x|^2/R
  double III = 0.0;    ///< -2 int int a(x,y) . grad V(x-y) rho rho
  double IIIa = 0.0;   ///< part of III with |x - y| > sqrt(R)
  double IIIb = 0.0;   ///< III - IIIa
  double IV = 0.0;     ///< -int Delta^2 psi_R gamma(x,x)
  double bound = 0.0;  ///< sixteen_E1 + II + IIIa + IIIb + IV
  /// 4 int int (V + z.grad V / 2) rho rho, evaluated so that
  /// localized_virial_rhs = bound + defect holds on the grid.
  double defect = 0.0;
  /// Absolute-value majorants of IIIa and IIIb.
  double IIIa_majorant = 0.0;
  double IIIb_majorant = 0.0;
};

/// Requires mu = -1 and a radial ensemble (NonRadialError otherwise).
/// `truncation_constant` is the empirical constant of the pair bound
/// |a(x,y)| <= C (bracket) |x - y|, used only for IIIb_majorant.
LocalizedBound lemma43_terms(const Ensemble& e, const MixtureAnalysis& a, const WeightFields& w,
                             const SplitKernels& split, const CutoffProfile& p, int mu,
                             double truncation_constant);

/// -4 sum_i w_i int rho_i Phi(s) x . (grad V * rho_i): the commutator term by
/// convolution with the odd grad V kernel.
double commutator_term_kernel(const Ensemble& e, const InteractionKernels& kernels, const CutoffProfile& p,
                              double R);

/// -2 sum_i w_i h^{2d} sum_{a != b} rho_a rho_b a(x_a, x_b) . grad V(x_a - x_b), O(N^2).
double commutator_term_direct(const Ensemble& e, const Potential& V, const CutoffProfile& p, double R);

struct GlasseyEnvelope {
  double V1_0 = 0.0;
  double V1_dot_0 = 0.0;
  double E1 = 0.0;
  std::optional<double> root;

  double operator()(double t) const { return V1_0 + V1_dot_0 * t + 8.0 * E1 * t * t; }
};

/// Smallest positive zero of V1_0 + V1_dot_0 t + 8 E1 t^2, if any.
GlasseyEnvelope glassey_envelope(double V1_0, double V1_dot_0, double E1);

/// sup over sample radii of |x|^{d-1} |f g|^2 divided by
/// ||f grad f||_inf ||g||^2 + ||f g||^2 + ||f grad g||^2, with
/// f = (Phi(s) + s rho(s))^{1/2}; max over members. Radii are the grid points
/// on the positive first axis.
double strauss_ratio(const Ensemble& e, const CutoffProfile& p, double R);

/// sup_x |f grad f| = sup (|x|/R) |2 rho(s) + s rho'(s)|.
double strauss_auxiliary_sup(const CutoffProfile& p, double R);

/// Five-point centered second difference of a uniformly spaced series.
/// Entries without a full stencil are NaN.
std::vector<double> second_difference(const std::vector<double>& f, double tau);

/// Truncation order of second_difference in tau.
inline constexpr int kSecondDifferenceOrder = 4;

}  // namespace hartree
