#include "hartree/virial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hartree/errors.hpp"

namespace hartree {

InteractionKernels InteractionKernels::build(const Potential& V, const GridSpec& grid) {
  std::vector<ConvolutionKernel> grad;
  for (auto& g : gradient_kernel_samples(V, grid)) grad.emplace_back(grid, std::move(g));
  return InteractionKernels{V, ConvolutionKernel(grid, kernel_samples(V, grid, KernelKind::value)),
                            ConvolutionKernel(grid, kernel_samples(V, grid, KernelKind::radial_moment)),
                            std::move(grad)};
}

namespace {

std::size_t D(const GridSpec& g) { return static_cast<std::size_t>(g.dim); }

// sum_i w_i int f_i where f_i is produced per member
template <class F>
double mixture_integral(const MixtureAnalysis& a, F&& per_point) {
  double total = 0.0;
  const std::size_t N = a.grid.size();
  for (const auto& m : a.members) {
    double s = 0.0;
    for (std::size_t x = 0; x < N; ++x) s += per_point(m, x);
    total += m.weight * s * a.grid.cell_volume();
  }
  return total;
}

double x_dot_gradW(const MixtureAnalysis& a, const MemberAnalysis& m, std::size_t x) {
  const Point p = a.grid.point(x);
  double s = 0.0;
  for (std::size_t i = 0; i < D(a.grid); ++i) s += p[i] * m.gradW[i][x];
  return s;
}

double kinetic_of(const MixtureAnalysis& a) {
  double k = 0.0;
  for (const auto& m : a.members) k += m.weight * gradient_norm_squared(*m.field);
  return k;
}

double interaction_of(const MixtureAnalysis& a) {
  return mixture_integral(a, [](const MemberAnalysis& m, std::size_t x) { return m.W[x] * m.rho[x]; });
}

}  // namespace

std::vector<RealField> momentum_density(const Ensemble& e) {
  const GridSpec& g = e.grid();
  std::vector<RealField> P(D(g), RealField(g.size(), 0.0));
  for (const auto& m : e.members()) {
    const auto grad = gradient(m.field);
    for (std::size_t i = 0; i < D(g); ++i)
      for (std::size_t x = 0; x < g.size(); ++x)
        P[i][x] += m.weight * 2.0 * std::imag(std::conj(m.field[x]) * grad[i][x]);
  }
  return P;
}

double variance(const Ensemble& e) {
  const GridSpec& g = e.grid();
  const RealField rho = diagonal_density(e);
  double s = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) s += norm_squared(g.point(x)) * rho[x];
  return s * g.cell_volume();
}

double variance_rate(const Ensemble& e) {
  const GridSpec& g = e.grid();
  const auto P = momentum_density(e);
  double s = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    const Point p = g.point(x);
    for (std::size_t i = 0; i < D(g); ++i) s += p[i] * P[i][x];
  }
  return 2.0 * s * g.cell_volume();
}

double virial_rhs(const MixtureAnalysis& a, int mu) {
  const double coupling =
      mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) { return m.rho[x] * x_dot_gradW(a, m, x); });
  return 8.0 * kinetic_of(a) - 4.0 * mu * coupling;
}

double virial_rhs(const Ensemble& e, const ConvolutionKernel& value_kernel, int mu) {
  return virial_rhs(analyze(e, value_kernel, false), mu);
}

double virial_rhs_symmetrized(const Ensemble& e, const ConvolutionKernel& moment_kernel, int mu) {
  double coupling = 0.0;
  for (const auto& m : e.members()) {
    const RealField rho = density(m.field);
    const RealField Km = moment_kernel.apply(rho);
    double s = 0.0;
    for (std::size_t x = 0; x < rho.size(); ++x) s += rho[x] * Km[x];
    coupling += m.weight * s * e.grid().cell_volume();
  }
  return 8.0 * kinetic(e) - 2.0 * mu * coupling;
}

double localized_trace(const Ensemble& e, const CutoffProfile& p, double R) {
  const GridSpec& g = e.grid();
  const RealField rho = diagonal_density(e);
  double s = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) s += R * p.psi(norm_squared(g.point(x)) / R) * rho[x];
  return s * g.cell_volume();
}

WeightFields weight_fields(const GridSpec& grid, const CutoffProfile& p, double R, WeightDerivatives mode) {
  const std::size_t N = grid.size();
  const std::size_t d = D(grid);
  if (mode == WeightDerivatives::spectral && std::sqrt(3.0 * R) >= 0.5 * grid.length) {
    throw InvalidArgument("weight_fields: spectral derivatives need sqrt(3R) < L/2, got R = " + std::to_string(R));
  }
  WeightFields w;
  w.R = R;
  w.value.resize(N);
  w.gradient.assign(d, RealField(N));
  w.hessian.assign(d * d, RealField(N));
  w.bilaplacian.resize(N);
  w.cumulative.resize(N);
  w.rho.resize(N);
  w.s.resize(N);
  for (std::size_t x = 0; x < N; ++x) {
    const Point pt = grid.point(x);
    const auto lw = localization_weight(p, pt, R, grid.dim);
    w.value[x] = lw.value;
    for (std::size_t i = 0; i < d; ++i) {
      w.gradient[i][x] = lw.gradient[i];
      for (std::size_t j = 0; j < d; ++j) w.hessian[i * d + j][x] = lw.hessian[3 * i + j];
    }
    w.bilaplacian[x] = lw.bilaplacian;
    const double s = norm_squared(pt) / R;
    w.s[x] = s;
    w.cumulative[x] = p.cumulative(s);
    w.rho[x] = p.rho(s);
  }
  if (mode == WeightDerivatives::spectral) {
    ComplexField v(w.value.begin(), w.value.end());
    const SpectralField psi(grid, std::move(v));
    const auto re = [](const SpectralField& f, RealField& out) {
      for (std::size_t x = 0; x < out.size(); ++x) out[x] = f[x].real();
    };
    const auto grad = gradient(psi);
    for (std::size_t i = 0; i < d; ++i) re(grad[i], w.gradient[i]);
    const auto hess = hessian(psi);
    for (std::size_t k = 0; k < d * d; ++k) re(hess[k], w.hessian[k]);
    re(laplacian(laplacian(psi)), w.bilaplacian);
  }
  return w;
}

namespace {

void require_hessians(const MixtureAnalysis& a) {
  for (const auto& m : a.members) {
    if (m.hess.empty()) throw InvalidArgument("analysis was built without Hessians");
  }
}

// 2 Re sum_ij H_ij d_i phi conj(d_j phi)
double hessian_cross(const MixtureAnalysis& a, const WeightFields& w) {
  const std::size_t d = D(a.grid);
  return 2.0 * mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) {
           double s = 0.0;
           for (std::size_t i = 0; i < d; ++i)
             for (std::size_t j = 0; j < d; ++j)
               s += w.hessian[i * d + j][x] * std::real(m.grad[i][x] * std::conj(m.grad[j][x]));
           return s;
         });
}

// 2 Re sum_ij H_ij d_i d_j phi conj(phi)
double hessian_diag(const MixtureAnalysis& a, const WeightFields& w) {
  const std::size_t d = D(a.grid);
  return 2.0 * mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) {
           double s = 0.0;
           const Complex phibar = std::conj((*m.field)[x]);
           for (std::size_t i = 0; i < d; ++i)
             for (std::size_t j = 0; j < d; ++j) s += w.hessian[i * d + j][x] * std::real(m.hess[i * d + j][x] * phibar);
           return s;
         });
}

double bilaplacian_term(const MixtureAnalysis& a, const WeightFields& w) {
  return mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) { return w.bilaplacian[x] * m.rho[x]; });
}

double weight_coupling(const MixtureAnalysis& a, const WeightFields& w) {
  const std::size_t d = D(a.grid);
  return mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) s += w.gradient[i][x] * m.gradW[i][x];
    return m.rho[x] * s;
  });
}

}  // namespace

double localized_virial_rhs(const MixtureAnalysis& a, const WeightFields& w, int mu) {
  require_hessians(a);
  // H_{x,x'} and H_{x',x} contract identically against the symmetric H(psi_R).
  return hessian_cross(a, w) - hessian_diag(a, w) - 2.0 * mu * weight_coupling(a, w);
}

double localized_virial_rhs(const Ensemble& e, const ConvolutionKernel& value_kernel, int mu,
                            const CutoffProfile& p, double R, WeightDerivatives mode) {
  return localized_virial_rhs(analyze(e, value_kernel, true), weight_fields(e.grid(), p, R, mode), mu);
}

double BilaplacianIdentity::residual() const { return std::abs(hessian_diag - (bilaplacian - hessian_cross)); }

BilaplacianIdentity lemma40_check(const MixtureAnalysis& a, const WeightFields& w) {
  require_hessians(a);
  const std::size_t d = D(a.grid);
  BilaplacianIdentity out;
  out.hessian_diag = hessian_diag(a, w);
  out.bilaplacian = bilaplacian_term(a, w);
  // H_{x',x}: d_j phi conj(d_i phi), contracted entry by entry.
  out.hessian_cross = 2.0 * mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) {
                        double s = 0.0;
                        for (std::size_t i = 0; i < d; ++i)
                          for (std::size_t j = 0; j < d; ++j)
                            s += w.hessian[i * d + j][x] * std::real(m.grad[j][x] * std::conj(m.grad[i][x]));
                        return s;
                      });
  return out;
}

BilaplacianIdentity lemma40_check(const Ensemble& e, const CutoffProfile& p, double R, WeightDerivatives mode) {
  // W is not used by the identity; a zero kernel keeps the analysis cheap.
  const ConvolutionKernel none(e.grid(), RealField(e.grid().size(), 0.0));
  return lemma40_check(analyze(e, none, true), weight_fields(e.grid(), p, R, mode));
}

SplitKernels SplitKernels::build(const Potential& V, const GridSpec& grid, double R) {
  const double rs = std::sqrt(R);
  const KernelMask far{rs, false};
  const KernelMask near{rs, true};
  std::vector<ConvolutionKernel> g;
  for (auto& s : gradient_kernel_samples(V, grid, far)) g.emplace_back(grid, std::move(s));
  return SplitKernels{R, std::move(g), ConvolutionKernel(grid, kernel_samples(V, grid, KernelKind::abs_moment, far)),
                      ConvolutionKernel(grid, kernel_samples(V, grid, KernelKind::abs_moment, near))};
}

LocalizedBound lemma43_terms(const Ensemble& e, const MixtureAnalysis& a, const WeightFields& w,
                             const SplitKernels& split, const CutoffProfile& p, int mu,
                             double truncation_constant) {
  if (mu != -1) throw InvalidArgument("lemma43_terms: requires the focusing sign mu = -1");
  if (!e.radial()) throw NonRadialError("lemma43_terms: ensemble is not radial");
  const GridSpec& g = a.grid;
  const std::size_t d = D(g);
  LocalizedBound b;
  b.R = w.R;

  const double K = kinetic_of(a);
  const double I = interaction_of(a);
  b.sixteen_E1 = 16.0 * (0.5 * K + 0.25 * mu * I);

  b.II = -8.0 * mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) {
    double grad2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) grad2 += std::norm(m.grad[i][x]);
    return (w.cumulative[x] + 2.0 * w.s[x] * w.rho[x]) * grad2;
  });

  b.III = -4.0 * mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) {
    return m.rho[x] * w.cumulative[x] * x_dot_gradW(a, m, x);
  });

  double far = 0.0;
  for (const auto& m : a.members) {
    std::vector<RealField> G;
    for (const auto& k : split.gradient_far) G.push_back(k.apply(m.rho));
    double s = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
      const Point pt = g.point(x);
      double dotp = 0.0;
      for (std::size_t i = 0; i < d; ++i) dotp += pt[i] * G[i][x];
      s += m.rho[x] * w.cumulative[x] * dotp;
    }
    far += m.weight * s * g.cell_volume();
  }
  b.IIIa = -4.0 * far;
  b.IIIb = b.III - b.IIIa;

  b.IV = -bilaplacian_term(a, w);
  b.bound = b.sixteen_E1 + b.II + b.IIIa + b.IIIb + b.IV;

  const double coupling =
      mixture_integral(a, [&](const MemberAnalysis& m, std::size_t x) { return m.rho[x] * x_dot_gradW(a, m, x); });
  b.defect = 4.0 * I + 4.0 * coupling;

  double lip = 0.0;
  for (int k = 0; k <= 20000; ++k) {
    const double s = 1.0 + 2.0 * k / 20000.0;
    lip = std::max(lip, p.cumulative(s) + 2.0 * s * p.rho(s));
  }
  lip = std::max(lip, 1.0);
  double abs_far = 0.0, abs_near = 0.0;
  for (const auto& m : a.members) {
    const RealField kf = split.abs_far.apply(m.rho);
    const RealField kn = split.abs_near.apply(m.rho);
    double sf = 0.0, sn = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
      sf += m.rho[x] * kf[x];
      sn += (w.cumulative[x] + w.s[x] * w.rho[x]) * m.rho[x] * kn[x];
    }
    abs_far += m.weight * sf * g.cell_volume();
    abs_near += m.weight * sn * g.cell_volume();
  }
  b.IIIa_majorant = 2.0 * lip * abs_far;
  b.IIIb_majorant = 4.0 * truncation_constant * abs_near;
  return b;
}

double commutator_term_kernel(const Ensemble& e, const InteractionKernels& kernels, const CutoffProfile& p,
                              double R) {
  const GridSpec& g = e.grid();
  const std::size_t d = D(g);
  double total = 0.0;
  for (const auto& m : e.members()) {
    const RealField rho = density(m.field);
    std::vector<RealField> G;
    for (const auto& k : kernels.gradient) G.push_back(k.apply(rho));
    double s = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
      const Point pt = g.point(x);
      double dotp = 0.0;
      for (std::size_t i = 0; i < d; ++i) dotp += pt[i] * G[i][x];
      s += rho[x] * p.cumulative(norm_squared(pt) / R) * dotp;
    }
    total += m.weight * s * g.cell_volume();
  }
  return -4.0 * total;
}

double commutator_term_direct(const Ensemble& e, const Potential& V, const CutoffProfile& p, double R) {
  const GridSpec& g = e.grid();
  const std::size_t N = g.size();
  std::vector<Point> pts(N);
  for (std::size_t x = 0; x < N; ++x) pts[x] = g.point(x);
  const double hd = g.cell_volume();
  double total = 0.0;
  for (const auto& m : e.members()) {
    const RealField rho = density(m.field);
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (rho[i] == 0.0) continue;
      double inner = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        if (i == j) continue;
        const Point z{pts[i][0] - pts[j][0], pts[i][1] - pts[j][1], pts[i][2] - pts[j][2]};
        inner += rho[j] * dot(commutator_vector(p, pts[i], pts[j], R), V.gradient(z));
      }
      s += rho[i] * inner;
    }
    total += m.weight * s * hd * hd;
  }
  return -2.0 * total;
}

GlasseyEnvelope glassey_envelope(double V1_0, double V1_dot_0, double E1) {
  GlasseyEnvelope env{V1_0, V1_dot_0, E1, std::nullopt};
  const double A = 8.0 * E1, B = V1_dot_0, C = V1_0;
  std::vector<double> roots;
  if (A == 0.0) {
    if (B != 0.0) roots.push_back(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
      if (q != 0.0) {
        roots.push_back(q / A);
        roots.push_back(C / q);
      } else {
        roots.push_back(0.0);
      }
    }
  }
  for (double r : roots) {
    if (r > 0.0 && (!env.root || r < *env.root)) env.root = r;
  }
  return env;
}

double strauss_auxiliary_sup(const CutoffProfile& p, double R) {
  double best = 0.0;
  const int samples = 20000;
  for (int k = 0; k <= samples; ++k) {
    const double s = 1.0 + 2.0 * k / samples;
    best = std::max(best, std::sqrt(s) * std::abs(2.0 * p.rho(s) + s * p.rho_d1(s)));
  }
  return best / std::sqrt(R);
}

double strauss_ratio(const Ensemble& e, const CutoffProfile& p, double R) {
  const GridSpec& g = e.grid();
  if (g.dim < 2) throw InvalidArgument("strauss_ratio: requires d >= 2");
  if (!e.radial()) throw NonRadialError("strauss_ratio: ensemble is not radial");
  const std::size_t N = g.size();
  const std::size_t d = D(g);
  RealField f2(N);
  for (std::size_t x = 0; x < N; ++x) {
    const double s = norm_squared(g.point(x)) / R;
    f2[x] = p.cumulative(s) + s * p.rho(s);
  }
  const double aux = strauss_auxiliary_sup(p, R);
  double worst = 0.0;
  for (const auto& m : e.members()) {
    const auto grad = gradient(m.field);
    double g2 = 0.0, fg = 0.0, fdg = 0.0;
    for (std::size_t x = 0; x < N; ++x) {
      const double r2 = std::norm(m.field[x]);
      double dg = 0.0;
      for (std::size_t i = 0; i < d; ++i) dg += std::norm(grad[i][x]);
      g2 += r2;
      fg += f2[x] * r2;
      fdg += f2[x] * dg;
    }
    const double hd = g.cell_volume();
    const double rhs = aux * g2 * hd + fg * hd + fdg * hd;
    double lhs = 0.0;
    for (int j = g.n / 2 + 1; j < g.n; ++j) {
      std::array<int, 3> idx{g.n / 2, g.n / 2, g.n / 2};
      idx[0] = j;
      const std::size_t x = g.flat_index(idx);
      const double r = g.coordinate(j);
      lhs = std::max(lhs, std::pow(r, g.dim - 1) * f2[x] * std::norm(m.field[x]));
    }
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
  }
  return worst;
}

std::vector<double> second_difference(const std::vector<double>& f, double tau) {
  std::vector<double> out(f.size(), std::numeric_limits<double>::quiet_NaN());
  const double scale = 1.0 / (12.0 * tau * tau);
  for (std::size_t k = 2; k + 2 < f.size(); ++k) {
    out[k] = (-f[k - 2] + 16.0 * f[k - 1] - 30.0 * f[k] + 16.0 * f[k + 1] - f[k + 2]) * scale;
  }
  return out;
}

}  // namespace hartree
