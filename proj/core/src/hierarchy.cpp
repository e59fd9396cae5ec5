#include "hartree/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hartree/errors.hpp"

namespace hartree {

namespace {

std::vector<std::array<int, 3>> axis_permutations(int dim) {
  std::array<int, 3> p{0, 1, 2};
  std::vector<std::array<int, 3>> out;
  do {
    bool trailing_fixed = true;
    for (int a = dim; a < 3; ++a) trailing_fixed = trailing_fixed && p[a] == a;
    if (trailing_fixed) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

void validate_members(const std::vector<Member>& members) {
  if (members.empty()) throw InvalidArgument("ensemble: no members");
  const GridSpec& g = members.front().field.grid();
  double wsum = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& m = members[i];
    if (!(m.weight > 0.0)) {
      throw InvalidArgument("ensemble: member " + std::to_string(i) + " has non-positive weight");
    }
    if (!(m.field.grid() == g)) {
      throw InvalidArgument("ensemble: member " + std::to_string(i) + " lives on a different grid");
    }
    wsum += m.weight;
    double n2 = 0.0;
    for (const auto& z : m.field.values()) n2 += std::norm(z);
    const double nrm = std::sqrt(n2 * g.cell_volume());
    if (std::abs(nrm - 1.0) > 1e-8) {
      throw InvalidArgument("ensemble: member " + std::to_string(i) + " has norm " + std::to_string(nrm));
    }
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw InvalidArgument("ensemble: weights do not sum to 1");
}

}  // namespace

Ensemble::Ensemble(std::vector<Member> members, bool radial) : members_(std::move(members)), radial_(radial) {
  validate_members(members_);
  if (radial_) {
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const double asym = radial_asymmetry(members_[i].field);
      if (asym > 1e-10) {
        throw NonRadialError("ensemble: member " + std::to_string(i) + " is not radial (asymmetry " +
                             std::to_string(asym) + ")");
      }
    }
  }
}

Ensemble Ensemble::singleton(SpectralField phi, bool radial) {
  return Ensemble({Member{1.0, std::move(phi)}}, radial);
}

Ensemble Ensemble::with_fields(std::vector<SpectralField> fields) const {
  if (fields.size() != members_.size()) throw InvalidArgument("ensemble: field count mismatch");
  Ensemble out = *this;
  for (std::size_t i = 0; i < fields.size(); ++i) out.members_[i].field = std::move(fields[i]);
  validate_members(out.members_);
  return out;
}

double radial_asymmetry(const SpectralField& phi) {
  const GridSpec& g = phi.grid();
  double scale = 0.0;
  for (const auto& z : phi.values()) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return 0.0;
  const auto perms = axis_permutations(g.dim);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    for (const auto& p : perms) {
      for (int mask = 0; mask < (1 << g.dim); ++mask) {
        std::array<int, 3> img{0, 0, 0};
        for (int a = 0; a < g.dim; ++a) {
          const int j = idx[p[a]];
          img[a] = (mask >> a) & 1 ? (g.n - j) % g.n : j;
        }
        worst = std::max(worst, std::abs(phi[i] - phi[g.flat_index(img)]));
      }
    }
  }
  return worst / scale;
}

SpectralField gaussian(const GridSpec& grid, const GaussianProfile& p) {
  if (!(p.width > 0.0)) throw InvalidArgument("gaussian: width must be positive");
  const int d = grid.dim;
  const double amp = std::pow(std::numbers::pi, -0.25 * d) * std::pow(p.width, -0.5 * d);
  const SpectralField raw = SpectralField::sample(grid, [&](const Point& x) {
    Point r{};
    for (int a = 0; a < d; ++a) r[a] = x[a] - p.center[a];
    const double env = amp * std::exp(-0.5 * norm_squared(r) / (p.width * p.width));
    return std::polar(env, dot(p.momentum, x));
  });
  // Coarse grids miss the continuum norm slightly; rescale to the discrete one.
  const double m = integrate(grid, density(raw));
  if (!(m > 0.0)) throw InvalidArgument("gaussian: profile vanishes on the grid");
  return raw.scaled(1.0 / std::sqrt(m));
}

// evolution

EvolutionResult evolve(const Ensemble& ensemble, const ConvolutionKernel& kernel,
                       const PropagatorConfig& config, const EnsembleCallback& callback) {
  std::vector<SpectralField> fields;
  for (const auto& m : ensemble.members()) fields.push_back(m.field);
  EnsembleObserver obs;
  if (callback) {
    obs = [&](double t, std::span<const SpectralField> f) {
      callback(t, ensemble.with_fields(std::vector<SpectralField>(f.begin(), f.end())));
    };
  }
  auto result = propagate_ensemble(std::move(fields), kernel, config, obs);
  return EvolutionResult{result.outcome, std::move(result.records),
                         ensemble.with_fields(std::move(result.final_fields))};
}

// traces

double mass(const Ensemble& e) {
  double s = 0.0;
  for (const auto& m : e.members()) s += m.weight * integrate(e.grid(), density(m.field));
  return s;
}

double kinetic(const Ensemble& e) {
  double s = 0.0;
  for (const auto& m : e.members()) s += m.weight * gradient_norm_squared(m.field);
  return s;
}

double interaction_trace(const Ensemble& e, const ConvolutionKernel& kernel) {
  double s = 0.0;
  for (const auto& m : e.members()) {
    const RealField rho = density(m.field);
    const RealField W = kernel.apply(rho);
    RealField prod(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) prod[i] = W[i] * rho[i];
    s += m.weight * integrate(e.grid(), prod);
  }
  return s;
}

EnergyParts energy(const Ensemble& e, const ConvolutionKernel& kernel, int mu) {
  EnergyParts p;
  p.kinetic = kinetic(e);
  p.interaction = interaction_trace(e, kernel);
  p.E1 = 0.5 * p.kinetic + 0.25 * mu * p.interaction;
  return p;
}

double energy_E1(const Ensemble& e, const ConvolutionKernel& kernel, int mu) {
  return energy(e, kernel, mu).E1;
}

double energy_Ek(const Ensemble& e, const ConvolutionKernel& kernel, int mu, int k) {
  if (k < 1) throw InvalidArgument("energy_Ek: k must be >= 1");
  const EnergyParts p = energy(e, kernel, mu);
  return k * (0.5 * p.kinetic + 0.25 * mu * p.interaction);
}

double interaction_trace_direct(const Ensemble& e, const std::function<double(const Point&)>& kernel_at,
                                double origin_value) {
  const GridSpec& g = e.grid();
  const std::size_t N = g.size();
  std::vector<Point> pts(N);
  for (std::size_t i = 0; i < N; ++i) pts[i] = g.point(i);
  const double hd = g.cell_volume();
  double total = 0.0;
  for (const auto& m : e.members()) {
    const RealField rho = density(m.field);
    double s = 0.0;
    for (std::size_t a = 0; a < N; ++a) {
      double inner = 0.0;
      for (std::size_t b = 0; b < N; ++b) {
        if (a == b) {
          inner += origin_value * rho[b];
          continue;
        }
        const Point z{pts[a][0] - pts[b][0], pts[a][1] - pts[b][1], pts[a][2] - pts[b][2]};
        inner += kernel_at(z) * rho[b];
      }
      s += rho[a] * inner;
    }
    total += m.weight * s * hd * hd;
  }
  return total;
}

// identities

double TraceTriple::max_disagreement() const {
  return std::max({std::abs(unprimed - primed), std::abs(unprimed - mixed), std::abs(primed - mixed)});
}

TraceTriple check_trace_identity(const SpectralField& g, const SpectralField& h) {
  if (!(g.grid() == h.grid())) throw InvalidArgument("check_trace_identity: grid mismatch");
  const GridSpec& grid = g.grid();
  const std::size_t N = grid.size();
  const SpectralField hbar = h.conjugate();

  TraceTriple out;
  {
    const SpectralField lg = laplacian(g);
    ComplexField f(N);
    for (std::size_t i = 0; i < N; ++i) f[i] = lg[i] * hbar[i];
    out.unprimed = integrate(grid, f);
  }
  const auto dhbar = gradient_primed(hbar);
  {
    ComplexField lap(N, Complex{});
    for (int a = 0; a < grid.dim; ++a) {
      const auto dd = gradient_primed(dhbar[static_cast<std::size_t>(a)]);
      for (std::size_t i = 0; i < N; ++i) lap[i] += dd[static_cast<std::size_t>(a)][i];
    }
    ComplexField f(N);
    for (std::size_t i = 0; i < N; ++i) f[i] = g[i] * lap[i];
    out.primed = integrate(grid, f);
  }
  {
    const auto dg = gradient(g);
    ComplexField f(N, Complex{});
    for (int a = 0; a < grid.dim; ++a)
      for (std::size_t i = 0; i < N; ++i) f[i] -= dg[static_cast<std::size_t>(a)][i] * dhbar[static_cast<std::size_t>(a)][i];
    out.mixed = integrate(grid, f);
  }
  return out;
}

double HermitianResiduals::max() const { return std::max({first, second, mixed}); }

HermitianResiduals check_hermitian_derivs(const Ensemble& e, const std::vector<std::size_t>& sample_points) {
  const int d = e.grid().dim;
  const std::size_t N = e.grid().size();
  for (auto p : sample_points) {
    if (p >= N) throw InvalidArgument("check_hermitian_derivs: sample point outside grid");
  }
  const std::size_t P = sample_points.size();
  const std::size_t D = static_cast<std::size_t>(d);
  // Accumulated mixture values at each sample point.
  std::vector<Complex> dx(P * D), dxp(P * D), dxx(P * D * D), dxpxp(P * D * D), dxxp(P * D * D);

  for (const auto& m : e.members()) {
    const SpectralField& phi = m.field;
    const SpectralField phibar = phi.conjugate();
    const auto g = gradient(phi);
    const auto H = hessian(phi);
    const auto gp = gradient_primed(phibar);
    std::vector<std::vector<SpectralField>> gpp;
    for (std::size_t i = 0; i < D; ++i) gpp.push_back(gradient_primed(gp[i]));

    for (std::size_t k = 0; k < P; ++k) {
      const std::size_t x = sample_points[k];
      for (std::size_t i = 0; i < D; ++i) {
        dx[k * D + i] += m.weight * g[i][x] * phibar[x];
        dxp[k * D + i] += m.weight * phi[x] * gp[i][x];
        for (std::size_t j = 0; j < D; ++j) {
          const std::size_t q = (k * D + i) * D + j;
          dxx[q] += m.weight * H[i * D + j][x] * phibar[x];
          dxpxp[q] += m.weight * phi[x] * gpp[i][j][x];
          dxxp[q] += m.weight * g[i][x] * gp[j][x];
        }
      }
    }
  }

  HermitianResiduals r;
  for (std::size_t k = 0; k < P; ++k) {
    for (std::size_t i = 0; i < D; ++i) {
      r.first = std::max(r.first, std::abs(dx[k * D + i] - std::conj(dxp[k * D + i])));
      for (std::size_t j = 0; j < D; ++j) {
        const std::size_t q = (k * D + i) * D + j;
        const std::size_t qt = (k * D + j) * D + i;
        r.second = std::max(r.second, std::abs(dxx[q] - std::conj(dxpxp[q])));
        // d_{x_i} d_{x'_j} against conj(d_{x'_i} d_{x_j}) = conj of the (j, i) entry
        r.mixed = std::max(r.mixed, std::abs(dxxp[q] - std::conj(dxxp[qt])));
      }
    }
  }
  return r;
}

double admissibility_residual(const Ensemble& e, const std::vector<std::size_t>& sample_points) {
  std::vector<double> masses;
  for (const auto& m : e.members()) masses.push_back(integrate(e.grid(), density(m.field)));
  double worst = 0.0;
  for (auto x : sample_points) {
    double marginal = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      const auto& m = e.members()[i];
      const double rx = std::norm(m.field[x]);
      marginal += m.weight * rx * masses[i];
      diag += m.weight * rx;
    }
    worst = std::max(worst, std::abs(marginal - diag));
  }
  return worst;
}

double min_pair_density(const Ensemble& e, std::size_t stride) {
  if (stride == 0) stride = 1;
  const std::size_t N = e.grid().size();
  std::vector<RealField> rhos;
  for (const auto& m : e.members()) rhos.push_back(density(m.field));
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < N; x += stride) {
    for (std::size_t y = 0; y < N; y += stride) {
      double v = 0.0;
      for (std::size_t i = 0; i < rhos.size(); ++i) v += e.members()[i].weight * rhos[i][x] * rhos[i][y];
      lo = std::min(lo, v);
    }
  }
  return lo;
}

RealField diagonal_density(const Ensemble& e) {
  RealField out(e.grid().size(), 0.0);
  for (const auto& m : e.members()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += m.weight * std::norm(m.field[i]);
  }
  return out;
}

MixtureAnalysis analyze(const Ensemble& e, const ConvolutionKernel& kernel, bool with_hessian) {
  MixtureAnalysis out{e.grid(), {}};
  for (const auto& m : e.members()) {
    MemberAnalysis a;
    a.weight = m.weight;
    a.field = &m.field;
    a.grad = gradient(m.field);
    if (with_hessian) a.hess = hessian(m.field);
    a.rho = density(m.field);
    a.W = kernel.apply(a.rho);
    a.gradW = gradient(e.grid(), a.W);
    out.members.push_back(std::move(a));
  }
  return out;
}

}  // namespace hartree
