#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hartree/errors.hpp"
#include "hartree/observables.hpp"
#include "hartree/virial.hpp"
#include "oracles.hpp"

using namespace hartree;

namespace {

const CutoffProfile& P() { return make_profile(); }

ConvolutionKernel zero_kernel(const GridSpec& g) { return ConvolutionKernel(g, RealField(g.size(), 0.0)); }

Ensemble radial_mixture(const GridSpec& g) {
  return Ensemble({{0.4, gaussian(g, {1.2, {}, {}})}, {0.6, gaussian(g, {2.0, {}, {}})}}, true);
}

double weighted(const GridSpec& g, const RealField& rho, const std::function<double(const Point&)>& w) {
  RealField f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = w(g.point(i)) * rho[i];
  return integrate(g, f);
}

}  // namespace

TEST(Momentum, RealFieldsCarryNone) {
  const auto g = GridSpec::make(2, 64, 16.0);
  const auto e = Ensemble::singleton(gaussian(g, {1.0, {0.3, 0, 0}, {}}));
  for (const auto& c : momentum_density(e))
    for (double v : c) EXPECT_NEAR(v, 0.0, 1e-13);
  EXPECT_NEAR(variance_rate(e), 0.0, 1e-13);
}

TEST(Momentum, BoostedEnvelope) {
  const auto g = GridSpec::make(1, 512, 60.0);
  const double xi = 1.7;
  const auto phi = gaussian(g, {4.0, {}, {xi, 0, 0}});
  const auto P = momentum_density(Ensemble::singleton(phi));
  const RealField rho = density(phi);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(P[0][i], 2 * xi * rho[i], 1e-11);
}

TEST(Momentum, ContinuityInWeakForm) {
  // d/dt int rho chi = int grad chi . P under free evolution
  const auto g = GridSpec::make(1, 512, 40.0);
  const auto phi = gaussian(g, {1.0, {0.5, 0, 0}, {0.8, 0, 0}});
  auto chi = [](double x) { return std::exp(-0.1 * (x - 1) * (x - 1)); };
  auto dchi = [&](double x) { return -0.2 * (x - 1) * chi(x); };
  const double dt = 1e-3;
  PropagatorConfig c;
  c.dt = dt;
  c.t_end = dt;
  const auto K = zero_kernel(g);
  const auto fwd = propagate(phi, K, c).final_fields[0];
  const auto back = propagate(phi.conjugate(), K, c).final_fields[0].conjugate();
  auto pair = [&](const SpectralField& f) { return weighted(g, density(f), [&](const Point& x) { return chi(x[0]); }); };
  const double rate = (pair(fwd) - pair(back)) / (2 * dt);
  const auto P = momentum_density(Ensemble::singleton(phi));
  double flux = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) flux += dchi(g.point(i)[0]) * P[0][i];
  flux *= g.cell_volume();
  EXPECT_NEAR(rate, flux, 1e-4);
}

TEST(Variance, UnitGaussianAndFreeEvolution) {
  const auto g1 = GridSpec::make(1, 512, 40.0);
  EXPECT_NEAR(variance(Ensemble::singleton(gaussian(g1, {1.0, {}, {}}))), 0.5, 1e-12);
  const auto g3 = GridSpec::make(3, 48, 16.0);
  PropagatorConfig c;
  c.dt = 0.01;
  c.t_end = 0.3;
  c.record_every = 30;
  const auto res = evolve(Ensemble::singleton(gaussian(g3, {1.0, {}, {}})), zero_kernel(g3), c);
  EXPECT_NEAR(variance(res.final_state), 3 * oracle::free_gaussian_axis_variance(1.0, 0.3), 1e-6);
  EXPECT_NEAR(variance_rate(res.final_state), 3 * 4.0 * 0.3, 1e-6);
}

TEST(VirialRhs, FreeIsSixteenE1) {
  const auto g = GridSpec::make(2, 64, 16.0);
  const auto e = Ensemble::singleton(gaussian(g, {0.9, {0.2, 0, 0}, {0.5, 0.1, 0}}));
  const auto K = zero_kernel(g);
  EXPECT_NEAR(virial_rhs(e, K, 1), 16 * energy_E1(e, K, 1), 1e-12);
}

TEST(VirialRhs, InverseSquareHomogeneity) {
  const auto g = GridSpec::make(3, 32, 12.0);
  const auto V = Potential::power(2.0);
  const auto k = InteractionKernels::build(V, g);
  const auto e = Ensemble::singleton(gaussian(g, {1.0, {}, {}}));
  for (int mu : {-1, 1}) {
    EXPECT_NEAR(virial_rhs_symmetrized(e, k.moment, mu), 16 * energy_E1(e, k.value, mu), 1e-6);
  }
}

TEST(LocalizedRhs, LargeRMatchesVirialRhs) {
  const auto g = GridSpec::make(3, 32, 12.0);
  const auto V = Potential::power(2.2);
  const auto k = InteractionKernels::build(V, g);
  const auto e = Ensemble({{0.5, gaussian(g, {0.8, {}, {0.3, 0, 0}})}, {0.5, gaussian(g, {1.0, {}, {}})}});
  // psi_R = |x|^2 on the whole box once R exceeds 3 L^2 / 4
  const double R = 200.0;
  EXPECT_NEAR(localized_trace(e, P(), R), variance(e), 1e-12);
  EXPECT_NEAR(localized_virial_rhs(e, k.value, -1, P(), R), virial_rhs(e, k.value, -1), 1e-8);
  EXPECT_THROW(weight_fields(g, P(), R, WeightDerivatives::spectral), InvalidArgument);
}

TEST(LocalizedRhs, FreeRealDataIsPureHessianTerm) {
  const auto g = GridSpec::make(3, 32, 12.0);
  const auto e = Ensemble::singleton(gaussian(g, {1.0, {}, {}}));
  const auto K = zero_kernel(g);
  const auto a = analyze(e, K, true);
  const auto w = weight_fields(g, P(), 1.0);
  const auto id = lemma40_check(a, w);
  EXPECT_NEAR(localized_virial_rhs(a, w, 1), id.hessian_cross - id.hessian_diag, 1e-12);
}

TEST(Lemma40, SpectralWeightsCloseTheIdentity) {
  const auto g = GridSpec::make(3, 48, 16.0);
  const auto real = Ensemble({{0.4, gaussian(g, {1.2, {}, {}})}, {0.6, gaussian(g, {2.0, {}, {}})}});
  const auto boosted = Ensemble({{0.5, gaussian(g, {1.2, {0.3, 0, 0}, {0.8, -0.4, 0.2}})},
                                 {0.5, gaussian(g, {1.5, {}, {0, 0.5, 0}})}});
  for (double R : {1.0, 4.0, 16.0}) {
    EXPECT_LE(lemma40_check(real, P(), R, WeightDerivatives::spectral).residual(), 1e-6) << R;
    EXPECT_LE(lemma40_check(boosted, P(), R, WeightDerivatives::spectral).residual(), 1e-6) << R;
  }
}

TEST(Lemma40, AnalyticWeightsConvergeUnderRefinement) {
  // The closed-form fourth derivative has kinks at the breakpoints, so the
  // pointwise route only converges algebraically in h.
  const double R = 16.0;
  double prev = 0.0, spectral_bil = 0.0, analytic_bil = 0.0;
  for (int n : {48, 96}) {
    const auto g = GridSpec::make(3, n, 16.0);
    const auto e = Ensemble({{0.4, gaussian(g, {1.2, {}, {}})}, {0.6, gaussian(g, {2.0, {}, {}})}});
    const auto id = lemma40_check(e, P(), R);
    if (n == 96) {
      EXPECT_LT(id.residual(), prev / 3);
      spectral_bil = lemma40_check(e, P(), R, WeightDerivatives::spectral).bilaplacian;
      analytic_bil = id.bilaplacian;
    }
    prev = id.residual();
  }
  EXPECT_NEAR(analytic_bil, spectral_bil, 1e-3 * std::abs(spectral_bil));
}

TEST(Lemma40, QuadraticWeightDegenerates) {
  const auto g = GridSpec::make(3, 32, 12.0);
  const auto e = Ensemble::singleton(gaussian(g, {1.0, {}, {0.2, 0, 0}}));
  const auto id = lemma40_check(e, P(), 500.0);
  EXPECT_NEAR(id.bilaplacian, 0.0, 1e-14);
  EXPECT_NEAR(id.hessian_diag, -id.hessian_cross, 1e-8);
}

TEST(Lemma43, RequiresFocusingRadial) {
  const auto g = GridSpec::make(3, 16, 8.0);
  const auto V = Potential::power(2.2);
  const auto k = InteractionKernels::build(V, g);
  const auto w = weight_fields(g, P(), 4.0);
  const auto split = SplitKernels::build(V, g, 4.0);
  const auto plain = Ensemble::singleton(gaussian(g, {1.0, {}, {}}));
  const auto a = analyze(plain, k.value, true);
  EXPECT_THROW(lemma43_terms(plain, a, w, split, P(), -1, 1.0), NonRadialError);
  const auto radial = Ensemble::singleton(gaussian(g, {1.0, {}, {}}), true);
  EXPECT_THROW(lemma43_terms(radial, a, w, split, P(), 1, 1.0), InvalidArgument);
}

TEST(Lemma43, ZeroPotentialTerms) {
  const auto g = GridSpec::make(3, 48, 16.0);
  const auto V = Potential::zero();
  const auto k = InteractionKernels::build(V, g);
  const auto e = radial_mixture(g);
  const auto a = analyze(e, k.value, true);
  double prev_IV = std::numeric_limits<double>::infinity();
  for (double R : {4.0, 8.0, 16.0}) {
    const auto w = weight_fields(g, P(), R, WeightDerivatives::spectral);
    const auto b = lemma43_terms(e, a, w, SplitKernels::build(V, g, R), P(), -1, 1.0);
    EXPECT_EQ(b.III, 0.0);
    EXPECT_EQ(b.IIIa, 0.0);
    EXPECT_LE(b.II, 0.0);
    EXPECT_LE(std::abs(b.IV), bilaplacian_sup(P(), R, 3) * mass(e));
    EXPECT_LT(std::abs(b.IV), prev_IV);
    prev_IV = std::abs(b.IV);
    EXPECT_NEAR(localized_virial_rhs(a, w, -1), b.bound + b.defect, 1e-3) << R;
  }
}

TEST(Lemma43, AllInsideDataReducesToSixteenE1) {
  // Support of both members sits well inside |x|^2 <= R.
  const auto g = GridSpec::make(3, 32, 12.0);
  const auto V = Potential::power(2.2);
  const auto k = InteractionKernels::build(V, g);
  const auto e = Ensemble({{0.5, gaussian(g, {0.7, {}, {}})}, {0.5, gaussian(g, {0.8, {}, {}})}}, true);
  const double R = 30.0;
  const auto a = analyze(e, k.value, true);
  const auto b = lemma43_terms(e, a, weight_fields(g, P(), R), SplitKernels::build(V, g, R), P(), -1, 1.0);
  EXPECT_NEAR(b.II, 0.0, 1e-10);
  EXPECT_NEAR(b.III, 0.0, 1e-10);
  EXPECT_NEAR(b.IV, 0.0, 1e-10);
  EXPECT_NEAR(b.bound, b.sixteen_E1, 1e-9);
}

TEST(Lemma43, ClosureAndSigns) {
  const auto g = GridSpec::make(3, 48, 16.0);
  const auto V = Potential::power(2.2);
  const auto k = InteractionKernels::build(V, g);
  const auto e = radial_mixture(g);
  const auto a = analyze(e, k.value, true);
  for (double R : {4.0, 16.0}) {
    const auto w = weight_fields(g, P(), R, WeightDerivatives::spectral);
    const auto b = lemma43_terms(e, a, w, SplitKernels::build(V, g, R), P(), -1, 1.0);
    EXPECT_LE(b.II, 0.0);
    EXPECT_LE(b.defect, 0.0);
    EXPECT_NEAR(b.IIIa + b.IIIb, b.III, 1e-12);
    EXPECT_NEAR(localized_virial_rhs(a, w, -1), b.bound + b.defect, 1e-3) << R;
    EXPECT_LE(localized_virial_rhs(a, w, -1), b.bound + 1e-3);
    EXPECT_LE(std::abs(b.IIIa), b.IIIa_majorant);
  }
}

TEST(CommutatorTerm, KernelRouteMatchesDirectSum) {
  // box wide enough that circular wrap of pair separations is negligible
  const auto g = GridSpec::make(3, 16, 12.0);
  const auto V = Potential::power(2.2);
  const auto k = InteractionKernels::build(V, g);
  const auto e = Ensemble::singleton(gaussian(g, {1.0, {}, {}}), true);
  for (double R : {1.0, 4.0}) {
    const double fast = commutator_term_kernel(e, k, P(), R);
    const double slow = commutator_term_direct(e, V, P(), R);
    EXPECT_NEAR(fast, slow, 1e-3 * std::abs(slow)) << R;
  }
}

TEST(Glassey, Roots) {
  EXPECT_NEAR(*glassey_envelope(1.0, 0.0, -1.0 / 8).root, 1.0, 1e-15);
  EXPECT_FALSE(glassey_envelope(1.0, 0.0, 0.1).root.has_value());
  EXPECT_FALSE(glassey_envelope(1.0, 0.5, 0.0).root.has_value());
  const auto env = glassey_envelope(0.5, -1.0, -1.0 / 16);
  const double oracle_root = oracle::bisect_first_root([](double t) { return 0.5 - t - 0.5 * t * t; }, 10.0);
  ASSERT_TRUE(env.root.has_value());
  EXPECT_NEAR(*env.root, oracle_root, 1e-12);
  EXPECT_NEAR(env(*env.root), 0.0, 1e-14);
  EXPECT_NEAR(*glassey_envelope(2.0, -1.0, 0.0).root, 2.0, 1e-15);
}

TEST(Strauss, RatioAndAuxiliary) {
  const auto g = GridSpec::make(3, 32, 16.0);
  const auto inside = Ensemble::singleton(gaussian(g, {0.3, {}, {}}), true);
  EXPECT_EQ(strauss_ratio(inside, P(), 64.0), 0.0);
  const auto e = Ensemble::singleton(gaussian(g, {1.0, {}, {}}), true);
  const double r = strauss_ratio(e, P(), 4.0);
  EXPECT_TRUE(std::isfinite(r));
  EXPECT_GT(r, 0.0);
  const double s1 = strauss_auxiliary_sup(P(), 1.0);
  for (double R : {4.0, 16.0}) EXPECT_NEAR(strauss_auxiliary_sup(P(), R) * std::sqrt(R), s1, 1e-12 * s1);
  EXPECT_THROW(strauss_ratio(Ensemble::singleton(gaussian(g, {1.0, {}, {}})), P(), 4.0), NonRadialError);
}

TEST(SecondDifference, ExactOnQuarticAndOrderFour) {
  const double tau = 0.1;
  std::vector<double> q;
  for (int k = 0; k < 9; ++k) q.push_back(std::pow(k * tau, 3) - 2 * std::pow(k * tau, 2));
  const auto d2 = second_difference(q, tau);
  EXPECT_TRUE(std::isnan(d2[0]) && std::isnan(d2[1]) && std::isnan(d2[8]));
  for (int k = 2; k < 7; ++k) EXPECT_NEAR(d2[k], 6 * k * tau - 4, 1e-10);
  auto err = [](double h) {
    std::vector<double> f;
    for (int k = 0; k < 5; ++k) f.push_back(std::sin(1.0 + (k - 2) * h));
    return std::abs(second_difference(f, h)[2] + std::sin(1.0));
  };
  EXPECT_NEAR(std::log2(err(0.1) / err(0.05)), kSecondDifferenceOrder, 0.1);
}

TEST(Observables, CsvLayout) {
  const auto g = GridSpec::make(3, 16, 8.0);
  const auto V = Potential::power(2.2);
  ObservableRecorder rec(V, g, {-1, {4.0, 0.5}, true, 1.0});
  ObservableSeries series(0.1, {4.0, 0.5});
  const auto e = Ensemble::singleton(gaussian(g, {1.0, {}, {}}), true);
  for (int k = 0; k < 5; ++k) series.push(rec.record(0.1 * k, e));
  std::ostringstream os;
  series.write_csv(os);
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  EXPECT_EQ(header.rfind("t,mass,E1,kinetic,interaction,V1,V1_dot,FD2_V1,virial_rhs,truncV_4,FD2_truncV_4,", 0), 0u);
  EXPECT_NE(header.find("bound_0.5"), std::string::npos);
  std::getline(is, row);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_NE(row.find("nan"), std::string::npos);
  const auto fd2 = series.FD2_V1();
  EXPECT_NEAR(fd2[2], 0.0, 1e-9);
}
