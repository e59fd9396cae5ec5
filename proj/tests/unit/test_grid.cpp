#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hartree/errors.hpp"
#include "hartree/fft.hpp"
#include "hartree/grid.hpp"
#include "oracles.hpp"

using namespace hartree;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralField unit_gaussian(const GridSpec& g) {
  return SpectralField::sample(g, [&](const Point& x) {
    return Complex(std::pow(kPi, -0.25 * g.dim) * std::exp(-0.5 * norm_squared(x)), 0.0);
  });
}

SpectralField band_limited(const GridSpec& g, int kmax, std::uint64_t seed) {
  const auto f = oracle::random_band_limited(g.dim, g.length, kmax, seed);
  return SpectralField::sample(g, [&](const Point& x) { return f(x); });
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(GridSpec, RejectsBadShapes) {
  EXPECT_THROW(GridSpec::make(0, 16, 1.0), InvalidArgument);
  EXPECT_THROW(GridSpec::make(4, 16, 1.0), InvalidArgument);
  EXPECT_THROW(GridSpec::make(1, 4, 1.0), InvalidArgument);
  EXPECT_THROW(GridSpec::make(1, 14, 1.0), InvalidArgument);
  EXPECT_THROW(GridSpec::make(1, 9, 1.0), InvalidArgument);
  EXPECT_NO_THROW(GridSpec::make(3, 48, 1.0));
  EXPECT_THROW(GridSpec::make(1, 16, 0.0), InvalidArgument);
  EXPECT_NO_THROW(GridSpec::make(3, 8, 2.0));
}

TEST(GridSpec, BoxCenteredCoordinates) {
  const auto g = GridSpec::make(2, 16, 8.0);
  EXPECT_DOUBLE_EQ(g.coordinate(0), -4.0);
  EXPECT_DOUBLE_EQ(g.coordinate(8), 0.0);
  EXPECT_DOUBLE_EQ(g.frequency(8), -kPi * 16 / 8.0);
  EXPECT_DOUBLE_EQ(g.frequency(15), -2 * kPi / 8.0);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    EXPECT_EQ(g.flat_index(g.multi_index(i)), i);
    const auto m = g.mirror(i);
    const auto p = g.point(i), q = g.point(m);
    const auto idx = g.multi_index(i);
    if (idx[0] != 0 && idx[1] != 0) {
      EXPECT_DOUBLE_EQ(p[0], -q[0]);
      EXPECT_DOUBLE_EQ(p[1], -q[1]);
    }
  }
}

TEST(Integrate, ConstantGivesVolume) {
  for (int d = 1; d <= 3; ++d) {
    const auto g = GridSpec::make(d, 8, 3.0);
    const RealField one(g.size(), 1.0);
    EXPECT_NEAR(integrate(g, one), std::pow(3.0, d), 1e-12);
  }
}

TEST(Integrate, GaussianDensityIsOne) {
  const auto g = GridSpec::make(1, 512, 40.0);
  EXPECT_NEAR(integrate(g, density(unit_gaussian(g))), 1.0, 1e-12);
}

TEST(Integrate, OddPeriodicVanishes) {
  const auto g = GridSpec::make(1, 64, 5.0);
  RealField f(g.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(2 * kPi * g.point(i)[0] / g.length);
  EXPECT_NEAR(integrate(g, f), 0.0, 1e-14);
}

TEST(Transform, RoundTrip) {
  const auto g = GridSpec::make(3, 16, 6.0);
  const auto phi = band_limited(g, 5, 11);
  ComplexField fwd(g.size()), back(g.size());
  forward_transform(g, phi.values(), fwd);
  inverse_transform(g, fwd, back);
  double scale = 0.0;
  for (auto v : phi.values()) scale = std::max(scale, std::abs(v));
  EXPECT_LE(max_abs_diff(back, phi.values()), 1e-12 * scale);
}

TEST(Transform, Parseval) {
  for (int d = 1; d <= 3; ++d) {
    const auto g = GridSpec::make(d, 16, 4.0);
    const auto phi = band_limited(g, 4, 100 + d);
    double spec = 0.0;
    for (auto c : phi.spectrum()) spec += std::norm(c);
    spec *= g.cell_volume() / static_cast<double>(g.size());
    const double direct = integrate(g, density(phi));
    EXPECT_NEAR(spec, direct, 1e-12 * direct);
  }
}

TEST(Gradient, PlaneWave) {
  const auto g = GridSpec::make(1, 32, 7.0);
  const double k = 2 * kPi / g.length;
  const auto phi = SpectralField::sample(g, [&](const Point& x) { return std::polar(1.0, k * x[0]); });
  const auto grad = gradient(phi);
  const auto lap = laplacian(phi);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_LT(std::abs(grad[0][i] - Complex(0, k) * phi[i]), 1e-12);
    EXPECT_LT(std::abs(lap[i] + k * k * phi[i]), 1e-12);
  }
}

TEST(Gradient, GaussianKineticHalf) {
  const auto g = GridSpec::make(1, 512, 40.0);
  const auto grad = gradient(unit_gaussian(g));
  EXPECT_NEAR(integrate(g, density(grad[0])), 0.5, 1e-10);
  EXPECT_NEAR(gradient_norm_squared(unit_gaussian(g)), 0.5, 1e-10);
}

TEST(Gradient, ConstantIsZero) {
  const auto g = GridSpec::make(2, 16, 3.0);
  const auto phi = SpectralField::sample(g, [](const Point&) { return Complex(0.7, -0.2); });
  for (const auto& c : gradient(phi))
    for (auto v : c.values()) EXPECT_LT(std::abs(v), 1e-14);
}

TEST(Gradient, DivergenceOfGradientIsLaplacian) {
  // 100 random band-limited fields across dimensions.
  for (int s = 0; s < 100; ++s) {
    const int d = 1 + s % 3;
    const auto g = GridSpec::make(d, 16, 5.0);
    const auto phi = band_limited(g, 3, 1000 + s);
    const auto lap = laplacian(phi);
    ComplexField div(g.size());
    for (int i = 0; i < d; ++i) {
      const auto gi = gradient(gradient(phi)[i])[i];
      for (std::size_t x = 0; x < g.size(); ++x) div[x] += gi[x];
    }
    double scale = 0.0;
    for (auto v : lap.values()) scale = std::max(scale, std::abs(v));
    EXPECT_LE(max_abs_diff(div, lap.values()), 1e-12 * scale) << "seed " << s;
    ComplexField pairing(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) pairing[x] = lap[x] * std::conj(phi[x]);
    const double kinetic = -integrate(g, std::span<const Complex>(pairing)).real();
    EXPECT_GE(kinetic, 0.0);
    EXPECT_NEAR(kinetic, gradient_norm_squared(phi), 1e-10 * std::max(1.0, kinetic));
  }
}

TEST(Gradient, PrimedPathAgrees) {
  const auto g = GridSpec::make(3, 16, 6.0);
  const auto phi = band_limited(g, 4, 7);
  const auto a = gradient(phi), b = gradient_primed(phi);
  for (int i = 0; i < 3; ++i) EXPECT_LT(max_abs_diff(a[i].values(), b[i].values()), 1e-11);
}

TEST(Gradient, HessianSymmetricAndMatchesSecondDerivative) {
  const auto g = GridSpec::make(2, 16, 6.0);
  const auto phi = band_limited(g, 3, 9);
  const auto H = hessian(phi);
  ASSERT_EQ(H.size(), 4u);
  EXPECT_LT(max_abs_diff(H[1].values(), H[2].values()), 1e-12);
  EXPECT_LT(max_abs_diff(H[1].values(), second_derivative(phi, 0, 1).values()), 1e-12);
  const auto gx = gradient(phi)[0];
  EXPECT_LT(max_abs_diff(H[0].values(), gradient(gx)[0].values()), 1e-10);
}

TEST(Convolve, DeltaIsIdentity) {
  const auto g = GridSpec::make(2, 16, 4.0);
  RealField delta(g.size(), 0.0);
  delta[g.flat_index({8, 8, 0})] = 1.0 / g.cell_volume();
  const RealField rho = density(band_limited(g, 3, 5));
  const auto out = convolve(g, delta, rho);
  for (std::size_t i = 0; i < rho.size(); ++i) EXPECT_NEAR(out[i], rho[i], 1e-12 * (1 + std::abs(rho[i])));
}

TEST(Convolve, ConstantKernelGivesMass) {
  const auto g = GridSpec::make(3, 8, 4.0);
  const RealField one(g.size(), 1.0);
  const RealField rho = density(band_limited(g, 2, 3));
  const double m = integrate(g, rho);
  for (double v : convolve(g, one, rho)) EXPECT_NEAR(v, m, 1e-12 * m);
}

TEST(Convolve, GaussianVariancesAdd) {
  const auto g = GridSpec::make(1, 512, 40.0);
  auto normal = [](double var, double x) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * kPi * var); };
  RealField k(g.size()), f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i)[0];
    k[i] = normal(0.7, x);
    f[i] = normal(1.3, x);
  }
  const auto out = convolve(g, k, f);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(out[i], normal(2.0, g.point(i)[0]), 1e-8);
}
