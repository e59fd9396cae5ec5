#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hartree/errors.hpp"
#include "hartree/potentials.hpp"
#include "oracles.hpp"

using namespace hartree;

namespace {

Point fd_gradient(const Potential& V, const Point& x, double h) {
  Point g{};
  for (int i = 0; i < 3; ++i) {
    Point p = x, m = x;
    p[i] += h;
    m[i] -= h;
    Point p2 = x, m2 = x;
    p2[i] += 2 * h;
    m2[i] -= 2 * h;
    g[i] = (-V.eval(p2) + 8 * V.eval(p) - 8 * V.eval(m) + V.eval(m2)) / (12 * h);
  }
  return g;
}

}  // namespace

TEST(Potential, PointValues) {
  EXPECT_EQ(Potential::zero().eval({1.3, -0.2, 4.0}), 0.0);
  EXPECT_DOUBLE_EQ(Potential::power(2.0).eval({2.0, 0.0, 0.0}), 0.25);
  EXPECT_DOUBLE_EQ(Potential::power(2.5).eval({0.0, 1.0, 0.0}), 1.0);
  EXPECT_DOUBLE_EQ(Potential::power(2.0, 3.0).eval({0.0, 0.0, -2.0}), 0.75);
}

TEST(Potential, PowerFamilyRejectsOrigin) {
  const auto V = Potential::power(2.2);
  EXPECT_THROW(V.eval({0, 0, 0}), SingularOriginError);
  EXPECT_THROW(V.gradient({0, 0, 0}), SingularOriginError);
  EXPECT_THROW(V.virial_defect({0, 0, 0}), SingularOriginError);
  EXPECT_THROW(Potential::power(-1.0), InvalidArgument);
  EXPECT_THROW(Potential::power(2.0, 0.0), InvalidArgument);
}

TEST(Potential, EvenAndGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (double a : {1.0, 2.0, 2.2, 2.5}) {
    const auto V = Potential::power(a, 1.7);
    for (int k = 0; k < 50; ++k) {
      Point x{u(rng), u(rng), u(rng)};
      if (norm(x) < 0.3) continue;
      EXPECT_EQ(V.eval(x), V.eval({-x[0], -x[1], -x[2]}));
      const Point g = V.gradient(x), f = fd_gradient(V, x, 1e-4);
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(g[i], f[i], 1e-6 * (std::abs(g[i]) + 1e-3 * norm(g)));
    }
  }
}

TEST(Potential, VirialDefectSign) {
  EXPECT_NEAR(Potential::power(2.5).virial_defect({1, 0, 0}), -0.25, 1e-15);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 200; ++k) {
    const Point x{u(rng), u(rng), u(rng)};
    EXPECT_NEAR(Potential::power(2.0).virial_defect(x), 0.0, 1e-14 * Potential::power(2.0).eval(x));
    EXPECT_GT(Potential::power(1.0).virial_defect(x), 0.0);
    EXPECT_LT(Potential::power(2.2).virial_defect(x), 0.0);
    const auto V = Potential::power(2.5);
    const Point g = fd_gradient(V, x, 1e-4);
    EXPECT_NEAR(V.virial_defect(x), V.eval(x) + 0.5 * dot(x, g), 1e-8 * std::max(1.0, V.eval(x)));
  }
}

TEST(Potential, TableInterpolatesSmoothProfile) {
  const double dr = 0.05;
  std::vector<double> s;
  for (int k = 0; k <= 400; ++k) s.push_back(1.0 / (1.0 + (k * dr) * (k * dr)));
  const auto V = Potential::table(s, dr);
  for (double r : {0.0, 0.33, 1.0, 2.71, 7.5, 19.9}) {
    EXPECT_NEAR(V.radial(r), 1.0 / (1.0 + r * r), 2e-5);
    EXPECT_NEAR(V.radial_derivative(r), -2 * r / std::pow(1 + r * r, 2), 2e-3);
  }
  EXPECT_DOUBLE_EQ(V.radial(100.0), s.back());
  EXPECT_EQ(V.radial_derivative(100.0), 0.0);
}

TEST(KernelSamples, ZeroPotential) {
  const auto g = GridSpec::make(3, 8, 4.0);
  for (double v : kernel_samples(Potential::zero(), g)) EXPECT_EQ(v, 0.0);
}

TEST(KernelSamples, OriginCellAverageMatchesQuadrature) {
  const auto g = GridSpec::make(3, 32, 8.0);  // h = 0.25
  const auto V = Potential::power(2.2, 1.0);
  const auto k = kernel_samples(V, g);
  const std::size_t origin = g.flat_index({16, 16, 16});
  const double oracle_value = oracle::ball_average_power_3d(2.2, 1.0, 0.125);
  EXPECT_NEAR(k[origin], oracle_value, 1e-4 * oracle_value);
  EXPECT_THROW(kernel_samples(Potential::power(3.0), g), SingularOriginError);
  EXPECT_THROW(kernel_samples(Potential::power(1.0), GridSpec::make(1, 16, 4.0)), SingularOriginError);
}

TEST(KernelSamples, EvenOffSeam) {
  const auto g = GridSpec::make(3, 16, 6.0);
  const auto V = Potential::power(2.2);
  const auto k = kernel_samples(V, g);
  const auto m = kernel_samples(V, g, KernelKind::radial_moment);
  const auto grad = gradient_kernel_samples(V, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.multi_index(i);
    if (idx[0] == 0 || idx[1] == 0 || idx[2] == 0) continue;
    const std::size_t j = g.mirror(i);
    EXPECT_EQ(k[i], k[j]);
    EXPECT_EQ(m[i], m[j]);
    for (int a = 0; a < 3; ++a) EXPECT_EQ(grad[a][i], -grad[a][j]);
  }
}

TEST(KernelSamples, MasksPartitionTheKernel) {
  const auto g = GridSpec::make(3, 16, 6.0);
  const auto V = Potential::power(2.2);
  const auto all = kernel_samples(V, g, KernelKind::abs_moment);
  const auto in = kernel_samples(V, g, KernelKind::abs_moment, KernelMask{1.3, true});
  const auto out = kernel_samples(V, g, KernelKind::abs_moment, KernelMask{1.3, false});
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_DOUBLE_EQ(in[i] + out[i], all[i]);
    EXPECT_TRUE(in[i] == 0.0 || out[i] == 0.0);
  }
}

TEST(Tails, PowerInnerMatchesClosedForm) {
  const double a = 2.2;
  for (double R : {1e2, 1e4, 1e6}) {
    const double closed = 4 * std::numbers::pi * a * std::pow(R, (3 - a) / 2) / (3 - a) / R;
    const auto t = tail_ratio(Potential::power(a), 3, R, TailRegion::inner);
    ASSERT_TRUE(t.finite);
    EXPECT_NEAR(t.value, closed, 1e-6 * closed);
  }
}

TEST(Tails, PowerOuterMatchesClosedFormWhenIntegrable) {
  const double a = 3.5;
  for (double R : {1.0, 10.0, 1e3}) {
    const double closed = 4 * std::numbers::pi * a * std::pow(R, (3 - a) / 2) / (a - 3) / R;
    const auto t = tail_ratio(Potential::power(a), 3, R, TailRegion::outer);
    ASSERT_TRUE(t.finite);
    EXPECT_NEAR(t.value, closed, 1e-6 * closed);
  }
}

TEST(Tails, DivergenceIsReported) {
  EXPECT_FALSE(tail_ratio(Potential::power(2.2), 3, 10.0, TailRegion::outer).finite);
  EXPECT_FALSE(tail_ratio(Potential::power(3.2), 3, 10.0, TailRegion::inner).finite);
  EXPECT_THROW(tail_ratio_strict(Potential::power(2.2), 3, 10.0, TailRegion::outer), NonIntegrableTailError);
  EXPECT_NO_THROW(tail_ratio_strict(Potential::power(2.2), 3, 10.0, TailRegion::inner));
}

TEST(Hypotheses, CanonicalPower) {
  const auto rep = check_hypotheses(Potential::power(2.2), 3, {1e2, 1e4, 1e6});
  EXPECT_TRUE(rep.defect_nonpositive);
  EXPECT_TRUE(rep.sup_tail_decays);
  EXPECT_TRUE(rep.inner_decays);
  // the outer L1 tail of |x||grad V| diverges when a <= d
  EXPECT_FALSE(rep.outer_decays);
  for (const auto& row : rep.rows) EXPECT_NEAR(row.sup_tail, 2.2 * std::pow(row.R, -2.2), 1e-15);
}

TEST(Hypotheses, DefectViolationFlagged) {
  const auto rep = check_hypotheses(Potential::power(1.0), 3, {1.0, 10.0});
  EXPECT_FALSE(rep.defect_nonpositive);
  EXPECT_GT(rep.rows.front().max_defect, 0.0);
}

TEST(Hypotheses, ZeroPotentialTrivial) {
  const auto rep = check_hypotheses(Potential::zero(), 3, {1.0, 10.0, 100.0});
  EXPECT_TRUE(rep.defect_nonpositive && rep.sup_tail_decays && rep.outer_decays && rep.inner_decays);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.max_defect, 0.0);
    EXPECT_EQ(row.outer.value, 0.0);
    EXPECT_EQ(row.inner.value, 0.0);
  }
}

TEST(Hypotheses, SquarePowerHasZeroDefect) {
  for (int d = 1; d <= 3; ++d) {
    const auto rep = check_hypotheses(Potential::power(2.0), d, {1.0, 4.0});
    for (const auto& row : rep.rows) EXPECT_NEAR(row.max_defect, 0.0, 1e-10);
  }
}

TEST(Hypotheses, RejectsBadSequence) {
  EXPECT_THROW(check_hypotheses(Potential::zero(), 3, {10.0, 5.0}), InvalidArgument);
  EXPECT_THROW(check_hypotheses(Potential::zero(), 3, {0.5}), InvalidArgument);
}
