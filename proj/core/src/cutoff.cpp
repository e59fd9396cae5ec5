#include "hartree/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hartree/errors.hpp"

namespace hartree {

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {}

double Polynomial::operator()(double t) const {
  double s = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * t + *it;
  return s;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative(double lower, double at_lower) const {
  std::vector<double> a(c_.size() + 1, 0.0);
  for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
  Polynomial P(std::move(a));
  P.c_[0] = at_lower - P(lower);
  return P;
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  std::vector<double> c(std::max(p.c_.size(), q.c_.size()), 0.0);
  for (std::size_t k = 0; k < p.c_.size(); ++k) c[k] += p.c_[k];
  for (std::size_t k = 0; k < q.c_.size(); ++k) c[k] += q.c_[k];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) { return p + (-1.0) * q; }

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.c_.empty() || q.c_.empty()) return Polynomial({0.0});
  std::vector<double> c(p.c_.size() + q.c_.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.c_.size(); ++i)
    for (std::size_t j = 0; j < q.c_.size(); ++j) c[i + j] += p.c_[i] * q.c_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> c = p.c_;
  for (auto& v : c) v *= s;
  return Polynomial(std::move(c));
}

// profile; pieces are polynomials in u = x - 2 on [-1, 1]

CutoffProfile::CutoffProfile() {
  constexpr double k = 35.0 / 32.0;
  rho_ = Polynomial({k, 0.0, -3.0 * k, 0.0, 3.0 * k, 0.0, -k});
  rho1_ = rho_.derivative();
  rho2_ = rho1_.derivative();
  phi_ = rho_.antiderivative(-1.0, 0.0);
  const Polynomial x({2.0, 1.0});
  m1_ = (x * rho_).antiderivative(-1.0, 0.0);
  psi_[0] = x - x * phi_ + m1_;
  for (int d = 1; d < 5; ++d) psi_[d] = psi_[d - 1].derivative();
}

double CutoffProfile::rho(double x) const { return (x <= 1.0 || x >= 3.0) ? 0.0 : rho_(x - 2.0); }
double CutoffProfile::rho_d1(double x) const { return (x <= 1.0 || x >= 3.0) ? 0.0 : rho1_(x - 2.0); }
double CutoffProfile::rho_d2(double x) const { return (x <= 1.0 || x >= 3.0) ? 0.0 : rho2_(x - 2.0); }

double CutoffProfile::cumulative(double x) const {
  if (x <= 1.0) return 0.0;
  if (x >= 3.0) return 1.0;
  return phi_(x - 2.0);
}

double CutoffProfile::first_moment(double x) const {
  if (x <= 1.0) return 0.0;
  if (x >= 3.0) return 2.0;
  return m1_(x - 2.0);
}

double CutoffProfile::psi(double x) const {
  if (x <= 1.0) return x;
  if (x >= 3.0) return 2.0;
  return psi_[0](x - 2.0);
}

double CutoffProfile::psi_derivative(int k, double x) const {
  if (k < 1 || k > 4) throw InvalidArgument("psi_derivative: order must be 1..4");
  if (x <= 1.0) return k == 1 ? 1.0 : 0.0;
  if (x >= 3.0) return 0.0;
  return psi_[static_cast<std::size_t>(k)](x - 2.0);
}

const CutoffProfile& make_profile() {
  static const CutoffProfile profile;
  return profile;
}

double cumulative_weight(const CutoffProfile& p, double r, double R) {
  if (!(R > 0.0)) throw InvalidArgument("cumulative_weight: R must be positive");
  return p.cumulative(r * r / R);
}

LocalizationWeight localization_weight(const CutoffProfile& p, const Point& x, double R, int dim) {
  if (!(R > 0.0)) throw InvalidArgument("localization_weight: R must be positive");
  const double s = norm_squared(x) / R;
  const double d1 = p.psi_derivative(1, s);
  const double d2 = p.psi_derivative(2, s);
  const double d3 = p.psi_derivative(3, s);
  const double d4 = p.psi_derivative(4, s);
  LocalizationWeight w;
  w.value = R * p.psi(s);
  for (int i = 0; i < 3; ++i) w.gradient[i] = 2.0 * x[i] * d1;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      w.hessian[3 * i + j] = (i == j ? 2.0 * d1 : 0.0) + 4.0 * x[i] * x[j] * d2 / R;
  w.laplacian = 2.0 * dim * d1 + 4.0 * s * d2;
  w.bilaplacian = (16.0 * s * s * d4 + 16.0 * (dim + 2) * s * d3 + 4.0 * dim * (dim + 2) * d2) / R;
  return w;
}

double bilaplacian_sup(const CutoffProfile& p, double R, int dim) {
  // R * Delta^2 psi_R depends on s only; scan the active band s in [1, 3].
  double best = 0.0;
  const int samples = 20000;
  for (int k = 0; k <= samples; ++k) {
    const double s = 1.0 + 2.0 * k / samples;
    const double v = 16.0 * s * s * p.psi_derivative(4, s) + 16.0 * (dim + 2) * s * p.psi_derivative(3, s) +
                     4.0 * dim * (dim + 2) * p.psi_derivative(2, s);
    best = std::max(best, std::abs(v));
  }
  return best / R;
}

Point commutator_vector(const CutoffProfile& p, const Point& x, const Point& y, double R) {
  const double px = p.psi_derivative(1, norm_squared(x) / R);
  const double py = p.psi_derivative(1, norm_squared(y) / R);
  Point a{};
  for (int i = 0; i < 3; ++i) a[i] = (x[i] - y[i]) - (px * x[i] - py * y[i]);
  return a;
}

double truncation_bracket(const CutoffProfile& p, const Point& x, const Point& y, double R) {
  const double sx = norm_squared(x) / R;
  const double sy = norm_squared(y) / R;
  return p.cumulative(sx) + sx * p.rho(sx) + p.cumulative(sy) + sy * p.rho(sy);
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

namespace {

Point ball_sample(std::mt19937_64& rng, int dim, double radius) {
  for (;;) {
    Point p{};
    for (int a = 0; a < dim; ++a) p[a] = 2.0 * unit_uniform(rng()) - 1.0;
    if (norm_squared(p) <= 1.0) {
      for (int a = 0; a < dim; ++a) p[a] *= radius;
      return p;
    }
  }
}

}  // namespace

TruncationCheck truncation_bound_check(const CutoffProfile& p, double R, std::size_t samples,
                                       std::uint64_t seed, int dim) {
  if (R < 1.0) throw InvalidArgument("truncation_bound_check: R must be >= 1");
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("truncation_bound_check: bad dimension");
  std::mt19937_64 rng(seed);
  const double rs = std::sqrt(R);
  TruncationCheck out;
  std::size_t accepted = 0;
  while (accepted < samples) {
    const Point x = ball_sample(rng, dim, 2.0 * rs);
    const Point delta = ball_sample(rng, dim, rs);
    Point y{};
    for (int a = 0; a < 3; ++a) y[a] = x[a] + delta[a];
    if (std::max(norm(x), norm(y)) < rs) continue;
    const double dist = norm(delta);
    if (dist < 1e-10) throw DegenerateSampleError("truncation_bound_check: |x - y| < 1e-10");
    ++accepted;
    const double bracket = truncation_bracket(p, x, y, R);
    const double a = norm(commutator_vector(p, x, y, R));
    if (bracket == 0.0) {
      if (a > 1e-12) ++out.violations;
      continue;
    }
    ++out.evaluated;
    out.max_ratio = std::max(out.max_ratio, a / (bracket * dist));
  }
  return out;
}

}  // namespace hartree
