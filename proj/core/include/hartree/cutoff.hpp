#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hartree/grid.hpp"

namespace hartree {

/// Dense polynomial sum c_k t^k with Horner evaluation.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  double operator()(double t) const;
  Polynomial derivative() const;
  /// Antiderivative taking the value `at_lower` at t = lower.
  Polynomial antiderivative(double lower = 0.0, double at_lower = 0.0) const;

  const std::vector<double>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(double s, const Polynomial& p);

 private:
  std::vector<double> c_;
};

/// The bump rho and the weight psi built from it.
///
/// rho(x) = (35/32) (x-1)^3 (3-x)^3 on (1, 3), zero elsewhere. With
/// Phi(x) = int_0^x rho and M1(x) = int_0^x y rho(y) dy, psi(x) = x - x Phi(x)
/// + M1(x). All pieces on [1, 3] are polynomials in u = x - 2.
class CutoffProfile {
 public:
  CutoffProfile();

  double rho(double x) const;
  double rho_d1(double x) const;
  double rho_d2(double x) const;
  double cumulative(double x) const;      ///< Phi
  double first_moment(double x) const;    ///< M1
  double psi(double x) const;
  /// k-th derivative of psi for k = 1..4, from the polynomial representation.
  double psi_derivative(int k, double x) const;

  const Polynomial& rho_poly() const { return rho_; }
  const Polynomial& psi_poly() const { return psi_[0]; }

 private:
  Polynomial rho_, rho1_, rho2_, phi_, m1_;
  std::array<Polynomial, 5> psi_;
};

const CutoffProfile& make_profile();

/// F_R(r) = Phi(r^2 / R).
double cumulative_weight(const CutoffProfile& p, double r, double R);

/// Derivatives of psi_R(x) = R psi(|x|^2 / R).
struct LocalizationWeight {
  double value = 0.0;
  Point gradient{};
  std::array<double, 9> hessian{};  ///< row-major, (i, j) at 3 i + j
  double laplacian = 0.0;
  double bilaplacian = 0.0;
};

LocalizationWeight localization_weight(const CutoffProfile& p, const Point& x, double R, int dim);

/// Sup over x of |Delta^2 psi_R|; scales exactly as 1/R.
double bilaplacian_sup(const CutoffProfile& p, double R, int dim);

/// a(x, y) = (x - y) - (psi'(|x|^2/R) x - psi'(|y|^2/R) y).
Point commutator_vector(const CutoffProfile& p, const Point& x, const Point& y, double R);

/// F_R(|x|) + (|x|^2/R) rho(|x|^2/R) + the same at y.
double truncation_bracket(const CutoffProfile& p, const Point& x, const Point& y, double R);

struct TruncationCheck {
  double max_ratio = 0.0;
  std::size_t evaluated = 0;   ///< pairs with a nonzero bracket
  std::size_t violations = 0;  ///< zero bracket but |a| > 1e-12
};

/// Samples pairs with max(|x|, |y|) >= sqrt(R), 0 < |x - y| <= sqrt(R), and
/// reports max |a(x,y)| / (bracket |x - y|). x is drawn uniformly from the ball
/// of radius 2 sqrt(R) and y - x uniformly from the ball of radius sqrt(R).
TruncationCheck truncation_bound_check(const CutoffProfile& p, double R, std::size_t samples,
                                       std::uint64_t seed, int dim = 3);

/// Uniform double in [0, 1) from a 64-bit engine output, platform independent.
double unit_uniform(std::uint64_t bits);

}  // namespace hartree
