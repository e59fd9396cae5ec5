#include "hartree/potentials.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hartree/errors.hpp"

namespace hartree {

Potential Potential::zero() { return Potential{}; }

Potential Potential::power(double a, double c) {
  if (!(a > 0.0) || !(c > 0.0)) throw InvalidArgument("power potential: need a > 0 and c > 0");
  Potential V;
  V.family_ = Family::power;
  V.a_ = a;
  V.c_ = c;
  return V;
}

Potential Potential::table(std::vector<double> samples, double dr) {
  if (samples.size() < 2) throw InvalidArgument("table potential: need at least two samples");
  if (!(dr > 0.0)) throw InvalidArgument("table potential: dr must be positive");
  Potential V;
  V.family_ = Family::table;
  V.dr_ = dr;
  const std::size_t m = samples.size();
  V.slopes_.assign(m, 0.0);
  for (std::size_t k = 1; k + 1 < m; ++k) V.slopes_[k] = (samples[k + 1] - samples[k - 1]) / (2.0 * dr);
  V.table_ = std::move(samples);
  return V;
}

double Potential::table_extent() const {
  if (family_ != Family::table) return std::numeric_limits<double>::infinity();
  return dr_ * static_cast<double>(table_.size() - 1);
}

std::string Potential::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::zero: os << "zero"; break;
    case Family::power: os << "power(a=" << a_ << ", c=" << c_ << ")"; break;
    case Family::table: os << "table(" << table_.size() << " samples, dr=" << dr_ << ")"; break;
  }
  return os.str();
}

double Potential::radial(double r) const {
  switch (family_) {
    case Family::zero: return 0.0;
    case Family::power:
      if (r <= 0.0) throw SingularOriginError("power potential evaluated at the origin");
      return c_ * std::pow(r, -a_);
    case Family::table: {
      const double q = r / dr_;
      const std::size_t last = table_.size() - 1;
      if (q >= static_cast<double>(last)) return table_[last];
      const auto k = static_cast<std::size_t>(q);
      const double t = q - static_cast<double>(k);
      const double t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * table_[k] + (t3 - 2 * t2 + t) * dr_ * slopes_[k] +
             (-2 * t3 + 3 * t2) * table_[k + 1] + (t3 - t2) * dr_ * slopes_[k + 1];
    }
  }
  return 0.0;
}

double Potential::radial_derivative(double r) const {
  switch (family_) {
    case Family::zero: return 0.0;
    case Family::power:
      if (r <= 0.0) throw SingularOriginError("power potential differentiated at the origin");
      return -a_ * c_ * std::pow(r, -a_ - 1.0);
    case Family::table: {
      const double q = r / dr_;
      const std::size_t last = table_.size() - 1;
      if (q >= static_cast<double>(last)) return 0.0;
      const auto k = static_cast<std::size_t>(q);
      const double t = q - static_cast<double>(k);
      const double t2 = t * t;
      return ((6 * t2 - 6 * t) * table_[k] + (-6 * t2 + 6 * t) * table_[k + 1]) / dr_ +
             (3 * t2 - 4 * t + 1) * slopes_[k] + (3 * t2 - 2 * t) * slopes_[k + 1];
    }
  }
  return 0.0;
}

double Potential::eval(const Point& x) const { return radial(norm(x)); }

Point Potential::gradient(const Point& x) const {
  const double r = norm(x);
  if (family_ == Family::power && r <= 0.0) {
    throw SingularOriginError("power potential differentiated at the origin");
  }
  if (r <= 0.0) return {0.0, 0.0, 0.0};
  const double g = radial_derivative(r) / r;
  return {g * x[0], g * x[1], g * x[2]};
}

double Potential::virial_defect(const Point& x) const {
  const double r = norm(x);
  if (family_ == Family::power && r <= 0.0) {
    throw SingularOriginError("power potential evaluated at the origin");
  }
  return radial(r) + 0.5 * r * radial_derivative(r);
}

// kernels

namespace {

double origin_value(const Potential& V, const GridSpec& grid, KernelKind kind) {
  switch (V.family()) {
    case Potential::Family::zero: return 0.0;
    case Potential::Family::table: return kind == KernelKind::value ? V.radial(0.0) : 0.0;
    case Potential::Family::power: {
      const double a = V.exponent();
      const int d = grid.dim;
      if (a >= d) {
        throw SingularOriginError("power potential: origin cell average diverges for a >= d");
      }
      const double avg = d * V.strength() * std::pow(0.5 * grid.spacing(), -a) / (d - a);
      switch (kind) {
        case KernelKind::value: return avg;
        case KernelKind::radial_moment: return -a * avg;
        case KernelKind::abs_moment: return a * avg;
      }
    }
  }
  return 0.0;
}

bool masked_out(const std::optional<KernelMask>& mask, double r) {
  if (!mask) return false;
  return mask->keep_inside ? r > mask->radius : r <= mask->radius;
}

}  // namespace

RealField kernel_samples(const Potential& V, const GridSpec& grid, KernelKind kind,
                         std::optional<KernelMask> mask) {
  RealField out(grid.size(), 0.0);
  if (V.family() == Potential::Family::zero) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double r = norm(grid.point(i));
    if (masked_out(mask, r)) continue;
    if (r == 0.0) {
      out[i] = origin_value(V, grid, kind);
      continue;
    }
    switch (kind) {
      case KernelKind::value: out[i] = V.radial(r); break;
      case KernelKind::radial_moment: out[i] = r * V.radial_derivative(r); break;
      case KernelKind::abs_moment: out[i] = r * std::abs(V.radial_derivative(r)); break;
    }
  }
  return out;
}

std::vector<RealField> gradient_kernel_samples(const Potential& V, const GridSpec& grid,
                                               std::optional<KernelMask> mask) {
  std::vector<RealField> out(static_cast<std::size_t>(grid.dim), RealField(grid.size(), 0.0));
  if (V.family() == Potential::Family::zero) return out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Point x = grid.point(i);
    const double r = norm(x);
    if (r == 0.0 || masked_out(mask, r)) continue;
    const auto idx = grid.multi_index(i);
    const Point g = V.gradient(x);
    for (int a = 0; a < grid.dim; ++a) {
      if (idx[a] != 0) out[a][i] = g[a];
    }
  }
  return out;
}

double unit_sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
  }
  throw InvalidArgument("unit_sphere_area: dimension must be 1, 2 or 3");
}

// hypotheses

TailValue power_tail_ratio_exact(double a, double c, int dim, double R, TailRegion region) {
  const double norm_factor = std::pow(R, 0.5 * (dim - 1));
  const double area = unit_sphere_area(dim);
  const double p = dim - a;  // exponent of the radial antiderivative
  if (region == TailRegion::inner) {
    if (p <= 0.0) return {std::numeric_limits<double>::infinity(), false};
    return {area * a * c * std::pow(R, 0.5 * p) / p / norm_factor, true};
  }
  if (p >= 0.0) return {std::numeric_limits<double>::infinity(), false};
  return {area * a * c * std::pow(R, 0.5 * p) / (-p) / norm_factor, true};
}

TailValue tail_ratio(const Potential& V, int dim, double R, TailRegion region) {
  if (!(R > 0.0)) throw InvalidArgument("tail_ratio: R must be positive");
  const double area = unit_sphere_area(dim);
  const double norm_factor = std::pow(R, 0.5 * (dim - 1));
  const double rs = std::sqrt(R);
  auto integrand = [&](double r) {
    if (V.family() == Potential::Family::power) {
      // r^d |v'(r)| folded into one power so neither endpoint forms 0 * inf
      return V.exponent() * V.strength() * std::pow(r, dim - V.exponent() - 1.0);
    }
    return std::pow(r, dim) * std::abs(V.radial_derivative(r));
  };

  switch (V.family()) {
    case Potential::Family::zero: return {0.0, true};
    case Potential::Family::power: {
      const double a = V.exponent();
      if (region == TailRegion::inner) {
        if (a >= dim) return {std::numeric_limits<double>::infinity(), false};
        boost::math::quadrature::tanh_sinh<double> ts;
        const double I = ts.integrate(integrand, 0.0, rs);
        return {area * I / norm_factor, true};
      }
      if (a <= dim) return {std::numeric_limits<double>::infinity(), false};
      boost::math::quadrature::exp_sinh<double> es;
      const double I = es.integrate(integrand, rs, std::numeric_limits<double>::infinity());
      return {area * I / norm_factor, true};
    }
    case Potential::Family::table: break;
  }
  // |v'| vanishes past the table; integrate node interval by node interval.
  const double dr = V.table_spacing();
  const double r_end = V.table_extent();
  double lo = region == TailRegion::inner ? 0.0 : rs;
  double hi = region == TailRegion::inner ? std::min(rs, r_end) : r_end;
  double I = 0.0;
  while (lo < hi) {
    const double next = std::min(hi, (std::floor(lo / dr + 1e-12) + 1.0) * dr);
    I += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, lo, next, 0);
    lo = next;
  }
  return {area * I / norm_factor, true};
}

double tail_ratio_strict(const Potential& V, int dim, double R, TailRegion region) {
  const TailValue t = tail_ratio(V, dim, R, region);
  if (!t.finite) {
    throw NonIntegrableTailError(std::string("L1 tail of |x||grad V| over the ") +
                                 (region == TailRegion::inner ? "inner" : "outer") +
                                 " region diverges for " + V.describe());
  }
  return t.value;
}

namespace {

bool decays(const std::vector<double>& values) {
  for (std::size_t k = 1; k < values.size(); ++k) {
    const bool both_zero = values[k] == 0.0 && values[k - 1] == 0.0;
    if (!(values[k] < values[k - 1]) && !both_zero) return false;
  }
  return true;
}

double sup_tail(const Potential& V, double R) {
  switch (V.family()) {
    case Potential::Family::zero: return 0.0;
    case Potential::Family::power: return R * std::abs(V.radial_derivative(R));
    case Potential::Family::table: break;
  }
  const double r_end = V.table_extent();
  if (R >= r_end) return 0.0;
  double best = 0.0;
  const int samples = 4096;
  for (int k = 0; k <= samples; ++k) {
    const double r = R + (r_end - R) * k / samples;
    best = std::max(best, r * std::abs(V.radial_derivative(r)));
  }
  return best;
}

}  // namespace

HypothesisReport check_hypotheses(const Potential& V, int dim, const std::vector<double>& R_sequence) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("check_hypotheses: bad dimension");
  for (std::size_t k = 0; k < R_sequence.size(); ++k) {
    if (R_sequence[k] < 1.0 || (k > 0 && !(R_sequence[k] > R_sequence[k - 1]))) {
      throw InvalidArgument("check_hypotheses: R sequence must be increasing and >= 1");
    }
  }
  HypothesisReport report;
  std::vector<double> sup, outer, inner;
  for (double R : R_sequence) {
    HypothesisRow row;
    row.R = R;
    row.max_defect = -std::numeric_limits<double>::infinity();
    const int samples = 256;
    const double r_lo = 1e-2;
    for (int k = 0; k < samples; ++k) {
      const double r = r_lo * std::pow(R / r_lo, static_cast<double>(k) / (samples - 1));
      row.max_defect = std::max(row.max_defect, V.virial_defect({r, 0.0, 0.0}));
    }
    row.sup_tail = sup_tail(V, R);
    row.outer = tail_ratio(V, dim, R, TailRegion::outer);
    row.inner = tail_ratio(V, dim, R, TailRegion::inner);

    report.defect_nonpositive = report.defect_nonpositive && row.max_defect <= 0.0;
    report.outer_decays = report.outer_decays && row.outer.finite;
    report.inner_decays = report.inner_decays && row.inner.finite;
    sup.push_back(row.sup_tail);
    outer.push_back(row.outer.value);
    inner.push_back(row.inner.value);
    report.rows.push_back(row);
  }
  report.sup_tail_decays = decays(sup);
  report.outer_decays = report.outer_decays && decays(outer);
  report.inner_decays = report.inner_decays && decays(inner);
  return report;
}

}  // namespace hartree
