#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hartree/grid.hpp"

namespace hartree {

/// Even radial interaction potential V(x) = v(|x|).
///
/// Three families: identically zero, power law c|x|^{-a}, and a radial table
/// v(k dr) interpolated by cubic Hermite splines (slope 0 at r = 0, held at the
/// last sample beyond the table).
class Potential {
 public:
  enum class Family { zero, power, table };

  static Potential zero();
  static Potential power(double a, double c = 1.0);
  static Potential table(std::vector<double> samples, double dr);

  Family family() const { return family_; }
  double exponent() const { return a_; }
  double strength() const { return c_; }
  std::string describe() const;
  /// Table spacing and the radius beyond which a table potential is constant.
  double table_spacing() const { return dr_; }
  double table_extent() const;

  /// v(r) and v'(r). Power family throws SingularOriginError at r = 0.
  double radial(double r) const;
  double radial_derivative(double r) const;

  double eval(const Point& x) const;
  Point gradient(const Point& x) const;
  /// V(x) + x.grad V(x) / 2.
  double virial_defect(const Point& x) const;

 private:
  Potential() = default;

  Family family_ = Family::zero;
  double a_ = 0.0;
  double c_ = 0.0;
  std::vector<double> table_;
  std::vector<double> slopes_;
  double dr_ = 1.0;
};

/// Which radial function a kernel samples.
enum class KernelKind {
  value,        ///< V(z)
  radial_moment,  ///< z . grad V(z)
  abs_moment,   ///< |z| |grad V(z)|
};

/// Restrict a kernel to |z| <= radius (inside) or |z| > radius (outside).
struct KernelMask {
  double radius = 0.0;
  bool keep_inside = true;
};

/// Kernel samples at box-centered grid points.
///
/// For the power family the origin cell receives the average of the sampled
/// function over the ball of radius h/2, d c (h/2)^{-a} / (d - a) for
/// KernelKind::value and the same times -a or a for the moments. Throws
/// SingularOriginError when a >= d.
RealField kernel_samples(const Potential& V, const GridSpec& grid,
                         KernelKind kind = KernelKind::value,
                         std::optional<KernelMask> mask = std::nullopt);

/// Components of grad V(z) at grid points. The origin and the components
/// that sit on the wrap seam are zero, so each component is exactly odd.
std::vector<RealField> gradient_kernel_samples(const Potential& V, const GridSpec& grid,
                                               std::optional<KernelMask> mask = std::nullopt);

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int dim);

struct TailValue {
  double value = 0.0;
  bool finite = true;
};

enum class TailRegion { outer, inner };

/// Integral of |x||grad V| over |x| >= sqrt(R) (outer) or |x| <= sqrt(R)
/// (inner), divided by R^{(d-1)/2}. A divergent integral is reported with
/// finite = false.
TailValue tail_ratio(const Potential& V, int dim, double R, TailRegion region);

/// As tail_ratio but throws NonIntegrableTailError on divergence.
double tail_ratio_strict(const Potential& V, int dim, double R, TailRegion region);

/// Closed-form tail ratio for the power family.
TailValue power_tail_ratio_exact(double a, double c, int dim, double R, TailRegion region);

struct HypothesisRow {
  double R = 0.0;
  double max_defect = 0.0;     ///< max of V + x.grad V/2 over radii in [1e-2, R]
  double sup_tail = 0.0;       ///< sup over |x| >= R of |x||grad V|
  TailValue outer;
  TailValue inner;
};

struct HypothesisReport {
  std::vector<HypothesisRow> rows;
  bool defect_nonpositive = true;
  bool sup_tail_decays = true;
  bool outer_decays = true;
  bool inner_decays = true;
};

/// Tabulates the blowup hypotheses on V for an increasing sequence of R >= 1.
HypothesisReport check_hypotheses(const Potential& V, int dim, const std::vector<double>& R_sequence);

}  // namespace hartree
