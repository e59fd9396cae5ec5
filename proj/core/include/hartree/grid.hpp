#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace hartree {

using Complex = std::complex<double>;
using ComplexField = std::vector<Complex>;
using RealField = std::vector<double>;

/// A point of R^d stored in three slots; unused trailing slots are zero.
using Point = std::array<double, 3>;

inline constexpr int kMaxDim = 3;

inline double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm_squared(const Point& a) { return dot(a, a); }
double norm(const Point& a);

/// Uniform periodic grid on the box [-L/2, L/2)^d.
///
/// Samples are stored row-major with the last axis fastest. The coordinate of
/// index j along any axis is -L/2 + j h, so index n/2 is the origin.
struct GridSpec {
  int dim = 1;
  int n = 8;
  double length = 1.0;

  /// Validated construction; throws InvalidArgument.
  static GridSpec make(int dim, int n, double length);
  void validate() const;

  double spacing() const { return length / n; }
  double cell_volume() const;
  std::size_t size() const;

  double coordinate(int j) const { return -0.5 * length + j * spacing(); }
  /// Signed alias of k in [-n/2, n/2) times 2 pi / L.
  double frequency(int k) const;

  std::array<int, 3> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<int, 3>& idx) const;
  Point point(std::size_t flat) const;
  /// Frequency vector of spectral index `flat`.
  Point wavevector(std::size_t flat) const;
  /// Flat index of the mirror point -x (indices taken mod n).
  std::size_t mirror(std::size_t flat) const;

  bool operator==(const GridSpec&) const = default;
};

/// A complex wavefunction sampled on a grid together with its discrete
/// transform. Values are immutable; the spectrum is computed on first use and
/// shared between copies.
class SpectralField {
 public:
  SpectralField(GridSpec grid, ComplexField values);

  static SpectralField from_spectrum(GridSpec grid, ComplexField spectrum);

  template <class F>
  static SpectralField sample(const GridSpec& grid, F&& f) {
    ComplexField v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.point(i));
    return SpectralField(grid, std::move(v));
  }

  const GridSpec& grid() const { return grid_; }
  std::span<const Complex> values() const { return *values_; }
  std::span<const Complex> spectrum() const;
  Complex operator[](std::size_t i) const { return (*values_)[i]; }

  SpectralField conjugate() const;
  SpectralField scaled(Complex factor) const;

 private:
  struct SpectrumCache {
    std::once_flag once;
    ComplexField data;
  };

  GridSpec grid_;
  std::shared_ptr<const ComplexField> values_;
  std::shared_ptr<SpectrumCache> spectrum_;
};

/// Trapezoidal quadrature h^d * sum f.
double integrate(const GridSpec& grid, std::span<const double> f);
Complex integrate(const GridSpec& grid, std::span<const Complex> f);

/// Spectral gradient: component i is the inverse transform of (i xi_i) phi-hat.
std::vector<SpectralField> gradient(const SpectralField& phi);

/// Gradient of the primed-variable factor: transforms with the positive
/// exponent and multiplies by (-i xi). Agrees with gradient() on resolved
/// fields; it is an independent evaluation path.
std::vector<SpectralField> gradient_primed(const SpectralField& phi);

/// Spectral Laplacian (multiplier -|xi|^2).
SpectralField laplacian(const SpectralField& phi);

/// Spectral second derivative d_i d_j (multiplier -xi_i xi_j).
SpectralField second_derivative(const SpectralField& phi, int i, int j);

/// Full symmetric Hessian, entry (i, j) at index i * dim + j.
std::vector<SpectralField> hessian(const SpectralField& phi);

/// Spectral gradient of a real grid function; imaginary parts are dropped.
std::vector<RealField> gradient(const GridSpec& grid, std::span<const double> f);

/// Sum over spectral modes of |xi|^2 |phi-hat|^2, scaled so that it equals
/// integrate(|grad phi|^2).
double gradient_norm_squared(const SpectralField& phi);

/// |phi|^2 pointwise.
RealField density(const SpectralField& phi);

/// Coordinate along `axis` at every grid point.
RealField coordinate_field(const GridSpec& grid, int axis);

/// A convolution kernel sampled at box-centered points, with its transform
/// (origin-shifted) cached for repeated use.
class ConvolutionKernel {
 public:
  ConvolutionKernel(GridSpec grid, RealField samples);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> samples() const { return samples_; }
  /// h^d times the transform of the origin-shifted samples.
  std::span<const Complex> spectrum() const { return spectrum_; }

  /// x -> h^d sum_y K(x - y) f(y), circular. Throws ImaginaryResidueError when
  /// the imaginary part exceeds 1e-8 of the real part's max magnitude.
  RealField apply(std::span<const double> density) const;

 private:
  GridSpec grid_;
  RealField samples_;
  ComplexField spectrum_;
};

/// One-shot circular convolution; see ConvolutionKernel::apply.
RealField convolve(const GridSpec& grid, std::span<const double> kernel_samples,
                   std::span<const double> density);

}  // namespace hartree
