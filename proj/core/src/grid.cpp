#include "hartree/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hartree/errors.hpp"
#include "hartree/fft.hpp"

namespace hartree {

double norm(const Point& a) { return std::sqrt(norm_squared(a)); }

GridSpec GridSpec::make(int dim, int n, double length) {
  GridSpec g{dim, n, length};
  g.validate();
  return g;
}

namespace {

bool smooth_size(int n) {
  for (int p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

}  // namespace

void GridSpec::validate() const {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidArgument("grid: dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (n < 8 || n % 2 != 0 || !smooth_size(n)) {
    throw InvalidArgument("grid: n must be even, >= 8 and have no prime factor above 5, got " +
                          std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InvalidArgument("grid: box length must be positive");
  }
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

double GridSpec::frequency(int k) const {
  const int alias = k < n / 2 ? k : k - n;
  return 2.0 * std::numbers::pi * alias / length;
}

std::array<int, 3> GridSpec::multi_index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(n));
    flat /= static_cast<std::size_t>(n);
  }
  return idx;
}

std::size_t GridSpec::flat_index(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) {
    const int j = ((idx[a] % n) + n) % n;
    flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(j);
  }
  return flat;
}

Point GridSpec::point(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) p[a] = coordinate(idx[a]);
  return p;
}

Point GridSpec::wavevector(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point k{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) k[a] = frequency(idx[a]);
  return k;
}

std::size_t GridSpec::mirror(std::size_t flat) const {
  auto idx = multi_index(flat);
  for (int a = 0; a < dim; ++a) idx[a] = (n - idx[a]) % n;
  return flat_index(idx);
}

// SpectralField

SpectralField::SpectralField(GridSpec grid, ComplexField values)
    : grid_(grid),
      values_(std::make_shared<const ComplexField>(std::move(values))),
      spectrum_(std::make_shared<SpectrumCache>()) {
  grid_.validate();
  if (values_->size() != grid_.size()) {
    throw InvalidArgument("SpectralField: sample count does not match grid");
  }
}

SpectralField SpectralField::from_spectrum(GridSpec grid, ComplexField spectrum) {
  ComplexField values(spectrum.size());
  inverse_transform(grid, spectrum, values);
  SpectralField f(grid, std::move(values));
  auto& cache = *f.spectrum_;
  std::call_once(cache.once, [&] { cache.data = std::move(spectrum); });
  return f;
}

std::span<const Complex> SpectralField::spectrum() const {
  auto& cache = *spectrum_;
  std::call_once(cache.once, [&] {
    cache.data.resize(values_->size());
    forward_transform(grid_, *values_, cache.data);
  });
  return cache.data;
}

SpectralField SpectralField::conjugate() const {
  ComplexField v(values_->begin(), values_->end());
  for (auto& z : v) z = std::conj(z);
  return SpectralField(grid_, std::move(v));
}

SpectralField SpectralField::scaled(Complex factor) const {
  ComplexField v(values_->begin(), values_->end());
  for (auto& z : v) z *= factor;
  return SpectralField(grid_, std::move(v));
}

// quadrature

double integrate(const GridSpec& grid, std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s += v;
  return s * grid.cell_volume();
}

Complex integrate(const GridSpec& grid, std::span<const Complex> f) {
  Complex s{0.0, 0.0};
  for (const auto& v : f) s += v;
  return s * grid.cell_volume();
}

// spectral operators

namespace {

template <class Multiplier>
SpectralField apply_multiplier(const SpectralField& phi, Multiplier&& m) {
  const auto& grid = phi.grid();
  const auto spec = phi.spectrum();
  ComplexField out(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) out[i] = m(grid.wavevector(i)) * spec[i];
  return SpectralField::from_spectrum(grid, std::move(out));
}

}  // namespace

std::vector<SpectralField> gradient(const SpectralField& phi) {
  std::vector<SpectralField> out;
  out.reserve(static_cast<std::size_t>(phi.grid().dim));
  for (int a = 0; a < phi.grid().dim; ++a) {
    out.push_back(apply_multiplier(phi, [a](const Point& xi) { return Complex{0.0, xi[a]}; }));
  }
  return out;
}

std::vector<SpectralField> gradient_primed(const SpectralField& phi) {
  const auto& grid = phi.grid();
  const std::size_t N = grid.size();
  ComplexField spec(N);
  transform(grid, phi.values(), spec, TransformSign::positive);
  std::vector<SpectralField> out;
  for (int a = 0; a < grid.dim; ++a) {
    ComplexField tmp(N);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = Complex{0.0, -grid.wavevector(i)[a]} * spec[i];
    ComplexField values(N);
    transform(grid, tmp, values, TransformSign::negative);
    const double scale = 1.0 / static_cast<double>(N);
    for (auto& v : values) v *= scale;
    out.emplace_back(grid, std::move(values));
  }
  return out;
}

SpectralField laplacian(const SpectralField& phi) {
  return apply_multiplier(phi, [](const Point& xi) { return Complex{-norm_squared(xi), 0.0}; });
}

SpectralField second_derivative(const SpectralField& phi, int i, int j) {
  return apply_multiplier(phi, [i, j](const Point& xi) { return Complex{-xi[i] * xi[j], 0.0}; });
}

std::vector<SpectralField> hessian(const SpectralField& phi) {
  const int d = phi.grid().dim;
  std::vector<SpectralField> out;
  out.reserve(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (j < i) {
        out.push_back(out[static_cast<std::size_t>(j * d + i)]);
      } else {
        out.push_back(second_derivative(phi, i, j));
      }
    }
  }
  return out;
}

std::vector<RealField> gradient(const GridSpec& grid, std::span<const double> f) {
  const std::size_t N = grid.size();
  ComplexField in(f.begin(), f.end());
  ComplexField spec(N);
  forward_transform(grid, in, spec);
  std::vector<RealField> out;
  for (int a = 0; a < grid.dim; ++a) {
    ComplexField tmp(N);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = Complex{0.0, grid.wavevector(i)[a]} * spec[i];
    inverse_transform(grid, tmp, tmp);
    RealField r(N);
    for (std::size_t i = 0; i < N; ++i) r[i] = tmp[i].real();
    out.push_back(std::move(r));
  }
  return out;
}

double gradient_norm_squared(const SpectralField& phi) {
  const auto& grid = phi.grid();
  const auto spec = phi.spectrum();
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) s += norm_squared(grid.wavevector(i)) * std::norm(spec[i]);
  return s * grid.cell_volume() / static_cast<double>(grid.size());
}

RealField density(const SpectralField& phi) {
  RealField r(phi.values().size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::norm(phi[i]);
  return r;
}

RealField coordinate_field(const GridSpec& grid, int axis) {
  RealField r(grid.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = grid.point(i)[axis];
  return r;
}

// convolution

ConvolutionKernel::ConvolutionKernel(GridSpec grid, RealField samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size()) {
    throw InvalidArgument("ConvolutionKernel: sample count does not match grid");
  }
  const std::size_t N = grid_.size();
  const int half = grid_.n / 2;
  ComplexField shifted(N);
  for (std::size_t i = 0; i < N; ++i) {
    auto idx = grid_.multi_index(i);
    for (int a = 0; a < grid_.dim; ++a) idx[a] += half;
    shifted[i] = samples_[grid_.flat_index(idx)];
  }
  spectrum_.resize(N);
  forward_transform(grid_, shifted, spectrum_);
  const double hd = grid_.cell_volume();
  for (auto& v : spectrum_) v *= hd;
}

RealField ConvolutionKernel::apply(std::span<const double> density) const {
  const std::size_t N = grid_.size();
  if (density.size() != N) throw InvalidArgument("convolve: density does not match grid");
  ComplexField buf(density.begin(), density.end());
  forward_transform(grid_, buf, buf);
  for (std::size_t i = 0; i < N; ++i) buf[i] *= spectrum_[i];
  inverse_transform(grid_, buf, buf);

  double max_re = 0.0;
  double max_im = 0.0;
  RealField out(N);
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = buf[i].real();
    max_re = std::max(max_re, std::abs(buf[i].real()));
    max_im = std::max(max_im, std::abs(buf[i].imag()));
  }
  if (max_im > 1e-8 * max_re && max_im > 1e-300) {
    throw ImaginaryResidueError("convolve: imaginary residue " + std::to_string(max_im) +
                                " exceeds 1e-8 relative");
  }
  return out;
}

RealField convolve(const GridSpec& grid, std::span<const double> kernel_samples,
                   std::span<const double> density) {
  return ConvolutionKernel(grid, RealField(kernel_samples.begin(), kernel_samples.end()))
      .apply(density);
}

}  // namespace hartree
