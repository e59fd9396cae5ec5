#pragma once

#include <complex>
#include <span>

namespace hartree {

struct GridSpec;

/// Sign of the exponent in the discrete transform.
///
/// `negative` is sum_j f_j e^{-2 pi i jk/n} (the unprimed-variable
/// convention, derivative <-> +i xi). `positive` is the conjugate convention
/// used for primed variables (derivative <-> -i xi).
enum class TransformSign { negative, positive };

/// Unscaled multidimensional DFT over the grid. `in` and `out` may alias.
///
/// Plans are created once per (dimension, resolution, sign, in-place) and
/// cached in a process-wide registry that is safe for concurrent lookup.
void transform(const GridSpec& grid, std::span<const std::complex<double>> in,
               std::span<std::complex<double>> out, TransformSign sign);

/// Forward transform: unscaled sum with the negative exponent.
void forward_transform(const GridSpec& grid, std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out);

/// Inverse of forward_transform; carries the 1/n^d factor.
void inverse_transform(const GridSpec& grid, std::span<const std::complex<double>> in,
                       std::span<std::complex<double>> out);

}  // namespace hartree
