#pragma once

#include <array>
#include <span>

#include "cvbell/types.hpp"

namespace cvbell {

/// Exponent of the N-mode squeezed-vacuum correlation function, before
/// exponentiation. Non-positive for every physical input, so the correlation
/// itself lies in (0, 1].
struct KernelExponent {
  double value = 0.0;
};

/// Exponent of the closed-form correlation at squeezing r for the given
/// displacements (one per mode):
///   -2 cosh(2r) sum |a_i|^2 + (4/N) sinh(2r) sum_{i<j} (a_i a_j + conj)
///   - ((N-2)/N) sinh(2r) sum_i (a_i^2 + conj).
/// Throws on a mode-count mismatch.
KernelExponent kernel_exponent(const SqueezedParams& params,
                               std::span<const Displacement> displacements);

/// Vacuum (r = 0) correlation exp(-2 sum |a_i|^2). Throws on an empty list.
double vacuum_correlation(std::span<const Displacement> displacements);

/// Closed-form correlation of the N-mode squeezed vacuum, exp(kernel_exponent).
double squeezed_correlation(const SqueezedParams& params,
                            std::span<const Displacement> displacements);

/// Four-mode special case with all displacements real:
///   exp{ (-2 cosh 2r - sinh 2r) sum a_i^2 + 2 sinh 2r sum_{i<j} a_i a_j }.
/// Throws unless params has N = 4.
double squeezed_correlation_real4(const SqueezedParams& params,
                                  const std::array<double, 4>& displacements);

}  // namespace cvbell
