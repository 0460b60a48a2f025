#include "cvbell/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvbell {

namespace {

void check_count(const SqueezedParams& params, std::span<const Displacement> displacements) {
  if (static_cast<int>(displacements.size()) != params.n_modes()) {
    throw std::invalid_argument("kernel: got " + std::to_string(displacements.size()) +
                                " displacements for " + std::to_string(params.n_modes()) +
                                " modes");
  }
  for (std::size_t i = 0; i < displacements.size(); ++i) {
    if (!displacements[i].is_finite()) {
      throw std::invalid_argument("kernel: displacement " + std::to_string(i) +
                                  " is not finite");
    }
  }
}

}  // namespace

KernelExponent kernel_exponent(const SqueezedParams& params,
                               std::span<const Displacement> displacements) {
  check_count(params, displacements);
  const int n = params.n_modes();

  double abs2 = 0.0, cross = 0.0, self = 0.0;
  for (std::size_t i = 0; i < displacements.size(); ++i) {
    const Displacement& a = displacements[i];
    abs2 += a.abs2();
    // a^2 + conj(a)^2 = 2 (re^2 - im^2)
    self += 2.0 * (a.re * a.re - a.im * a.im);
    for (std::size_t j = i + 1; j < displacements.size(); ++j) {
      // a_i a_j + conj = 2 (re_i re_j - im_i im_j)
      cross += 2.0 * (a.re * displacements[j].re - a.im * displacements[j].im);
    }
  }

  const double c2 = std::cosh(2.0 * params.r());
  const double s2 = std::sinh(2.0 * params.r());
  const double nd = static_cast<double>(n);
  const double value =
      -2.0 * c2 * abs2 + (4.0 / nd) * s2 * cross - ((nd - 2.0) / nd) * s2 * self;
  return KernelExponent{value};
}

double vacuum_correlation(std::span<const Displacement> displacements) {
  if (displacements.empty()) {
    throw std::invalid_argument("vacuum_correlation: displacement list is empty");
  }
  double abs2 = 0.0;
  for (std::size_t i = 0; i < displacements.size(); ++i) {
    if (!displacements[i].is_finite()) {
      throw std::invalid_argument("vacuum_correlation: displacement " + std::to_string(i) +
                                  " is not finite");
    }
    abs2 += displacements[i].abs2();
  }
  return std::exp(-2.0 * abs2);
}

double squeezed_correlation(const SqueezedParams& params,
                            std::span<const Displacement> displacements) {
  return std::exp(kernel_exponent(params, displacements).value);
}

double squeezed_correlation_real4(const SqueezedParams& params,
                                  const std::array<double, 4>& displacements) {
  if (params.n_modes() != 4) {
    throw std::invalid_argument("squeezed_correlation_real4 requires N = 4, got N = " +
                                std::to_string(params.n_modes()));
  }
  double sq = 0.0, cross = 0.0;
  for (int i = 0; i < 4; ++i) {
    sq += displacements[i] * displacements[i];
    for (int j = i + 1; j < 4; ++j) {
      cross += displacements[i] * displacements[j];
    }
  }
  const double c2 = std::cosh(2.0 * params.r());
  const double s2 = std::sinh(2.0 * params.r());
  return std::exp((-2.0 * c2 - s2) * sq + 2.0 * s2 * cross);
}

}  // namespace cvbell
