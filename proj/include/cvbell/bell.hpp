#pragma once

#include <array>
#include <vector>

#include "cvbell/types.hpp"

namespace cvbell {

/// Correlation tensor of the squeezed state under the given settings:
/// entry at word (k_1,...,k_N) is the closed-form correlation evaluated at
/// (alpha_1^{k_1}, ..., alpha_N^{k_N}).
CorrelationTensor correlation_tensor(const SqueezedParams& params, const SettingTable& table);

/// CHSH combination E(1,1)+E(1,2)+E(2,1)-E(2,2), bound 2. The N=2 member of
/// the Mermin-type family below.
BellForm chsh_form();

/// Three-party Mermin combination E(1,1,2)+E(1,2,1)+E(2,1,1)-E(2,2,2), bound 2.
BellForm mermin3_form();

/// Four-party 16-term combination with signs (-+++ / +++- / +++- / +---)
/// over words ordered (k1,k2,k3,k4), bound 4.
BellForm mermin4_form();

/// Dot product of form coefficients with tensor values. Throws on N mismatch.
double evaluate_form(const BellForm& form, const CorrelationTensor& tensor);

struct ZBResult {
  double lhs = 0.0;     // sum over all 2^N sign vectors of |signed correlation sums|
  double bound = 0.0;   // 2^N
  bool violated = false;
};

/// Full Zukowski-Brukner quantity: lhs = sum_{s in {-1,1}^N} | sum_k
/// (prod_j s_j^{k_j - 1}) E(k) |, with local-realistic bound 2^N. The sign
/// vectors are enumerated directly (at most 128 for N = 7).
ZBResult zb_lhs(const CorrelationTensor& tensor);

/// Equatorial-measurement GHZ correlation cos(sum_j phi_j^{k_j}); angles[i]
/// holds party i's two angles. Requires n >= 2.
CorrelationTensor ghz_correlation_tensor(int n, const std::vector<std::array<double, 2>>& angles);

/// Werner-state visibility acting on correlations: every entry times v in [0,1].
CorrelationTensor scale_tensor(const CorrelationTensor& tensor, double v);

/// The three-party setting choice behind the closed-form B(3) expression:
/// party 1 = (0, a), party 2 = (0, a), party 3 = (-a, 0), all real.
SettingTable mermin3_paper_settings(double a);

/// Closed-form B(3) at squeezing r and displacement magnitude a:
///   1 + 2 exp{(-4 cosh 2r - 4 sinh 2r) a^2}
///     - exp{(-4 cosh 2r + (4/3) sinh 2r) a^2}.
double mermin3_closed_value(double r, double a);

/// Large-|r| (r < 0) limit of the same quantity: 3 - exp{-(8/3) e^{-2r} a^2}.
double mermin3_asymptotic_value(double r, double a);

}  // namespace cvbell
