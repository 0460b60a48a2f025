#include "cvbell/bell.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cvbell/kernel.hpp"

namespace cvbell {

CorrelationTensor correlation_tensor(const SqueezedParams& params, const SettingTable& table) {
  validate_setting_table(params, table);
  const int n = params.n_modes();
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> values(count);
  std::vector<Displacement> point(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < count; ++idx) {
    for (int i = 0; i < n; ++i) {
      const std::size_t j = (idx >> (n - 1 - i)) & 1u;
      point[static_cast<std::size_t>(i)] = table.rows[static_cast<std::size_t>(i)][j];
    }
    values[idx] = squeezed_correlation(params, point);
  }
  return CorrelationTensor(n, std::move(values));
}

namespace {

BellForm make_form(int n, std::string name, double bound,
                   const std::vector<std::pair<std::vector<int>, double>>& terms) {
  BellForm form;
  form.n_modes = n;
  form.name = std::move(name);
  form.classical_bound = bound;
  form.coefficients.assign(std::size_t{1} << n, 0.0);
  for (const auto& [word, coeff] : terms) {
    form.coefficients[setting_word_to_index(word)] = coeff;
  }
  return form;
}

}  // namespace

BellForm chsh_form() {
  return make_form(2, "chsh", 2.0,
                   {{{1, 1}, 1.0}, {{1, 2}, 1.0}, {{2, 1}, 1.0}, {{2, 2}, -1.0}});
}

BellForm mermin3_form() {
  return make_form(3, "mermin3", 2.0,
                   {{{1, 1, 2}, 1.0}, {{1, 2, 1}, 1.0}, {{2, 1, 1}, 1.0}, {{2, 2, 2}, -1.0}});
}

BellForm mermin4_form() {
  // Sign rows over (k3,k4) blocks at fixed (k1,k2): -+++ / +++- / +++- / +---.
  return make_form(4, "mermin4", 4.0,
                   {{{1, 1, 1, 1}, -1.0}, {{1, 1, 1, 2}, 1.0}, {{1, 1, 2, 1}, 1.0},
                    {{1, 1, 2, 2}, 1.0},  {{1, 2, 1, 1}, 1.0}, {{1, 2, 1, 2}, 1.0},
                    {{1, 2, 2, 1}, 1.0},  {{1, 2, 2, 2}, -1.0}, {{2, 1, 1, 1}, 1.0},
                    {{2, 1, 1, 2}, 1.0},  {{2, 1, 2, 1}, 1.0}, {{2, 1, 2, 2}, -1.0},
                    {{2, 2, 1, 1}, 1.0},  {{2, 2, 1, 2}, -1.0}, {{2, 2, 2, 1}, -1.0},
                    {{2, 2, 2, 2}, -1.0}});
}

double evaluate_form(const BellForm& form, const CorrelationTensor& tensor) {
  validate_bell_form(form);
  if (form.n_modes != tensor.n_modes()) {
    throw std::invalid_argument("evaluate_form: form is for N=" + std::to_string(form.n_modes) +
                                " but tensor has N=" + std::to_string(tensor.n_modes()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    acc += form.coefficients[i] * tensor[i];
  }
  return acc;
}

ZBResult zb_lhs(const CorrelationTensor& tensor) {
  const std::size_t count = tensor.size();
  double lhs = 0.0;
  for (std::size_t sv = 0; sv < count; ++sv) {
    double signed_sum = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      // prod_j s_j^{k_j-1} = (-1)^{popcount of parties with s_j=-1 and k_j=2}
      const bool negative = (std::popcount(sv & k) & 1) != 0;
      signed_sum += negative ? -tensor[k] : tensor[k];
    }
    lhs += std::abs(signed_sum);
  }
  ZBResult result;
  result.lhs = lhs;
  result.bound = static_cast<double>(count);
  result.violated = lhs > result.bound + 1e-12;
  return result;
}

CorrelationTensor ghz_correlation_tensor(int n,
                                         const std::vector<std::array<double, 2>>& angles) {
  if (n < 2) {
    throw std::invalid_argument("ghz_correlation_tensor: n must be >= 2");
  }
  if (static_cast<int>(angles.size()) != n) {
    throw std::invalid_argument("ghz_correlation_tensor: expected " + std::to_string(n) +
                                " angle rows, got " + std::to_string(angles.size()));
  }
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> values(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    double phase = 0.0;
    for (int i = 0; i < n; ++i) {
      phase += angles[static_cast<std::size_t>(i)][(idx >> (n - 1 - i)) & 1u];
    }
    values[idx] = std::cos(phase);
  }
  return CorrelationTensor(n, std::move(values));
}

CorrelationTensor scale_tensor(const CorrelationTensor& tensor, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument("scale_tensor: visibility must lie in [0, 1], got " +
                                std::to_string(v));
  }
  std::vector<double> values(tensor.values());
  for (double& x : values) {
    x *= v;
  }
  return CorrelationTensor(tensor.n_modes(), std::move(values));
}

SettingTable mermin3_paper_settings(double a) {
  SettingTable t = SettingTable::zeros(3);
  t.rows[0][1] = Displacement{a, 0.0};
  t.rows[1][1] = Displacement{a, 0.0};
  t.rows[2][0] = Displacement{-a, 0.0};
  return t;
}

double mermin3_closed_value(double r, double a) {
  const double c2 = std::cosh(2.0 * r);
  const double s2 = std::sinh(2.0 * r);
  const double a2 = a * a;
  return 1.0 + 2.0 * std::exp((-4.0 * c2 - 4.0 * s2) * a2) -
         std::exp((-4.0 * c2 + (4.0 / 3.0) * s2) * a2);
}

double mermin3_asymptotic_value(double r, double a) {
  return 3.0 - std::exp(-(8.0 / 3.0) * std::exp(-2.0 * r) * a * a);
}

}  // namespace cvbell
