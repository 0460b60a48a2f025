#include "cvbell/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cvbell {

bool Displacement::is_finite() const {
  return std::isfinite(re) && std::isfinite(im);
}

SqueezedParams::SqueezedParams(int n_modes, double r, int max_modes)
    : n_modes_(n_modes), r_(r) {
  if (n_modes < 1) {
    throw std::invalid_argument("SqueezedParams: n_modes must be >= 1, got " +
                                std::to_string(n_modes));
  }
  if (n_modes > max_modes) {
    throw std::invalid_argument("SqueezedParams: n_modes " + std::to_string(n_modes) +
                                " exceeds configured maximum " + std::to_string(max_modes));
  }
  if (!std::isfinite(r)) {
    throw std::invalid_argument("SqueezedParams: squeezing parameter r must be finite");
  }
}

SettingTable SettingTable::zeros(int n_parties) {
  SettingTable t;
  t.rows.assign(static_cast<std::size_t>(n_parties), {Displacement{}, Displacement{}});
  return t;
}

void validate_setting_table(const SqueezedParams& params, const SettingTable& table) {
  if (table.n_parties() != params.n_modes()) {
    throw std::invalid_argument(
        "setting table has " + std::to_string(table.n_parties()) +
        " rows but params describe " + std::to_string(params.n_modes()) + " modes");
  }
  for (int i = 0; i < table.n_parties(); ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!table.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].is_finite()) {
        throw std::invalid_argument("setting table entry [" + std::to_string(i) + "][" +
                                    std::to_string(j) + "] is not finite");
      }
    }
  }
}

std::size_t setting_word_to_index(const std::vector<int>& word) {
  std::size_t idx = 0;
  for (int k : word) {
    if (k != 1 && k != 2) {
      throw std::invalid_argument("setting word entries must be 1 or 2, got " +
                                  std::to_string(k));
    }
    idx = (idx << 1) | static_cast<std::size_t>(k - 1);
  }
  return idx;
}

std::vector<int> index_to_setting_word(std::size_t index, int n_modes) {
  if (n_modes < 1 || n_modes > 63) {
    throw std::invalid_argument("index_to_setting_word: bad mode count");
  }
  if (index >= (std::size_t{1} << n_modes)) {
    throw std::invalid_argument("index_to_setting_word: index out of range");
  }
  std::vector<int> word(static_cast<std::size_t>(n_modes));
  for (int i = 0; i < n_modes; ++i) {
    word[static_cast<std::size_t>(i)] =
        static_cast<int>((index >> (n_modes - 1 - i)) & 1u) + 1;
  }
  return word;
}

CorrelationTensor::CorrelationTensor(int n_modes, std::vector<double> values)
    : n_modes_(n_modes), values_(std::move(values)) {
  if (n_modes < 1) {
    throw std::invalid_argument("CorrelationTensor: n_modes must be >= 1");
  }
  const std::size_t expected = std::size_t{1} << n_modes;
  if (values_.size() != expected) {
    throw std::invalid_argument("CorrelationTensor: expected " + std::to_string(expected) +
                                " values for N=" + std::to_string(n_modes) + ", got " +
                                std::to_string(values_.size()));
  }
  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < -1.0 - kTol || v > 1.0 + kTol) {
      throw std::invalid_argument("CorrelationTensor: value at index " + std::to_string(i) +
                                  " (" + std::to_string(v) + ") outside [-1, 1]");
    }
  }
}

void validate_bell_form(const BellForm& form) {
  if (form.n_modes < 1) {
    throw std::invalid_argument("BellForm: n_modes must be >= 1");
  }
  const std::size_t expected = std::size_t{1} << form.n_modes;
  if (form.coefficients.size() != expected) {
    throw std::invalid_argument("BellForm '" + form.name + "': expected " +
                                std::to_string(expected) + " coefficients, got " +
                                std::to_string(form.coefficients.size()));
  }
  if (!(form.classical_bound > 0.0)) {
    throw std::invalid_argument("BellForm '" + form.name + "': classical bound must be > 0");
  }
}

}  // namespace cvbell
