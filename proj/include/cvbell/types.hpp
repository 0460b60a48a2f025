#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace cvbell {

inline constexpr int kDefaultMaxModes = 10;

/// One phase-space displacement alpha = re + i*im (dimensionless units).
struct Displacement {
  double re = 0.0;
  double im = 0.0;

  double abs2() const { return re * re + im * im; }
  bool is_finite() const;
};

/// Mode count N and squeezing parameter r of the N-mode squeezed vacuum.
/// Immutable after construction; the constructor validates.
class SqueezedParams {
 public:
  SqueezedParams(int n_modes, double r, int max_modes = kDefaultMaxModes);

  int n_modes() const { return n_modes_; }
  double r() const { return r_; }

 private:
  int n_modes_;
  double r_;
};

/// N x 2 table of displacement settings; rows[i][j] is party i's setting j
/// (both zero-based; the physics convention alpha_i^j uses one-based i, j).
struct SettingTable {
  std::vector<std::array<Displacement, 2>> rows;

  int n_parties() const { return static_cast<int>(rows.size()); }

  static SettingTable zeros(int n_parties);
};

/// Throws std::invalid_argument unless the table has params.n_modes() rows
/// and every entry is finite. Error messages name the offending sizes/index.
void validate_setting_table(const SqueezedParams& params, const SettingTable& table);

// Flat-index convention for joint-setting words (k_1, ..., k_N), k_i in {1,2}:
// party 1 owns the most significant bit, and setting k maps to bit value k-1.
std::size_t setting_word_to_index(const std::vector<int>& word);
std::vector<int> index_to_setting_word(std::size_t index, int n_modes);

/// 2^N correlation values E(k_1,...,k_N), one per joint setting choice,
/// stored flat under the word->index convention above. Entries are parity
/// expectations and must lie in [-1, 1] (tolerance 1e-12 at construction).
class CorrelationTensor {
 public:
  CorrelationTensor(int n_modes, std::vector<double> values);

  int n_modes() const { return n_modes_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  int n_modes_;
  std::vector<double> values_;
};

/// Signed coefficient table over the 2^N tensor entries plus the bound the
/// combination satisfies under any local-realistic model.
struct BellForm {
  int n_modes = 0;
  std::vector<double> coefficients;
  double classical_bound = 0.0;
  std::string name;
};

void validate_bell_form(const BellForm& form);

}  // namespace cvbell
