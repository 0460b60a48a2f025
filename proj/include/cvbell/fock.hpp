#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <span>
#include <vector>

#include "cvbell/types.hpp"

namespace cvbell::fock {

using SparseReal = Eigen::SparseMatrix<double>;

struct WorkspaceLimits {
  std::size_t dimension_cap = 200000;
  int max_modes = 4;  // no oracle path beyond this
};

/// Truncated number-basis workspace: per-mode ladder block, full-space
/// annihilation operators and the joint parity diagonal. Basis order is
/// lexicographic |n_1 n_2 ... n_N> with mode 1 most significant.
class FockWorkspace {
 public:
  static FockWorkspace build(const SqueezedParams& params, int cutoff,
                             const WorkspaceLimits& limits = {});

  int n_modes() const { return n_modes_; }
  int cutoff() const { return cutoff_; }
  std::size_t dim() const { return dim_; }

  /// d x d annihilation block: <n-1|a|n> = sqrt(n).
  const Eigen::MatrixXd& mode_annihilation() const { return mode_annihilation_; }
  /// Full-space annihilation operator of the given mode (zero-based).
  const SparseReal& annihilation(int mode) const { return annihilation_[static_cast<std::size_t>(mode)]; }
  /// Diagonal of (-1)^{n_1+...+n_N}; entries are exactly +-1.
  const Eigen::VectorXd& parity() const { return parity_; }
  int total_photons(std::size_t index) const { return total_photons_[index]; }
  /// Basis indices with total photon number <= max_total.
  std::vector<std::size_t> low_photon_indices(int max_total) const;

 private:
  FockWorkspace() = default;

  int n_modes_ = 0;
  int cutoff_ = 0;
  std::size_t dim_ = 0;
  Eigen::MatrixXd mode_annihilation_;
  std::vector<SparseReal> annihilation_;
  Eigen::VectorXd parity_;
  std::vector<int> total_photons_;
};

/// SU(1,1) generator triple on the truncated space. w_minus is the transpose
/// of w_plus (both real); b is diagonal with entries (sum n_i)/2 + N/4.
struct GeneratorSet {
  SparseReal w_plus;
  SparseReal w_minus;
  Eigen::VectorXd b_diag;
};

/// W+ = (2-N)/(2N) sum_i a_i^dag^2 + (2/N) sum_{i<j} a_i^dag a_j^dag, etc.
GeneratorSet build_generators(const FockWorkspace& ws);

struct CommutatorResiduals {
  double closure;       // max entry of [W+, W-] + 2B
  double plus_shift;    // max entry of [W+, B] + W+
  double minus_shift;   // max entry of [W-, B] - W-
};

/// Max-magnitude entries of the three algebra residuals, restricted to the
/// sub-block of states with total photon number <= d-3 (rows and columns),
/// where truncation cannot corrupt the identities. Requires cutoff >= 4.
CommutatorResiduals commutator_residuals(const GeneratorSet& gen, const FockWorkspace& ws);

/// exp(A) v by scaled Taylor summation; A is applied only through matvecs.
Eigen::VectorXd expm_action(const SparseReal& a, const Eigen::VectorXd& v);
Eigen::MatrixXd expm_action(const SparseReal& a, const Eigen::MatrixXd& v);

struct SqueezedState {
  Eigen::VectorXd amplitudes;  // normalized, real in this basis
  double leakage;              // |1 - norm before renormalization|
};

/// exp[r(W+ - W-)] |0...0>, renormalized after truncation. Throws when the
/// truncation leakage exceeds leakage_tolerance (cutoff too small).
SqueezedState squeezed_state_vector(const SqueezedParams& params, const FockWorkspace& ws,
                                    double leakage_tolerance = 1e-6);

/// Number-basis displacement matrix from the Gaussian-prefactor x associated
/// Laguerre closed form. Satisfies displacement_matrix(-alpha) ==
/// displacement_matrix(alpha)^dag exactly, truncation aside.
Eigen::MatrixXcd displacement_matrix(const Displacement& alpha, int cutoff);

/// Applies a one-mode operator to the given mode of a full-space vector.
Eigen::VectorXcd apply_mode_operator(const Eigen::MatrixXcd& op, int mode,
                                     const Eigen::VectorXcd& psi, const FockWorkspace& ws);

/// <state| prod_i D(alpha_i) (-1)^{sum n} prod_i D(alpha_i)^{-1} |state>.
/// Throws if the imaginary residual exceeds 1e-10.
double displaced_parity_expectation(const Eigen::VectorXd& state,
                                    std::span<const Displacement> displacements,
                                    const FockWorkspace& ws);

/// Max over modes i of the operator norm of
///   V^{-1} a_i V - [cosh r a_i + sinh r ((2-N)/N a_i^dag + (2/N) sum_{j!=i} a_j^dag)]
/// on the sub-block with total photon number <= d/2. Requires cutoff >= 4.
double bogoliubov_residual(const SqueezedParams& params, const FockWorkspace& ws);

/// ||P (V^dag V - I) P||_max on the low-photon sub-block (total <= d/2).
double squeeze_unitarity_residual(const SqueezedParams& params, const FockWorkspace& ws);

}  // namespace cvbell::fock
