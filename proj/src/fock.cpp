#include "cvbell/fock.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace cvbell::fock {

namespace {

using Triplet = Eigen::Triplet<double>;

std::size_t checked_power(int base, int exponent, std::size_t cap) {
  std::size_t dim = 1;
  for (int i = 0; i < exponent; ++i) {
    if (dim > cap / static_cast<std::size_t>(base)) {
      return cap + 1;  // saturate: caller reports the violation
    }
    dim *= static_cast<std::size_t>(base);
  }
  return dim;
}

std::size_t plain_power(int base, int exponent) {
  std::size_t dim = 1;
  for (int i = 0; i < exponent; ++i) dim *= static_cast<std::size_t>(base);
  return dim;
}

void decode_occupancies(std::size_t index, int n, int cutoff, std::vector<int>& occ) {
  for (int i = n - 1; i >= 0; --i) {
    occ[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(cutoff));
    index /= static_cast<std::size_t>(cutoff);
  }
}

SparseReal build_annihilation(int n, int cutoff, int mode) {
  const std::size_t dim = plain_power(cutoff, n);
  std::size_t stride = 1;
  for (int i = mode + 1; i < n; ++i) stride *= static_cast<std::size_t>(cutoff);
  std::vector<Triplet> trip;
  trip.reserve(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const int occ = static_cast<int>((idx / stride) % static_cast<std::size_t>(cutoff));
    if (occ >= 1) {
      trip.emplace_back(static_cast<int>(idx - stride), static_cast<int>(idx),
                        std::sqrt(static_cast<double>(occ)));
    }
  }
  SparseReal a(static_cast<int>(dim), static_cast<int>(dim));
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

// W+ at an arbitrary cutoff (used for both the workspace generators and the
// internally padded squeezing unitary).
SparseReal build_w_plus(int n, int cutoff) {
  const std::size_t dim = plain_power(cutoff, n);
  const double x = (2.0 - n) / (2.0 * n);
  const double y = 2.0 / n;

  std::vector<std::size_t> stride(static_cast<std::size_t>(n));
  stride[static_cast<std::size_t>(n - 1)] = 1;
  for (int i = n - 2; i >= 0; --i) {
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i + 1)] * static_cast<std::size_t>(cutoff);
  }

  std::vector<Triplet> trip;
  std::vector<int> occ(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    decode_occupancies(idx, n, cutoff, occ);
    if (x != 0.0) {
      for (int i = 0; i < n; ++i) {
        const int ni = occ[static_cast<std::size_t>(i)];
        if (ni + 2 <= cutoff - 1) {
          trip.emplace_back(static_cast<int>(idx + 2 * stride[static_cast<std::size_t>(i)]),
                            static_cast<int>(idx),
                            x * std::sqrt(static_cast<double>((ni + 1) * (ni + 2))));
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int ni = occ[static_cast<std::size_t>(i)];
        const int nj = occ[static_cast<std::size_t>(j)];
        if (ni + 1 <= cutoff - 1 && nj + 1 <= cutoff - 1) {
          trip.emplace_back(
              static_cast<int>(idx + stride[static_cast<std::size_t>(i)] +
                               stride[static_cast<std::size_t>(j)]),
              static_cast<int>(idx),
              y * std::sqrt(static_cast<double>((ni + 1) * (nj + 1))));
        }
      }
    }
  }
  SparseReal w(static_cast<int>(dim), static_cast<int>(dim));
  w.setFromTriplets(trip.begin(), trip.end());
  return w;
}

SparseReal squeeze_generator(int n, int cutoff, double r) {
  const SparseReal w_plus = build_w_plus(n, cutoff);
  return SparseReal(r * (w_plus - SparseReal(w_plus.transpose())));
}

// Pad the cutoff so that exp acts effectively in a larger space before
// projecting back; exp of the truncated antisymmetric generator is exactly
// orthogonal, so truncation loss only becomes visible through the projection.
int padded_cutoff(int n, int cutoff) {
  constexpr std::size_t kPaddedDimCap = 800000;
  int padded = cutoff + std::max(4, cutoff / 2);
  while (padded > cutoff + 2 && checked_power(padded, n, kPaddedDimCap) > kPaddedDimCap) {
    --padded;
  }
  return padded;
}

// Row indices of the small (cutoff d) basis inside the padded (cutoff p) one.
std::vector<Eigen::Index> embedding_indices(int n, int small, int padded) {
  const std::size_t dim = plain_power(small, n);
  std::vector<Eigen::Index> map(dim);
  std::vector<int> occ(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    decode_occupancies(idx, n, small, occ);
    std::size_t big = 0;
    for (int i = 0; i < n; ++i) {
      big = big * static_cast<std::size_t>(padded) + static_cast<std::size_t>(occ[static_cast<std::size_t>(i)]);
    }
    map[idx] = static_cast<Eigen::Index>(big);
  }
  return map;
}

double one_norm(const SparseReal& a) {
  double best = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    double col = 0.0;
    for (SparseReal::InnerIterator it(a, k); it; ++it) {
      col += std::abs(it.value());
    }
    best = std::max(best, col);
  }
  return best;
}

Eigen::MatrixXd basis_columns(std::size_t dim, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                               static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    cols(static_cast<Eigen::Index>(idx[c]), static_cast<Eigen::Index>(c)) = 1.0;
  }
  return cols;
}

Eigen::MatrixXd restrict_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(idx[r]));
  }
  return out;
}

}  // namespace

FockWorkspace FockWorkspace::build(const SqueezedParams& params, int cutoff,
                                   const WorkspaceLimits& limits) {
  if (params.n_modes() > limits.max_modes) {
    throw std::invalid_argument("fock oracle unsupported for N >= " +
                                std::to_string(limits.max_modes + 1) + " (requested N=" +
                                std::to_string(params.n_modes()) + ")");
  }
  if (cutoff < 2) {
    throw std::invalid_argument("fock workspace needs cutoff >= 2, got " +
                                std::to_string(cutoff));
  }
  const int n = params.n_modes();
  const std::size_t dim = checked_power(cutoff, n, limits.dimension_cap);
  if (dim > limits.dimension_cap) {
    throw std::invalid_argument("fock workspace dimension " + std::to_string(cutoff) + "^" +
                                std::to_string(n) + " exceeds cap " +
                                std::to_string(limits.dimension_cap));
  }

  FockWorkspace ws;
  ws.n_modes_ = n;
  ws.cutoff_ = cutoff;
  ws.dim_ = dim;

  ws.mode_annihilation_ = Eigen::MatrixXd::Zero(cutoff, cutoff);
  for (int m = 1; m < cutoff; ++m) {
    ws.mode_annihilation_(m - 1, m) = std::sqrt(static_cast<double>(m));
  }

  ws.total_photons_.resize(dim);
  ws.parity_.resize(static_cast<Eigen::Index>(dim));
  std::vector<int> occ(static_cast<std::size_t>(n));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    decode_occupancies(idx, n, cutoff, occ);
    int total = 0;
    for (int v : occ) total += v;
    ws.total_photons_[idx] = total;
    ws.parity_[static_cast<Eigen::Index>(idx)] = (total % 2 == 0) ? 1.0 : -1.0;
  }

  ws.annihilation_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ws.annihilation_.push_back(build_annihilation(n, cutoff, i));
  }
  return ws;
}

std::vector<std::size_t> FockWorkspace::low_photon_indices(int max_total) const {
  std::vector<std::size_t> out;
  for (std::size_t idx = 0; idx < dim_; ++idx) {
    if (total_photons_[idx] <= max_total) {
      out.push_back(idx);
    }
  }
  return out;
}

GeneratorSet build_generators(const FockWorkspace& ws) {
  GeneratorSet gen;
  gen.w_plus = build_w_plus(ws.n_modes(), ws.cutoff());
  gen.w_minus = SparseReal(gen.w_plus.transpose());
  gen.b_diag.resize(static_cast<Eigen::Index>(ws.dim()));
  for (std::size_t idx = 0; idx < ws.dim(); ++idx) {
    gen.b_diag[static_cast<Eigen::Index>(idx)] =
        0.5 * ws.total_photons(idx) + 0.25 * ws.n_modes();
  }
  return gen;
}

CommutatorResiduals commutator_residuals(const GeneratorSet& gen, const FockWorkspace& ws) {
  if (ws.cutoff() < 4) {
    throw std::invalid_argument("commutator_residuals: cutoff too small (need d >= 4, got " +
                                std::to_string(ws.cutoff()) + ")");
  }
  const int keep = ws.cutoff() - 3;
  auto in_block = [&](int idx) { return ws.total_photons(static_cast<std::size_t>(idx)) <= keep; };

  const int dim = static_cast<int>(ws.dim());
  SparseReal two_b(dim, dim);
  {
    std::vector<Triplet> trip;
    trip.reserve(ws.dim());
    for (int i = 0; i < dim; ++i) {
      trip.emplace_back(i, i, 2.0 * gen.b_diag[i]);
    }
    two_b.setFromTriplets(trip.begin(), trip.end());
  }
  SparseReal closure = SparseReal(gen.w_plus * gen.w_minus) -
                       SparseReal(gen.w_minus * gen.w_plus) + two_b;
  CommutatorResiduals res{0.0, 0.0, 0.0};
  for (int k = 0; k < closure.outerSize(); ++k) {
    for (SparseReal::InnerIterator it(closure, k); it; ++it) {
      if (!in_block(it.row()) || !in_block(it.col())) continue;
      res.closure = std::max(res.closure, std::abs(it.value()));
    }
  }

  // B is diagonal, so [W, B] rescales entries: ([W+,B])_{rc} = W+_{rc} (b_c - b_r).
  for (int k = 0; k < gen.w_plus.outerSize(); ++k) {
    for (SparseReal::InnerIterator it(gen.w_plus, k); it; ++it) {
      if (!in_block(it.row()) || !in_block(it.col())) continue;
      const double shift = gen.b_diag[it.col()] - gen.b_diag[it.row()];
      res.plus_shift = std::max(res.plus_shift, std::abs(it.value() * (shift + 1.0)));
    }
  }
  for (int k = 0; k < gen.w_minus.outerSize(); ++k) {
    for (SparseReal::InnerIterator it(gen.w_minus, k); it; ++it) {
      if (!in_block(it.row()) || !in_block(it.col())) continue;
      const double shift = gen.b_diag[it.col()] - gen.b_diag[it.row()];
      res.minus_shift = std::max(res.minus_shift, std::abs(it.value() * (shift - 1.0)));
    }
  }
  return res;
}

Eigen::MatrixXd expm_action(const SparseReal& a, const Eigen::MatrixXd& v) {
  const double norm = one_norm(a);
  const int steps = std::max(1, static_cast<int>(std::ceil(norm)));
  const double inv = 1.0 / steps;

  Eigen::MatrixXd y = v;
  for (int s = 0; s < steps; ++s) {
    Eigen::MatrixXd term = y;
    Eigen::MatrixXd acc = y;
    for (int k = 1; k <= 80; ++k) {
      term = (a * term) * (inv / k);
      acc += term;
      if (term.cwiseAbs().maxCoeff() <= 1e-18 * acc.cwiseAbs().maxCoeff()) {
        break;
      }
    }
    y = std::move(acc);
  }
  return y;
}

Eigen::VectorXd expm_action(const SparseReal& a, const Eigen::VectorXd& v) {
  return Eigen::VectorXd(expm_action(a, Eigen::MatrixXd(v)));
}

SqueezedState squeezed_state_vector(const SqueezedParams& params, const FockWorkspace& ws,
                                    double leakage_tolerance) {
  const int n = ws.n_modes();
  const int padded = padded_cutoff(n, ws.cutoff());
  const SparseReal generator = squeeze_generator(n, padded, params.r());

  Eigen::VectorXd vacuum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(plain_power(padded, n)));
  vacuum[0] = 1.0;
  const Eigen::VectorXd big = expm_action(generator, vacuum);

  const auto embed = embedding_indices(n, ws.cutoff(), padded);
  Eigen::VectorXd psi(static_cast<Eigen::Index>(ws.dim()));
  for (std::size_t i = 0; i < ws.dim(); ++i) {
    psi[static_cast<Eigen::Index>(i)] = big[embed[i]];
  }
  const double norm = psi.norm();
  const double leakage = std::abs(1.0 - norm);
  if (leakage > leakage_tolerance) {
    throw std::runtime_error("squeezed_state_vector: truncation leakage " +
                             std::to_string(leakage) + " exceeds tolerance " +
                             std::to_string(leakage_tolerance) + "; increase the cutoff");
  }
  psi /= norm;
  return SqueezedState{std::move(psi), leakage};
}

Eigen::MatrixXcd displacement_matrix(const Displacement& alpha, int cutoff) {
  if (cutoff < 2) {
    throw std::invalid_argument("displacement_matrix: cutoff must be >= 2");
  }
  const std::complex<double> a(alpha.re, alpha.im);
  const double x = alpha.abs2();
  const double gauss = std::exp(-0.5 * x);

  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  for (int m = 0; m < cutoff; ++m) {
    for (int n = 0; n < cutoff; ++n) {
      const int p = std::min(m, n);
      const int k = std::abs(m - n);
      // sqrt(p!/(p+k)!) and alpha^k (or (-conj alpha)^k below the diagonal)
      double ratio = 1.0;
      for (int j = p + 1; j <= p + k; ++j) {
        ratio /= std::sqrt(static_cast<double>(j));
      }
      std::complex<double> pow(1.0, 0.0);
      const std::complex<double> base = (m >= n) ? a : -std::conj(a);
      for (int j = 0; j < k; ++j) {
        pow *= base;
      }
      // associated Laguerre L_p^{(k)}(x) by upward recurrence in the degree
      double lag_prev = 1.0;
      double lag = 1.0 + k - x;
      double value = (p == 0) ? lag_prev : lag;
      for (int q = 1; q < p; ++q) {
        const double next = ((2.0 * q + 1.0 + k - x) * lag - (q + k) * lag_prev) / (q + 1.0);
        lag_prev = lag;
        lag = next;
        value = next;
      }
      d(m, n) = gauss * ratio * pow * value;
    }
  }
  return d;
}

Eigen::VectorXcd apply_mode_operator(const Eigen::MatrixXcd& op, int mode,
                                     const Eigen::VectorXcd& psi, const FockWorkspace& ws) {
  const int d = ws.cutoff();
  const int n = ws.n_modes();
  if (op.rows() != d || op.cols() != d) {
    throw std::invalid_argument("apply_mode_operator: operator block must be d x d");
  }
  if (mode < 0 || mode >= n) {
    throw std::invalid_argument("apply_mode_operator: mode index out of range");
  }
  std::size_t inner = 1;
  for (int i = mode + 1; i < n; ++i) {
    inner *= static_cast<std::size_t>(d);
  }
  const std::size_t outer = ws.dim() / (inner * static_cast<std::size_t>(d));

  Eigen::VectorXcd out(psi.size());
  Eigen::VectorXcd slice(d), mapped(d);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * inner * static_cast<std::size_t>(d);
    for (std::size_t b = 0; b < inner; ++b) {
      for (int q = 0; q < d; ++q) {
        slice[q] = psi[static_cast<Eigen::Index>(base + static_cast<std::size_t>(q) * inner + b)];
      }
      mapped.noalias() = op * slice;
      for (int q = 0; q < d; ++q) {
        out[static_cast<Eigen::Index>(base + static_cast<std::size_t>(q) * inner + b)] = mapped[q];
      }
    }
  }
  return out;
}

double displaced_parity_expectation(const Eigen::VectorXd& state,
                                    std::span<const Displacement> displacements,
                                    const FockWorkspace& ws) {
  if (static_cast<int>(displacements.size()) != ws.n_modes()) {
    throw std::invalid_argument("displaced_parity_expectation: expected " +
                                std::to_string(ws.n_modes()) + " displacements, got " +
                                std::to_string(displacements.size()));
  }
  Eigen::VectorXcd psi = state.cast<std::complex<double>>();
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(displacements.size());
  for (const Displacement& alpha : displacements) {
    blocks.push_back(displacement_matrix(alpha, ws.cutoff()));
  }
  // D(alpha)^{-1} = D(alpha)^dag holds exactly for the closed-form blocks.
  Eigen::VectorXcd phi = psi;
  for (int i = 0; i < ws.n_modes(); ++i) {
    phi = apply_mode_operator(blocks[static_cast<std::size_t>(i)].adjoint(), i, phi, ws);
  }
  phi = ws.parity().cast<std::complex<double>>().asDiagonal() * phi;
  for (int i = 0; i < ws.n_modes(); ++i) {
    phi = apply_mode_operator(blocks[static_cast<std::size_t>(i)], i, phi, ws);
  }
  const std::complex<double> expectation = psi.dot(phi);
  if (std::abs(expectation.imag()) > 1e-10) {
    throw std::runtime_error("displaced_parity_expectation: imaginary residual " +
                             std::to_string(expectation.imag()) +
                             " exceeds 1e-10; operator construction is inconsistent");
  }
  return expectation.real();
}

double bogoliubov_residual(const SqueezedParams& params, const FockWorkspace& ws) {
  if (ws.cutoff() < 4) {
    throw std::invalid_argument("bogoliubov_residual: cutoff too small (need d >= 4)");
  }
  const int n = ws.n_modes();
  const double r = params.r();

  // The conjugations run in a padded space so that the boundary distortion of
  // the truncated unitary does not reach the probed sub-block.
  const int padded = padded_cutoff(n, ws.cutoff());
  const std::size_t padded_dim = plain_power(padded, n);
  const SparseReal generator = squeeze_generator(n, padded, r);
  const SparseReal generator_neg = SparseReal(-1.0 * generator);
  const auto embed = embedding_indices(n, ws.cutoff(), padded);

  const auto sub = ws.low_photon_indices(ws.cutoff() / 2);
  std::vector<std::size_t> sub_padded(sub.size());
  for (std::size_t c = 0; c < sub.size(); ++c) {
    sub_padded[c] = static_cast<std::size_t>(embed[sub[c]]);
  }

  const Eigen::MatrixXd phi_small = basis_columns(ws.dim(), sub);
  const Eigen::MatrixXd phi_padded = basis_columns(padded_dim, sub_padded);
  const Eigen::MatrixXd v_phi = expm_action(generator, phi_padded);

  const double ch = std::cosh(r);
  const double sh = std::sinh(r);
  const double self_coeff = (2.0 - n) / static_cast<double>(n);
  const double pair_coeff = 2.0 / static_cast<double>(n);

  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const SparseReal a_pad = build_annihilation(n, padded, i);
    const Eigen::MatrixXd lhs_padded = expm_action(generator_neg, Eigen::MatrixXd(a_pad * v_phi));
    const Eigen::MatrixXd lhs = restrict_rows(lhs_padded, sub_padded);

    const SparseReal& a_i = ws.annihilation(i);
    Eigen::MatrixXd rhs = ch * (a_i * phi_small) +
                          (sh * self_coeff) * (a_i.transpose() * phi_small);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      rhs += (sh * pair_coeff) * (ws.annihilation(j).transpose() * phi_small);
    }
    const Eigen::MatrixXd res = lhs - restrict_rows(rhs, sub);
    const double norm = res.jacobiSvd().singularValues()(0);
    worst = std::max(worst, norm);
  }
  return worst;
}

double squeeze_unitarity_residual(const SqueezedParams& params, const FockWorkspace& ws) {
  const SparseReal generator = squeeze_generator(ws.n_modes(), ws.cutoff(), params.r());
  const auto sub = ws.low_photon_indices(ws.cutoff() / 2);
  const Eigen::MatrixXd phi = basis_columns(ws.dim(), sub);
  const Eigen::MatrixXd v_phi = expm_action(generator, phi);
  const Eigen::MatrixXd gram = v_phi.transpose() * v_phi;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace cvbell::fock
