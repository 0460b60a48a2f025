#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include "cvbell/fock.hpp"
#include "cvbell/kernel.hpp"

using namespace cvbell;
using fock::FockWorkspace;

TEST_CASE("workspace ladder and parity blocks") {
  const FockWorkspace ws = FockWorkspace::build(SqueezedParams(1, 0.0), 3);
  const Eigen::MatrixXd& a = ws.mode_annihilation();
  CHECK(a(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a(1, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(a(0, 0) == 0.0);
  CHECK(a(2, 1) == 0.0);

  const FockWorkspace ws2 = FockWorkspace::build(SqueezedParams(2, 0.0), 2);
  REQUIRE(ws2.dim() == 4);
  CHECK(ws2.parity()[0] == 1.0);
  CHECK(ws2.parity()[1] == -1.0);
  CHECK(ws2.parity()[2] == -1.0);
  CHECK(ws2.parity()[3] == 1.0);

  // full-space annihilation is the conjugate transpose of creation by
  // construction; spot-check an entry of a_0 on |n0 n1> ordering
  const Eigen::MatrixXd dense = Eigen::MatrixXd(ws2.annihilation(0));
  CHECK(dense(0, 2) == doctest::Approx(1.0).epsilon(1e-15));  // a_0 |10> = |00>
  CHECK(dense(1, 3) == doctest::Approx(1.0).epsilon(1e-15));  // a_0 |11> = |01>
}

TEST_CASE("workspace limits") {
  CHECK_THROWS_AS(FockWorkspace::build(SqueezedParams(2, 0.0), 1), std::invalid_argument);
  // 40^3 = 64000 fits the default cap, a lowered cap rejects it
  CHECK_NOTHROW(FockWorkspace::build(SqueezedParams(3, 0.0), 40));
  fock::WorkspaceLimits tight;
  tight.dimension_cap = 10000;
  CHECK_THROWS_AS(FockWorkspace::build(SqueezedParams(3, 0.0), 40, tight),
                  std::invalid_argument);
  CHECK_THROWS_AS(FockWorkspace::build(SqueezedParams(5, 0.0), 4), std::invalid_argument);
}

TEST_CASE("generator coefficients") {
  SUBCASE("N=2 reduces to the two-mode pair generator") {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(2, 0.0), 6);
    const fock::GeneratorSet gen = fock::build_generators(ws);
    const Eigen::MatrixXd w = Eigen::MatrixXd(gen.w_plus);
    const Eigen::MatrixXd pair =
        Eigen::MatrixXd(ws.annihilation(0)).transpose() *
        Eigen::MatrixXd(ws.annihilation(1)).transpose();
    CHECK((w - pair).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("N=3 self and pair coefficients") {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(3, 0.0), 4);
    const fock::GeneratorSet gen = fock::build_generators(ws);
    const Eigen::MatrixXd w = Eigen::MatrixXd(gen.w_plus);
    // <200|W+|000> = x sqrt(2) with x = (2-3)/6
    const int idx200 = 2 * 16;
    CHECK(w(idx200, 0) == doctest::Approx(-std::sqrt(2.0) / 6.0).epsilon(1e-14));
    // <110|W+|000> = y = 2/3
    const int idx110 = 16 + 4;
    CHECK(w(idx110, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }

  SUBCASE("N=1 single-mode squeezing") {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(1, 0.0), 6);
    const fock::GeneratorSet gen = fock::build_generators(ws);
    const Eigen::MatrixXd w = Eigen::MatrixXd(gen.w_plus);
    CHECK(w(2, 0) == doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(w(3, 1) == doctest::Approx(0.5 * std::sqrt(6.0)).epsilon(1e-14));
  }

  SUBCASE("structural invariants") {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(3, 0.0), 5);
    const fock::GeneratorSet gen = fock::build_generators(ws);
    const Eigen::MatrixXd diff =
        Eigen::MatrixXd(gen.w_minus) - Eigen::MatrixXd(gen.w_plus).transpose();
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t i = 0; i < ws.dim(); ++i) {
      CHECK(gen.b_diag[static_cast<Eigen::Index>(i)] ==
            doctest::Approx(0.5 * ws.total_photons(i) + 0.75).epsilon(1e-15));
    }
  }
}

TEST_CASE("commutator residuals vanish away from the truncation boundary") {
  {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(2, 0.0), 12);
    const auto res = fock::commutator_residuals(fock::build_generators(ws), ws);
    CHECK(res.closure <= 1e-12);
    CHECK(res.plus_shift <= 1e-12);
    CHECK(res.minus_shift <= 1e-12);
  }
  {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(3, 0.0), 8);
    const auto res = fock::commutator_residuals(fock::build_generators(ws), ws);
    CHECK(res.closure <= 1e-12);
    CHECK(res.plus_shift <= 1e-12);
    CHECK(res.minus_shift <= 1e-12);
  }
  {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(2, 0.0), 3);
    const auto gen = fock::build_generators(ws);
    CHECK_THROWS_AS(fock::commutator_residuals(gen, ws), std::invalid_argument);
  }
}

TEST_CASE("sparse exponential action agrees with a dense exponential") {
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int dim = 60;
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < 400; ++k) {
    trip.emplace_back(static_cast<int>(rng() % dim), static_cast<int>(rng() % dim), u(rng));
  }
  fock::SparseReal a(dim, dim);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = u(rng);

  const Eigen::MatrixXd dense = Eigen::MatrixXd(a).exp();
  const Eigen::VectorXd want = dense * v;
  const Eigen::VectorXd got = fock::expm_action(a, v);
  CHECK((want - got).cwiseAbs().maxCoeff() <= 1e-10 * want.cwiseAbs().maxCoeff());
}

TEST_CASE("dense matrix exponential contract") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXcd a(12, 12);
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        a(i, j) = std::complex<double>(u(rng), u(rng));
      }
    }
    const Eigen::MatrixXcd prod = a.exp() * (-a).exp();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(12, 12);
    CHECK((prod - eye).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("squeezed state vector") {
  SUBCASE("r = 0 gives the exact vacuum") {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(2, 0.0), 8);
    const auto state = fock::squeezed_state_vector(SqueezedParams(2, 0.0), ws);
    CHECK(state.leakage == 0.0);
    CHECK(state.amplitudes[0] == 1.0);
    CHECK(state.amplitudes.tail(state.amplitudes.size() - 1).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("two-mode amplitudes follow tanh^n / cosh") {
    const double r = 0.3;
    const int d = 24;
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(2, r), d);
    const auto state = fock::squeezed_state_vector(SqueezedParams(2, r), ws);
    for (int n1 = 0; n1 < d; ++n1) {
      for (int n2 = 0; n2 < d; ++n2) {
        const double amp = state.amplitudes[n1 * d + n2];
        if (n1 == n2) {
          const double want = std::pow(std::tanh(r), n1) / std::cosh(r);
          CHECK(amp == doctest::Approx(want).epsilon(1e-10));
        } else {
          CHECK(std::abs(amp) <= 1e-12);
        }
      }
    }
  }

  SUBCASE("three-mode leakage is tiny at moderate squeezing") {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(3, 0.2), 12);
    const auto state = fock::squeezed_state_vector(SqueezedParams(3, 0.2), ws);
    CHECK(state.leakage <= 1e-10);
  }

  SUBCASE("insufficient cutoff is reported") {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(2, 2.5), 8);
    CHECK_THROWS_AS(fock::squeezed_state_vector(SqueezedParams(2, 2.5), ws, 1e-6),
                    std::runtime_error);
  }

  SUBCASE("squeeze unitary stays orthonormal on the low-photon block") {
    const FockWorkspace ws = FockWorkspace::build(SqueezedParams(2, 0.3), 16);
    CHECK(fock::squeeze_unitarity_residual(SqueezedParams(2, 0.3), ws) <= 1e-10);
    const FockWorkspace ws3 = FockWorkspace::build(SqueezedParams(3, 0.2), 10);
    CHECK(fock::squeeze_unitarity_residual(SqueezedParams(3, 0.2), ws3) <= 1e-10);
  }
}

TEST_CASE("displacement matrix") {
  SUBCASE("alpha = 0 is the identity") {
    const Eigen::MatrixXcd d = fock::displacement_matrix(Displacement{0, 0}, 10);
    CHECK((d - Eigen::MatrixXcd::Identity(10, 10)).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("vacuum overlap and coherent column") {
    const Displacement alpha{0.5, 0.0};
    const Eigen::MatrixXcd d = fock::displacement_matrix(alpha, 16);
    CHECK(d(0, 0).real() == doctest::Approx(std::exp(-0.125)).epsilon(1e-14));
    double factorial = 1.0;
    for (int n = 0; n < 16; ++n) {
      if (n > 0) factorial *= n;
      const double want = std::exp(-0.125) * std::pow(0.5, n) / std::sqrt(factorial);
      CHECK(d(n, 0).real() == doctest::Approx(want).epsilon(1e-12));
      CHECK(d(n, 0).imag() == doctest::Approx(0.0).epsilon(1e-14));
    }
  }

  SUBCASE("closed form matches the dense exponential construction") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    const int d = 32;
    Eigen::MatrixXcd ladder = Eigen::MatrixXcd::Zero(d, d);
    for (int m = 1; m < d; ++m) ladder(m - 1, m) = std::sqrt(static_cast<double>(m));
    for (int trial = 0; trial < 6; ++trial) {
      const Displacement alpha{u(rng), u(rng)};
      const std::complex<double> a(alpha.re, alpha.im);
      const Eigen::MatrixXcd generator = a * ladder.adjoint() - std::conj(a) * ladder;
      const Eigen::MatrixXcd via_exp = generator.exp();
      const Eigen::MatrixXcd closed = fock::displacement_matrix(alpha, d);
      // the two constructions only differ by truncation, which decays fast
      // below the boundary; compare the low block
      CHECK((via_exp - closed).topLeftCorner(10, 10).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }

  SUBCASE("unitary on the low-photon block") {
    const Eigen::MatrixXcd d = fock::displacement_matrix(Displacement{0.4, -0.3}, 24);
    const Eigen::MatrixXcd gram = d.adjoint() * d;
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(24, 24);
    CHECK((gram - eye).topLeftCorner(8, 8).cwiseAbs().maxCoeff() <= 1e-10);
  }

  SUBCASE("adjoint identity used for the inverse") {
    const Displacement alpha{0.7, 0.2};
    const Eigen::MatrixXcd plus = fock::displacement_matrix(alpha, 12);
    const Eigen::MatrixXcd minus = fock::displacement_matrix(Displacement{-0.7, -0.2}, 12);
    CHECK((minus - plus.adjoint()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("displaced parity expectation") {
  SUBCASE("vacuum cases") {
    const SqueezedParams params(2, 0.0);
    const FockWorkspace ws = FockWorkspace::build(params, 20);
    const auto vac = fock::squeezed_state_vector(params, ws);
    const std::vector<Displacement> zeros = {{0, 0}, {0, 0}};
    CHECK(fock::displaced_parity_expectation(vac.amplitudes, zeros, ws) ==
          doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (int trial = 0; trial < 20; ++trial) {
      const std::vector<Displacement> disp = {{u(rng), u(rng)}, {u(rng), u(rng)}};
      const double want = std::exp(-2.0 * (disp[0].abs2() + disp[1].abs2()));
      CHECK(fock::displaced_parity_expectation(vac.amplitudes, disp, ws) ==
            doctest::Approx(want).epsilon(1e-10));
    }
  }

  SUBCASE("squeezed two-mode point agrees with the kernel") {
    const SqueezedParams params(2, 0.3);
    const FockWorkspace ws = FockWorkspace::build(params, 24);
    const auto state = fock::squeezed_state_vector(params, ws);
    const std::vector<Displacement> disp = {{0.2, 0.0}, {-0.1, 0.1}};
    const double oracle = fock::displaced_parity_expectation(state.amplitudes, disp, ws);
    const double kernel = squeezed_correlation(params, disp);
    CHECK(std::abs(oracle - kernel) <= 1e-6);
    CHECK(oracle >= -1.0);
    CHECK(oracle <= 1.0);
  }

  SUBCASE("single nonzero displacement at r=0.5 agrees with the kernel") {
    const SqueezedParams params(2, 0.5);
    const FockWorkspace ws = FockWorkspace::build(params, 24);
    const auto state = fock::squeezed_state_vector(params, ws);
    const std::vector<Displacement> disp = {{0.3, 0.0}, {0.0, 0.0}};
    const double oracle = fock::displaced_parity_expectation(state.amplitudes, disp, ws);
    CHECK(std::abs(oracle - std::exp(-2.0 * std::cosh(1.0) * 0.09)) <= 1e-6);
  }

  SUBCASE("wrong displacement count is rejected") {
    const SqueezedParams params(2, 0.0);
    const FockWorkspace ws = FockWorkspace::build(params, 8);
    const auto vac = fock::squeezed_state_vector(params, ws);
    const std::vector<Displacement> one = {{0, 0}};
    CHECK_THROWS_AS(fock::displaced_parity_expectation(vac.amplitudes, one, ws),
                    std::invalid_argument);
  }
}

TEST_CASE("squeezed expectation equals the vacuum expectation of the conjugated operator") {
  // <r| Pi |r> computed directly vs pulling V through to the vacuum side.
  const SqueezedParams params(2, 0.25);
  const FockWorkspace ws = FockWorkspace::build(params, 16);
  const auto gen = fock::build_generators(ws);
  const fock::SparseReal a_gen(params.r() * (gen.w_plus - gen.w_minus));
  const fock::SparseReal a_gen_neg(-params.r() * (gen.w_plus - gen.w_minus));

  Eigen::VectorXd vacuum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ws.dim()));
  vacuum[0] = 1.0;
  const Eigen::VectorXd v_vac = fock::expm_action(a_gen, vacuum);

  const std::vector<Displacement> disp = {{0.3, -0.2}, {0.1, 0.4}};
  Eigen::VectorXcd phi = v_vac.cast<std::complex<double>>();
  std::vector<Eigen::MatrixXcd> blocks;
  for (const auto& alpha : disp) blocks.push_back(fock::displacement_matrix(alpha, ws.cutoff()));
  for (int i = 0; i < 2; ++i) phi = fock::apply_mode_operator(blocks[i].adjoint(), i, phi, ws);
  phi = ws.parity().cast<std::complex<double>>().asDiagonal() * phi;
  for (int i = 0; i < 2; ++i) phi = fock::apply_mode_operator(blocks[i], i, phi, ws);

  // route A: expectation in |r> (normalized V|0>)
  const double norm = v_vac.norm();
  const double route_a = (v_vac.cast<std::complex<double>>().dot(phi)).real() / (norm * norm);

  // route B: push V back onto the operator and take the vacuum expectation
  const Eigen::VectorXd re_part = phi.real();
  const Eigen::VectorXd im_part = phi.imag();
  const Eigen::VectorXd back_re = fock::expm_action(a_gen_neg, re_part);
  const Eigen::VectorXd back_im = fock::expm_action(a_gen_neg, im_part);
  const double route_b = back_re[0];  // <0| V^{-1} Pi V |0>

  CHECK(std::abs(route_a - route_b) <= 1e-8);
  CHECK(std::abs(back_im[0]) <= 1e-10);
}

TEST_CASE("bogoliubov residuals") {
  SUBCASE("r = 0 is exact") {
    const SqueezedParams params(2, 0.0);
    const FockWorkspace ws = FockWorkspace::build(params, 8);
    CHECK(fock::bogoliubov_residual(params, ws) <= 1e-14);
  }
  SUBCASE("two modes") {
    const SqueezedParams params(2, 0.3);
    const FockWorkspace ws = FockWorkspace::build(params, 24);
    CHECK(fock::bogoliubov_residual(params, ws) <= 1e-6);
  }
  SUBCASE("three modes") {
    const SqueezedParams params(3, 0.2);
    const FockWorkspace ws = FockWorkspace::build(params, 12);
    CHECK(fock::bogoliubov_residual(params, ws) <= 1e-5);
  }
  SUBCASE("cutoff too small") {
    const SqueezedParams params(2, 0.1);
    const FockWorkspace ws = FockWorkspace::build(params, 3);
    CHECK_THROWS_AS(fock::bogoliubov_residual(params, ws), std::invalid_argument);
  }
}

TEST_CASE("cutoff doubling stability for derived expectations") {
  const SqueezedParams params(3, 0.2);
  const FockWorkspace coarse = FockWorkspace::build(params, 12);
  const FockWorkspace fine = FockWorkspace::build(params, 24);
  const auto state_c = fock::squeezed_state_vector(params, coarse);
  const auto state_f = fock::squeezed_state_vector(params, fine);
  CHECK(state_c.leakage <= 1e-10);

  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<Displacement> disp = {{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
    const double coarse_val = fock::displaced_parity_expectation(state_c.amplitudes, disp, coarse);
    const double fine_val = fock::displaced_parity_expectation(state_f.amplitudes, disp, fine);
    CHECK(std::abs(coarse_val - fine_val) <= 1e-6);
    CHECK(std::abs(fine_val - squeezed_correlation(params, disp)) <= 1e-6);
  }
}
