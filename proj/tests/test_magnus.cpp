#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "combgate/constants.hpp"
#include "combgate/magnus.hpp"
#include "toy_oracle.hpp"

using namespace combgate;
using cplx = std::complex<double>;

TEST_CASE("pair propagator on random three-level schemes matches direct integration") {
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 6; ++trial) {
    const toy::ToyCase c = toy::random_case(rng);
    const PulsePairOperator op = pulse_pair_operator(c.model, c.cfg, c.x);
    const Eigen::MatrixXcd ref = toy::direct_pair_propagator(c.model, c.cfg, c.x);
    CAPTURE(trial);
    const double err = toy::opnorm(op.U_raw - ref);
    CHECK(err < 1e-6);
    // The second order is what the test resolves: dropping it must be much worse.
    CHECK(toy::opnorm((op.X).exp() - ref) > 5 * err);
  }
}

TEST_CASE("what second order leaves out is at least third order in the field") {
  // A wrong second order would leave a residual quadratic in the field. Halving the
  // field must shrink it 8x (third order) or 16x (fourth, when X is negligible).
  std::mt19937 rng(424242);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    toy::ToyCase c = toy::random_case(rng);
    const double e1 = toy::opnorm(pulse_pair_operator(c.model, c.cfg, c.x).U_raw -
                                  toy::direct_pair_propagator(c.model, c.cfg, c.x, 1e-13));
    if (e1 < 2e-8) continue;  // would sink into the oracle's own noise after halving
    c.cfg.field_rabi *= 0.5;
    const double e2 = toy::opnorm(pulse_pair_operator(c.model, c.cfg, c.x).U_raw -
                                  toy::direct_pair_propagator(c.model, c.cfg, c.x, 1e-13));
    CAPTURE(trial);
    CHECK(e1 / e2 > 7.0);
    CHECK(e1 / e2 < 17.0);
    ++checked;
  }
  CHECK(checked >= 3);
}

TEST_CASE("exponent is anti-Hermitian without decay") {
  std::mt19937 rng(7);
  const toy::ToyCase c = toy::random_case(rng);
  const PulsePairOperator op = pulse_pair_operator(c.model, c.cfg, c.x);
  CHECK((op.X + op.X.adjoint()).norm() < 1e-15 * (1 + op.X.norm()));
  CHECK((op.Y + op.Y.adjoint()).norm() < 1e-9 * op.Y.norm());
  CHECK((op.U.adjoint() * op.U - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);
  CHECK(op.loss.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single entries agree with the matrix routine") {
  std::mt19937 rng(11);
  const toy::ToyCase c = toy::random_case(rng);
  const Eigen::MatrixXcd Y = magnus_second_order_matrix(c.model, c.cfg, c.x);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      CHECK(std::abs(magnus_second_order(c.model, c.cfg, c.x, a, b) - Y(a, b)) < 1e-12 + 1e-8 * std::abs(Y(a, b)));
}

TEST_CASE("a custom spectrum equal to the pair spectrum gives the same operator") {
  std::mt19937 rng(3);
  const toy::ToyCase c = toy::random_case(rng);
  const Spectrum E = [&](double w) { return pair_field_fourier(w, c.x, c.cfg); };
  const auto a = pulse_pair_operator(c.model, c.cfg, c.x);
  const auto b = pulse_pair_operator(c.model, E, c.cfg);
  CHECK((a.U_raw - b.U_raw).norm() < 1e-14);
}

TEST_CASE("decay enters as loss") {
  std::mt19937 rng(5);
  toy::ToyCase c = toy::random_case(rng);
  c.model.linewidths[2] = 1.5e8;
  const auto op = pulse_pair_operator(c.model, c.cfg, c.x);
  CHECK(op.loss[0] > 0.0);
  CHECK(op.loss[0] < 1e-6);
  const Eigen::MatrixXcd ref = toy::direct_pair_propagator(c.model, c.cfg, c.x);
  // Only columns of the long-lived levels mean anything: the broad level's own decay
  // over the integration window is a property of the window, not of the pulse pair.
  CHECK(toy::opnorm((op.U_raw - ref).leftCols(2)) < 1e-6);
}

TEST_CASE("free phases and train propagator") {
  const Eigen::Vector3d e(0.0, 1.2345e15, 3.3e15);
  const double T = 1e-8;
  const Eigen::VectorXcd p1 = free_phases(e, T, 1);
  const Eigen::VectorXcd p7 = free_phases(e, T, 7);
  for (int i = 0; i < 3; ++i) CHECK(std::abs(p7[i] - std::pow(p1[i], 7)) < 1e-6);
  CHECK(std::abs(free_phases(e, T, 0)[1] - 1.0) < 1e-15);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(3, 3);
  CHECK((train_propagator(I, e, T, 50) - I).norm() < 1e-13);
  // Diagonal pair operators commute with the free phases.
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(3, 3);
  D.diagonal() << std::polar(1.0, 0.1), std::polar(1.0, -0.2), std::polar(1.0, 0.3);
  const Eigen::MatrixXcd U = train_propagator(D, e, T, 10);
  CHECK(std::abs(U(1, 1) - std::polar(1.0, -2.0)) < 1e-12);
}

TEST_CASE("polar factor") {
  Eigen::MatrixXcd A(2, 2);
  A << cplx(1.0, 0.1), cplx(0.01, 0), cplx(0, 0.02), cplx(0.98, -0.05);
  const Eigen::MatrixXcd W = unitary_polar_factor(A);
  CHECK((W.adjoint() * W - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-14);
  const Eigen::MatrixXcd P = W.adjoint() * A;
  CHECK((P - P.adjoint()).norm() < 1e-14);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(P).eigenvalues().minCoeff() > 0.0);
}
