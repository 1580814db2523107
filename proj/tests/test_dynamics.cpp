#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fsreach/dynamics.hpp"
#include "test_util.hpp"

using namespace fsreach;
using namespace fsreach::dyn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

DpvModel constant_model(const MatrixXd& A, const MatrixXd& F,
                        const VectorXd& mu_w, const MatrixXd& cov_w,
                        int horizon = 16) {
  DpvModel m;
  m.n = static_cast<int>(A.rows());
  m.m = 0;
  m.p = static_cast<int>(F.cols());
  m.horizon = horizon;
  m.A = [A](const VectorXd&) { return A; };
  m.F = [F](const VectorXd&) { return F; };
  m.disturbance = {mu_w, cov_w};
  return m;
}

VectorXd scal(double x) {
  VectorXd v(1);
  v << x;
  return v;
}

}  // namespace

TEST_CASE("constant parameter trajectories") {
  const auto traj = constant_trajectory(4, scal(0.5));
  CHECK(traj.tau() == 4);
  for (int t = 0; t <= 4; ++t) CHECK(traj.at(t)(0) == doctest::Approx(0.5));
}

TEST_CASE("state transition products") {
  const MatrixXd A2 = 2.0 * MatrixXd::Identity(2, 2);
  const auto m = constant_model(A2, MatrixXd::Identity(2, 2), VectorXd::Zero(2),
                                MatrixXd::Identity(2, 2));
  const auto traj = constant_trajectory(6);
  CHECK(concat_state_matrix(m, traj, 3, 3).isApprox(MatrixXd::Identity(2, 2)));
  CHECK(concat_state_matrix(m, traj, 0, 3).isApprox(8.0 * MatrixXd::Identity(2, 2)));
  CHECK_THROWS_AS(concat_state_matrix(m, traj, 4, 2), std::exception);
}

TEST_CASE("disturbance concatenation keeps the newest block leftmost") {
  MatrixXd A(2, 2);
  A << 1, 0, 0, 2;
  const auto m = constant_model(A, MatrixXd::Identity(2, 2), VectorXd::Zero(2),
                                MatrixXd::Identity(2, 2));
  const auto traj = constant_trajectory(4);

  const MatrixXd cw1 = concat_disturbance_matrix(m, traj, 1);
  CHECK(cw1.isApprox(MatrixXd::Identity(2, 2)));

  const MatrixXd cw2 = concat_disturbance_matrix(m, traj, 2);
  REQUIRE(cw2.cols() == 4);
  CHECK(cw2.leftCols(2).isApprox(MatrixXd::Identity(2, 2)));
  CHECK(cw2.rightCols(2).isApprox(A));
}

TEST_CASE("straight-heading vehicle keeps a rank-one disturbance map") {
  const DmspModel model = unicycle_dmsp(UnicycleParams{});
  const auto seqs = enumerate_sequences(model, 3);
  REQUIRE(seqs.size() == 1);
  const auto traj = parameter_trajectory(model, seqs[0]);
  const MatrixXd cw = concat_disturbance_matrix(model.subsystem, traj, 3);
  REQUIRE(cw.cols() == 3);
  const VectorXd expect = 0.05 * Eigen::Vector2d(std::cos(M_PI / 4), std::sin(M_PI / 4));
  for (int j = 0; j < 3; ++j) CHECK(cw.col(j).isApprox(expect, 1e-12));
  CHECK(Eigen::FullPivLU<MatrixXd>(cw).rank() == 1);
}

TEST_CASE("unperturbed state recursion") {
  const auto id = constant_model(MatrixXd::Identity(2, 2),
                                 MatrixXd::Identity(2, 2), VectorXd::Zero(2),
                                 MatrixXd::Identity(2, 2));
  VectorXd x0(2);
  x0 << 3, -1;
  CHECK(unperturbed_state(id, constant_trajectory(5), 5, x0).isApprox(x0));

  DpvModel scalar;
  scalar.n = scalar.m = scalar.p = 1;
  scalar.horizon = 8;
  scalar.A = [](const VectorXd&) { return MatrixXd::Constant(1, 1, 2.0); };
  scalar.B = [](const VectorXd&) { return MatrixXd::Constant(1, 1, 1.0); };
  scalar.F = [](const VectorXd&) { return MatrixXd::Constant(1, 1, 1.0); };
  scalar.disturbance = {VectorXd::Zero(1), MatrixXd::Identity(1, 1)};
  const std::vector<VectorXd> inputs(3, scal(1.0));
  CHECK(unperturbed_state(scalar, constant_trajectory(3), 3, scal(1.0), inputs)(0) ==
        doctest::Approx(15.0));
}

TEST_CASE("stepwise simulation equals the anchored decomposition") {
  std::mt19937 eng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + static_cast<int>(eng() % 3);
    const int p = 1 + static_cast<int>(eng() % 3);
    const int tau = 1 + static_cast<int>(eng() % 5);
    const MatrixXd A = testutil::random_matrix(eng, n, n, -0.9, 0.9);
    const MatrixXd F = testutil::random_matrix(eng, n, p);
    const auto m = constant_model(A, F, VectorXd::Zero(p), MatrixXd::Identity(p, p));
    const auto traj = constant_trajectory(tau);
    const VectorXd x0 = testutil::random_vector(eng, n);

    std::vector<VectorXd> draws;
    VectorXd x = x0;
    for (int t = 0; t < tau; ++t) {
      draws.push_back(testutil::random_vector(eng, p));
      x = A * x + F * draws.back();
    }

    VectorXd stacked(p * tau);  // newest draw first
    for (int t = 0; t < tau; ++t) stacked.segment(t * p, p) = draws[tau - 1 - t];

    const VectorXd rebuilt =
        unperturbed_state(m, traj, tau, x0) +
        concat_disturbance_matrix(m, traj, tau) * stacked;
    CHECK((x - rebuilt).norm() <= 1e-10);
  }
}

TEST_CASE("switch instants respect period and offset") {
  DmspModel plain;
  plain.switch_period = 5;
  plain.switch_offset = 0;
  CHECK_FALSE(is_switch_instant(plain, 1));
  CHECK(is_switch_instant(plain, 5));
  CHECK_FALSE(is_switch_instant(plain, 6));
  CHECK(is_switch_instant(plain, 10));

  const DmspModel vehicle = unicycle_dmsp(UnicycleParams{});
  CHECK(vehicle.switch_offset == 1);
  CHECK_FALSE(is_switch_instant(vehicle, 1));
  CHECK_FALSE(is_switch_instant(vehicle, 5));
  CHECK(is_switch_instant(vehicle, 6));
  CHECK(is_switch_instant(vehicle, 11));
  CHECK_FALSE(is_switch_instant(vehicle, 12));
}

TEST_CASE("sequence enumeration under the uniform chain") {
  const DmspModel model = unicycle_dmsp(UnicycleParams{});
  const auto seqs = enumerate_sequences(model, 15);
  REQUIRE(seqs.size() == 25);
  double total = 0.0;
  for (const auto& s : seqs) {
    REQUIRE(s.states.size() == 15);
    CHECK(s.probability == doctest::Approx(0.04).epsilon(1e-12));
    total += s.probability;
    for (int t = 0; t < 6; ++t) CHECK(s.states[t] == doctest::Approx(0.0));
    for (int t = 6; t < 11; ++t) CHECK(s.states[t] == doctest::Approx(s.states[6]));
    for (int t = 11; t < 15; ++t) CHECK(s.states[t] == doctest::Approx(s.states[11]));
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sequence enumeration under the forward-biased chain") {
  UnicycleParams params;
  params.transition = forward_biased_transition();
  const DmspModel model = unicycle_dmsp(params);
  const auto seqs = enumerate_sequences(model, 15);
  REQUIRE(seqs.size() == 9);
  double total = 0.0;
  const std::set<double> kernel = {0.5, 0.47, 0.03};
  for (const auto& s : seqs) {
    total += s.probability;
    CHECK(s.probability > 0.0);
    // every path probability is a product of two kernel entries
    bool matched = false;
    for (double a : kernel)
      for (double b : kernel)
        if (std::abs(s.probability - a * b) < 1e-12) matched = true;
    CHECK(matched);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate chain yields a single certain path") {
  UnicycleParams params;
  params.transition = MatrixXd::Identity(5, 5);
  const DmspModel model = unicycle_dmsp(params);
  const auto seqs = enumerate_sequences(model, 12);
  REQUIRE(seqs.size() == 1);
  CHECK(seqs[0].probability == doctest::Approx(1.0));
  for (double q : seqs[0].states) CHECK(q == doctest::Approx(0.0));
}

TEST_CASE("parameter rollouts of the vehicle heading") {
  const DmspModel model = unicycle_dmsp(UnicycleParams{});

  DiscreteSequence straight{std::vector<double>(6, 0.0), 1.0};
  const auto flat = parameter_trajectory(model, straight);
  for (int t = 0; t <= 6; ++t) CHECK(flat.at(t)(0) == doctest::Approx(M_PI / 4));

  DiscreteSequence spin{std::vector<double>(6, 5.0), 1.0};
  const auto ramp = parameter_trajectory(model, spin);
  for (int t = 0; t <= 6; ++t)
    CHECK(ramp.at(t)(0) == doctest::Approx(M_PI / 4 + 0.25 * t).epsilon(1e-12));

  // two straight steps, nineteen left, six straight, eighteen right
  std::vector<double> schedule(2, 0.0);
  schedule.insert(schedule.end(), 19, -5.0);
  schedule.insert(schedule.end(), 6, 0.0);
  schedule.insert(schedule.end(), 18, 5.0);
  REQUIRE(schedule.size() == 45);
  const auto profile =
      parameter_trajectory(model, DiscreteSequence{schedule, 1.0});
  CHECK(profile.at(45)(0) == doctest::Approx(M_PI / 4 - 0.25).epsilon(1e-12));
}

TEST_CASE("vehicle factory wiring") {
  const DmspModel model = unicycle_dmsp(UnicycleParams{});
  CHECK(model.subsystem.n == 2);
  CHECK(model.subsystem.p == 1);
  CHECK(model.q_values == std::vector<double>{-5.0, -2.5, 0.0, 2.5, 5.0});
  CHECK(model.subsystem.disturbance.mean(0) == doctest::Approx(5.0));
  CHECK(model.subsystem.disturbance.cov(0, 0) == doctest::Approx(1.0));

  const MatrixXd f0 = model.subsystem.F(VectorXd::Zero(1));
  CHECK(f0(0, 0) == doctest::Approx(0.05));
  CHECK(f0(1, 0) == doctest::Approx(0.0));
  VectorXd quarter(1);
  quarter << M_PI / 2;
  const MatrixXd f90 = model.subsystem.F(quarter);
  CHECK(f90(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f90(1, 0) == doctest::Approx(0.05));
  CHECK(model.subsystem.A(quarter).isApprox(MatrixXd::Identity(2, 2)));

  const MatrixXd M1 = uniform_transition(5);
  for (int i = 0; i < 5; ++i) {
    CHECK(M1.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < 5; ++j) CHECK(M1(i, j) == doctest::Approx(0.2));
  }
  const MatrixXd M2 = forward_biased_transition();
  for (int i = 0; i < 5; ++i)
    CHECK(M2.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
}
