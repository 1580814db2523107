#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "fsreach/fsr.hpp"
#include "test_util.hpp"

using namespace fsreach;
using namespace fsreach::fsr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

dyn::DpvModel constant_model(const MatrixXd& A, const MatrixXd& F,
                             const VectorXd& mu_w, const MatrixXd& cov_w,
                             int horizon = 16) {
  dyn::DpvModel m;
  m.n = static_cast<int>(A.rows());
  m.m = 0;
  m.p = static_cast<int>(F.cols());
  m.horizon = horizon;
  m.A = [A](const VectorXd&) { return A; };
  m.F = [F](const VectorXd&) { return F; };
  m.disturbance = {mu_w, cov_w};
  return m;
}

VectorXd vec2(double x, double y) {
  VectorXd v(2);
  v << x, y;
  return v;
}

GaussianState straight_vehicle_state(int tau) {
  const dyn::DmspModel model = dyn::unicycle_dmsp(dyn::UnicycleParams{});
  const auto seqs = dyn::enumerate_sequences(model, tau);
  REQUIRE(seqs.size() == 1);
  const auto traj = dyn::parameter_trajectory(model, seqs[0]);
  return fsr_gaussian_dpv(model.subsystem, traj, tau, VectorXd::Zero(2));
}

}  // namespace

TEST_CASE("gaussian state construction tracks rank") {
  MatrixXd cov(2, 2);
  cov << 1, 0, 0, 0;
  const GaussianState g = make_gaussian_state(VectorXd::Zero(2), cov);
  CHECK(g.rank == 1);
  CHECK(g.col_basis.cols() == 1);
  CHECK((g.col_basis.transpose() * g.col_basis)
            .isApprox(MatrixXd::Identity(1, 1), 1e-12));
  CHECK((cov * vec2(0, 1)).norm() == doctest::Approx(0.0));

  const GaussianState full =
      make_gaussian_state(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  CHECK(full.rank == 2);
}

TEST_CASE("reach density of simple linear models") {
  const auto zeroF = constant_model(MatrixXd::Identity(2, 2),
                                    MatrixXd::Zero(2, 1), VectorXd::Zero(1),
                                    MatrixXd::Identity(1, 1));
  const auto g0 = fsr_gaussian_dpv(zeroF, dyn::constant_trajectory(3), 3, vec2(1, 2));
  CHECK(g0.rank == 0);
  CHECK(g0.mean.isApprox(vec2(1, 2)));
  CHECK(g0.cov.norm() == doctest::Approx(0.0));

  const auto walk = constant_model(MatrixXd::Identity(1, 1),
                                   MatrixXd::Identity(1, 1), VectorXd::Zero(1),
                                   MatrixXd::Identity(1, 1));
  VectorXd x0(1);
  x0 << 0.5;
  const auto g4 = fsr_gaussian_dpv(walk, dyn::constant_trajectory(4), 4, x0);
  CHECK(g4.mean(0) == doctest::Approx(0.5));
  CHECK(g4.cov(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(g4.rank == 1);
}

TEST_CASE("straight-heading vehicle density collapses to a line") {
  const GaussianState g = straight_vehicle_state(3);
  const double c = 0.75 * std::sqrt(0.5);
  CHECK(g.mean(0) == doctest::Approx(c).epsilon(1e-12));
  CHECK(g.mean(1) == doctest::Approx(c).epsilon(1e-12));
  CHECK(g.rank == 1);
  MatrixXd expect(2, 2);
  expect << 0.00375, 0.00375, 0.00375, 0.00375;
  CHECK(g.cov.isApprox(expect, 1e-10));
}

TEST_CASE("reach support of the vehicle") {
  const dyn::DmspModel model = dyn::unicycle_dmsp(dyn::UnicycleParams{});
  const auto seqs = dyn::enumerate_sequences(model, 2);
  const auto traj = dyn::parameter_trajectory(model, seqs[0]);
  const auto set = fsr_set_dpv(model.subsystem, traj, 2, VectorXd::Zero(2));
  CHECK(set.dim == 1);
  const VectorXd dir = set.generator.col(0).normalized();
  CHECK(std::abs(dir(0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(std::abs(dir(1)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));

  const auto zeroF = constant_model(MatrixXd::Identity(2, 2),
                                    MatrixXd::Zero(2, 1), VectorXd::Zero(1),
                                    MatrixXd::Identity(1, 1));
  const auto point = fsr_set_dpv(zeroF, dyn::constant_trajectory(2), 2, vec2(3, 4));
  CHECK(point.dim == 0);
  CHECK(point.anchor.isApprox(vec2(3, 4)));
}

TEST_CASE("mode-path reach summary of the switched vehicle") {
  const dyn::DmspModel model = dyn::unicycle_dmsp(dyn::UnicycleParams{});
  const auto entries = fsr_dmsp(model, 15, vec2(10, 10));
  REQUIRE(entries.size() == 25);
  double total = 0.0;
  bool found_straight = false;
  for (const auto& e : entries) {
    CHECK(e.sequence.probability == doctest::Approx(0.04).epsilon(1e-12));
    total += e.sequence.probability;
    bool straight = true;
    for (double q : e.sequence.states) straight = straight && q == 0.0;
    if (straight) {
      found_straight = true;
      const VectorXd expect =
          vec2(10, 10) + 15.0 * 0.25 * vec2(std::sqrt(0.5), std::sqrt(0.5));
      CHECK(e.gauss.mean.isApprox(expect, 1e-9));
      CHECK(e.gauss.rank == 1);
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(found_straight);
}

TEST_CASE("rectangle probabilities: diagonal covariance factorizes") {
  MatrixXd cov(3, 3);
  cov.setZero();
  cov(0, 0) = 4.0;
  cov(1, 1) = 9.0;
  cov(2, 2) = 0.25;
  VectorXd mean(3);
  mean << 1, -2, 0;
  const GaussianState g = make_gaussian_state(mean, cov);
  VectorXd lo(3), hi(3);
  lo << -1, -5, -0.5;
  hi << 2, 0, 1;
  const double expect = norm_interval_prob(1, 2, -1, 2) *
                        norm_interval_prob(-2, 3, -5, 0) *
                        norm_interval_prob(0, 0.5, -0.5, 1);
  const auto est = mvn_rect_prob(g, lo, hi, 1e-8);
  CHECK(std::abs(est.value - expect) <= 1e-10);
}

TEST_CASE("rectangle probabilities: planar closed forms") {
  MatrixXd cov(2, 2);
  cov << 1, 0.5, 0.5, 1;
  const GaussianState g = make_gaussian_state(VectorXd::Zero(2), cov);

  VectorXd zero2 = VectorXd::Zero(2);
  VectorXd inf2 = VectorXd::Constant(2, kInf);
  const auto orthant = mvn_rect_prob(g, zero2, inf2, 1e-8);
  CHECK(std::abs(orthant.value - 1.0 / 3.0) <= 1e-6);

  const auto all = mvn_rect_prob(g, VectorXd::Constant(2, -40.0),
                                 VectorXd::Constant(2, 40.0), 1e-8);
  CHECK(all.value == doctest::Approx(1.0).epsilon(1e-9));

  const GaussianState gi =
      make_gaussian_state(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  const auto sq = mvn_rect_prob(gi, VectorXd::Constant(2, -1.0),
                                VectorXd::Constant(2, 1.0), 1e-8);
  const double phi1 = norm_cdf(1.0) - norm_cdf(-1.0);
  CHECK(sq.value == doctest::Approx(phi1 * phi1).epsilon(1e-10));
}

TEST_CASE("rectangle probabilities: lattice rule against the orthant identity") {
  MatrixXd cov(3, 3);
  cov << 1, 0.5, 0.25, 0.5, 1, 0.5, 0.25, 0.5, 1;
  const GaussianState g = make_gaussian_state(VectorXd::Zero(3), cov);
  VectorXd lo = VectorXd::Zero(3);
  VectorXd hi = VectorXd::Constant(3, kInf);
  const double expect =
      0.125 + (std::asin(0.5) + std::asin(0.25) + std::asin(0.5)) / (4.0 * M_PI);
  const auto est = mvn_rect_prob(g, lo, hi, 1e-6);
  CHECK(std::abs(est.value - expect) <= 5e-6);

  const auto one = mvn_rect_prob(g, VectorXd::Constant(3, -40.0),
                                 VectorXd::Constant(3, 40.0), 1e-6);
  CHECK(one.value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("shape probabilities: ball and polytope forms agree with the box") {
  MatrixXd cov(2, 2);
  cov << 1.5, 0.4, 0.4, 0.8;
  const GaussianState g = make_gaussian_state(vec2(0.3, -0.2), cov);

  const geom::Box box{vec2(0.5, 0.0), vec2(1.0, 0.7)};
  MatrixXd corners(2, 4);
  corners << -0.5, 1.5, 1.5, -0.5, -0.7, -0.7, 0.7, 0.7;
  const double p_box = mvn_shape_prob(g, geom::ConvexShape{box}, 1e-7).value;
  const double p_vp =
      mvn_shape_prob(g, geom::ConvexShape{geom::VPolytope{corners}}, 1e-7).value;
  const double p_hp = mvn_shape_prob(
      g, geom::ConvexShape{geom::hrep_2d(geom::VPolytope{corners})}, 1e-7).value;
  CHECK(p_vp == doctest::Approx(p_box).epsilon(5e-6));
  CHECK(p_hp == doctest::Approx(p_box).epsilon(5e-6));
}

TEST_CASE("shape probabilities: chi-square disc mass") {
  const GaussianState g =
      make_gaussian_state(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  const double expect = 1.0 - std::exp(-0.5);
  const auto est =
      mvn_shape_prob(g, geom::ConvexShape{geom::Ball{VectorXd::Zero(2), 1.0}}, 1e-8);
  CHECK(std::abs(est.value - expect) <= 1e-7);
}

TEST_CASE("shape probabilities: degenerate ranks reduce exactly") {
  // rank zero: point mass
  const GaussianState point =
      make_gaussian_state(vec2(1, 1), MatrixXd::Zero(2, 2));
  CHECK(mvn_shape_prob(point, geom::ConvexShape{geom::Ball{vec2(1, 1), 0.5}}, 1e-8)
            .value == doctest::Approx(1.0));
  CHECK(mvn_shape_prob(point, geom::ConvexShape{geom::Ball{vec2(3, 3), 0.5}}, 1e-8)
            .value == doctest::Approx(0.0));

  // rank one: interval of the line density
  const GaussianState line = straight_vehicle_state(3);
  const double sigma = std::sqrt(0.0075);
  const double expect = norm_cdf(0.2 / sigma) - norm_cdf(-0.2 / sigma);
  const auto est = mvn_shape_prob(
      line, geom::ConvexShape{geom::Ball{line.mean, 0.2}}, 1e-9);
  CHECK(std::abs(est.value - expect) <= 1e-9);

  // rank two inside a three-dimensional box
  MatrixXd cov3 = MatrixXd::Zero(3, 3);
  cov3(0, 0) = cov3(1, 1) = 1.0;
  const GaussianState slab = make_gaussian_state(VectorXd::Zero(3), cov3);
  geom::Box cube{VectorXd::Zero(3), VectorXd::Ones(3)};
  const double phi1 = norm_cdf(1.0) - norm_cdf(-1.0);
  const auto inplane = mvn_shape_prob(slab, geom::ConvexShape{cube}, 1e-8);
  CHECK(inplane.value == doctest::Approx(phi1 * phi1).epsilon(1e-6));

  VectorXd offc(3);
  offc << 0, 0, 2;
  geom::Box lifted{offc, VectorXd::Constant(3, 0.5)};
  CHECK(mvn_shape_prob(slab, geom::ConvexShape{lifted}, 1e-8).value ==
        doctest::Approx(0.0));
}

TEST_CASE("shape probabilities respect symmetry and inclusion") {
  std::mt19937 eng(31);
  const GaussianState g =
      make_gaussian_state(VectorXd::Zero(2), testutil::random_spd(eng, 2));

  MatrixXd tri(2, 3);
  tri << 0.2, 1.4, 0.3, 0.1, 0.2, 1.5;
  const geom::ConvexShape t{geom::VPolytope{tri}};
  const double p = mvn_shape_prob(g, t, 1e-7).value;
  const double pr = mvn_shape_prob(g, geom::reflect(t), 1e-7).value;
  CHECK(p == doctest::Approx(pr).epsilon(5e-6));

  const geom::Box small{vec2(0.5, 0.5), vec2(0.5, 0.5)};
  const geom::Box large{vec2(0.5, 0.5), vec2(1.0, 1.0)};
  CHECK(mvn_shape_prob(g, geom::ConvexShape{small}, 1e-8).value <=
        mvn_shape_prob(g, geom::ConvexShape{large}, 1e-8).value + 1e-10);
}

TEST_CASE("density superlevel contour") {
  const GaussianState g =
      make_gaussian_state(VectorXd::Zero(2), MatrixXd::Identity(2, 2));
  const double peak = 1.0 / (2.0 * M_PI);
  CHECK_FALSE(density_superlevel(g, 1.01 * peak).has_value());
  const auto level = density_superlevel(g, peak * std::exp(-0.5));
  REQUIRE(level.has_value());
  CHECK(level->Q.isApprox(MatrixXd::Identity(2, 2), 1e-9));
}
