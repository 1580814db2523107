#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fsreach/geometry.hpp"
#include "fsreach/lp.hpp"
#include "test_util.hpp"

using namespace fsreach;
using namespace fsreach::geom;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {
VectorXd vec2(double x, double y) {
  VectorXd v(2);
  v << x, y;
  return v;
}
}  // namespace

TEST_CASE("support functions of the basic shapes") {
  const Box box{vec2(1.0, -2.0), vec2(2.0, 0.5)};
  VectorXd d = vec2(3.0, -4.0);
  CHECK(support(ConvexShape{box}, d) ==
        doctest::Approx(3.0 * 1.0 + (-4.0) * (-2.0) + 3.0 * 2.0 + 4.0 * 0.5));

  const Ball ball{vec2(1.0, 1.0), 2.0};
  CHECK(support(ConvexShape{ball}, d) ==
        doctest::Approx(d.dot(ball.center) + 2.0 * d.norm()));

  MatrixXd V(2, 3);
  V << 0, 1, 0, 0, 0, 1;
  CHECK(support(ConvexShape{VPolytope{V}}, vec2(1.0, 2.0)) == doctest::Approx(2.0));

  MatrixXd A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  const HPolytope square{A, VectorXd::Ones(4)};
  CHECK(support(ConvexShape{square}, vec2(1.0, 0.0)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(support(ConvexShape{square}, vec2(1.0, 1.0)) ==
        doctest::Approx(2.0).epsilon(1e-9));

  MatrixXd halfA(1, 2);
  halfA << 1, 0;
  VectorXd halfb(1);
  halfb << 1;
  CHECK_THROWS_AS(support(ConvexShape{HPolytope{halfA, halfb}}, vec2(0.0, 1.0)),
                  unbounded_support_error);
}

TEST_CASE("minkowski support adds member supports exactly") {
  std::mt19937 eng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const ConvexShape a = testutil::random_shape(eng, 2, trial);
    const ConvexShape b = testutil::random_shape(eng, 2, trial + 1);
    const VectorXd d = testutil::random_vector(eng, 2);
    if (d.norm() == 0.0) continue;
    const double split = support(a, d) + support(b, d);
    CHECK(minkowski_support({a, b}, {}, d) == split);

    const Ellipsoid e{testutil::random_vector(eng, 2),
                      testutil::random_spd(eng, 2)};
    CHECK(minkowski_support({a}, {e}, d) == support(a, d) + support(e, d));
  }
}

TEST_CASE("reflection fixes symmetric shapes and is an involution") {
  const Box box{vec2(1.0, 0.0), vec2(2.0, 2.0)};
  const auto rbox = std::get<Box>(reflect(ConvexShape{box}));
  CHECK(rbox.center.isApprox(vec2(-1.0, 0.0)));
  CHECK(rbox.half_width.isApprox(box.half_width));

  const Ball ball{vec2(0.0, 0.0), 0.7};
  const auto rball = std::get<Ball>(reflect(ConvexShape{ball}));
  CHECK(rball.center.norm() == doctest::Approx(0.0));
  CHECK(rball.radius == doctest::Approx(0.7));

  MatrixXd V(2, 3);
  V << 0, 1, 0, 0, 0, 1;
  const auto rpoly = std::get<VPolytope>(reflect(ConvexShape{VPolytope{V}}));
  CHECK(rpoly.V.isApprox(-V));

  std::mt19937 eng(12);
  for (int trial = 0; trial < 8; ++trial) {
    const ConvexShape s = testutil::random_shape(eng, 2, trial);
    const ConvexShape rr = reflect(reflect(s));
    const VectorXd d = testutil::random_vector(eng, 2, 0.1, 1.0);
    CHECK(support(rr, d) == doctest::Approx(support(s, d)).epsilon(1e-12));
  }
}

TEST_CASE("translation shifts membership and composes to identity") {
  std::mt19937 eng(13);
  for (int trial = 0; trial < 12; ++trial) {
    const ConvexShape s = testutil::random_shape(eng, 2, trial);
    const VectorXd v = testutil::random_vector(eng, 2);
    const VectorXd y = testutil::random_vector(eng, 2, -2.0, 2.0);
    CHECK(membership(translate(s, v), y) == membership(s, y - v));

    const ConvexShape back = translate(translate(s, v), -v);
    const VectorXd d = testutil::random_vector(eng, 2, 0.1, 1.0);
    CHECK(support(back, d) == doctest::Approx(support(s, d)).epsilon(1e-12));
  }
}

TEST_CASE("reflected-translate membership identity") {
  std::mt19937 eng(14);
  for (int trial = 0; trial < 16; ++trial) {
    const ConvexShape s = testutil::random_shape(eng, 2, trial);
    const VectorXd y = testutil::random_vector(eng, 2, -2.0, 2.0);
    const VectorXd z = testutil::random_vector(eng, 2, -2.0, 2.0);
    const ConvexShape anchored = translate(reflect(s), y);
    CHECK(membership(anchored, z) == membership(s, y - z));
    const ConvexShape roundtrip = reflect(translate(reflect(s), -y));
    CHECK(membership(roundtrip, z) == membership(s, z - y));
  }
}

TEST_CASE("central symmetry detection") {
  CHECK(centrally_symmetric(ConvexShape{Box{vec2(0, 0), vec2(1, 2)}}));
  CHECK_FALSE(centrally_symmetric(ConvexShape{Box{vec2(0.5, 0), vec2(1, 2)}}));
  CHECK(centrally_symmetric(ConvexShape{Ball{vec2(0, 0), 1.0}}));
  MatrixXd sym(2, 4);
  sym << 1, -1, 1, -1, 1, -1, -1, 1;
  CHECK(centrally_symmetric(ConvexShape{VPolytope{sym}}));
  MatrixXd tri(2, 3);
  tri << 0, 1, 0, 0, 0, 1;
  CHECK_FALSE(centrally_symmetric(ConvexShape{VPolytope{tri}}));
}

TEST_CASE("volumes of boxes, balls, and polytopes") {
  CHECK(measure(ConvexShape{Box{vec2(0, 0), vec2(50, 50)}}) ==
        doctest::Approx(10000.0));
  CHECK(measure(ConvexShape{Ball{vec2(0, 0), 0.2}}) ==
        doctest::Approx(M_PI * 0.04).epsilon(1e-12));

  MatrixXd sqV(2, 4);
  sqV << 0, 1, 1, 0, 0, 0, 1, 1;
  CHECK(measure(ConvexShape{VPolytope{sqV}}) == doctest::Approx(1.0));

  MatrixXd A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  CHECK(measure(ConvexShape{HPolytope{A, VectorXd::Ones(4)}}) ==
        doctest::Approx(4.0).epsilon(1e-9));

  // 3D simplex with legs a, b, c has volume abc/6.
  MatrixXd simplex(3, 4);
  simplex << 0, 2, 0, 0, 0, 0, 3, 0, 0, 0, 0, 1;
  CHECK(measure(ConvexShape{VPolytope{simplex}}) ==
        doctest::Approx(1.0).epsilon(1e-9));

  std::mt19937 eng(15);
  for (int trial = 0; trial < 6; ++trial) {
    const ConvexShape s = testutil::random_shape(eng, 2, trial);
    const VectorXd v = testutil::random_vector(eng, 2);
    CHECK(measure(translate(s, v)) == doctest::Approx(measure(s)).epsilon(1e-9));
  }
}

TEST_CASE("support polytope from axis directions is the unit box") {
  std::vector<SupportSample> samples;
  for (const auto& d : directions_2d(4)) samples.push_back({d, 1.0});
  const auto sp = polytope_from_supports(samples);
  CHECK(sp.bounded);
  CHECK(membership(ConvexShape{sp.poly}, vec2(0.99, -0.99)));
  CHECK_FALSE(membership(ConvexShape{sp.poly}, vec2(1.01, 0.0)));

  std::vector<SupportSample> open = {{vec2(1, 0), 1.0}, {vec2(0, 1), 1.0}};
  CHECK_FALSE(polytope_from_supports(open).bounded);
}

TEST_CASE("support polytope around an ellipsoid has the k-gon gap") {
  const Ellipsoid e{vec2(2.0, 2.0), MatrixXd::Identity(2, 2)};
  std::vector<SupportSample> samples;
  for (const auto& d : directions_2d(32)) samples.push_back({d, support(e, d)});
  const auto sp = polytope_from_supports(samples);
  REQUIRE(sp.bounded);

  // every boundary point of the unit circle about [2,2] stays inside
  for (int i = 0; i < 256; ++i) {
    const double th = 2.0 * M_PI * i / 256.0;
    CHECK(membership(ConvexShape{sp.poly},
                     vec2(2.0 + std::cos(th), 2.0 + std::sin(th)), 1e-9));
  }

  const MatrixXd verts = hpolytope_vertices_2d(sp.poly);
  REQUIRE(verts.cols() > 0);
  double gap = 0.0;
  for (int j = 0; j < verts.cols(); ++j) {
    gap = std::max(gap, (verts.col(j) - e.center).norm() - 1.0);
  }
  CHECK(gap <= 1.0 / std::cos(M_PI / 32.0) - 1.0 + 1e-9);
  CHECK(gap > 0.0);
}

TEST_CASE("support sandwich on a ball") {
  std::mt19937 eng(16);
  const Ball ball{testutil::random_vector(eng, 2), 1.3};
  std::vector<SupportSample> samples;
  MatrixXd touching(2, 16);
  int col = 0;
  for (const auto& d : directions_2d(16)) {
    samples.push_back({d, support(ConvexShape{ball}, d)});
    touching.col(col++) = ball.center + ball.radius * d;
  }
  const auto outer = polytope_from_supports(samples);
  const VPolytope inner = convex_hull(touching);

  for (int trial = 0; trial < 40; ++trial) {
    const double th = std::uniform_real_distribution<double>(0, 2 * M_PI)(eng);
    const double rad = std::uniform_real_distribution<double>(0, 1.0)(eng);
    const VectorXd p =
        ball.center + rad * ball.radius * vec2(std::cos(th), std::sin(th));
    CHECK(membership(ConvexShape{outer.poly}, p, 1e-9));
    if (lp::in_convex_hull(inner.V, p)) {
      CHECK(membership(ConvexShape{ball}, p, 1e-9));
    }
  }
}

TEST_CASE("convex hull drops interior points") {
  MatrixXd pts(2, 4);
  pts << 0, 1, 0, 0.1, 0, 0, 1, 0.1;
  const VPolytope hull = convex_hull(pts);
  CHECK(hull.V.cols() == 3);

  MatrixXd one(2, 1);
  one << 0.3, -0.4;
  CHECK(convex_hull(one).V.isApprox(one));

  std::mt19937 eng(17);
  MatrixXd cloud(2, 100);
  for (int j = 0; j < 100; ++j) {
    const double th = std::uniform_real_distribution<double>(0, 2 * M_PI)(eng);
    const double rad = std::sqrt(std::uniform_real_distribution<double>(0, 1)(eng));
    cloud.col(j) = rad * vec2(std::cos(th), std::sin(th));
  }
  const VPolytope big = convex_hull(cloud);
  for (int j = 0; j < big.V.cols(); ++j) CHECK(big.V.col(j).norm() <= 1.0 + 1e-12);
  for (int j = 0; j < 100; ++j) CHECK(lp::in_convex_hull(big.V, cloud.col(j)));
}

TEST_CASE("planar direction fans and vertex enumeration") {
  const auto dirs = directions_2d(4);
  REQUIRE(dirs.size() == 4);
  CHECK(dirs[0].isApprox(vec2(1, 0), 1e-12));
  CHECK(dirs[1].isApprox(vec2(0, 1), 1e-12));
  CHECK(dirs[2].isApprox(vec2(-1, 0), 1e-12));
  CHECK(dirs[3].isApprox(vec2(0, -1), 1e-12));

  MatrixXd A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  const MatrixXd verts = hpolytope_vertices_2d(HPolytope{A, VectorXd::Ones(4)});
  CHECK(verts.cols() == 4);
  CHECK(testutil::polygon_area(verts) == doctest::Approx(4.0).epsilon(1e-9));

  VectorXd bad(4);
  bad << -2, 1, 1, 1;  // x <= -2 and x >= -1 cannot both hold
  CHECK(hpolytope_vertices_2d(HPolytope{A, bad}).cols() == 0);
}

TEST_CASE("halfspace form of a vertex polytope matches membership") {
  MatrixXd V(2, 4);
  V << 0, 2, 2, 0, 0, 0, 1, 1;
  const HPolytope h = hrep_2d(VPolytope{V});
  std::mt19937 eng(18);
  for (int trial = 0; trial < 60; ++trial) {
    const VectorXd p = testutil::random_vector(eng, 2, -0.5, 2.5);
    CHECK(membership(ConvexShape{h}, p, 1e-9) ==
          lp::in_convex_hull(V, p, 1e-9));
  }
}

TEST_CASE("chords and line intersections") {
  const Box box{vec2(0, 0), vec2(1, 2)};
  auto chord = chord_2d(ConvexShape{box}, 0.5);
  REQUIRE(chord.has_value());
  CHECK(chord->first == doctest::Approx(-2.0));
  CHECK(chord->second == doctest::Approx(2.0));
  CHECK_FALSE(chord_2d(ConvexShape{box}, 1.5).has_value());

  const Ball ball{vec2(0, 0), 1.0};
  auto seg = line_intersection(ConvexShape{ball}, vec2(0, 0), vec2(1, 0));
  REQUIRE(seg.has_value());
  CHECK(seg->first == doctest::Approx(-1.0));
  CHECK(seg->second == doctest::Approx(1.0));
  CHECK_FALSE(
      line_intersection(ConvexShape{ball}, vec2(0, 2), vec2(1, 0)).has_value());

  MatrixXd tri(2, 3);
  tri << 0, 2, 0, 0, 0, 2;
  auto diag = line_intersection(ConvexShape{VPolytope{tri}}, vec2(0, 0),
                                vec2(1, 1));
  REQUIRE(diag.has_value());
  CHECK(diag->first == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(diag->second == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bounding metrics") {
  VectorXd lo, hi;
  bounding_box(ConvexShape{Ball{vec2(1, -1), 0.5}}, lo, hi);
  CHECK(lo.isApprox(vec2(0.5, -1.5)));
  CHECK(hi.isApprox(vec2(1.5, -0.5)));

  const Box unit{vec2(0, 0), vec2(1, 1)};
  CHECK(bounding_radius(ConvexShape{unit}, vec2(0, 0)) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(bounding_radius(ConvexShape{unit}, vec2(1, 1)) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));

  CHECK(diameter(ConvexShape{Ball{vec2(3, 4), 0.7}}) == doctest::Approx(1.4));
  CHECK(diameter(ConvexShape{unit}) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("gaussian density superlevel ellipsoid") {
  const VectorXd mean = vec2(0, 0);
  const MatrixXd cov = MatrixXd::Identity(2, 2);
  const double peak = 1.0 / (2.0 * M_PI);

  CHECK_FALSE(superlevel_ellipsoid(mean, cov, 1.1 * peak).has_value());

  const auto level = superlevel_ellipsoid(mean, cov, peak * std::exp(-0.5));
  REQUIRE(level.has_value());
  CHECK(level->center.isApprox(mean));
  CHECK(level->Q.isApprox(cov, 1e-9));  // unit radius contour
  CHECK(membership(*level, vec2(0.999, 0.0)));
  CHECK_FALSE(membership(*level, vec2(1.01, 0.0)));
}
