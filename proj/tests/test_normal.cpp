#include <cmath>
#include <limits>

#include "doctest.h"
#include "fsreach/normal.hpp"

using namespace fsreach;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// One-axis quadrature reference for the bivariate normal CDF.
double bvn_cdf_quadrature(double h, double k, double rho) {
  const double s = std::sqrt(1.0 - rho * rho);
  double err = 0.0;
  return adaptive_gk15(
      [&](double x) { return norm_pdf(x) * norm_cdf((k - rho * x) / s); }, -9.0,
      h, 1e-13, &err);
}
}  // namespace

TEST_CASE("univariate normal cdf and quantile") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(norm_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-13));
  CHECK(norm_cdf(-1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-12));
  CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));

  for (double p : {1e-12, 1e-6, 0.025, 0.3, 0.5, 0.8, 0.975, 1.0 - 1e-9}) {
    CHECK(norm_cdf(norm_ppf(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK(norm_ppf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("normal interval probability") {
  CHECK(norm_interval_prob(0.0, 1.0, -kInf, kInf) == doctest::Approx(1.0));
  CHECK(norm_interval_prob(0.0, 1.0, -1.0, 1.0) ==
        doctest::Approx(0.6826894921370859).epsilon(1e-12));
  CHECK(norm_interval_prob(2.0, 3.0, -1.0, 5.0) ==
        doctest::Approx(norm_cdf(1.0) - norm_cdf(-1.0)).epsilon(1e-12));
  CHECK(norm_interval_prob(0.0, 1.0, 5.0, 4.0) == doctest::Approx(0.0));
}

TEST_CASE("adaptive quadrature hits known integrals") {
  double err = 0.0;
  const double cube = adaptive_gk15([](double x) { return x * x; }, 0.0, 1.0,
                                    1e-12, &err);
  CHECK(cube == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(err >= 0.0);

  const double sine = adaptive_gk15([](double x) { return std::sin(x); }, 0.0,
                                    M_PI, 1e-12, &err);
  CHECK(sine == doctest::Approx(2.0).epsilon(1e-12));

  const double gauss = adaptive_gk15([](double x) { return norm_pdf(x); }, -8.0,
                                     8.0, 1e-12, &err);
  CHECK(gauss == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bivariate orthant closed form across correlation bands") {
  for (double rho : {-0.99, -0.925, -0.75, -0.5, -0.3, -0.1, 0.0, 0.1, 0.3, 0.5,
                     0.75, 0.925, 0.99}) {
    const double expected = 0.25 + std::asin(rho) / (2.0 * M_PI);
    CHECK(bvn_upper(0.0, 0.0, rho) == doctest::Approx(expected).epsilon(5e-14));
  }
}

TEST_CASE("bivariate upper tail factorizes at zero correlation") {
  for (double h : {-2.0, -0.5, 0.0, 0.7, 2.5}) {
    for (double k : {-1.5, 0.0, 1.0, 3.0}) {
      CHECK(bvn_upper(h, k, 0.0) ==
            doctest::Approx(norm_cdf(-h) * norm_cdf(-k)).epsilon(1e-13));
      CHECK(bvn_upper(h, k, 0.4) == doctest::Approx(bvn_upper(k, h, 0.4)));
    }
  }
}

TEST_CASE("bivariate upper tail degenerate correlations") {
  CHECK(bvn_upper(0.3, -0.2, 1.0) == doctest::Approx(norm_cdf(-0.3)).epsilon(1e-12));
  CHECK(bvn_upper(-0.5, -0.5, -1.0) ==
        doctest::Approx(norm_cdf(0.5) - norm_cdf(-0.5)).epsilon(1e-12));
  CHECK(bvn_upper(0.3, -0.2, -1.0) == doctest::Approx(0.0));
  CHECK(bvn_upper(-0.5, 0.2, -1.0) ==
        doctest::Approx(norm_cdf(-0.2) - norm_cdf(-0.5)).epsilon(1e-12));
  CHECK(bvn_upper(kInf, 0.0, 0.5) == doctest::Approx(0.0));
  CHECK(bvn_upper(-kInf, 0.0, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("bivariate cdf agrees with independent quadrature") {
  const double cases[][3] = {
      {0.5, -0.3, 0.8},  {1.2, 1.0, -0.8},  {-0.7, 0.4, 0.95},
      {0.0, 2.0, -0.95}, {1.5, -1.5, 0.45}, {-2.0, -1.0, -0.2},
  };
  for (const auto& c : cases) {
    const double got = bvn_rect_prob(-kInf, c[0], -kInf, c[1], c[2]);
    const double ref = bvn_cdf_quadrature(c[0], c[1], c[2]);
    CHECK(got == doctest::Approx(ref).epsilon(5e-11));
  }
}

TEST_CASE("bivariate rectangle probabilities") {
  CHECK(bvn_rect_prob(-40.0, 40.0, -40.0, 40.0, 0.3) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(bvn_rect_prob(0.0, kInf, 0.0, kInf, 0.5) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const double band = bvn_rect_prob(-1.0, 1.0, -kInf, kInf, 0.7);
  CHECK(band == doctest::Approx(norm_cdf(1.0) - norm_cdf(-1.0)).epsilon(1e-12));
}

TEST_CASE("seed mixing and lattice coordinates are deterministic") {
  CHECK(mix_seed(42, 1) == mix_seed(42, 1));
  CHECK(mix_seed(42, 1) != mix_seed(42, 2));
  CHECK(mix_seed(42, 1) != mix_seed(43, 1));

  for (int i = 0; i < 16; ++i) {
    const double c = lattice_coord(static_cast<std::uint64_t>(i), 3, 0.25);
    CHECK(c >= 0.0);
    CHECK(c < 1.0);
    CHECK(c == lattice_coord(static_cast<std::uint64_t>(i), 3, 0.25));
  }
}
