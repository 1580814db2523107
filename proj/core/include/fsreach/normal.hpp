#pragma once

#include <cstdint>
#include <functional>

namespace fsreach {

// Estimate of a probability integral together with its absolute-error bound.
struct ProbEstimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Standard normal density, CDF, and inverse CDF (Wichura AS241, ~1e-15).
double norm_pdf(double x);
double norm_cdf(double x);
double norm_ppf(double p);

// Probability of a univariate normal interval [lo, hi], infinite ends allowed.
double norm_interval_prob(double mean, double stddev, double lo, double hi);

// Upper-tail probability P{X > h, Y > k} of a standard bivariate normal with
// correlation rho (Drezner-Wesolowsky Gauss-Legendre scheme, ~5e-16).
double bvn_upper(double h, double k, double rho);

// P{lo1 <= X <= hi1, lo2 <= Y <= hi2} for the standard bivariate normal with
// correlation rho; infinite bounds allowed.
double bvn_rect_prob(double lo1, double hi1, double lo2, double hi2, double rho);

// Adaptive Gauss-Kronrod (G7,K15) quadrature on a finite interval.
// Returns the integral estimate; *abs_err receives the accumulated error bound.
double adaptive_gk15(const std::function<double(double)>& f, double a, double b,
                     double tol, double* abs_err = nullptr, int max_depth = 50);

// Deterministic scrambling helper for seed derivation (splitmix64 step).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Rank-1 lattice rule in [0,1)^dim: point i of n, coordinate k, with an
// additive shift; used by the quasi-random integration paths.
double lattice_coord(std::uint64_t i, int k, double shift);

}  // namespace fsreach
