#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fsreach/dynamics.hpp"
#include "fsreach/geometry.hpp"
#include "fsreach/normal.hpp"

namespace fsreach::fsr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Gaussian state density with explicit rank structure: col_basis is an
// orthonormal basis (n x rank) of the covariance range.
struct GaussianState {
  VectorXd mean;
  MatrixXd cov;
  int rank = 0;
  MatrixXd col_basis;
};

// Eigenvalue threshold used for the rank decision.
double rank_threshold(const MatrixXd& cov);

GaussianState make_gaussian_state(const VectorXd& mean, const MatrixXd& cov);

// State density at time tau of the parameter-varying system: Gaussian with
// mean = unperturbed state + disturbance mean pushforward and covariance
// assembled from the per-step disturbance blocks.
GaussianState fsr_gaussian_dpv(const dyn::DpvModel& model,
                               const dyn::ParameterTrajectory& traj, int tau,
                               const VectorXd& x0,
                               const std::vector<VectorXd>& inputs = {});

// Affine support of the reach distribution: anchor + range(generator).
struct AffineReachSet {
  VectorXd anchor;
  MatrixXd generator;
  int dim = 0;
};

AffineReachSet fsr_set_dpv(const dyn::DpvModel& model,
                           const dyn::ParameterTrajectory& traj, int tau,
                           const VectorXd& x0,
                           const std::vector<VectorXd>& inputs = {});

// Per-mode-path reach summary of the Markov-switched system.
struct HybridReachEntry {
  dyn::DiscreteSequence sequence;
  dyn::ParameterTrajectory trajectory;
  GaussianState gauss;
  AffineReachSet set;
};

std::vector<HybridReachEntry> fsr_dmsp(const dyn::DmspModel& model, int tau,
                                       const VectorXd& x0,
                                       const std::vector<VectorXd>& inputs = {});

// P{lower <= x <= upper} for full-rank Gaussian x; +/-inf bounds allowed.
// Diagonal covariances use exact CDF products; 2D uses deterministic
// conditional-slice quadrature; higher dimensions use a shifted lattice over
// the sequentially conditioned integrand.
ProbEstimate mvn_rect_prob(const GaussianState& g, const VectorXd& lower,
                           const VectorXd& upper, double tol = 1e-6);

// P{x in shape} for Gaussian x of any rank. Rank-deficient densities are
// reduced to the affine support and integrated against the shape's
// intersection with it; empty intersections give exactly zero.
ProbEstimate mvn_shape_prob(const GaussianState& g, const geom::ConvexShape& shape,
                            double tol = 1e-6);

// Density superlevel boundary {psi = kappa} as an ellipsoid (full rank only).
std::optional<geom::Ellipsoid> density_superlevel(const GaussianState& g,
                                                  double kappa);

}  // namespace fsreach::fsr
