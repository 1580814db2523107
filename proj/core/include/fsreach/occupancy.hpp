#pragma once

#include <Eigen/Dense>

#include "fsreach/fsr.hpp"
#include "fsreach/geometry.hpp"

namespace fsreach::occupancy {

using Eigen::VectorXd;

// Probability that the state at time tau lands inside the rigid shape
// anchored at query point y. The shape argument is the body at anchor zero;
// the evaluation integrates the state density over {y} + reflect(shape),
// which reduces to {y} + shape for centrally symmetric bodies.
ProbEstimate phi_point(const fsr::GaussianState& g, const geom::ConvexShape& shape,
                       const VectorXd& y, double tol = 1e-6);

ProbEstimate phi_dpv(const dyn::DpvModel& model, const dyn::ParameterTrajectory& traj,
                     const geom::ConvexShape& shape, const VectorXd& y, int tau,
                     const VectorXd& x0, double tol = 1e-6,
                     const std::vector<VectorXd>& inputs = {});

struct PhiMax {
  VectorXd y_max;
  ProbEstimate value;
};

// Maximizer of the occupancy function. Centrally symmetric shapes peak at the
// density mean exactly; other shapes are refined by pattern search from it.
PhiMax phi_max(const fsr::GaussianState& g, const geom::ConvexShape& shape,
               double tol = 1e-6);

// Mode-path mixture occupancy of the Markov-switched system; each path is
// evaluated to tolerance tol / (number of paths).
ProbEstimate phi_dmsp(const dyn::DmspModel& model, const geom::ConvexShape& shape,
                      const VectorXd& y, int tau, const VectorXd& x0,
                      double tol = 1e-6);

// Mixture occupancy over precomputed per-path reach entries.
ProbEstimate phi_mixture(const std::vector<fsr::HybridReachEntry>& entries,
                         const geom::ConvexShape& shape, const VectorXd& y,
                         double tol = 1e-6);

}  // namespace fsreach::occupancy
