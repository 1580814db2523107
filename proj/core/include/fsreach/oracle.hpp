#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fsreach/dynamics.hpp"
#include "fsreach/geometry.hpp"
#include "fsreach/occupyset.hpp"

namespace fsreach::oracle {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// Endpoint samples of step-by-step trajectory simulation; column per sample.
struct SampleSet {
  MatrixXd points;
  int tau = 0;
  std::uint64_t seed = 0;
};

// Simulates x_{t+1} = A x_t + B u_t + F w_t with fresh Gaussian draws; the
// stream is chunked into fixed-size blocks with per-block substreams so the
// result depends only on (seed, Ns).
SampleSet sample_trajectories_dpv(const dyn::DpvModel& model,
                                  const dyn::ParameterTrajectory& traj, int tau,
                                  const VectorXd& x0, int Ns, std::uint64_t seed,
                                  const std::vector<VectorXd>& inputs = {});

// Same with the mode path redrawn per sample from the Markov chain.
SampleSet sample_trajectories_dmsp(const dyn::DmspModel& model, int tau,
                                   const VectorXd& x0, int Ns, std::uint64_t seed);

// Empirical occupancy fraction at a single anchor point.
double phi_hat_at(const SampleSet& samples, const geom::ConvexShape& shape,
                  const VectorXd& y);

struct OccupancyGrid {
  Vector2d lo, hi;
  int nx = 0, ny = 0;
  MatrixXd phi_hat;    // ny rows, nx cols
  MatrixXd sigma_hat;  // binomial standard error per cell
  int Ns = 0;
  std::uint64_t seed = 0;

  Vector2d cell_center(int ix, int iy) const;
};

// Empirical occupancy over a 2D anchor grid: cell (ix,iy) counts samples
// landing in the shape anchored at the cell center.
OccupancyGrid estimate_phi_grid(const SampleSet& samples,
                                const geom::ConvexShape& shape, const Vector2d& lo,
                                const Vector2d& hi, int nx, int ny);

// Default grid extent: componentwise mean range +/- (4 sigma + diameter).
void default_grid_extent(const std::vector<fsr::GaussianState>& states,
                         const geom::ConvexShape& shape, Vector2d& lo, Vector2d& hi);

struct InnerViolation {
  VectorXd vertex;
  double phi_hat = 0.0;
  double threshold = 0.0;
};

struct OuterViolation {
  Vector2d cell;
  double phi_hat = 0.0;
  double threshold = 0.0;
};

struct ContainmentReport {
  bool pass = true;
  std::vector<InnerViolation> inner_violations;
  std::vector<OuterViolation> outer_violations;
  double max_phi_hat = 0.0;
  Vector2d argmax_cell = Vector2d::Zero();
  int cells_above_alpha = 0;
};

// Verdict of an approximation pair against the empirical field: inner
// vertices must keep phi_hat >= alpha - 3 sigma (exact per-vertex counts),
// grid cells with phi_hat >= alpha + 3 sigma must lie in the outer set.
ContainmentReport contour_and_containment(const SampleSet& samples,
                                          const geom::ConvexShape& shape,
                                          const OccupancyGrid& grid, double alpha,
                                          const occupyset::OccupySetApprox& approx);

// Same check against the union of cover pieces.
ContainmentReport cover_containment(const SampleSet& samples,
                                    const geom::ConvexShape& shape,
                                    const OccupancyGrid& grid, double alpha,
                                    const occupyset::DmspCover& cover);

}  // namespace fsreach::oracle
