#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "fsreach/fsr.hpp"
#include "fsreach/geometry.hpp"
#include "fsreach/occupancy.hpp"

namespace fsreach::occupyset {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class SetKind { polytope, empty, all };

// Certified approximation pair of an occupancy superlevel set {phi >= alpha}.
// inner under-approximates (empty is the trivial sound default), outer
// over-approximates (all when alpha == 0).
struct OccupySetApprox {
  SetKind inner_kind = SetKind::empty;
  geom::VPolytope inner;
  SetKind outer_kind = SetKind::all;
  geom::HPolytope outer;
  std::string method;
  double alpha = 0.0;
  int tau = 0;
  std::vector<std::string> warnings;
};

struct ApproxParams {
  double tol = 1e-4;      // occupancy tolerance; level queries use tol/2
  double tol_geo = 1e-6;  // geometric termination for projections
  int K = 10;             // external sample count (projection method)
  int n_des = 32;         // support directions (level-set method)
  double r_scale = 1.2;   // external radius vs level-set circumradius
  int r_retries = 4;      // radius doublings before giving up
};

using PhiFn = std::function<double(const VectorXd&)>;

// K deterministic points on the sphere of the given radius; 2D points are
// evenly spaced starting at +e1.
MatrixXd sample_sphere(int n, int K, const VectorXd& center, double radius);

// Euclidean projection of external point p onto {phi >= alpha}: bisection
// along [y_interior, p] to the boundary, then tangential pattern search with
// radial re-projection and golden-section refinement.
VectorXd project_to_levelset(const VectorXd& p, const PhiFn& phi, double alpha,
                             const VectorXd& y_interior, double tol_phi,
                             double tol_geo);

struct TightPolyPair {
  geom::VPolytope inner;
  geom::HPolytope outer;
  std::vector<VectorXd> projections;
  std::vector<std::string> warnings;
};

// Sandwich polytopes of a convex superlevel set from external points: the
// hull of the projections inside, the supporting halfspaces outside.
TightPolyPair tight_poly_pair(const std::vector<VectorXd>& externals,
                              const PhiFn& phi, double alpha,
                              const VectorXd& y_interior, double tol_phi,
                              double tol_geo);

// Projection-based approximation pair of {phi >= alpha}.
OccupySetApprox occupyset_projection(const fsr::GaussianState& g,
                                     const geom::ConvexShape& shape, double alpha,
                                     int tau, const ApproxParams& params = {});

// Density-level-set over-approximation: the kappa = alpha / volume(shape)
// superlevel ellipsoid of the state density, Minkowski-padded by the shape,
// sampled into a support polytope. Over-approximation only.
OccupySetApprox occupyset_minkowski(const fsr::GaussianState& g,
                                    const geom::ConvexShape& shape, double alpha,
                                    int tau, const ApproxParams& params = {});

// Rigid translation of an approximation pair (offline-at-origin reuse).
OccupySetApprox translate_occupyset(const OccupySetApprox& approx, const VectorXd& v);

struct CoverPiece {
  dyn::DiscreteSequence sequence;
  double alpha_s = 0.0;
  fsr::GaussianState gauss;
  OccupySetApprox approx;
};

struct DmspCover {
  std::vector<CoverPiece> pieces;
  double alpha = 0.0;
  int tau = 0;
  std::string method;
};

// Per-mode-path cover of the switched system's keep-out set: each path gets
// alpha_s = alpha / (path count * path probability); paths whose occupancy
// peak cannot reach alpha_s carry an empty piece.
DmspCover dmsp_cover(const dyn::DmspModel& model, const geom::ConvexShape& shape,
                     double alpha, int tau, const VectorXd& x0,
                     const std::string& method, const ApproxParams& params = {});

}  // namespace fsreach::occupyset
