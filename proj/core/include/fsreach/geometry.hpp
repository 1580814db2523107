#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

namespace fsreach::geom {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

// Axis-aligned box {x : |x_i - c_i| <= a_i}; side length along axis i is 2*a_i.
struct Box {
  VectorXd center;
  VectorXd half_width;
};

// Euclidean ball {x : ||x - c|| <= r}.
struct Ball {
  VectorXd center;
  double radius = 0.0;
};

// Halfspace intersection {x : A x <= b}.
struct HPolytope {
  MatrixXd A;
  VectorXd b;
};

// Convex hull of a finite vertex set; vertices are columns of V.
struct VPolytope {
  MatrixXd V;
};

// {x : (x - c)' Q^+ (x - c) <= 1} with Q symmetric PSD (degenerate allowed).
struct Ellipsoid {
  VectorXd center;
  MatrixXd Q;
};

using ConvexShape = std::variant<Box, Ball, HPolytope, VPolytope>;

struct unbounded_support_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int dim(const ConvexShape& s);

// Support function sup_{y in S} l'y. HPolytope uses the embedded dense LP and
// throws unbounded_support_error on an unbounded direction.
double support(const ConvexShape& s, const VectorXd& dir);
double support(const Ellipsoid& e, const VectorXd& dir);

// Support of a Minkowski sum: sum of the members' supports.
double minkowski_support(const std::vector<ConvexShape>& parts,
                         const std::vector<Ellipsoid>& ellipsoids,
                         const VectorXd& dir);

ConvexShape reflect(const ConvexShape& s);               // about the origin
ConvexShape translate(const ConvexShape& s, const VectorXd& v);
Ellipsoid translate(const Ellipsoid& e, const VectorXd& v);

// True when reflect(s) equals s (box/ball: centered at origin; V-polytope:
// vertex set closed under negation; H-polytope: probed support equality).
bool centrally_symmetric(const ConvexShape& s, double tol = 1e-9);

bool membership(const ConvexShape& s, const VectorXd& x, double tol = 1e-9);
bool membership(const Ellipsoid& e, const VectorXd& x, double tol = 1e-9);

// Lebesgue volume. Boxes/balls in any dimension; polytopes up to dimension 3.
double measure(const ConvexShape& s);

// Superlevel set {x : gaussian density >= kappa} of N(mean, cov) as an
// ellipsoid; nullopt when kappa exceeds the density peak. cov must be SPD.
std::optional<Ellipsoid> superlevel_ellipsoid(const VectorXd& mean,
                                              const MatrixXd& cov,
                                              double kappa);

struct SupportSample {
  VectorXd dir;
  double value = 0.0;
};

struct SupportPolytope {
  HPolytope poly;
  bool bounded = true;  // false when the directions do not positively span
};

// Outer polytope {x : dir_i' x <= value_i} from support samples.
SupportPolytope polytope_from_supports(const std::vector<SupportSample>& samples);

// Minimal vertex set of the convex hull; 2D result is ordered CCW.
VPolytope convex_hull(const MatrixXd& points);

// K evenly spaced unit directions in the plane, angle 2*pi*k/K from +e1.
std::vector<VectorXd> directions_2d(int K);

// Vertices of a bounded 2D H-polytope, ordered CCW; empty when infeasible.
MatrixXd hpolytope_vertices_2d(const HPolytope& poly, double tol = 1e-9);

// Halfspace representation of a 2D vertex polytope (hull edges).
HPolytope hrep_2d(const VPolytope& poly);

// Interval {t : (x1, t) in S} for a 2D convex shape; nullopt when the slice
// misses the shape. Used by the conditional-slice integrators.
std::optional<std::pair<double, double>> chord_2d(const ConvexShape& s, double x1);

// Intersection {t : point + t*dir in S} of a line with a convex shape.
std::optional<std::pair<double, double>> line_intersection(
    const ConvexShape& s, const VectorXd& point, const VectorXd& dir);

// Axis-aligned bounding box via supports in +/- e_i.
void bounding_box(const ConvexShape& s, VectorXd& lo, VectorXd& hi);

// Largest distance from any point of the shape to the given reference point.
double bounding_radius(const ConvexShape& s, const VectorXd& ref);

// Largest distance between two points of the shape (diameter).
double diameter(const ConvexShape& s);

}  // namespace fsreach::geom
