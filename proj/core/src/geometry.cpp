#include "fsreach/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsreach/lp.hpp"

namespace fsreach::geom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

void check_dir(const ConvexShape& s, const VectorXd& dir) {
  if (dim(s) != dir.size()) throw std::invalid_argument("support: dimension mismatch");
  if (dir.norm() == 0.0) throw std::invalid_argument("support: zero direction");
}

// Monotone-chain hull of 2D points; returns CCW-ordered strict corners.
std::vector<Vector2d> hull_2d(std::vector<Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vector2d& a, const Vector2d& b) {
                          return (a - b).norm() <= 1e-12 * (1.0 + a.norm());
                        }),
            pts.end());
  const int k = static_cast<int>(pts.size());
  if (k <= 2) return pts;
  auto cross = [](const Vector2d& o, const Vector2d& a, const Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  double scale = 0.0;
  for (const auto& p : pts) scale = std::fmax(scale, p.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * std::fmax(1.0, scale * scale);
  std::vector<Vector2d> h(static_cast<size_t>(2 * k));
  int m = 0;
  for (int i = 0; i < k; ++i) {
    while (m >= 2 && cross(h[static_cast<size_t>(m - 2)], h[static_cast<size_t>(m - 1)],
                           pts[static_cast<size_t>(i)]) <= tol)
      --m;
    h[static_cast<size_t>(m++)] = pts[static_cast<size_t>(i)];
  }
  for (int i = k - 2, lower = m + 1; i >= 0; --i) {
    while (m >= lower && cross(h[static_cast<size_t>(m - 2)],
                               h[static_cast<size_t>(m - 1)],
                               pts[static_cast<size_t>(i)]) <= tol)
      --m;
    h[static_cast<size_t>(m++)] = pts[static_cast<size_t>(i)];
  }
  h.resize(static_cast<size_t>(m - 1));
  return h;
}

double shoelace(const std::vector<Vector2d>& poly) {
  const int k = static_cast<int>(poly.size());
  if (k < 3) return 0.0;
  double a = 0.0;
  for (int i = 0; i < k; ++i) {
    const Vector2d& p = poly[static_cast<size_t>(i)];
    const Vector2d& q = poly[static_cast<size_t>((i + 1) % k)];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * std::fabs(a);
}

}  // namespace

HPolytope hrep_2d(const VPolytope& poly) {
  if (poly.V.rows() != 2) throw std::invalid_argument("hrep_2d: not planar");
  std::vector<Vector2d> pts;
  for (int j = 0; j < poly.V.cols(); ++j) pts.emplace_back(poly.V.col(j));
  const std::vector<Vector2d> h = hull_2d(std::move(pts));
  const int k = static_cast<int>(h.size());
  if (k == 0) throw std::invalid_argument("hrep_2d: empty vertex set");
  if (k == 1) {
    // Point: box-like degenerate representation.
    MatrixXd A(4, 2);
    A << 1, 0, -1, 0, 0, 1, 0, -1;
    VectorXd b(4);
    b << h[0].x(), -h[0].x(), h[0].y(), -h[0].y();
    return {A, b};
  }
  if (k == 2) {
    const Vector2d d = (h[1] - h[0]).normalized();
    const Vector2d nrm(-d.y(), d.x());
    MatrixXd A(4, 2);
    VectorXd b(4);
    A.row(0) = nrm.transpose();
    b(0) = nrm.dot(h[0]);
    A.row(1) = -nrm.transpose();
    b(1) = -nrm.dot(h[0]);
    A.row(2) = d.transpose();
    b(2) = std::fmax(d.dot(h[0]), d.dot(h[1]));
    A.row(3) = -d.transpose();
    b(3) = std::fmax(-d.dot(h[0]), -d.dot(h[1]));
    return {A, b};
  }
  MatrixXd A(k, 2);
  VectorXd b(k);
  for (int i = 0; i < k; ++i) {
    const Vector2d& p = h[static_cast<size_t>(i)];
    const Vector2d& q = h[static_cast<size_t>((i + 1) % k)];
    const Vector2d edge = q - p;
    Vector2d nrm(edge.y(), -edge.x());  // outward for CCW order
    nrm.normalize();
    A.row(i) = nrm.transpose();
    b(i) = nrm.dot(p);
  }
  return {A, b};
}

namespace {

std::vector<VectorXd> hpolytope_vertices_3d(const HPolytope& poly) {
  const int rows = static_cast<int>(poly.A.rows());
  std::vector<VectorXd> verts;
  const double scale = std::fmax(1.0, poly.b.cwiseAbs().maxCoeff());
  for (int i = 0; i < rows; ++i)
    for (int j = i + 1; j < rows; ++j)
      for (int k = j + 1; k < rows; ++k) {
        Eigen::Matrix3d M;
        M.row(0) = poly.A.row(i);
        M.row(1) = poly.A.row(j);
        M.row(2) = poly.A.row(k);
        if (std::fabs(M.determinant()) < 1e-10) continue;
        Eigen::Vector3d rhs(poly.b(i), poly.b(j), poly.b(k));
        const Eigen::Vector3d v = M.fullPivLu().solve(rhs);
        if (((poly.A * v - poly.b).array() <= 1e-7 * scale).all()) {
          bool dup = false;
          for (const auto& w : verts)
            if ((w - v).norm() <= 1e-8 * (1.0 + v.norm())) {
              dup = true;
              break;
            }
          if (!dup) verts.emplace_back(v);
        }
      }
  return verts;
}

double polytope_volume_3d(const std::vector<VectorXd>& verts) {
  const int k = static_cast<int>(verts.size());
  if (k < 4) return 0.0;
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (const auto& v : verts) g += v;
  g /= k;
  double scale = 1.0;
  for (const auto& v : verts) scale = std::fmax(scale, (v - g).norm());
  const double tol = 1e-9 * scale;

  struct Plane {
    Eigen::Vector3d n;
    double off;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      for (int l = j + 1; l < k; ++l) {
        Eigen::Vector3d n =
            (verts[j] - verts[i]).head<3>().cross((verts[l] - verts[i]).head<3>());
        const double nn = n.norm();
        if (nn <= tol) continue;
        n /= nn;
        double off = n.dot(verts[static_cast<size_t>(i)].head<3>());
        if (n.dot(g) > off) {
          n = -n;
          off = -off;
        }
        bool facet = true;
        for (const auto& v : verts)
          if (n.dot(v.head<3>()) > off + tol) {
            facet = false;
            break;
          }
        if (!facet) continue;
        bool dup = false;
        for (const auto& pl : planes)
          if ((pl.n - n).norm() <= 1e-7 && std::fabs(pl.off - off) <= 1e-7 * scale) {
            dup = true;
            break;
          }
        if (!dup) planes.push_back({n, off});
      }

  double vol = 0.0;
  for (const auto& pl : planes) {
    std::vector<Eigen::Vector3d> face;
    for (const auto& v : verts)
      if (std::fabs(pl.n.dot(v.head<3>()) - pl.off) <= tol) face.push_back(v.head<3>());
    if (face.size() < 3) continue;
    Eigen::Vector3d fc = Eigen::Vector3d::Zero();
    for (const auto& v : face) fc += v;
    fc /= static_cast<double>(face.size());
    Eigen::Vector3d u = (face[0] - fc).normalized();
    const Eigen::Vector3d w = pl.n.cross(u);
    std::sort(face.begin(), face.end(),
              [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
                return std::atan2(w.dot(a - fc), u.dot(a - fc)) <
                       std::atan2(w.dot(b - fc), u.dot(b - fc));
              });
    for (size_t i = 0; i < face.size(); ++i) {
      const Eigen::Vector3d& a = face[i];
      const Eigen::Vector3d& b = face[(i + 1) % face.size()];
      vol += std::fabs((a - g).dot((b - g).cross(fc - g))) / 6.0;
    }
  }
  return vol;
}

bool hpolytope_bounded(const HPolytope& poly) {
  const int n = static_cast<int>(poly.A.cols());
  for (int i = 0; i < n; ++i) {
    for (double sgn : {1.0, -1.0}) {
      VectorXd d = VectorXd::Zero(n);
      d(i) = sgn;
      const lp::LpResult r = lp::lp_max(d, poly.A, poly.b);
      if (r.status == lp::LpStatus::unbounded) return false;
      if (r.status == lp::LpStatus::infeasible)
        throw std::invalid_argument("measure: empty polytope");
    }
  }
  return true;
}

}  // namespace

int dim(const ConvexShape& s) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>)
          return static_cast<int>(v.center.size());
        else if constexpr (std::is_same_v<T, Ball>)
          return static_cast<int>(v.center.size());
        else if constexpr (std::is_same_v<T, HPolytope>)
          return static_cast<int>(v.A.cols());
        else
          return static_cast<int>(v.V.rows());
      },
      s);
}

double support(const ConvexShape& s, const VectorXd& dir) {
  check_dir(s, dir);
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          return v.center.dot(dir) + v.half_width.cwiseProduct(dir.cwiseAbs()).sum();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return v.center.dot(dir) + v.radius * dir.norm();
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          if (v.V.cols() == 0) throw std::invalid_argument("support: empty polytope");
          return (dir.transpose() * v.V).maxCoeff();
        } else {
          const lp::LpResult r = lp::lp_max(dir, v.A, v.b);
          if (r.status == lp::LpStatus::unbounded)
            throw unbounded_support_error("support: unbounded direction");
          if (r.status == lp::LpStatus::infeasible)
            throw std::invalid_argument("support: empty polytope");
          return r.value;
        }
      },
      s);
}

double support(const Ellipsoid& e, const VectorXd& dir) {
  if (e.center.size() != dir.size())
    throw std::invalid_argument("support: dimension mismatch");
  const double q = dir.dot(e.Q * dir);
  return e.center.dot(dir) + std::sqrt(std::fmax(0.0, q));
}

double minkowski_support(const std::vector<ConvexShape>& parts,
                         const std::vector<Ellipsoid>& ellipsoids,
                         const VectorXd& dir) {
  if (parts.empty() && ellipsoids.empty())
    throw std::invalid_argument("minkowski_support: no summands");
  double total = 0.0;
  for (const auto& s : parts) total += support(s, dir);
  for (const auto& e : ellipsoids) total += support(e, dir);
  return total;
}

ConvexShape reflect(const ConvexShape& s) {
  return std::visit(
      [](const auto& v) -> ConvexShape {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          return Box{-v.center, v.half_width};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return Ball{-v.center, v.radius};
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          return HPolytope{-v.A, v.b};
        } else {
          return VPolytope{-v.V};
        }
      },
      s);
}

ConvexShape translate(const ConvexShape& s, const VectorXd& v) {
  if (dim(s) != v.size()) throw std::invalid_argument("translate: dimension mismatch");
  return std::visit(
      [&](const auto& sh) -> ConvexShape {
        using T = std::decay_t<decltype(sh)>;
        if constexpr (std::is_same_v<T, Box>) {
          return Box{sh.center + v, sh.half_width};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return Ball{sh.center + v, sh.radius};
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          return HPolytope{sh.A, sh.b + sh.A * v};
        } else {
          return VPolytope{sh.V.colwise() + v};
        }
      },
      s);
}

Ellipsoid translate(const Ellipsoid& e, const VectorXd& v) {
  return Ellipsoid{e.center + v, e.Q};
}

bool centrally_symmetric(const ConvexShape& s, double tol) {
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box> || std::is_same_v<T, Ball>) {
          return v.center.cwiseAbs().maxCoeff() <= tol;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          const int k = static_cast<int>(v.V.cols());
          if (k == 0) return false;
          const double scale = 1.0 + v.V.cwiseAbs().maxCoeff();
          for (int j = 0; j < k; ++j) {
            bool found = false;
            for (int l = 0; l < k; ++l)
              if ((v.V.col(j) + v.V.col(l)).norm() <= tol * scale) {
                found = true;
                break;
              }
            if (!found) return false;
          }
          return true;
        } else {
          // Mirror-row test on the normalized representation (sufficient).
          const int k = static_cast<int>(v.A.rows());
          MatrixXd N(k, v.A.cols());
          VectorXd c(k);
          for (int i = 0; i < k; ++i) {
            const double nn = v.A.row(i).norm();
            if (nn == 0.0) return false;
            N.row(i) = v.A.row(i) / nn;
            c(i) = v.b(i) / nn;
          }
          const double scale = 1.0 + c.cwiseAbs().maxCoeff();
          for (int i = 0; i < k; ++i) {
            bool found = false;
            for (int j = 0; j < k; ++j)
              if ((N.row(i) + N.row(j)).norm() <= tol &&
                  std::fabs(c(i) - c(j)) <= tol * scale) {
                found = true;
                break;
              }
            if (!found) return false;
          }
          return true;
        }
      },
      s);
}

bool membership(const ConvexShape& s, const VectorXd& x, double tol) {
  if (dim(s) != x.size()) throw std::invalid_argument("membership: dimension mismatch");
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          return ((x - v.center).cwiseAbs() - v.half_width).maxCoeff() <= tol;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return (x - v.center).norm() <= v.radius + tol;
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          for (int i = 0; i < v.A.rows(); ++i) {
            const double rs = std::fmax(1.0, v.A.row(i).norm());
            if (v.A.row(i).dot(x) - v.b(i) > tol * rs) return false;
          }
          return true;
        } else {
          if (v.V.rows() == 2) {
            const HPolytope h = hrep_2d(v);
            for (int i = 0; i < h.A.rows(); ++i)
              if (h.A.row(i).dot(x) - h.b(i) > tol) return false;
            return true;
          }
          return lp::in_convex_hull(v.V, x, std::fmax(tol, 1e-9));
        }
      },
      s);
}

bool membership(const Ellipsoid& e, const VectorXd& x, double tol) {
  // (x-c)' Q^+ (x-c) <= 1 with null-direction components required to vanish.
  const VectorXd d = x - e.center;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(e.Q);
  const VectorXd evals = es.eigenvalues();
  const MatrixXd evecs = es.eigenvectors();
  const double thresh = 1e-12 * std::fmax(1.0, evals.cwiseAbs().maxCoeff());
  double quad = 0.0;
  for (int i = 0; i < evals.size(); ++i) {
    const double proj = evecs.col(i).dot(d);
    if (evals(i) <= thresh) {
      if (std::fabs(proj) > tol) return false;
    } else {
      quad += proj * proj / evals(i);
    }
  }
  return quad <= 1.0 + tol;
}

double measure(const ConvexShape& s) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          return (2.0 * v.half_width).prod();
        } else if constexpr (std::is_same_v<T, Ball>) {
          const int n = static_cast<int>(v.center.size());
          return std::pow(M_PI, 0.5 * n) * std::pow(v.radius, n) /
                 std::tgamma(0.5 * n + 1.0);
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          const int n = static_cast<int>(v.V.rows());
          if (n == 1) {
            return v.V.row(0).maxCoeff() - v.V.row(0).minCoeff();
          } else if (n == 2) {
            std::vector<Vector2d> pts;
            for (int j = 0; j < v.V.cols(); ++j) pts.emplace_back(v.V.col(j));
            return shoelace(hull_2d(std::move(pts)));
          } else if (n == 3) {
            std::vector<VectorXd> verts;
            for (int j = 0; j < v.V.cols(); ++j) verts.emplace_back(v.V.col(j));
            return polytope_volume_3d(verts);
          }
          throw std::invalid_argument("measure: polytope dimension above 3");
        } else {
          const int n = static_cast<int>(v.A.cols());
          if (!hpolytope_bounded(v))
            throw unbounded_support_error("measure: unbounded polytope");
          if (n == 1) {
            VectorXd e(1);
            e(0) = 1.0;
            return support(ConvexShape{v}, e) + support(ConvexShape{v}, VectorXd(-e));
          } else if (n == 2) {
            const MatrixXd verts = hpolytope_vertices_2d(v);
            std::vector<Vector2d> pts;
            for (int j = 0; j < verts.cols(); ++j) pts.emplace_back(verts.col(j));
            return shoelace(hull_2d(std::move(pts)));
          } else if (n == 3) {
            return polytope_volume_3d(hpolytope_vertices_3d(v));
          }
          throw std::invalid_argument("measure: polytope dimension above 3");
        }
      },
      s);
}

std::optional<Ellipsoid> superlevel_ellipsoid(const VectorXd& mean,
                                              const MatrixXd& cov, double kappa) {
  if (kappa <= 0.0) throw std::invalid_argument("superlevel_ellipsoid: kappa <= 0");
  const int n = static_cast<int>(mean.size());
  if (cov.rows() != n || cov.cols() != n)
    throw std::invalid_argument("superlevel_ellipsoid: dimension mismatch");
  const double det2pi = std::pow(2.0 * M_PI, n) * cov.determinant();
  if (det2pi <= 0.0)
    throw std::invalid_argument("superlevel_ellipsoid: singular covariance");
  const double arg = kappa * std::sqrt(det2pi);
  if (arg >= 1.0) return std::nullopt;
  return Ellipsoid{mean, -2.0 * std::log(arg) * cov};
}

SupportPolytope polytope_from_supports(const std::vector<SupportSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("polytope_from_supports: empty");
  const int n = static_cast<int>(samples.front().dir.size());
  MatrixXd A(static_cast<int>(samples.size()), n);
  VectorXd b(static_cast<int>(samples.size()));
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].dir.size() != n)
      throw std::invalid_argument("polytope_from_supports: mixed dimensions");
    A.row(static_cast<int>(i)) = samples[i].dir.transpose();
    b(static_cast<int>(i)) = samples[i].value;
  }
  SupportPolytope out{HPolytope{A, b}, true};
  out.bounded = hpolytope_bounded(out.poly);
  return out;
}

VPolytope convex_hull(const MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  const int k = static_cast<int>(points.cols());
  if (k == 0) throw std::invalid_argument("convex_hull: no points");
  if (n == 1) {
    MatrixXd V(1, 2);
    V(0, 0) = points.row(0).minCoeff();
    V(0, 1) = points.row(0).maxCoeff();
    if (V(0, 0) == V(0, 1)) return VPolytope{V.leftCols(1)};
    return VPolytope{V};
  }
  if (n == 2) {
    std::vector<Vector2d> pts;
    for (int j = 0; j < k; ++j) pts.emplace_back(points.col(j));
    const std::vector<Vector2d> h = hull_2d(std::move(pts));
    MatrixXd V(2, static_cast<int>(h.size()));
    for (size_t j = 0; j < h.size(); ++j) V.col(static_cast<int>(j)) = h[j];
    return VPolytope{V};
  }
  // Extreme-point filter: keep points not in the hull of the others.
  std::vector<int> keep;
  for (int j = 0; j < k; ++j) {
    MatrixXd others(n, k - 1);
    int c = 0;
    for (int l = 0; l < k; ++l)
      if (l != j) others.col(c++) = points.col(l);
    if (k == 1 || !lp::in_convex_hull(others, points.col(j), 1e-9)) keep.push_back(j);
  }
  MatrixXd V(n, static_cast<int>(keep.size()));
  for (size_t j = 0; j < keep.size(); ++j) V.col(static_cast<int>(j)) = points.col(keep[j]);
  return VPolytope{V};
}

std::vector<VectorXd> directions_2d(int K) {
  if (K < 1) throw std::invalid_argument("directions_2d: K < 1");
  std::vector<VectorXd> dirs;
  dirs.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double a = 2.0 * M_PI * k / K;
    VectorXd d(2);
    d << std::cos(a), std::sin(a);
    dirs.push_back(d);
  }
  return dirs;
}

MatrixXd hpolytope_vertices_2d(const HPolytope& poly, double tol) {
  if (poly.A.cols() != 2) throw std::invalid_argument("hpolytope_vertices_2d: not 2D");
  const int rows = static_cast<int>(poly.A.rows());
  const double scale = std::fmax(1.0, poly.b.cwiseAbs().maxCoeff());
  std::vector<Vector2d> verts;
  for (int i = 0; i < rows; ++i)
    for (int j = i + 1; j < rows; ++j) {
      const double det =
          poly.A(i, 0) * poly.A(j, 1) - poly.A(i, 1) * poly.A(j, 0);
      const double nn = poly.A.row(i).norm() * poly.A.row(j).norm();
      if (std::fabs(det) <= 1e-12 * std::fmax(1.0, nn)) continue;
      Vector2d v;
      v.x() = (poly.b(i) * poly.A(j, 1) - poly.A(i, 1) * poly.b(j)) / det;
      v.y() = (poly.A(i, 0) * poly.b(j) - poly.b(i) * poly.A(j, 0)) / det;
      bool feasible = true;
      for (int r = 0; r < rows; ++r) {
        const double rs = std::fmax(1.0, poly.A.row(r).norm() * (1.0 + v.norm()));
        if (poly.A.row(r).dot(v) - poly.b(r) > std::fmax(tol, 1e-9) * rs * scale /
                                                   std::fmax(1.0, scale)) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      bool dup = false;
      for (const auto& w : verts)
        if ((w - v).norm() <= 1e-9 * (1.0 + v.norm())) {
          dup = true;
          break;
        }
      if (!dup) verts.push_back(v);
    }
  if (verts.empty()) return MatrixXd(2, 0);
  Vector2d c = Vector2d::Zero();
  for (const auto& v : verts) c += v;
  c /= static_cast<double>(verts.size());
  std::sort(verts.begin(), verts.end(), [&](const Vector2d& a, const Vector2d& b) {
    return std::atan2(a.y() - c.y(), a.x() - c.x()) <
           std::atan2(b.y() - c.y(), b.x() - c.x());
  });
  MatrixXd out(2, static_cast<int>(verts.size()));
  for (size_t j = 0; j < verts.size(); ++j) out.col(static_cast<int>(j)) = verts[j];
  return out;
}

std::optional<std::pair<double, double>> chord_2d(const ConvexShape& s, double x1) {
  if (dim(s) != 2) throw std::invalid_argument("chord_2d: not 2D");
  return std::visit(
      [&](const auto& v) -> std::optional<std::pair<double, double>> {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (std::fabs(x1 - v.center(0)) > v.half_width(0)) return std::nullopt;
          return std::make_pair(v.center(1) - v.half_width(1),
                                v.center(1) + v.half_width(1));
        } else if constexpr (std::is_same_v<T, Ball>) {
          const double dx = x1 - v.center(0);
          const double rem = sq(v.radius) - sq(dx);
          if (rem < 0.0) return std::nullopt;
          const double h = std::sqrt(rem);
          return std::make_pair(v.center(1) - h, v.center(1) + h);
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          double lo = -kInf, hi = kInf;
          for (int i = 0; i < v.A.rows(); ++i) {
            const double a1 = v.A(i, 0), a2 = v.A(i, 1), bi = v.b(i);
            if (std::fabs(a2) <= 1e-14 * std::fmax(1.0, std::fabs(a1))) {
              if (a1 * x1 > bi + 1e-12 * std::fmax(1.0, std::fabs(bi)))
                return std::nullopt;
            } else if (a2 > 0.0) {
              hi = std::fmin(hi, (bi - a1 * x1) / a2);
            } else {
              lo = std::fmax(lo, (bi - a1 * x1) / a2);
            }
          }
          if (lo > hi) return std::nullopt;
          return std::make_pair(lo, hi);
        } else {
          return chord_2d(ConvexShape{hrep_2d(v)}, x1);
        }
      },
      s);
}

std::optional<std::pair<double, double>> line_intersection(const ConvexShape& s,
                                                           const VectorXd& point,
                                                           const VectorXd& dir) {
  const int n = dim(s);
  if (point.size() != n || dir.size() != n)
    throw std::invalid_argument("line_intersection: dimension mismatch");
  return std::visit(
      [&](const auto& v) -> std::optional<std::pair<double, double>> {
        using T = std::decay_t<decltype(v)>;
        double lo = -kInf, hi = kInf;
        if constexpr (std::is_same_v<T, Box>) {
          for (int i = 0; i < n; ++i) {
            const double p = point(i) - v.center(i), d = dir(i), a = v.half_width(i);
            if (std::fabs(d) <= 1e-14 * std::fmax(1.0, std::fabs(p))) {
              if (std::fabs(p) > a + 1e-12) return std::nullopt;
            } else {
              double t1 = (-a - p) / d, t2 = (a - p) / d;
              if (t1 > t2) std::swap(t1, t2);
              lo = std::fmax(lo, t1);
              hi = std::fmin(hi, t2);
            }
          }
          if (lo > hi) return std::nullopt;
          return std::make_pair(lo, hi);
        } else if constexpr (std::is_same_v<T, Ball>) {
          const VectorXd p = point - v.center;
          const double a = dir.squaredNorm();
          const double bq = 2.0 * p.dot(dir);
          const double cq = p.squaredNorm() - sq(v.radius);
          const double disc = bq * bq - 4.0 * a * cq;
          if (disc < 0.0 || a == 0.0) {
            if (a == 0.0 && cq <= 0.0) return std::make_pair(-kInf, kInf);
            return std::nullopt;
          }
          const double sd = std::sqrt(disc);
          return std::make_pair((-bq - sd) / (2.0 * a), (-bq + sd) / (2.0 * a));
        } else if constexpr (std::is_same_v<T, HPolytope>) {
          for (int i = 0; i < v.A.rows(); ++i) {
            const double ad = v.A.row(i).dot(dir);
            const double ap = v.A.row(i).dot(point);
            const double rs = std::fmax(1.0, v.A.row(i).norm());
            if (std::fabs(ad) <= 1e-14 * rs * std::fmax(1.0, dir.norm())) {
              if (ap > v.b(i) + 1e-12 * rs * std::fmax(1.0, std::fabs(v.b(i))))
                return std::nullopt;
            } else if (ad > 0.0) {
              hi = std::fmin(hi, (v.b(i) - ap) / ad);
            } else {
              lo = std::fmax(lo, (v.b(i) - ap) / ad);
            }
          }
          if (lo > hi) return std::nullopt;
          return std::make_pair(lo, hi);
        } else {
          if (n == 2) return line_intersection(ConvexShape{hrep_2d(v)}, point, dir);
          // max / min t over {V lambda = point + t dir, lambda in simplex}.
          const int K = static_cast<int>(v.V.cols());
          const int vars = K + 1;  // lambda, t
          std::vector<Eigen::RowVectorXd> rows;
          std::vector<double> rhs;
          auto add_row = [&](const Eigen::RowVectorXd& r, double val) {
            rows.push_back(r);
            rhs.push_back(val);
          };
          for (int i = 0; i < n; ++i) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(vars);
            r.head(K) = v.V.row(i);
            r(K) = -dir(i);
            add_row(r, point(i));
            add_row(-r, -point(i));
          }
          Eigen::RowVectorXd ones = Eigen::RowVectorXd::Zero(vars);
          ones.head(K).setOnes();
          add_row(ones, 1.0);
          add_row(-ones, -1.0);
          for (int j = 0; j < K; ++j) {
            Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(vars);
            r(j) = -1.0;
            add_row(r, 0.0);
          }
          MatrixXd A(static_cast<int>(rows.size()), vars);
          VectorXd b(static_cast<int>(rows.size()));
          for (size_t i = 0; i < rows.size(); ++i) {
            A.row(static_cast<int>(i)) = rows[i];
            b(static_cast<int>(i)) = rhs[i];
          }
          VectorXd ct = VectorXd::Zero(vars);
          ct(K) = 1.0;
          const lp::LpResult up = lp::lp_max(ct, A, b);
          if (up.status == lp::LpStatus::infeasible) return std::nullopt;
          const lp::LpResult dn = lp::lp_max(VectorXd(-ct), A, b);
          if (dn.status == lp::LpStatus::infeasible) return std::nullopt;
          const double thi =
              up.status == lp::LpStatus::optimal ? up.value : kInf;
          const double tlo =
              dn.status == lp::LpStatus::optimal ? -dn.value : -kInf;
          return std::make_pair(tlo, thi);
        }
      },
      s);
}

void bounding_box(const ConvexShape& s, VectorXd& lo, VectorXd& hi) {
  const int n = dim(s);
  lo.resize(n);
  hi.resize(n);
  for (int i = 0; i < n; ++i) {
    VectorXd e = VectorXd::Zero(n);
    e(i) = 1.0;
    hi(i) = support(s, e);
    lo(i) = -support(s, VectorXd(-e));
  }
}

double bounding_radius(const ConvexShape& s, const VectorXd& ref) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          double r2 = 0.0;
          for (int i = 0; i < v.center.size(); ++i)
            r2 += sq(std::fmax(std::fabs(v.center(i) - v.half_width(i) - ref(i)),
                               std::fabs(v.center(i) + v.half_width(i) - ref(i))));
          return std::sqrt(r2);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return (v.center - ref).norm() + v.radius;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          double r = 0.0;
          for (int j = 0; j < v.V.cols(); ++j)
            r = std::fmax(r, (v.V.col(j) - ref).norm());
          return r;
        } else {
          if (v.A.cols() == 2) {
            const MatrixXd verts = hpolytope_vertices_2d(v);
            double r = 0.0;
            for (int j = 0; j < verts.cols(); ++j)
              r = std::fmax(r, (verts.col(j) - ref).norm());
            return r;
          }
          VectorXd lo, hi;
          bounding_box(ConvexShape{v}, lo, hi);
          double r2 = 0.0;
          for (int i = 0; i < lo.size(); ++i)
            r2 += sq(std::fmax(std::fabs(lo(i) - ref(i)), std::fabs(hi(i) - ref(i))));
          return std::sqrt(r2);
        }
      },
      s);
}

double diameter(const ConvexShape& s) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Box>) {
          return 2.0 * v.half_width.norm();
        } else if constexpr (std::is_same_v<T, Ball>) {
          return 2.0 * v.radius;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          double d = 0.0;
          for (int i = 0; i < v.V.cols(); ++i)
            for (int j = i + 1; j < v.V.cols(); ++j)
              d = std::fmax(d, (v.V.col(i) - v.V.col(j)).norm());
          return d;
        } else {
          if (v.A.cols() == 2) {
            const MatrixXd verts = hpolytope_vertices_2d(v);
            double d = 0.0;
            for (int i = 0; i < verts.cols(); ++i)
              for (int j = i + 1; j < verts.cols(); ++j)
                d = std::fmax(d, (verts.col(i) - verts.col(j)).norm());
            return d;
          }
          VectorXd lo, hi;
          bounding_box(ConvexShape{v}, lo, hi);
          return (hi - lo).norm();
        }
      },
      s);
}

}  // namespace fsreach::geom
