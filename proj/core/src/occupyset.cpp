#include "fsreach/occupyset.hpp"

#include <cmath>
#include <stdexcept>

namespace fsreach::occupyset {

namespace {

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inside/outside bracket {phi >= alpha} along center + t*dir, unit dir.
// Starts from a radius hint, expands or shrinks to bracket the boundary,
// then bisects geometrically to width tol_geo. t_in is inside, t_out outside.
struct Bracket {
  double t_in = 0.0;
  double t_out = 0.0;
};

Bracket bisect_boundary(const PhiFn& phi, double alpha, const VectorXd& center,
                        const VectorXd& dir, double hint, double tol_geo) {
  double lo = 0.0, hi = -1.0;
  double t = std::fmax(hint, 1e-9);
  for (int it = 0; it < 120; ++it) {
    if (phi(center + t * dir) >= alpha) {
      lo = t;
      t *= 1.35;
    } else {
      hi = t;
      if (lo > 0.0) break;
      t /= 1.35;
      if (t < 1e-12) break;
    }
    if (lo > 0.0 && hi > 0.0) break;
  }
  if (hi < 0.0)
    throw numerical_error("bisect_boundary: level boundary not found along ray");
  while (hi - lo > tol_geo) {
    const double mid = 0.5 * (lo + hi);
    if (phi(center + mid * dir) >= alpha)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

// Support value of {phi >= alpha} in direction a (unit), i.e. max a.y over
// the set. Boundary points are taken at the outside bracket endpoint, so the
// returned value never undershoots the true support and the halfspace
// a.y <= b supports the set by construction; the overshoot is O(tol_geo).
// A max-value query stays accurate even where the boundary is flat, unlike
// the location of the maximizer itself.
double levelset_support(const PhiFn& phi, double alpha, const VectorXd& center,
                        const VectorXd& a, double hint, double tol_geo) {
  const int n = static_cast<int>(center.size());
  double t_hint = std::fmax(hint, 1e-9);

  if (n == 2) {
    auto value_at = [&](double theta) {
      VectorXd w(2);
      w << std::cos(theta), std::sin(theta);
      const Bracket br = bisect_boundary(phi, alpha, center, w, t_hint, tol_geo);
      t_hint = br.t_in;
      return a.dot(center + br.t_out * w);
    };

    // Bracket the maximum of the (unimodal over the closed curve) objective
    // starting from the boundary point in direction a, then golden section.
    double m = std::atan2(a(1), a(0));
    double fm = value_at(m);
    double h = 0.05;
    double lo = m - h, flo = value_at(lo);
    double hi = m + h, fhi = value_at(hi);
    for (int it = 0; it < 60 && !(fm >= flo && fm >= fhi); ++it) {
      if (flo > fhi) {
        hi = m;
        fhi = fm;
        m = lo;
        fm = flo;
        h *= 2.0;
        lo = m - h;
        flo = value_at(lo);
      } else {
        lo = m;
        flo = fm;
        m = hi;
        fm = fhi;
        h *= 2.0;
        hi = m + h;
        fhi = value_at(hi);
      }
    }

    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    const double dtheta_min = std::fmax(1e-9, tol_geo / std::fmax(1.0, t_hint));
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = value_at(c), fd = value_at(d);
    double best = std::max({fm, flo, fhi, fc, fd});
    for (int it = 0; it < 80 && (hi - lo) > dtheta_min; ++it) {
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = value_at(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = value_at(d);
      }
      best = std::max({best, fc, fd});
    }
    return best;
  }

  // Pattern search over the ray direction, maximizing the support objective.
  VectorXd u = a.normalized();
  Bracket br = bisect_boundary(phi, alpha, center, u, t_hint, tol_geo);
  double t_cur = br.t_in;
  double best = a.dot(center + br.t_out * u);

  double h = 0.25;
  const double h_min = std::fmax(1e-9, tol_geo / std::fmax(1.0, t_cur));
  while (h > h_min) {
    bool improved = false;
    Eigen::HouseholderQR<MatrixXd> qr{MatrixXd(u)};
    const MatrixXd frame = qr.householderQ();
    for (int k = 1; k < n; ++k) {
      for (double sgn : {1.0, -1.0}) {
        const VectorXd w = (u + sgn * h * frame.col(k)).normalized();
        const Bracket cand = bisect_boundary(phi, alpha, center, w, t_cur, tol_geo);
        const double val = a.dot(center + cand.t_out * w);
        if (val > best + 1e-15) {
          best = val;
          u = w;
          t_cur = cand.t_in;
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return best;
}

}  // namespace

MatrixXd sample_sphere(int n, int K, const VectorXd& center, double radius) {
  if (n < 1 || K < 1) throw std::invalid_argument("sample_sphere: bad sizes");
  if (center.size() != n) throw std::invalid_argument("sample_sphere: center size");
  if (radius <= 0.0) throw std::invalid_argument("sample_sphere: radius <= 0");
  MatrixXd out(n, K);
  if (n == 1) {
    for (int k = 0; k < K; ++k)
      out(0, k) = center(0) + (k % 2 == 0 ? radius : -radius);
    return out;
  }
  if (n == 2) {
    const auto dirs = geom::directions_2d(K);
    for (int k = 0; k < K; ++k)
      out.col(k) = center + radius * dirs[static_cast<size_t>(k)];
    return out;
  }
  // Deterministic spiral covering for n == 3; lattice directions above.
  if (n == 3) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < K; ++k) {
      const double z = K == 1 ? 0.0 : 1.0 - 2.0 * k / (K - 1.0);
      const double r = std::sqrt(std::fmax(0.0, 1.0 - z * z));
      const double a = golden * k;
      VectorXd d(3);
      d << r * std::cos(a), r * std::sin(a), z;
      out.col(k) = center + radius * d;
    }
    return out;
  }
  for (int k = 0; k < K; ++k) {
    VectorXd d(n);
    for (int i = 0; i < n; ++i)
      d(i) = norm_ppf(std::fmin(1.0 - 1e-12,
                                std::fmax(1e-12, lattice_coord(
                                                     static_cast<std::uint64_t>(k),
                                                     i, 0.5))));
    d.normalize();
    out.col(k) = center + radius * d;
  }
  return out;
}

VectorXd project_to_levelset(const VectorXd& p, const PhiFn& phi, double alpha,
                             const VectorXd& y_interior, double tol_phi,
                             double tol_geo) {
  const double fp = phi(p);
  if (fp > alpha + tol_phi)
    throw std::invalid_argument("project_to_levelset: point inside the level set");
  if (std::fabs(fp - alpha) <= tol_phi) return p;
  if (phi(y_interior) < alpha - tol_phi)
    throw std::invalid_argument("project_to_levelset: interior point not inside");

  const VectorXd ray = p - y_interior;
  const double pr = ray.norm();
  if (pr <= tol_geo) return p;
  const int n = static_cast<int>(p.size());

  double t_hint = 0.7 * pr;
  if (n == 2) {
    // The boundary is a closed curve around y_interior; parametrize it by the
    // ray angle and minimize the distance to p by bracketed golden section.
    auto boundary_at = [&](double theta) {
      VectorXd w(2);
      w << std::cos(theta), std::sin(theta);
      const Bracket br = bisect_boundary(phi, alpha, y_interior, w, t_hint, tol_geo);
      t_hint = br.t_in;
      return VectorXd(y_interior + br.t_in * w);
    };
    auto dist_at = [&](double theta) { return (boundary_at(theta) - p).norm(); };

    double m = std::atan2(ray(1), ray(0));
    double fm = dist_at(m);
    double h = 0.05;
    double a = m - h, fa = dist_at(a);
    double b = m + h, fb = dist_at(b);
    for (int it = 0; it < 60 && !(fm <= fa && fm <= fb); ++it) {
      if (fa < fb) {
        b = m;
        fb = fm;
        m = a;
        fm = fa;
        h *= 2.0;
        a = m - h;
        fa = dist_at(a);
      } else {
        a = m;
        fa = fm;
        m = b;
        fm = fb;
        h *= 2.0;
        b = m + h;
        fb = dist_at(b);
      }
    }

    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    const double dtheta_min =
        std::fmax(1e-9, tol_geo / std::fmax(1.0, t_hint));
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = dist_at(c), fd = dist_at(d);
    for (int it = 0; it < 80 && (b - a) > dtheta_min; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = dist_at(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = dist_at(d);
      }
    }
    return boundary_at(0.5 * (a + b));
  }

  // Pattern search over the ray direction with radial re-projection.
  VectorXd u = ray / pr;
  Bracket br = bisect_boundary(phi, alpha, y_interior, u, t_hint, tol_geo);
  double t_cur = br.t_in;
  VectorXd z = y_interior + t_cur * u;
  double best_d = (z - p).norm();

  double h = 0.25;
  const double h_min = std::fmax(1e-9, tol_geo / std::fmax(1.0, t_cur));
  while (h > h_min) {
    bool improved = false;
    Eigen::HouseholderQR<MatrixXd> qr{MatrixXd(u)};
    const MatrixXd frame = qr.householderQ();
    for (int k = 1; k < n; ++k) {
      for (double sgn : {1.0, -1.0}) {
        const VectorXd w = (u + sgn * h * frame.col(k)).normalized();
        const Bracket cand = bisect_boundary(phi, alpha, y_interior, w, t_cur, tol_geo);
        const VectorXd y = y_interior + cand.t_in * w;
        const double dist = (y - p).norm();
        if (dist < best_d - 1e-15) {
          best_d = dist;
          z = y;
          u = w;
          t_cur = cand.t_in;
          improved = true;
        }
      }
    }
    if (!improved) h *= 0.5;
  }
  return z;
}

TightPolyPair tight_poly_pair(const std::vector<VectorXd>& externals,
                              const PhiFn& phi, double alpha,
                              const VectorXd& y_interior, double tol_phi,
                              double tol_geo) {
  if (externals.empty())
    throw std::invalid_argument("tight_poly_pair: no external points");
  if (phi(y_interior) < alpha - tol_phi)
    throw std::invalid_argument("tight_poly_pair: interior point not inside");
  const int n = static_cast<int>(y_interior.size());

  TightPolyPair out;
  MatrixXd A(static_cast<int>(externals.size()), n);
  VectorXd b(static_cast<int>(externals.size()));
  MatrixXd proj(n, static_cast<int>(externals.size()));

  for (size_t i = 0; i < externals.size(); ++i) {
    VectorXd p = externals[i];
    if (phi(p) > alpha + tol_phi) {
      double s = 2.0;
      VectorXd q = p;
      bool escaped = false;
      for (int it = 0; it < 40; ++it) {
        q = y_interior + s * (p - y_interior);
        if (phi(q) < alpha + tol_phi) {
          escaped = true;
          break;
        }
        s *= 2.0;
      }
      if (!escaped)
        throw numerical_error("tight_poly_pair: external point cannot escape set");
      out.warnings.push_back("external point inside set re-scaled outward");
      p = q;
    }
    const VectorXd z = project_to_levelset(p, phi, alpha, y_interior, tol_phi, tol_geo);
    proj.col(static_cast<int>(i)) = z;
    VectorXd nrm = p - z;
    if (nrm.norm() <= tol_geo) {
      nrm = p - y_interior;
      out.warnings.push_back("external point on boundary; ray normal used");
    }
    nrm.normalize();
    A.row(static_cast<int>(i)) = nrm.transpose();
    // Offset by the level set's support value rather than nrm.dot(z): the two
    // agree for the exact projection, but the support query keeps the
    // halfspace on the correct side of flat boundary faces, where the
    // projection point carries tangential play that would tilt the cut.
    const double rho = levelset_support(phi, alpha, y_interior, nrm,
                                        (z - y_interior).norm(), tol_geo);
    b(static_cast<int>(i)) = std::fmax(rho, nrm.dot(z));
    out.projections.push_back(z);
  }

  out.inner = geom::convex_hull(proj);
  if (out.inner.V.cols() <= n)
    out.warnings.push_back("degenerate inner polytope (too few distinct projections)");
  out.outer = geom::HPolytope{A, b};
  return out;
}

namespace {

PhiFn make_phi(const fsr::GaussianState& g, const geom::ConvexShape& shape,
               double tol) {
  const geom::ConvexShape body = geom::reflect(shape);
  return [g, body, tol](const VectorXd& y) {
    return fsr::mvn_shape_prob(g, geom::translate(body, y), tol).value;
  };
}

OccupySetApprox make_all(const std::string& method, double alpha, int tau) {
  OccupySetApprox out;
  out.inner_kind = SetKind::all;
  out.outer_kind = SetKind::all;
  out.method = method;
  out.alpha = alpha;
  out.tau = tau;
  return out;
}

OccupySetApprox make_empty(const std::string& method, double alpha, int tau) {
  OccupySetApprox out;
  out.inner_kind = SetKind::empty;
  out.outer_kind = SetKind::empty;
  out.method = method;
  out.alpha = alpha;
  out.tau = tau;
  return out;
}

}  // namespace

OccupySetApprox occupyset_minkowski(const fsr::GaussianState& g,
                                    const geom::ConvexShape& shape, double alpha,
                                    int tau, const ApproxParams& params) {
  if (alpha < 0.0) throw std::invalid_argument("occupyset_minkowski: alpha < 0");
  if (alpha == 0.0) return make_all("minkowski", alpha, tau);
  if (alpha > 1.0) return make_empty("minkowski", alpha, tau);
  const int n = static_cast<int>(g.mean.size());

  const double volume = geom::measure(shape);
  if (volume <= 0.0)
    throw std::invalid_argument("occupyset_minkowski: shape volume is zero");
  const double kappa = alpha / volume;

  OccupySetApprox out;
  out.method = "minkowski";
  out.alpha = alpha;
  out.tau = tau;
  out.inner_kind = SetKind::empty;

  MatrixXd cov = g.cov;
  if (g.rank < n) {
    const MatrixXd null_proj =
        MatrixXd::Identity(n, n) - g.col_basis * g.col_basis.transpose();
    cov += 1e-6 * null_proj;
    out.warnings.push_back("rank-deficient density: null directions inflated");
  }

  const auto level = geom::superlevel_ellipsoid(g.mean, cov, kappa);
  if (!level) {
    out.outer_kind = SetKind::empty;
    return out;
  }

  std::vector<geom::SupportSample> samples;
  const auto dirs = n == 2 ? geom::directions_2d(params.n_des)
                           : [&] {
                               std::vector<VectorXd> ds;
                               for (int i = 0; i < n; ++i)
                                 for (double sgn : {1.0, -1.0}) {
                                   VectorXd e = VectorXd::Zero(n);
                                   e(i) = sgn;
                                   ds.push_back(e);
                                 }
                               const MatrixXd sph = sample_sphere(
                                   n, std::max(params.n_des - 2 * n, 0),
                                   VectorXd::Zero(n), 1.0);
                               for (int k = 0; k < sph.cols(); ++k)
                                 ds.push_back(sph.col(k));
                               return ds;
                             }();
  for (const auto& d : dirs)
    samples.push_back(
        {d, geom::support(*level, d) + geom::support(shape, d)});
  const geom::SupportPolytope sp = geom::polytope_from_supports(samples);
  if (!sp.bounded)
    out.warnings.push_back("support directions do not positively span");
  out.outer_kind = SetKind::polytope;
  out.outer = sp.poly;
  return out;
}

OccupySetApprox occupyset_projection(const fsr::GaussianState& g,
                                     const geom::ConvexShape& shape, double alpha,
                                     int tau, const ApproxParams& params) {
  if (alpha < 0.0) throw std::invalid_argument("occupyset_projection: alpha < 0");
  if (alpha == 0.0) return make_all("projection", alpha, tau);
  if (alpha > 1.0) return make_empty("projection", alpha, tau);
  const int n = static_cast<int>(g.mean.size());

  const double tol_phi = 0.5 * params.tol;
  const occupancy::PhiMax pm = occupancy::phi_max(g, shape, 0.5 * tol_phi);
  if (alpha > pm.value.value + tol_phi) return make_empty("projection", alpha, tau);

  OccupySetApprox out;
  out.method = "projection";
  out.alpha = alpha;
  out.tau = tau;

  const PhiFn phi = make_phi(g, shape, 0.5 * tol_phi);

  // External radius policy: scaled circumradius of the level-set method's
  // outer polytope, with a dispersion-plus-diameter fallback.
  double r = 0.0;
  if (n == 2) {
    const OccupySetApprox mink = occupyset_minkowski(g, shape, alpha, tau, params);
    if (mink.outer_kind == SetKind::polytope) {
      const MatrixXd verts = geom::hpolytope_vertices_2d(mink.outer);
      for (int j = 0; j < verts.cols(); ++j)
        r = std::fmax(r, (verts.col(j) - pm.y_max).norm());
      r *= params.r_scale;
    }
  }
  if (r <= 0.0) {
    double sigma_max = 0.0;
    for (int i = 0; i < n; ++i)
      sigma_max = std::fmax(sigma_max, std::sqrt(g.cov(i, i)));
    r = 40.0 * sigma_max + geom::diameter(shape);
  }

  // Externals must all sit strictly outside; widen on failure.
  std::vector<VectorXd> externals;
  bool ok = false;
  for (int attempt = 0; attempt <= params.r_retries; ++attempt) {
    externals.clear();
    const MatrixXd pts = sample_sphere(n, params.K, pm.y_max, r);
    ok = true;
    for (int k = 0; k < pts.cols(); ++k) {
      externals.emplace_back(pts.col(k));
      if (phi(pts.col(k)) > alpha + tol_phi) ok = false;
    }
    if (ok) break;
    r *= 2.0;
  }
  if (!ok)
    throw std::runtime_error(
        "occupyset_projection: external radius kept landing inside the set");

  TightPolyPair pair =
      tight_poly_pair(externals, phi, alpha, pm.y_max, tol_phi, params.tol_geo);
  out.inner_kind = SetKind::polytope;
  out.inner = pair.inner;
  out.outer_kind = SetKind::polytope;
  out.outer = pair.outer;
  out.warnings = std::move(pair.warnings);
  return out;
}

OccupySetApprox translate_occupyset(const OccupySetApprox& approx,
                                    const VectorXd& v) {
  OccupySetApprox out = approx;
  if (out.inner_kind == SetKind::polytope)
    out.inner.V = out.inner.V.colwise() + v;
  if (out.outer_kind == SetKind::polytope) out.outer.b += out.outer.A * v;
  return out;
}

DmspCover dmsp_cover(const dyn::DmspModel& model, const geom::ConvexShape& shape,
                     double alpha, int tau, const VectorXd& x0,
                     const std::string& method, const ApproxParams& params) {
  if (method != "projection" && method != "minkowski")
    throw std::invalid_argument("dmsp_cover: unknown method");
  if (alpha < 0.0) throw std::invalid_argument("dmsp_cover: alpha < 0");

  DmspCover cover;
  cover.alpha = alpha;
  cover.tau = tau;
  cover.method = method;

  const auto entries = fsr::fsr_dmsp(model, tau, x0);
  const double count = static_cast<double>(entries.size());
  const double tol_phi = 0.5 * params.tol;

  for (const auto& entry : entries) {
    CoverPiece piece;
    piece.sequence = entry.sequence;
    piece.gauss = entry.gauss;
    piece.alpha_s = alpha / (count * entry.sequence.probability);

    if (piece.alpha_s > 1.0) {
      piece.approx = make_empty(method, piece.alpha_s, tau);
    } else {
      const occupancy::PhiMax pm = occupancy::phi_max(entry.gauss, shape, tol_phi);
      if (piece.alpha_s > pm.value.value + tol_phi) {
        piece.approx = make_empty(method, piece.alpha_s, tau);
      } else if (method == "minkowski") {
        piece.approx =
            occupyset_minkowski(entry.gauss, shape, piece.alpha_s, tau, params);
      } else {
        piece.approx =
            occupyset_projection(entry.gauss, shape, piece.alpha_s, tau, params);
      }
    }
    cover.pieces.push_back(std::move(piece));
  }
  return cover;
}

}  // namespace fsreach::occupyset
