#include "fsreach/occupancy.hpp"

#include <cmath>

namespace fsreach::occupancy {

namespace {

// Shape whose translate to y is the integration region for phi(y).
geom::ConvexShape integration_body(const geom::ConvexShape& shape) {
  return geom::reflect(shape);
}

double log_phi(const fsr::GaussianState& g, const geom::ConvexShape& body,
               const VectorXd& y, double tol) {
  const double v =
      fsr::mvn_shape_prob(g, geom::translate(body, y), tol).value;
  return std::log(std::fmax(v, 1e-300));
}

}  // namespace

ProbEstimate phi_point(const fsr::GaussianState& g, const geom::ConvexShape& shape,
                       const VectorXd& y, double tol) {
  if (y.size() != g.mean.size())
    throw std::invalid_argument("phi_point: query dimension mismatch");
  return fsr::mvn_shape_prob(g, geom::translate(integration_body(shape), y), tol);
}

ProbEstimate phi_dpv(const dyn::DpvModel& model, const dyn::ParameterTrajectory& traj,
                     const geom::ConvexShape& shape, const VectorXd& y, int tau,
                     const VectorXd& x0, double tol,
                     const std::vector<VectorXd>& inputs) {
  const fsr::GaussianState g = fsr::fsr_gaussian_dpv(model, traj, tau, x0, inputs);
  return phi_point(g, shape, y, tol);
}

PhiMax phi_max(const fsr::GaussianState& g, const geom::ConvexShape& shape,
               double tol) {
  if (geom::centrally_symmetric(shape))
    return {g.mean, phi_point(g, shape, g.mean, tol)};

  // Heuristic ascent for non-symmetric bodies: compass pattern search on
  // log phi from the density mean, then per-axis golden-section polish.
  const geom::ConvexShape body = integration_body(shape);
  const int n = static_cast<int>(g.mean.size());
  double sigma_max = 0.0;
  for (int i = 0; i < n; ++i) sigma_max = std::fmax(sigma_max, std::sqrt(g.cov(i, i)));
  const double scale =
      std::fmax(sigma_max, 0.25 * geom::diameter(shape)) + 1e-12;

  VectorXd y = g.mean;
  double fy = log_phi(g, body, y, tol);
  double step = 0.5 * scale;
  const double step_min = 1e-4 * scale;
  while (step > step_min) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (double sgn : {1.0, -1.0}) {
        VectorXd cand = y;
        cand(i) += sgn * step;
        const double fc = log_phi(g, body, cand, tol);
        if (fc > fy + 1e-14) {
          y = cand;
          fy = fc;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < n; ++i) {
    double a = y(i) - 2.0 * step_min * 64.0, b = y(i) + 2.0 * step_min * 64.0;
    auto eval = [&](double v) {
      VectorXd cand = y;
      cand(i) = v;
      return log_phi(g, body, cand, tol);
    };
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = eval(c), fd = eval(d);
    for (int it = 0; it < 40 && (b - a) > step_min; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = eval(d);
      }
    }
    y(i) = 0.5 * (a + b);
  }
  return {y, phi_point(g, shape, y, tol)};
}

ProbEstimate phi_mixture(const std::vector<fsr::HybridReachEntry>& entries,
                         const geom::ConvexShape& shape, const VectorXd& y,
                         double tol) {
  if (entries.empty()) throw std::invalid_argument("phi_mixture: no entries");
  const double per_tol = tol / static_cast<double>(entries.size());
  ProbEstimate out{0.0, 0.0, true};
  for (const auto& e : entries) {
    const ProbEstimate p = phi_point(e.gauss, shape, y, per_tol);
    out.value += e.sequence.probability * p.value;
    out.error += e.sequence.probability * p.error;
    out.converged = out.converged && p.converged;
  }
  out.value = std::fmin(1.0, out.value);
  return out;
}

ProbEstimate phi_dmsp(const dyn::DmspModel& model, const geom::ConvexShape& shape,
                      const VectorXd& y, int tau, const VectorXd& x0, double tol) {
  return phi_mixture(fsr::fsr_dmsp(model, tau, x0), shape, y, tol);
}

}  // namespace fsreach::occupancy
