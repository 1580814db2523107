#include "fsreach/fsr.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fsreach::fsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kQmcShifts = 8;
constexpr std::uint64_t kQmcSeed = 0xA5C3F00DD15EA5EDULL;
constexpr std::uint64_t kQmcMaxPoints = 1u << 19;

double clamp01(double x) { return std::fmax(0.0, std::fmin(1.0, x)); }

double clamp_unit_open(double u) {
  return std::fmax(1e-15, std::fmin(1.0 - 1e-15, u));
}

// Deterministic shift table for the lattice estimators.
std::vector<std::vector<double>> qmc_shifts(int dims) {
  std::vector<std::vector<double>> shifts(kQmcShifts);
  for (int s = 0; s < kQmcShifts; ++s) {
    std::mt19937_64 eng(mix_seed(kQmcSeed, static_cast<std::uint64_t>(s)));
    shifts[static_cast<size_t>(s)].resize(static_cast<size_t>(dims));
    for (int k = 0; k < dims; ++k)
      shifts[static_cast<size_t>(s)][static_cast<size_t>(k)] =
          (eng() >> 11) * 0x1p-53;
  }
  return shifts;
}

// Shifted-lattice mean of f over [0,1)^dims with doubling until 3*SE <= tol.
ProbEstimate qmc_mean(const std::function<double(const double*)>& f, int dims,
                      double tol) {
  const auto shifts = qmc_shifts(dims);
  std::vector<double> sums(kQmcShifts, 0.0);
  std::vector<double> w(static_cast<size_t>(dims));
  std::uint64_t n = 0;
  std::uint64_t target = 512;
  ProbEstimate out;
  while (true) {
    for (; n < target; ++n) {
      for (int s = 0; s < kQmcShifts; ++s) {
        for (int k = 0; k < dims; ++k)
          w[static_cast<size_t>(k)] =
              lattice_coord(n, k, shifts[static_cast<size_t>(s)][static_cast<size_t>(k)]);
        sums[static_cast<size_t>(s)] += f(w.data());
      }
    }
    double mean = 0.0;
    for (double s : sums) mean += s;
    mean /= static_cast<double>(kQmcShifts) * static_cast<double>(n);
    double var = 0.0;
    for (double s : sums) {
      const double d = s / static_cast<double>(n) - mean;
      var += d * d;
    }
    var /= (kQmcShifts - 1.0);
    const double err = 3.0 * std::sqrt(var / kQmcShifts) + 1e-15;
    out.value = clamp01(mean);
    out.error = err;
    out.converged = err <= tol;
    if (out.converged || target >= kQmcMaxPoints) return out;
    target *= 2;
  }
}

// One-dimensional conditional-slice integral for 2D Gaussians: integrates
// pdf(x1) * P{chord(x1)} over x1 with panel splits at sigma multiples.
ProbEstimate slice_integrate_2d(
    const VectorXd& mean, const MatrixXd& cov,
    const std::function<std::optional<std::pair<double, double>>(double)>& chord,
    double x_lo, double x_hi, double tol) {
  const double m1 = mean(0);
  const double v1 = cov(0, 0);
  const double s1 = std::sqrt(v1);
  const double beta = cov(1, 0) / v1;
  const double cond_var = cov(1, 1) - cov(1, 0) * cov(1, 0) / v1;
  if (s1 <= 0.0 || cond_var <= 0.0)
    throw std::invalid_argument("slice_integrate_2d: covariance not full rank");
  const double s2 = std::sqrt(cond_var);

  const double lo = std::fmax(x_lo, m1 - 40.0 * s1);
  const double hi = std::fmin(x_hi, m1 + 40.0 * s1);
  if (!(lo < hi)) return {0.0, 0.0, true};

  auto integrand = [&](double x1) -> double {
    const auto c = chord(x1);
    if (!c) return 0.0;
    const double density = norm_pdf((x1 - m1) / s1) / s1;
    return density * norm_interval_prob(mean(1) + beta * (x1 - m1), s2, c->first,
                                        c->second);
  };

  std::vector<double> cuts{lo, hi};
  for (double c : {-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double x = m1 + c * s1;
    if (x > lo && x < hi) cuts.push_back(x);
  }
  std::sort(cuts.begin(), cuts.end());

  const double panel_tol = tol / static_cast<double>(cuts.size());
  double total = 0.0, err = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e = 0.0;
    total += adaptive_gk15(integrand, cuts[i], cuts[i + 1], panel_tol, &e);
    err += e;
  }
  return {clamp01(total), err, err <= tol * 1.01 + 1e-12};
}

ProbEstimate rect_prob_qmc(const GaussianState& g, const VectorXd& lower,
                           const VectorXd& upper, double tol) {
  const int n = static_cast<int>(g.mean.size());
  Eigen::LLT<MatrixXd> llt(g.cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("mvn_rect_prob: covariance factorization failed");
  const MatrixXd L = llt.matrixL();
  const VectorXd a = lower - g.mean;
  const VectorXd b = upper - g.mean;

  auto f = [&](const double* w) -> double {
    double d = norm_cdf(a(0) / L(0, 0));
    double e = norm_cdf(b(0) / L(0, 0));
    double prod = e - d;
    if (prod <= 0.0) return 0.0;
    VectorXd y(n - 1);
    for (int i = 1; i < n; ++i) {
      const double u = clamp_unit_open(d + w[i - 1] * (e - d));
      y(i - 1) = norm_ppf(u);
      double num = 0.0;
      for (int j = 0; j < i; ++j) num += L(i, j) * y(j);
      d = norm_cdf((a(i) - num) / L(i, i));
      e = norm_cdf((b(i) - num) / L(i, i));
      prod *= std::fmax(0.0, e - d);
      if (prod <= 0.0) return 0.0;
    }
    return prod;
  };
  return qmc_mean(f, n - 1, tol);
}

bool nearly_diagonal(const MatrixXd& cov) {
  const int n = static_cast<int>(cov.rows());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(cov(i, j)) >
          1e-13 * std::sqrt(std::fmax(cov(i, i) * cov(j, j), 1e-300)))
        return false;
  return true;
}

geom::ConvexShape canonical_2d(const geom::ConvexShape& shape) {
  if (const auto* vp = std::get_if<geom::VPolytope>(&shape))
    return geom::ConvexShape{geom::hrep_2d(*vp)};
  return shape;
}

ProbEstimate shape_prob_full_2d(const GaussianState& g,
                                const geom::ConvexShape& shape, double tol) {
  const geom::ConvexShape canon = canonical_2d(shape);
  VectorXd lo, hi;
  geom::bounding_box(canon, lo, hi);
  auto chord = [&canon](double x1) { return geom::chord_2d(canon, x1); };
  return slice_integrate_2d(g.mean, g.cov, chord, lo(0), hi(0), tol);
}

ProbEstimate shape_prob_qmc(const GaussianState& g, const geom::ConvexShape& shape,
                            double tol) {
  const int n = static_cast<int>(g.mean.size());
  Eigen::LLT<MatrixXd> llt(g.cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("mvn_shape_prob: covariance factorization failed");
  const MatrixXd L = llt.matrixL();
  auto f = [&](const double* w) -> double {
    VectorXd z(n);
    for (int k = 0; k < n; ++k) z(k) = norm_ppf(clamp_unit_open(w[k]));
    const VectorXd x = g.mean + L * z;
    return geom::membership(shape, x) ? 1.0 : 0.0;
  };
  return qmc_mean(f, n, tol);
}

// Reduction of a rank-2 Gaussian in 3D onto its support plane.
ProbEstimate shape_prob_rank2_in3(const GaussianState& g,
                                  const geom::ConvexShape& shape, double tol) {
  const MatrixXd& B = g.col_basis;  // 3x2
  const MatrixXd cov2 = B.transpose() * g.cov * B;
  geom::ConvexShape reduced = geom::Ball{Eigen::Vector2d::Zero(), 0.0};
  if (const auto* ball = std::get_if<geom::Ball>(&shape)) {
    const VectorXd d = ball->center - g.mean;
    const VectorXd off_plane = d - B * (B.transpose() * d);
    const double h = off_plane.norm();
    if (h > ball->radius) return {0.0, 0.0, true};
    reduced = geom::Ball{B.transpose() * d,
                         std::sqrt(ball->radius * ball->radius - h * h)};
  } else {
    MatrixXd A;
    VectorXd b;
    if (const auto* box = std::get_if<geom::Box>(&shape)) {
      const int n = 3;
      A.resize(2 * n, n);
      b.resize(2 * n);
      A.topRows(n) = MatrixXd::Identity(n, n);
      A.bottomRows(n) = -MatrixXd::Identity(n, n);
      b.head(n) = box->center + box->half_width;
      b.tail(n) = -(box->center - box->half_width);
    } else if (const auto* hp = std::get_if<geom::HPolytope>(&shape)) {
      A = hp->A;
      b = hp->b;
    } else {
      throw std::invalid_argument(
          "mvn_shape_prob: vertex polytope unsupported in a degenerate 3D "
          "reduction; supply halfspace form");
    }
    std::vector<Eigen::RowVector2d> rows;
    std::vector<double> offs;
    for (int i = 0; i < A.rows(); ++i) {
      const Eigen::RowVector2d ar = A.row(i) * B;
      const double bi = b(i) - A.row(i).dot(g.mean);
      if (ar.norm() <= 1e-12 * std::fmax(1.0, A.row(i).norm())) {
        if (bi < -1e-12 * std::fmax(1.0, std::fabs(b(i)))) return {0.0, 0.0, true};
        continue;
      }
      rows.push_back(ar);
      offs.push_back(bi);
    }
    MatrixXd A2(static_cast<int>(rows.size()), 2);
    VectorXd b2(static_cast<int>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      A2.row(static_cast<int>(i)) = rows[i];
      b2(static_cast<int>(i)) = offs[i];
    }
    reduced = geom::HPolytope{A2, b2};
  }
  const GaussianState g2 = make_gaussian_state(Eigen::Vector2d::Zero(), cov2);
  return mvn_shape_prob(g2, reduced, tol);
}

}  // namespace

double rank_threshold(const MatrixXd& cov) {
  return 1e-10 * std::fmax(1.0, cov.trace());
}

GaussianState make_gaussian_state(const VectorXd& mean, const MatrixXd& cov) {
  const int n = static_cast<int>(mean.size());
  if (cov.rows() != n || cov.cols() != n)
    throw std::invalid_argument("make_gaussian_state: dimension mismatch");
  if (!cov.isApprox(cov.transpose(), 1e-9))
    throw std::invalid_argument("make_gaussian_state: covariance not symmetric");
  GaussianState g;
  g.mean = mean;
  g.cov = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(g.cov);
  const double thresh = rank_threshold(g.cov);
  const VectorXd evals = es.eigenvalues();
  if ((evals.array() < -thresh).any())
    throw std::invalid_argument("make_gaussian_state: covariance not PSD");
  std::vector<int> keep;
  for (int i = 0; i < n; ++i)
    if (evals(i) > thresh) keep.push_back(i);
  g.rank = static_cast<int>(keep.size());
  g.col_basis.resize(n, g.rank);
  for (size_t i = 0; i < keep.size(); ++i)
    g.col_basis.col(static_cast<int>(i)) = es.eigenvectors().col(keep[i]);
  return g;
}

GaussianState fsr_gaussian_dpv(const dyn::DpvModel& model,
                               const dyn::ParameterTrajectory& traj, int tau,
                               const VectorXd& x0,
                               const std::vector<VectorXd>& inputs) {
  if (model.disturbance.mean.size() != model.p ||
      model.disturbance.cov.rows() != model.p)
    throw std::invalid_argument("fsr_gaussian_dpv: disturbance dimension");
  const VectorXd nodist = dyn::unperturbed_state(model, traj, tau, x0, inputs);
  VectorXd mean = nodist;
  MatrixXd cov = MatrixXd::Zero(model.n, model.n);
  if (tau > 0 && model.p > 0) {
    const MatrixXd C = dyn::concat_disturbance_matrix(model, traj, tau);
    for (int j = 0; j < tau; ++j) {
      const MatrixXd block = C.middleCols(j * model.p, model.p);
      mean += block * model.disturbance.mean;
      cov += block * model.disturbance.cov * block.transpose();
    }
  }
  return make_gaussian_state(mean, cov);
}

AffineReachSet fsr_set_dpv(const dyn::DpvModel& model,
                           const dyn::ParameterTrajectory& traj, int tau,
                           const VectorXd& x0, const std::vector<VectorXd>& inputs) {
  AffineReachSet set;
  set.anchor = dyn::unperturbed_state(model, traj, tau, x0, inputs);
  set.generator = dyn::concat_disturbance_matrix(model, traj, tau);
  if (set.generator.cols() == 0) {
    set.dim = 0;
  } else {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(set.generator);
    qr.setThreshold(1e-10);
    set.dim = static_cast<int>(qr.rank());
  }
  return set;
}

std::vector<HybridReachEntry> fsr_dmsp(const dyn::DmspModel& model, int tau,
                                       const VectorXd& x0,
                                       const std::vector<VectorXd>& inputs) {
  std::vector<HybridReachEntry> out;
  for (const auto& seq : dyn::enumerate_sequences(model, tau)) {
    HybridReachEntry entry;
    entry.sequence = seq;
    entry.trajectory = dyn::parameter_trajectory(model, seq);
    entry.gauss = fsr_gaussian_dpv(model.subsystem, entry.trajectory, tau, x0, inputs);
    entry.set = fsr_set_dpv(model.subsystem, entry.trajectory, tau, x0, inputs);
    out.push_back(std::move(entry));
  }
  return out;
}

ProbEstimate mvn_rect_prob(const GaussianState& g, const VectorXd& lower,
                           const VectorXd& upper, double tol) {
  const int n = static_cast<int>(g.mean.size());
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("mvn_rect_prob: dimension mismatch");
  if (g.rank != n)
    throw std::invalid_argument("mvn_rect_prob: covariance must be full rank");
  for (int i = 0; i < n; ++i)
    if (lower(i) >= upper(i)) return {0.0, 0.0, true};

  if (n == 1)
    return {norm_interval_prob(g.mean(0), std::sqrt(g.cov(0, 0)), lower(0), upper(0)),
            1e-15, true};

  if (nearly_diagonal(g.cov)) {
    double p = 1.0;
    for (int i = 0; i < n; ++i)
      p *= norm_interval_prob(g.mean(i), std::sqrt(g.cov(i, i)), lower(i), upper(i));
    return {p, n * 1e-15, true};
  }

  if (n == 2) {
    const double s1 = std::sqrt(g.cov(0, 0));
    const double s2 = std::sqrt(g.cov(1, 1));
    const double rho =
        std::fmax(-1.0, std::fmin(1.0, g.cov(0, 1) / (s1 * s2)));
    return {bvn_rect_prob((lower(0) - g.mean(0)) / s1, (upper(0) - g.mean(0)) / s1,
                          (lower(1) - g.mean(1)) / s2, (upper(1) - g.mean(1)) / s2,
                          rho),
            1e-14, true};
  }

  return rect_prob_qmc(g, lower, upper, tol);
}

ProbEstimate mvn_shape_prob(const GaussianState& g, const geom::ConvexShape& shape,
                            double tol) {
  const int n = static_cast<int>(g.mean.size());
  if (geom::dim(shape) != n)
    throw std::invalid_argument("mvn_shape_prob: dimension mismatch");

  if (g.rank == 0)
    return {geom::membership(shape, g.mean) ? 1.0 : 0.0, 0.0, true};

  if (g.rank < n) {
    if (g.rank == 1) {
      const VectorXd u = g.col_basis.col(0);
      const double sigma = std::sqrt(u.dot(g.cov * u));
      const auto seg = geom::line_intersection(shape, g.mean, u);
      if (!seg) return {0.0, 0.0, true};
      return {norm_interval_prob(0.0, sigma, seg->first, seg->second), 1e-15, true};
    }
    if (g.rank == 2 && n == 3) return shape_prob_rank2_in3(g, shape, tol);
    throw std::invalid_argument("mvn_shape_prob: unsupported degenerate reduction");
  }

  if (n == 1) {
    VectorXd e(1);
    e(0) = 1.0;
    const double hi = geom::support(shape, e);
    const double lo = -geom::support(shape, VectorXd(-e));
    return {norm_interval_prob(g.mean(0), std::sqrt(g.cov(0, 0)), lo, hi), 1e-15,
            true};
  }

  if (const auto* box = std::get_if<geom::Box>(&shape))
    return mvn_rect_prob(g, box->center - box->half_width,
                         box->center + box->half_width, tol);

  if (n == 2) return shape_prob_full_2d(g, shape, tol);
  return shape_prob_qmc(g, shape, tol);
}

std::optional<geom::Ellipsoid> density_superlevel(const GaussianState& g,
                                                  double kappa) {
  if (g.rank != g.mean.size())
    throw std::invalid_argument("density_superlevel: covariance must be full rank");
  return geom::superlevel_ellipsoid(g.mean, g.cov, kappa);
}

}  // namespace fsreach::fsr
