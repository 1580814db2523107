#include "fsreach/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "fsreach/normal.hpp"

namespace fsreach::oracle {

namespace {

constexpr int kChunk = 4096;

double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// Polar Box-Muller; avoids std::normal_distribution so streams are identical
// across standard libraries.
std::pair<double, double> normal_pair(std::mt19937_64& eng) {
  for (;;) {
    const double u = 2.0 * uniform01(eng) - 1.0;
    const double v = 2.0 * uniform01(eng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double m = std::sqrt(-2.0 * std::log(s) / s);
      return {u * m, v * m};
    }
  }
}

void fill_normal(std::mt19937_64& eng, VectorXd& z) {
  const int p = static_cast<int>(z.size());
  int i = 0;
  while (i + 1 < p) {
    const auto [a, b] = normal_pair(eng);
    z(i) = a;
    z(i + 1) = b;
    i += 2;
  }
  if (i < p) z(i) = normal_pair(eng).first;
}

MatrixXd gaussian_factor(const MatrixXd& cov) {
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return MatrixXd(llt.matrixL());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gaussian_factor: eigendecomposition failed");
  const VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal();
}

int roll_mode(std::mt19937_64& eng, const Eigen::RowVectorXd& row) {
  const double u = uniform01(eng);
  double acc = 0.0;
  int last_positive = 0;
  for (int j = 0; j < row.size(); ++j) {
    if (row(j) <= 0.0) continue;
    last_positive = j;
    acc += row(j);
    if (u <= acc) return j;
  }
  return last_positive;
}

}  // namespace

SampleSet sample_trajectories_dpv(const dyn::DpvModel& model,
                                  const dyn::ParameterTrajectory& traj, int tau,
                                  const VectorXd& x0, int Ns, std::uint64_t seed,
                                  const std::vector<VectorXd>& inputs) {
  if (tau < 0) throw std::invalid_argument("sample_trajectories_dpv: negative tau");
  if (traj.tau() < tau)
    throw std::invalid_argument("sample_trajectories_dpv: trajectory too short");
  if (Ns < 1) throw std::invalid_argument("sample_trajectories_dpv: Ns < 1");
  if (x0.size() != model.n)
    throw std::invalid_argument("sample_trajectories_dpv: x0 size");

  std::vector<MatrixXd> At(static_cast<size_t>(tau)), Ft(static_cast<size_t>(tau));
  std::vector<VectorXd> drift(static_cast<size_t>(tau));
  for (int t = 0; t < tau; ++t) {
    At[static_cast<size_t>(t)] = model.A(traj.at(t));
    Ft[static_cast<size_t>(t)] = model.F(traj.at(t));
    VectorXd d = VectorXd::Zero(model.n);
    if (model.m > 0 && !inputs.empty()) {
      if (static_cast<int>(inputs.size()) < tau)
        throw std::invalid_argument("sample_trajectories_dpv: too few inputs");
      d = model.B(traj.at(t)) * inputs[static_cast<size_t>(t)];
    }
    drift[static_cast<size_t>(t)] = d;
  }
  const MatrixXd L = gaussian_factor(model.disturbance.cov);
  const VectorXd& mu = model.disturbance.mean;

  SampleSet out;
  out.tau = tau;
  out.seed = seed;
  out.points.resize(model.n, Ns);

  VectorXd z(model.p), x(model.n);
  const int chunks = (Ns + kChunk - 1) / kChunk;
  for (int c = 0; c < chunks; ++c) {
    std::mt19937_64 eng(mix_seed(seed, static_cast<std::uint64_t>(c)));
    const int s_end = std::min(Ns, (c + 1) * kChunk);
    for (int s = c * kChunk; s < s_end; ++s) {
      x = x0;
      for (int t = 0; t < tau; ++t) {
        fill_normal(eng, z);
        x = At[static_cast<size_t>(t)] * x + drift[static_cast<size_t>(t)] +
            Ft[static_cast<size_t>(t)] * (mu + L * z);
      }
      out.points.col(s) = x;
    }
  }
  return out;
}

SampleSet sample_trajectories_dmsp(const dyn::DmspModel& model, int tau,
                                   const VectorXd& x0, int Ns, std::uint64_t seed) {
  if (tau < 0) throw std::invalid_argument("sample_trajectories_dmsp: negative tau");
  if (Ns < 1) throw std::invalid_argument("sample_trajectories_dmsp: Ns < 1");
  const auto& sub = model.subsystem;
  if (x0.size() != sub.n)
    throw std::invalid_argument("sample_trajectories_dmsp: x0 size");
  const MatrixXd L = gaussian_factor(sub.disturbance.cov);
  const VectorXd& mu = sub.disturbance.mean;

  SampleSet out;
  out.tau = tau;
  out.seed = seed;
  out.points.resize(sub.n, Ns);

  VectorXd z(sub.p), x(sub.n), lam;
  const int chunks = (Ns + kChunk - 1) / kChunk;
  for (int c = 0; c < chunks; ++c) {
    std::mt19937_64 eng(mix_seed(seed, static_cast<std::uint64_t>(c)));
    const int s_end = std::min(Ns, (c + 1) * kChunk);
    for (int s = c * kChunk; s < s_end; ++s) {
      x = x0;
      lam = model.lambda0;
      int mode = dyn::mode_index(model, model.q0);
      for (int t = 0; t < tau; ++t) {
        fill_normal(eng, z);
        x = sub.A(lam) * x + sub.F(lam) * (mu + L * z);
        if (dyn::is_switch_instant(model, t))
          mode = roll_mode(eng, model.transition.row(mode));
        lam = model.param_step(model.q_values[static_cast<size_t>(mode)], t, lam);
      }
      out.points.col(s) = x;
    }
  }
  return out;
}

double phi_hat_at(const SampleSet& samples, const geom::ConvexShape& shape,
                  const VectorXd& y) {
  const int Ns = static_cast<int>(samples.points.cols());
  long hits = 0;
  for (int s = 0; s < Ns; ++s)
    if (geom::membership(shape, y - samples.points.col(s))) ++hits;
  return static_cast<double>(hits) / static_cast<double>(Ns);
}

Vector2d OccupancyGrid::cell_center(int ix, int iy) const {
  const double dx = (hi(0) - lo(0)) / nx;
  const double dy = (hi(1) - lo(1)) / ny;
  return {lo(0) + (ix + 0.5) * dx, lo(1) + (iy + 0.5) * dy};
}

OccupancyGrid estimate_phi_grid(const SampleSet& samples,
                                const geom::ConvexShape& shape, const Vector2d& lo,
                                const Vector2d& hi, int nx, int ny) {
  if (samples.points.rows() != 2)
    throw std::invalid_argument("estimate_phi_grid: 2D samples required");
  if (nx < 1 || ny < 1) throw std::invalid_argument("estimate_phi_grid: grid size");
  if (!(hi(0) > lo(0) && hi(1) > lo(1)))
    throw std::invalid_argument("estimate_phi_grid: empty extent");
  const int Ns = static_cast<int>(samples.points.cols());

  OccupancyGrid grid;
  grid.lo = lo;
  grid.hi = hi;
  grid.nx = nx;
  grid.ny = ny;
  grid.Ns = Ns;
  grid.seed = samples.seed;
  grid.phi_hat = MatrixXd::Zero(ny, nx);

  std::vector<std::pair<double, double>> by_x(static_cast<size_t>(Ns));
  for (int s = 0; s < Ns; ++s)
    by_x[static_cast<size_t>(s)] = {samples.points(0, s), samples.points(1, s)};
  std::sort(by_x.begin(), by_x.end());

  const bool box_path = std::holds_alternative<geom::Box>(shape);
  VectorXd blo, bhi;
  geom::bounding_box(shape, blo, bhi);

  std::vector<double> col_y;
  col_y.reserve(static_cast<size_t>(Ns));
  std::vector<std::pair<double, double>> col_xy;

  for (int ix = 0; ix < nx; ++ix) {
    const double ycx = grid.cell_center(ix, 0)(0);
    // membership(shape, y - x) forces y - x into the shape's bounding box,
    // so admissible sample abscissas fall in [ycx - bhi, ycx - blo].
    const double x_min = ycx - bhi(0);
    const double x_max = ycx - blo(0);
    const auto first = std::lower_bound(
        by_x.begin(), by_x.end(), std::make_pair(x_min, -1e300));
    const auto last = std::upper_bound(
        by_x.begin(), by_x.end(), std::make_pair(x_max, 1e300));
    if (first >= last) continue;

    if (box_path) {
      col_y.clear();
      for (auto it = first; it != last; ++it) col_y.push_back(it->second);
      std::sort(col_y.begin(), col_y.end());
      for (int iy = 0; iy < ny; ++iy) {
        const double ycy = grid.cell_center(ix, iy)(1);
        const auto y0 = std::lower_bound(col_y.begin(), col_y.end(), ycy - bhi(1));
        const auto y1 = std::upper_bound(col_y.begin(), col_y.end(), ycy - blo(1));
        grid.phi_hat(iy, ix) =
            static_cast<double>(y1 - y0) / static_cast<double>(Ns);
      }
    } else {
      col_xy.assign(first, last);
      std::sort(col_xy.begin(), col_xy.end(),
                [](const auto& a, const auto& b) { return a.second < b.second; });
      Vector2d d;
      for (int iy = 0; iy < ny; ++iy) {
        const double ycy = grid.cell_center(ix, iy)(1);
        const double y_min = ycy - bhi(1);
        const double y_max = ycy - blo(1);
        auto y0 = std::lower_bound(
            col_xy.begin(), col_xy.end(), y_min,
            [](const auto& a, double v) { return a.second < v; });
        long hits = 0;
        for (auto it = y0; it != col_xy.end() && it->second <= y_max; ++it) {
          d << ycx - it->first, ycy - it->second;
          if (geom::membership(shape, d)) ++hits;
        }
        grid.phi_hat(iy, ix) = static_cast<double>(hits) / static_cast<double>(Ns);
      }
    }
  }

  grid.sigma_hat =
      (grid.phi_hat.array() * (1.0 - grid.phi_hat.array()) / Ns).sqrt().matrix();
  return grid;
}

void default_grid_extent(const std::vector<fsr::GaussianState>& states,
                         const geom::ConvexShape& shape, Vector2d& lo, Vector2d& hi) {
  if (states.empty()) throw std::invalid_argument("default_grid_extent: no states");
  lo = Vector2d::Constant(1e300);
  hi = Vector2d::Constant(-1e300);
  for (const auto& g : states) {
    if (g.mean.size() != 2)
      throw std::invalid_argument("default_grid_extent: 2D states required");
    for (int i = 0; i < 2; ++i) {
      const double s = std::sqrt(std::fmax(0.0, g.cov(i, i)));
      lo(i) = std::fmin(lo(i), g.mean(i) - 4.0 * s);
      hi(i) = std::fmax(hi(i), g.mean(i) + 4.0 * s);
    }
  }
  const double pad = geom::diameter(shape);
  lo.array() -= pad;
  hi.array() += pad;
}

namespace {

constexpr size_t kMaxRecorded = 256;

void grid_stats(const OccupancyGrid& grid, double alpha, ContainmentReport& rep) {
  rep.max_phi_hat = 0.0;
  rep.cells_above_alpha = 0;
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double ph = grid.phi_hat(iy, ix);
      if (ph > rep.max_phi_hat) {
        rep.max_phi_hat = ph;
        rep.argmax_cell = grid.cell_center(ix, iy);
      }
      if (ph >= alpha) ++rep.cells_above_alpha;
    }
}

bool in_outer(const occupyset::OccupySetApprox& approx, const Vector2d& y) {
  switch (approx.outer_kind) {
    case occupyset::SetKind::all:
      return true;
    case occupyset::SetKind::empty:
      return false;
    case occupyset::SetKind::polytope:
      return ((approx.outer.A * y - approx.outer.b).array() <= 1e-9).all();
  }
  return false;
}

}  // namespace

ContainmentReport contour_and_containment(const SampleSet& samples,
                                          const geom::ConvexShape& shape,
                                          const OccupancyGrid& grid, double alpha,
                                          const occupyset::OccupySetApprox& approx) {
  ContainmentReport rep;
  grid_stats(grid, alpha, rep);

  if (approx.inner_kind == occupyset::SetKind::polytope) {
    for (int j = 0; j < approx.inner.V.cols(); ++j) {
      const VectorXd v = approx.inner.V.col(j);
      const double ph = phi_hat_at(samples, shape, v);
      const double sg = std::sqrt(ph * (1.0 - ph) / grid.Ns);
      if (ph < alpha - 3.0 * sg) {
        rep.pass = false;
        if (rep.inner_violations.size() < kMaxRecorded)
          rep.inner_violations.push_back({v, ph, alpha - 3.0 * sg});
      }
    }
  } else if (approx.inner_kind == occupyset::SetKind::all && alpha > 0.0) {
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix) {
        const double ph = grid.phi_hat(iy, ix);
        const double sg = grid.sigma_hat(iy, ix);
        if (ph < alpha - 3.0 * sg) {
          rep.pass = false;
          if (rep.inner_violations.size() < kMaxRecorded)
            rep.inner_violations.push_back(
                {grid.cell_center(ix, iy), ph, alpha - 3.0 * sg});
        }
      }
  }

  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double ph = grid.phi_hat(iy, ix);
      const double sg = grid.sigma_hat(iy, ix);
      if (ph < alpha + 3.0 * sg) continue;
      const Vector2d y = grid.cell_center(ix, iy);
      if (!in_outer(approx, y)) {
        rep.pass = false;
        if (rep.outer_violations.size() < kMaxRecorded)
          rep.outer_violations.push_back({y, ph, alpha + 3.0 * sg});
      }
    }
  return rep;
}

ContainmentReport cover_containment(const SampleSet& samples,
                                    const geom::ConvexShape& shape,
                                    const OccupancyGrid& grid, double alpha,
                                    const occupyset::DmspCover& cover) {
  (void)samples;
  (void)shape;
  ContainmentReport rep;
  grid_stats(grid, alpha, rep);

  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double ph = grid.phi_hat(iy, ix);
      const double sg = grid.sigma_hat(iy, ix);
      if (ph < alpha + 3.0 * sg) continue;
      const Vector2d y = grid.cell_center(ix, iy);
      bool covered = false;
      for (const auto& piece : cover.pieces)
        if (in_outer(piece.approx, y)) {
          covered = true;
          break;
        }
      if (!covered) {
        rep.pass = false;
        if (rep.outer_violations.size() < kMaxRecorded)
          rep.outer_violations.push_back({y, ph, alpha + 3.0 * sg});
      }
    }
  return rep;
}

}  // namespace fsreach::oracle
