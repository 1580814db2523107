#pragma once

#include <Eigen/Dense>

namespace fsreach::lp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class LpStatus { optimal, unbounded, infeasible };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  VectorXd x;
};

// max c'x subject to A x <= b, x free. Solved through the standard-form dual
// with a dense two-phase simplex (Bland's rule); feas_tol is the pivot and
// feasibility tolerance.
LpResult lp_max(const VectorXd& c, const MatrixXd& A, const VectorXd& b,
                double feas_tol = 1e-9);

// Feasibility of {lambda >= 0, sum lambda = 1, V lambda = p}: p in conv(V).
bool in_convex_hull(const MatrixXd& V, const VectorXd& p, double feas_tol = 1e-9);

}  // namespace fsreach::lp
