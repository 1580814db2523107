#include "fsreach/lp.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fsreach::lp {

namespace {

enum class StdStatus { optimal, unbounded, infeasible };

struct StdLpResult {
  StdStatus status = StdStatus::infeasible;
  VectorXd y;
  double value = 0.0;
  std::vector<int> basis;
};

// min c'y subject to E y = f, y >= 0, dense tableau simplex with Bland's rule.
StdLpResult simplex_standard(MatrixXd E, VectorXd f, const VectorXd& c, double tol) {
  const int m = static_cast<int>(E.rows());
  const int k = static_cast<int>(E.cols());
  for (int i = 0; i < m; ++i) {
    if (f(i) < 0.0) {
      E.row(i) = -E.row(i);
      f(i) = -f(i);
    }
  }

  // Tableau over original + artificial columns.
  MatrixXd T(m, k + m);
  T.leftCols(k) = E;
  T.rightCols(m) = MatrixXd::Identity(m, m);
  VectorXd rhs = f;
  std::vector<int> basis(m);
  std::iota(basis.begin(), basis.end(), k);

  auto pivot = [&](int row, int col) {
    const double piv = T(row, col);
    T.row(row) /= piv;
    rhs(row) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == row) continue;
      const double factor = T(i, col);
      if (factor != 0.0) {
        T.row(i) -= factor * T.row(row);
        rhs(i) -= factor * rhs(row);
      }
    }
    basis[static_cast<size_t>(row)] = col;
  };

  auto run_phase = [&](const VectorXd& cost, int ncols) -> bool {
    // Returns false when unbounded.
    const int max_iter = 200 * (ncols + m + 4);
    for (int iter = 0; iter < max_iter; ++iter) {
      VectorXd cb(m);
      for (int i = 0; i < m; ++i) cb(i) = cost(basis[static_cast<size_t>(i)]);
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        const double red = cost(j) - cb.dot(T.col(j));
        if (red < -tol) {
          enter = j;  // Bland: first improving index
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (T(i, enter) > tol) {
          const double ratio = rhs(i) / T(i, enter);
          if (leave < 0 || ratio < best_ratio - tol ||
              (std::fabs(ratio - best_ratio) <= tol &&
               basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex: iteration limit");
  };

  // Phase 1: minimize the artificial sum.
  VectorXd cost1 = VectorXd::Zero(k + m);
  cost1.tail(m).setOnes();
  if (!run_phase(cost1, k + m)) throw std::runtime_error("simplex: phase-1 unbounded");
  double art_sum = 0.0;
  for (int i = 0; i < m; ++i)
    if (basis[static_cast<size_t>(i)] >= k) art_sum += rhs(i);
  if (art_sum > 1e3 * tol) return {StdStatus::infeasible, VectorXd(), 0.0, {}};

  // Drive residual artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (basis[static_cast<size_t>(i)] < k) continue;
    int col = -1;
    for (int j = 0; j < k; ++j) {
      if (std::fabs(T(i, j)) > 1e3 * tol) {
        col = j;
        break;
      }
    }
    if (col >= 0) pivot(i, col);
  }

  // Phase 2 on original columns; artificials are barred by +inf-like cost.
  VectorXd cost2 = VectorXd::Zero(k + m);
  cost2.head(k) = c;
  const double big = 1.0 + 1e8 * (1.0 + c.cwiseAbs().maxCoeff());
  cost2.tail(m).setConstant(big);
  if (!run_phase(cost2, k)) return {StdStatus::unbounded, VectorXd(), 0.0, {}};

  VectorXd y = VectorXd::Zero(k);
  for (int i = 0; i < m; ++i) {
    const int b = basis[static_cast<size_t>(i)];
    if (b < k) y(b) = rhs(i);
  }
  return {StdStatus::optimal, y, c.dot(y), basis};
}

bool primal_feasible(const MatrixXd& A, const VectorXd& b, double tol) {
  // {x : A x <= b} nonempty, via x = x+ - x-, slack s: [A -A I][x+;x-;s] = b.
  const int rows = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  MatrixXd E(rows, 2 * n + rows);
  E.leftCols(n) = A;
  E.middleCols(n, n) = -A;
  E.rightCols(rows) = MatrixXd::Identity(rows, rows);
  const StdLpResult r =
      simplex_standard(E, b, VectorXd::Zero(2 * n + rows), tol);
  return r.status != StdStatus::infeasible;
}

}  // namespace

LpResult lp_max(const VectorXd& c, const MatrixXd& A, const VectorXd& b,
                double feas_tol) {
  if (A.rows() != b.size() || A.cols() != c.size())
    throw std::invalid_argument("lp_max: dimension mismatch");
  const int rows = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (rows == 0) {
    // No constraints: bounded only for the zero objective.
    LpResult r;
    r.status = c.isZero(0.0) ? LpStatus::optimal : LpStatus::unbounded;
    r.x = VectorXd::Zero(n);
    return r;
  }

  // Dual: min b'y subject to A'y = c, y >= 0.
  const StdLpResult dual = simplex_standard(A.transpose(), c, b, feas_tol);
  LpResult out;
  switch (dual.status) {
    case StdStatus::optimal: {
      out.status = LpStatus::optimal;
      out.value = dual.value;
      // Primal point from the active rows (complementary slackness).
      std::vector<int> active;
      for (int i = 0; i < rows; ++i)
        if (dual.y(i) > feas_tol) active.push_back(i);
      if (!active.empty()) {
        MatrixXd Aa(static_cast<int>(active.size()), n);
        VectorXd ba(static_cast<int>(active.size()));
        for (size_t i = 0; i < active.size(); ++i) {
          Aa.row(static_cast<int>(i)) = A.row(active[i]);
          ba(static_cast<int>(i)) = b(active[i]);
        }
        out.x = Aa.colPivHouseholderQr().solve(ba);
      } else {
        out.x = VectorXd::Zero(n);
      }
      return out;
    }
    case StdStatus::infeasible:
      out.status = primal_feasible(A, b, feas_tol) ? LpStatus::unbounded
                                                   : LpStatus::infeasible;
      return out;
    case StdStatus::unbounded:
      out.status = LpStatus::infeasible;
      return out;
  }
  return out;
}

bool in_convex_hull(const MatrixXd& V, const VectorXd& p, double feas_tol) {
  if (V.rows() != p.size()) throw std::invalid_argument("in_convex_hull: dims");
  const int n = static_cast<int>(V.rows());
  const int K = static_cast<int>(V.cols());
  if (K == 0) return false;
  MatrixXd E(n + 1, K);
  E.topRows(n) = V;
  E.bottomRows(1).setOnes();
  VectorXd f(n + 1);
  f.head(n) = p;
  f(n) = 1.0;
  // Scale rows to comparable magnitude for the feasibility tolerance.
  for (int i = 0; i < n; ++i) {
    const double s = std::fmax(1.0, E.row(i).cwiseAbs().maxCoeff());
    E.row(i) /= s;
    f(i) /= s;
  }
  const StdLpResult r = simplex_standard(E, f, VectorXd::Zero(K), feas_tol);
  return r.status != StdStatus::infeasible;
}

}  // namespace fsreach::lp
