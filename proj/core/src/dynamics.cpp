#include "fsreach/dynamics.hpp"

#include <stdexcept>

namespace fsreach::dyn {

namespace {

void check_traj(const ParameterTrajectory& traj, int t_needed) {
  if (t_needed > traj.tau())
    throw std::invalid_argument("parameter trajectory shorter than requested time");
}

void check_tau(const DpvModel& model, int tau) {
  if (tau < 0) throw std::invalid_argument("negative time index");
  if (tau > model.horizon) throw std::invalid_argument("time index beyond horizon");
}

}  // namespace

ParameterTrajectory constant_trajectory(int tau, const VectorXd& lambda) {
  if (tau < 0) throw std::invalid_argument("constant_trajectory: negative length");
  ParameterTrajectory traj;
  traj.lambda0 = lambda;
  traj.values.assign(static_cast<size_t>(tau), lambda);
  return traj;
}

MatrixXd concat_state_matrix(const DpvModel& model, const ParameterTrajectory& traj,
                             int i, int j) {
  if (i < 0 || j < i) throw std::invalid_argument("concat_state_matrix: bad range");
  check_tau(model, j);
  if (j > 0) check_traj(traj, j - 1);
  MatrixXd M = MatrixXd::Identity(model.n, model.n);
  for (int t = i; t < j; ++t) M = model.A(traj.at(t)) * M;
  return M;
}

MatrixXd concat_disturbance_matrix(const DpvModel& model,
                                   const ParameterTrajectory& traj, int tau) {
  check_tau(model, tau);
  if (tau > 0) check_traj(traj, tau - 1);
  MatrixXd C(model.n, model.p * tau);
  MatrixXd left = MatrixXd::Identity(model.n, model.n);  // A(s+1..tau-1) product
  for (int s = tau - 1; s >= 0; --s) {
    const int block = tau - 1 - s;  // newest first
    C.middleCols(block * model.p, model.p) = left * model.F(traj.at(s));
    if (s > 0) left = left * model.A(traj.at(s));
  }
  return C;
}

MatrixXd concat_input_matrix(const DpvModel& model, const ParameterTrajectory& traj,
                             int tau) {
  check_tau(model, tau);
  if (tau > 0) check_traj(traj, tau - 1);
  MatrixXd C(model.n, model.m * tau);
  if (model.m == 0) return C;
  MatrixXd left = MatrixXd::Identity(model.n, model.n);
  for (int s = tau - 1; s >= 0; --s) {
    const int block = tau - 1 - s;
    C.middleCols(block * model.m, model.m) = left * model.B(traj.at(s));
    if (s > 0) left = left * model.A(traj.at(s));
  }
  return C;
}

VectorXd unperturbed_state(const DpvModel& model, const ParameterTrajectory& traj,
                           int tau, const VectorXd& x0,
                           const std::vector<VectorXd>& inputs) {
  check_tau(model, tau);
  if (x0.size() != model.n) throw std::invalid_argument("unperturbed_state: x0 size");
  if (!inputs.empty() && static_cast<int>(inputs.size()) < tau)
    throw std::invalid_argument("unperturbed_state: too few inputs");
  VectorXd x = x0;
  for (int t = 0; t < tau; ++t) {
    VectorXd next = model.A(traj.at(t)) * x;
    if (model.m > 0 && !inputs.empty())
      next += model.B(traj.at(t)) * inputs[static_cast<size_t>(t)];
    x = std::move(next);
  }
  return x;
}

bool is_switch_instant(const DmspModel& model, int t) {
  if (model.switch_period <= 0)
    throw std::invalid_argument("is_switch_instant: period must be positive");
  const int shifted = t - model.switch_offset;
  return shifted >= model.switch_period && shifted % model.switch_period == 0;
}

int mode_index(const DmspModel& model, double q) {
  for (size_t i = 0; i < model.q_values.size(); ++i)
    if (model.q_values[i] == q) return static_cast<int>(i);
  throw std::invalid_argument("mode_index: unknown mode value");
}

std::vector<DiscreteSequence> enumerate_sequences(const DmspModel& model, int tau) {
  if (tau < 0) throw std::invalid_argument("enumerate_sequences: negative tau");
  const int k = static_cast<int>(model.q_values.size());
  if (model.transition.rows() != k || model.transition.cols() != k)
    throw std::invalid_argument("enumerate_sequences: transition size");
  for (int i = 0; i < k; ++i) {
    const double row = model.transition.row(i).sum();
    if (std::fabs(row - 1.0) > 1e-9)
      throw std::invalid_argument("enumerate_sequences: transition rows must sum to 1");
    if ((model.transition.row(i).array() < 0.0).any())
      throw std::invalid_argument("enumerate_sequences: negative transition entry");
  }

  std::vector<DiscreteSequence> out;
  DiscreteSequence cur;
  cur.states.reserve(static_cast<size_t>(tau));

  std::function<void(int, int, double)> dfs = [&](int t, int mode, double prob) {
    if (t == tau) {
      cur.probability = prob;
      out.push_back(cur);
      return;
    }
    if (is_switch_instant(model, t)) {
      for (int j = 0; j < k; ++j) {
        const double pj = model.transition(mode, j);
        if (pj <= 0.0) continue;
        cur.states.push_back(model.q_values[static_cast<size_t>(j)]);
        dfs(t + 1, j, prob * pj);
        cur.states.pop_back();
      }
    } else {
      cur.states.push_back(model.q_values[static_cast<size_t>(mode)]);
      dfs(t + 1, mode, prob);
      cur.states.pop_back();
    }
  };
  dfs(0, mode_index(model, model.q0), 1.0);
  return out;
}

ParameterTrajectory parameter_trajectory(const DmspModel& model,
                                         const DiscreteSequence& seq) {
  ParameterTrajectory traj;
  traj.lambda0 = model.lambda0;
  traj.q0 = model.q0;
  VectorXd lam = model.lambda0;
  for (size_t t = 0; t < seq.states.size(); ++t) {
    lam = model.param_step(seq.states[t], static_cast<int>(t), lam);
    traj.values.push_back(lam);
  }
  return traj;
}

DmspModel unicycle_dmsp(const UnicycleParams& params) {
  if (params.ts <= 0.0) throw std::invalid_argument("unicycle_dmsp: timestep");
  if (params.speed_var < 0.0) throw std::invalid_argument("unicycle_dmsp: speed_var");
  if (params.turn_rates.empty()) throw std::invalid_argument("unicycle_dmsp: no modes");
  DmspModel model;
  model.subsystem.n = 2;
  model.subsystem.m = 0;
  model.subsystem.p = 1;
  model.subsystem.horizon = params.horizon;
  model.subsystem.A = [](const VectorXd&) { return MatrixXd::Identity(2, 2); };
  const double ts = params.ts;
  model.subsystem.F = [ts](const VectorXd& lam) {
    MatrixXd F(2, 1);
    F << ts * std::cos(lam(0)), ts * std::sin(lam(0));
    return F;
  };
  model.subsystem.disturbance.mean = VectorXd::Constant(1, params.speed_mean);
  model.subsystem.disturbance.cov = MatrixXd::Constant(1, 1, params.speed_var);
  model.q_values = params.turn_rates;
  model.transition = params.transition.size() > 0
                         ? params.transition
                         : uniform_transition(static_cast<int>(params.turn_rates.size()));
  model.switch_period = params.switch_period;
  model.switch_offset = 1;
  model.q0 = params.q0;
  model.lambda0 = VectorXd::Constant(1, params.heading0);
  model.param_step = [ts](double q, int, const VectorXd& lam) {
    return VectorXd::Constant(1, lam(0) + q * ts);
  };
  return model;
}

MatrixXd uniform_transition(int k) {
  if (k < 1) throw std::invalid_argument("uniform_transition: k < 1");
  return MatrixXd::Constant(k, k, 1.0 / k);
}

MatrixXd forward_biased_transition() {
  MatrixXd M(5, 5);
  for (int i = 0; i < 5; ++i) {
    M(i, 0) = 0.5;
    M(i, 1) = 0.47;
    M(i, 2) = 0.03;
    M(i, 3) = 0.0;
    M(i, 4) = 0.0;
  }
  return M;
}

}  // namespace fsreach::dyn
