#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

namespace fsreach::dyn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct GaussianSpec {
  VectorXd mean;
  MatrixXd cov;
};

using MatrixFn = std::function<MatrixXd(const VectorXd& lambda)>;

// x_{t+1} = A(l_t) x_t + B(l_t) u_t + F(l_t) w_t, w_t iid Gaussian.
struct DpvModel {
  int n = 0;        // state dimension
  int m = 0;        // input dimension (0: no input channel)
  int p = 0;        // disturbance dimension
  int horizon = 1;  // largest admissible time index
  MatrixFn A;
  MatrixFn B;
  MatrixFn F;
  GaussianSpec disturbance;
};

// Parameter path lambda_0..lambda_tau; values holds lambda_1..lambda_tau.
struct ParameterTrajectory {
  VectorXd lambda0;
  std::vector<VectorXd> values;
  double q0 = 0.0;

  int tau() const { return static_cast<int>(values.size()); }
  const VectorXd& at(int t) const { return t == 0 ? lambda0 : values.at(t - 1); }
};

// Trajectory with a constant parameter (covers parameter-free models).
ParameterTrajectory constant_trajectory(int tau, const VectorXd& lambda = VectorXd());

// Mode path q_1..q_tau with its path probability.
struct DiscreteSequence {
  std::vector<double> states;
  double probability = 1.0;
};

// DPV subsystem whose parameter is driven by a Markov mode: the mode makes a
// chain transition when t = k*switch_period + switch_offset (k >= 1) and
// holds otherwise; the parameter follows param_step(q_{t+1}, t, lambda_t).
struct DmspModel {
  DpvModel subsystem;
  std::vector<double> q_values;
  MatrixXd transition;  // row-stochastic, indexed like q_values
  int switch_period = 1;
  int switch_offset = 0;
  double q0 = 0.0;
  VectorXd lambda0;
  std::function<VectorXd(double q, int t, const VectorXd& lambda)> param_step;
};

// State transition matrix from time i to j: A(l_{j-1}) * ... * A(l_i); the
// identity when i == j.
MatrixXd concat_state_matrix(const DpvModel& model, const ParameterTrajectory& traj,
                             int i, int j);

// Disturbance-to-state matrix at time tau, newest disturbance block leftmost:
// [F(l_{tau-1}) | A(l_{tau-1})F(l_{tau-2}) | ... | A(tau-1..1)F(l_0)].
MatrixXd concat_disturbance_matrix(const DpvModel& model,
                                   const ParameterTrajectory& traj, int tau);

// Input-to-state matrix at time tau, same layout with B in place of F.
MatrixXd concat_input_matrix(const DpvModel& model,
                             const ParameterTrajectory& traj, int tau);

// Disturbance-free state at time tau; inputs are u_0..u_{tau-1} (empty: 0).
VectorXd unperturbed_state(const DpvModel& model, const ParameterTrajectory& traj,
                           int tau, const VectorXd& x0,
                           const std::vector<VectorXd>& inputs = {});

bool is_switch_instant(const DmspModel& model, int t);
int mode_index(const DmspModel& model, double q);

// All mode paths of positive probability up to time tau; probabilities are
// products of the step kernels and sum to one.
std::vector<DiscreteSequence> enumerate_sequences(const DmspModel& model, int tau);

// Parameter path induced by a mode path.
ParameterTrajectory parameter_trajectory(const DmspModel& model,
                                         const DiscreteSequence& seq);

// Planar vehicle with commanded speed disturbance and piecewise-constant
// turning rate: position integrates speed along the heading, the heading
// integrates the active turning rate, and the rate switches through the
// Markov chain one step after each period boundary.
struct UnicycleParams {
  double ts = 0.05;
  std::vector<double> turn_rates = {-5.0, -2.5, 0.0, 2.5, 5.0};
  double speed_mean = 5.0;
  double speed_var = 1.0;
  double heading0 = M_PI / 4.0;
  double q0 = 0.0;
  int horizon = 100;
  int switch_period = 5;
  MatrixXd transition;  // empty: uniform over turn_rates
};

DmspModel unicycle_dmsp(const UnicycleParams& params);

// Uniform 5x5 chain and the forward-biased chain used by the bundled
// vehicle scenarios.
MatrixXd uniform_transition(int k);
MatrixXd forward_biased_transition();

}  // namespace fsreach::dyn
