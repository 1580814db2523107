#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsreach/dynamics.hpp"
#include "fsreach/geometry.hpp"
#include "fsreach/serialize.hpp"

namespace fsreach::scenario {

struct scenario_parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Serializable model description: constant matrices or the bundled vehicle.
struct ModelSpec {
  enum class Kind { dpv_constant, dmsp_unicycle } kind = Kind::dpv_constant;

  // dpv_constant
  int n = 0, m = 0, p = 0, horizon = 1;
  Eigen::MatrixXd A, B, F;
  dyn::GaussianSpec disturbance;

  // dmsp_unicycle
  dyn::UnicycleParams unicycle;
  std::string chain;  // "uniform" | "forward-biased" | "custom"
  Eigen::MatrixXd transition;

  // optional fixed turning-rate schedule (treats the vehicle as a DPV)
  std::vector<double> fixed_rates;
};

struct QuerySpec {
  int tau = 1;
  double alpha = 0.0;
  std::string algorithm = "both";  // projection | minkowski | both
  double tol = 1e-4;
  int K = 10;
  int n_des = 32;
};

struct OracleSpec {
  int Ns = 100000;
  std::uint64_t seed = 20240501;
  int nx = 200, ny = 200;
  std::optional<Eigen::Vector2d> lo, hi;  // unset: default extent
};

struct Scenario {
  std::string name;
  ModelSpec model;
  Eigen::VectorXd x0;
  geom::ConvexShape obstacle;
  QuerySpec query;
  OracleSpec oracle;
  std::string output_dir = "out";
  json raw;  // canonical source document (hash input)
};

Scenario scenario_from_json(const json& j);
Scenario load_scenario(const std::string& path);
json to_json(const Scenario& sc);

dyn::DpvModel build_dpv(const ModelSpec& spec);
dyn::DmspModel build_dmsp(const ModelSpec& spec);
bool is_dmsp(const ModelSpec& spec);

// Fixed-rate vehicle schedule as a plain parameter trajectory.
dyn::ParameterTrajectory fixed_rate_trajectory(const ModelSpec& spec, int tau);

// Bundled scenario presets (mirrors the files under scenarios/).
Scenario builtin_unicycle_scenario(const std::string& chain);

std::uint64_t scenario_hash(const Scenario& sc);
std::string library_version();

}  // namespace fsreach::scenario
