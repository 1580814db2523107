#include "fsreach/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#ifndef FSREACH_VERSION
#define FSREACH_VERSION "0.0.0"
#endif

namespace fsreach::scenario {

namespace {

const json& require(const json& j, const char* field, const std::string& ctx) {
  if (!j.is_object() || !j.contains(field))
    throw scenario_parse_error(ctx + ": missing field '" + field + "'");
  return j.at(field);
}

double num_or(const json& j, const char* field, double dflt) {
  if (!j.is_object() || !j.contains(field)) return dflt;
  if (!j.at(field).is_number())
    throw scenario_parse_error(std::string("field '") + field + "' must be a number");
  return j.at(field).get<double>();
}

int int_or(const json& j, const char* field, int dflt) {
  if (!j.is_object() || !j.contains(field)) return dflt;
  if (!j.at(field).is_number_integer())
    throw scenario_parse_error(std::string("field '") + field +
                               "' must be an integer");
  return j.at(field).get<int>();
}

std::string str_or(const json& j, const char* field, const std::string& dflt) {
  if (!j.is_object() || !j.contains(field)) return dflt;
  if (!j.at(field).is_string())
    throw scenario_parse_error(std::string("field '") + field + "' must be a string");
  return j.at(field).get<std::string>();
}

Eigen::MatrixXd matrix_field(const json& j, const char* field,
                             const std::string& ctx) {
  try {
    return matrix_from_json(require(j, field, ctx));
  } catch (const std::invalid_argument& e) {
    throw scenario_parse_error(ctx + ": field '" + field + "': " + e.what());
  }
}

Eigen::VectorXd vector_field(const json& j, const char* field,
                             const std::string& ctx) {
  try {
    return vector_from_json(require(j, field, ctx));
  } catch (const std::invalid_argument& e) {
    throw scenario_parse_error(ctx + ": field '" + field + "': " + e.what());
  }
}

ModelSpec model_from_json(const json& j) {
  ModelSpec spec;
  const std::string kind = require(j, "kind", "model").get<std::string>();

  if (kind == "constant") {
    spec.kind = ModelSpec::Kind::dpv_constant;
    spec.A = matrix_field(j, "A", "model");
    spec.n = static_cast<int>(spec.A.rows());
    if (spec.A.cols() != spec.n)
      throw scenario_parse_error("model: A must be square");
    spec.F = matrix_field(j, "F", "model");
    if (spec.F.rows() != spec.n)
      throw scenario_parse_error("model: F row count must match A");
    spec.p = static_cast<int>(spec.F.cols());
    if (j.contains("B")) {
      spec.B = matrix_field(j, "B", "model");
      if (spec.B.rows() != spec.n)
        throw scenario_parse_error("model: B row count must match A");
      spec.m = static_cast<int>(spec.B.cols());
    }
    spec.horizon = int_or(j, "N", 1);
    const json& dist = require(j, "disturbance", "model");
    spec.disturbance.mean = vector_field(dist, "mean", "model.disturbance");
    spec.disturbance.cov = matrix_field(dist, "cov", "model.disturbance");
    if (spec.disturbance.mean.size() != spec.p ||
        spec.disturbance.cov.rows() != spec.p ||
        spec.disturbance.cov.cols() != spec.p)
      throw scenario_parse_error("model.disturbance: size must match F columns");
    return spec;
  }

  if (kind == "unicycle") {
    spec.kind = ModelSpec::Kind::dmsp_unicycle;
    dyn::UnicycleParams& u = spec.unicycle;
    u.ts = num_or(j, "ts", u.ts);
    u.speed_mean = num_or(j, "speed_mean", u.speed_mean);
    u.speed_var = num_or(j, "speed_var", u.speed_var);
    u.horizon = int_or(j, "N", u.horizon);
    spec.chain = "uniform";
    if (j.contains("markov")) {
      const json& mk = j.at("markov");
      if (mk.contains("Q")) {
        u.turn_rates = require(mk, "Q", "model.markov").get<std::vector<double>>();
      }
      u.switch_period = int_or(mk, "tau_s", u.switch_period);
      u.q0 = num_or(mk, "q0", u.q0);
      if (mk.contains("lambda0")) {
        const json& l0 = mk.at("lambda0");
        u.heading0 = l0.is_array() ? l0.at(0).get<double>() : l0.get<double>();
      }
      if (mk.contains("M")) {
        const json& M = mk.at("M");
        if (M.is_string()) {
          spec.chain = M.get<std::string>();
          if (spec.chain != "uniform" && spec.chain != "forward-biased")
            throw scenario_parse_error("model.markov: unknown chain '" + spec.chain +
                                       "'");
        } else {
          spec.chain = "custom";
          spec.transition = matrix_field(mk, "M", "model.markov");
        }
      }
    }
    if (j.contains("fixed_rates"))
      spec.fixed_rates = j.at("fixed_rates").get<std::vector<double>>();
    spec.n = 2;
    spec.m = 0;
    spec.p = 1;
    spec.horizon = u.horizon;
    return spec;
  }

  throw scenario_parse_error("model: unknown kind '" + kind + "'");
}

json model_to_json(const ModelSpec& spec) {
  if (spec.kind == ModelSpec::Kind::dpv_constant) {
    json j = {{"kind", "constant"},
              {"A", fsreach::to_json(spec.A)},
              {"F", fsreach::to_json(spec.F)},
              {"N", spec.horizon},
              {"disturbance",
               {{"mean", fsreach::to_json(spec.disturbance.mean)},
                {"cov", fsreach::to_json(spec.disturbance.cov)}}}};
    if (spec.m > 0) j["B"] = fsreach::to_json(spec.B);
    return j;
  }
  const dyn::UnicycleParams& u = spec.unicycle;
  json mk = {{"Q", u.turn_rates},
             {"tau_s", u.switch_period},
             {"q0", u.q0},
             {"lambda0", u.heading0}};
  if (spec.chain == "custom")
    mk["M"] = fsreach::to_json(spec.transition);
  else
    mk["M"] = spec.chain;
  json j = {{"kind", "unicycle"}, {"ts", u.ts},
            {"speed_mean", u.speed_mean}, {"speed_var", u.speed_var},
            {"N", u.horizon}, {"markov", mk}};
  if (!spec.fixed_rates.empty()) j["fixed_rates"] = spec.fixed_rates;
  return j;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario sc;
  sc.raw = j;
  sc.name = str_or(j, "name", "scenario");
  sc.model = model_from_json(require(j, "model", sc.name));
  sc.x0 = vector_field(j, "x0", sc.name);
  if (sc.x0.size() != sc.model.n)
    throw scenario_parse_error(sc.name + ": x0 size must match state dimension");
  try {
    sc.obstacle = shape_from_json(require(j, "obstacle", sc.name));
  } catch (const std::invalid_argument& e) {
    throw scenario_parse_error(sc.name + ": obstacle: " + e.what());
  }
  if (geom::dim(sc.obstacle) != sc.model.n)
    throw scenario_parse_error(sc.name + ": obstacle dimension must match state");

  const json& q = require(j, "query", sc.name);
  sc.query.tau = int_or(q, "tau", sc.query.tau);
  sc.query.alpha = num_or(q, "alpha", sc.query.alpha);
  sc.query.algorithm = str_or(q, "algorithm", sc.query.algorithm);
  sc.query.tol = num_or(q, "tol", sc.query.tol);
  sc.query.K = int_or(q, "K", sc.query.K);
  sc.query.n_des = int_or(q, "n_des", sc.query.n_des);
  if (sc.query.alpha < 0.0 || sc.query.alpha > 1.0)
    throw scenario_parse_error(sc.name + ": alpha out of range");
  if (sc.query.tau < 0 || sc.query.tau > sc.model.horizon)
    throw scenario_parse_error(sc.name + ": tau must lie in [0, N]");
  if (sc.query.algorithm != "projection" && sc.query.algorithm != "minkowski" &&
      sc.query.algorithm != "both")
    throw scenario_parse_error(sc.name + ": unknown algorithm '" +
                               sc.query.algorithm + "'");

  if (j.contains("oracle")) {
    const json& o = j.at("oracle");
    sc.oracle.Ns = int_or(o, "Ns", sc.oracle.Ns);
    const double seed = num_or(o, "seed", static_cast<double>(sc.oracle.seed));
    sc.oracle.seed = static_cast<std::uint64_t>(seed);
    sc.oracle.nx = int_or(o, "nx", sc.oracle.nx);
    sc.oracle.ny = int_or(o, "ny", sc.oracle.ny);
    if (o.contains("lo")) {
      const Eigen::VectorXd lo = vector_field(o, "lo", sc.name + ".oracle");
      const Eigen::VectorXd hi = vector_field(o, "hi", sc.name + ".oracle");
      if (lo.size() != 2 || hi.size() != 2)
        throw scenario_parse_error(sc.name + ": oracle extent must be 2D");
      sc.oracle.lo = Eigen::Vector2d(lo);
      sc.oracle.hi = Eigen::Vector2d(hi);
    }
    if (sc.oracle.Ns < 1)
      throw scenario_parse_error(sc.name + ": oracle Ns must be positive");
  }
  sc.output_dir = str_or(j, "output_dir", sc.output_dir);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw scenario_parse_error(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw scenario_parse_error(path + ": " + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const json::exception& e) {
    throw scenario_parse_error(path + ": " + e.what());
  }
}

json to_json(const Scenario& sc) {
  return {{"name", sc.name},
          {"model", model_to_json(sc.model)},
          {"x0", fsreach::to_json(sc.x0)},
          {"obstacle", fsreach::to_json(sc.obstacle)},
          {"query",
           {{"tau", sc.query.tau},
            {"alpha", sc.query.alpha},
            {"algorithm", sc.query.algorithm},
            {"tol", sc.query.tol},
            {"K", sc.query.K},
            {"n_des", sc.query.n_des}}},
          {"oracle",
           {{"Ns", sc.oracle.Ns},
            {"seed", sc.oracle.seed},
            {"nx", sc.oracle.nx},
            {"ny", sc.oracle.ny}}},
          {"output_dir", sc.output_dir}};
}

dyn::DpvModel build_dpv(const ModelSpec& spec) {
  if (spec.kind != ModelSpec::Kind::dpv_constant)
    throw std::invalid_argument("build_dpv: constant-matrix model required");
  dyn::DpvModel model;
  model.n = spec.n;
  model.m = spec.m;
  model.p = spec.p;
  model.horizon = spec.horizon;
  const Eigen::MatrixXd A = spec.A, B = spec.B, F = spec.F;
  model.A = [A](const Eigen::VectorXd&) { return A; };
  model.B = [B](const Eigen::VectorXd&) { return B; };
  model.F = [F](const Eigen::VectorXd&) { return F; };
  model.disturbance = spec.disturbance;
  return model;
}

dyn::DmspModel build_dmsp(const ModelSpec& spec) {
  if (spec.kind != ModelSpec::Kind::dmsp_unicycle)
    throw std::invalid_argument("build_dmsp: vehicle model required");
  dyn::UnicycleParams params = spec.unicycle;
  if (spec.chain == "uniform")
    params.transition =
        dyn::uniform_transition(static_cast<int>(params.turn_rates.size()));
  else if (spec.chain == "forward-biased")
    params.transition = dyn::forward_biased_transition();
  else
    params.transition = spec.transition;
  if (params.transition.rows() != static_cast<int>(params.turn_rates.size()))
    throw std::invalid_argument("build_dmsp: transition size must match mode count");
  return dyn::unicycle_dmsp(params);
}

bool is_dmsp(const ModelSpec& spec) {
  return spec.kind == ModelSpec::Kind::dmsp_unicycle && spec.fixed_rates.empty();
}

dyn::ParameterTrajectory fixed_rate_trajectory(const ModelSpec& spec, int tau) {
  if (spec.kind != ModelSpec::Kind::dmsp_unicycle)
    throw std::invalid_argument("fixed_rate_trajectory: vehicle model required");
  if (static_cast<int>(spec.fixed_rates.size()) < tau)
    throw std::invalid_argument("fixed_rate_trajectory: schedule shorter than tau");
  dyn::ParameterTrajectory traj;
  traj.lambda0 = Eigen::VectorXd::Constant(1, spec.unicycle.heading0);
  traj.q0 = spec.unicycle.q0;
  double lam = spec.unicycle.heading0;
  for (int t = 0; t < tau; ++t) {
    lam += spec.fixed_rates[static_cast<size_t>(t)] * spec.unicycle.ts;
    traj.values.push_back(Eigen::VectorXd::Constant(1, lam));
  }
  return traj;
}

Scenario builtin_unicycle_scenario(const std::string& chain) {
  if (chain != "uniform" && chain != "forward-biased")
    throw scenario_parse_error("builtin scenario: unknown chain '" + chain + "'");
  Scenario sc;
  sc.name = "unicycle-" + chain;
  sc.model.kind = ModelSpec::Kind::dmsp_unicycle;
  sc.model.n = 2;
  sc.model.m = 0;
  sc.model.p = 1;
  sc.model.unicycle.horizon = 100;
  sc.model.horizon = 100;
  sc.model.chain = chain;
  sc.x0 = Eigen::Vector2d(10.0, 10.0);
  sc.obstacle = geom::Ball{Eigen::Vector2d::Zero(), 0.2};
  sc.query.tau = 15;
  sc.query.alpha = 0.01;
  sc.query.algorithm = "minkowski";
  sc.raw = to_json(sc);
  return sc;
}

std::uint64_t scenario_hash(const Scenario& sc) {
  return canonical_hash(sc.raw.is_null() ? to_json(sc) : sc.raw);
}

std::string library_version() { return FSREACH_VERSION; }

}  // namespace fsreach::scenario
