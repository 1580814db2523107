#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fsreach/occupancy.hpp"
#include "fsreach/occupyset.hpp"
#include "fsreach/oracle.hpp"
#include "fsreach/scenario.hpp"
#include "fsreach/serialize.hpp"
#include "fsreach/svg.hpp"

namespace {

using namespace fsreach;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

struct Opts {
  std::string scenario_path;
  std::string model_name;
  std::string chain = "uniform";
  std::string alg;
  std::string at;
  std::string grid;
  std::string out_dir;
  int tau = -1;
  double alpha = -2.0;
  double tol = -1.0;
  int K = -1;
  int n_des = -1;
  long Ns = -1;
  std::string seed;
};

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void add_common(CLI::App* cmd, Opts& o) {
  cmd->add_option("--scenario", o.scenario_path, "scenario file (JSON)");
  cmd->add_option("--model", o.model_name, "builtin model preset (unicycle)");
  cmd->add_option("--chain", o.chain,
                  "builtin chain variant (uniform|forward-biased)");
  cmd->add_option("--tau", o.tau, "time index override");
  cmd->add_option("--alpha", o.alpha, "probability threshold override");
  cmd->add_option("--tol", o.tol, "occupancy tolerance override");
  cmd->add_option("--K", o.K, "external point count override");
  cmd->add_option("--ndes", o.n_des, "support direction count override");
  cmd->add_option("--Ns", o.Ns, "oracle sample count override");
  cmd->add_option("--seed", o.seed,
                  "oracle seed (FSREACH_SEED supplies the default)");
  cmd->add_option("--out", o.out_dir, "output directory override");
}

scenario::Scenario resolve_scenario(const Opts& o) {
  scenario::Scenario sc;
  if (!o.scenario_path.empty()) {
    sc = scenario::load_scenario(o.scenario_path);
  } else if (o.model_name == "unicycle") {
    sc = scenario::builtin_unicycle_scenario(o.chain);
  } else if (o.model_name.empty()) {
    throw scenario::scenario_parse_error(
        "no scenario given (use --scenario FILE or --model unicycle)");
  } else {
    throw scenario::scenario_parse_error("unknown model preset '" + o.model_name +
                                         "'");
  }
  if (o.tau >= 0) sc.query.tau = o.tau;
  if (o.alpha > -1.0) sc.query.alpha = o.alpha;
  if (o.tol > 0.0) sc.query.tol = o.tol;
  if (o.K > 0) sc.query.K = o.K;
  if (o.n_des > 0) sc.query.n_des = o.n_des;
  if (!o.alg.empty()) sc.query.algorithm = o.alg;
  if (o.Ns > 0) sc.oracle.Ns = static_cast<int>(o.Ns);
  if (!o.seed.empty())
    sc.oracle.seed = std::stoull(o.seed);
  else if (!(sc.raw.contains("oracle") && sc.raw["oracle"].contains("seed"))) {
    if (const char* env = std::getenv("FSREACH_SEED"))
      sc.oracle.seed = std::stoull(env);
  }
  if (!o.out_dir.empty()) sc.output_dir = o.out_dir;

  if (sc.query.alpha < 0.0 || sc.query.alpha > 1.0)
    throw scenario::scenario_parse_error(sc.name + ": alpha out of range");
  if (sc.query.tau < 0 || sc.query.tau > sc.model.horizon)
    throw scenario::scenario_parse_error(sc.name + ": tau must lie in [0, N]");
  if (sc.query.algorithm != "projection" && sc.query.algorithm != "minkowski" &&
      sc.query.algorithm != "both")
    throw scenario::scenario_parse_error(sc.name + ": unknown algorithm '" +
                                         sc.query.algorithm + "'");
  std::filesystem::create_directories(sc.output_dir);
  return sc;
}

json record_base(const scenario::Scenario& sc) {
  return {{"scenario", sc.name},
          {"scenario_hash", hash_hex(scenario::scenario_hash(sc))},
          {"library_version", scenario::library_version()}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << "\n";
}

std::string out_path(const scenario::Scenario& sc, const std::string& suffix) {
  return sc.output_dir + "/" + sc.name + "_" + suffix;
}

bool uses_markov(const scenario::Scenario& sc) { return scenario::is_dmsp(sc.model); }

// Reach entries at time tau: one for plain models, one per mode path for
// switched models.
std::vector<fsr::HybridReachEntry> reach_entries(const scenario::Scenario& sc,
                                                 int tau) {
  if (uses_markov(sc)) return fsr::fsr_dmsp(scenario::build_dmsp(sc.model), tau, sc.x0);
  fsr::HybridReachEntry entry;
  if (sc.model.kind == scenario::ModelSpec::Kind::dpv_constant) {
    const dyn::DpvModel model = scenario::build_dpv(sc.model);
    entry.trajectory = dyn::constant_trajectory(tau);
    entry.gauss = fsr::fsr_gaussian_dpv(model, entry.trajectory, tau, sc.x0);
    entry.set = fsr::fsr_set_dpv(model, entry.trajectory, tau, sc.x0);
  } else {
    const dyn::DmspModel dmsp = scenario::build_dmsp(sc.model);
    entry.trajectory = scenario::fixed_rate_trajectory(sc.model, tau);
    entry.gauss = fsr::fsr_gaussian_dpv(dmsp.subsystem, entry.trajectory, tau, sc.x0);
    entry.set = fsr::fsr_set_dpv(dmsp.subsystem, entry.trajectory, tau, sc.x0);
  }
  entry.sequence.probability = 1.0;
  return {entry};
}

MatrixXd ellipse_points(const VectorXd& mean, const MatrixXd& cov, double scale,
                        int K = 64) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
  const MatrixXd L =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  MatrixXd pts(2, K);
  for (int k = 0; k < K; ++k) {
    const double a = 2.0 * M_PI * k / K;
    Vector2d u(std::cos(a), std::sin(a));
    pts.col(k) = mean + scale * (L * u);
  }
  return pts;
}

void svg_window(const std::vector<fsr::HybridReachEntry>& entries,
                const geom::ConvexShape& shape, Vector2d& lo, Vector2d& hi) {
  std::vector<fsr::GaussianState> states;
  for (const auto& e : entries) states.push_back(e.gauss);
  oracle::default_grid_extent(states, shape, lo, hi);
}

json approx_to_record(const occupyset::OccupySetApprox& a, double ms) {
  json j = to_json(a);
  j["timing_ms"] = ms;
  return j;
}

void draw_approx(svg::Figure& fig, const occupyset::OccupySetApprox& a,
                 const std::string& color) {
  if (a.outer_kind == occupyset::SetKind::polytope) {
    const MatrixXd verts = geom::hpolytope_vertices_2d(a.outer);
    if (verts.cols() >= 3) fig.polyline(verts, color, 1.5, true);
  }
  if (a.inner_kind == occupyset::SetKind::polytope && a.inner.V.cols() >= 3)
    fig.polygon_fill(a.inner.V, color, 0.25);
}

// ---- fsr ----------------------------------------------------------------

int run_fsr(const Opts& o) {
  const scenario::Scenario sc = resolve_scenario(o);
  const int tau = sc.query.tau;
  json rec = record_base(sc);
  rec["tau"] = tau;
  json out_entries = json::array();

  const double t0 = now_ms();
  std::vector<fsr::HybridReachEntry> entries;
  if (uses_markov(sc)) {
    entries = reach_entries(sc, tau);
    for (const auto& e : entries) {
      json je = {{"sequence", to_json(e.sequence)},
                 {"gauss", to_json(e.gauss)},
                 {"anchor", to_json(e.set.anchor)},
                 {"set_dim", e.set.dim}};
      out_entries.push_back(je);
    }
  } else {
    for (int t = 1; t <= tau; ++t) {
      const auto ets = reach_entries(sc, t);
      entries.insert(entries.end(), ets.begin(), ets.end());
      json je = {{"t", t},
                 {"gauss", to_json(ets[0].gauss)},
                 {"anchor", to_json(ets[0].set.anchor)},
                 {"generator", to_json(ets[0].set.generator)},
                 {"set_dim", ets[0].set.dim}};
      out_entries.push_back(je);
    }
  }
  const double t1 = now_ms();
  rec["entries"] = out_entries;
  rec["timing_ms"] = t1 - t0;
  write_json(out_path(sc, "fsr.json"), rec);

  if (sc.x0.size() == 2) {
    Vector2d lo, hi;
    svg_window(entries, sc.obstacle, lo, hi);
    svg::Figure fig(lo(0), hi(0), lo(1), hi(1));
    for (const auto& e : entries) {
      if (e.gauss.rank >= 1)
        fig.polyline(ellipse_points(e.gauss.mean, e.gauss.cov, std::sqrt(5.991)),
                     "#1f77b4", 1.0, true);
      fig.dot(Vector2d(e.gauss.mean), "#d62728");
    }
    fig.write(out_path(sc, "fsr.svg"));
  }

  std::cout << sc.name << ": " << out_entries.size() << " reach record(s) at tau="
            << tau << " (" << (t1 - t0) << " ms)\n";
  return 0;
}

// ---- occupancy ----------------------------------------------------------

VectorXd parse_point(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.empty()) throw scenario::scenario_parse_error("--at: empty point");
  VectorXd y(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) y(static_cast<int>(i)) = vals[i];
  return y;
}

void parse_grid_spec(const std::string& s, Vector2d& lo, Vector2d& hi, int& nx,
                     int& ny) {
  double x0, x1, y0, y1;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d,%lf:%lf:%d", &x0, &x1, &nx, &y0, &y1,
                  &ny) != 6)
    throw scenario::scenario_parse_error(
        "--grid: expected xmin:xmax:nx,ymin:ymax:ny");
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0))
    throw scenario::scenario_parse_error("--grid: empty extent");
  lo << x0, y0;
  hi << x1, y1;
}

int run_occupancy(const Opts& o) {
  const scenario::Scenario sc = resolve_scenario(o);
  const int tau = sc.query.tau;
  if (o.at.empty() && o.grid.empty())
    throw scenario::scenario_parse_error("occupancy: give --at x,y or --grid spec");

  const auto entries = reach_entries(sc, tau);
  auto phi = [&](const VectorXd& y) {
    return occupancy::phi_mixture(entries, sc.obstacle, y, sc.query.tol);
  };

  if (!o.at.empty()) {
    const VectorXd y = parse_point(o.at);
    if (y.size() != sc.x0.size())
      throw scenario::scenario_parse_error("--at: point dimension mismatch");
    const double t0 = now_ms();
    const ProbEstimate est = phi(y);
    const double t1 = now_ms();
    json rec = record_base(sc);
    rec["tau"] = tau;
    rec["at"] = to_json(y);
    rec["phi"] = est.value;
    rec["phi_error"] = est.error;
    rec["timing_ms"] = t1 - t0;
    write_json(out_path(sc, "occupancy.json"), rec);
    std::printf("phi(%s) = %.8g (err <= %.3g, %0.2f ms)\n", o.at.c_str(),
                est.value, est.error, t1 - t0);
  }

  if (!o.grid.empty()) {
    if (sc.x0.size() != 2)
      throw scenario::scenario_parse_error("--grid: 2D models only");
    Vector2d lo, hi;
    int nx = 0, ny = 0;
    parse_grid_spec(o.grid, lo, hi, nx, ny);
    const std::string path = out_path(sc, "occupancy.csv");
    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot open " + path);
    csv << "x,y,phi\n";
    char buf[96];
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        const double x = lo(0) + (ix + 0.5) * (hi(0) - lo(0)) / nx;
        const double y = lo(1) + (iy + 0.5) * (hi(1) - lo(1)) / ny;
        VectorXd q(2);
        q << x, y;
        std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", x, y,
                      phi(q).value);
        csv << buf;
      }
    std::cout << "grid written to " << path << "\n";
  }
  return 0;
}

// ---- occupyset / cover --------------------------------------------------

occupyset::ApproxParams params_from(const scenario::Scenario& sc) {
  occupyset::ApproxParams params;
  params.tol = sc.query.tol;
  params.K = sc.query.K;
  params.n_des = sc.query.n_des;
  return params;
}

std::vector<std::string> methods_from(const scenario::Scenario& sc) {
  if (sc.query.algorithm == "both") return {"projection", "minkowski"};
  return {sc.query.algorithm};
}

int run_occupyset(const Opts& o) {
  const scenario::Scenario sc = resolve_scenario(o);
  if (uses_markov(sc))
    throw scenario::scenario_parse_error(
        sc.name + ": switched model; use the cover subcommand");
  const int tau = sc.query.tau;
  const auto entries = reach_entries(sc, tau);
  const fsr::GaussianState& g = entries[0].gauss;
  const auto params = params_from(sc);

  json rec = record_base(sc);
  rec["tau"] = tau;
  rec["alpha"] = sc.query.alpha;
  json results = json::object();
  std::vector<std::pair<std::string, occupyset::OccupySetApprox>> done;

  for (const auto& method : methods_from(sc)) {
    const double t0 = now_ms();
    const occupyset::OccupySetApprox a =
        method == "projection"
            ? occupyset::occupyset_projection(g, sc.obstacle, sc.query.alpha, tau,
                                              params)
            : occupyset::occupyset_minkowski(g, sc.obstacle, sc.query.alpha, tau,
                                             params);
    const double t1 = now_ms();
    results[method] = approx_to_record(a, t1 - t0);
    done.emplace_back(method, a);
    std::printf("%s: inner %s, outer %s (%0.2f ms)\n", method.c_str(),
                a.inner_kind == occupyset::SetKind::polytope
                    ? (std::to_string(a.inner.V.cols()) + " vertices").c_str()
                    : (a.inner_kind == occupyset::SetKind::all ? "all" : "empty"),
                a.outer_kind == occupyset::SetKind::polytope
                    ? (std::to_string(a.outer.b.size()) + " halfspaces").c_str()
                    : (a.outer_kind == occupyset::SetKind::all ? "all" : "empty"),
                t1 - t0);
  }
  rec["results"] = results;
  write_json(out_path(sc, "occupyset.json"), rec);

  if (sc.x0.size() == 2) {
    Vector2d lo, hi;
    svg_window(entries, sc.obstacle, lo, hi);
    svg::Figure fig(lo(0), hi(0), lo(1), hi(1));
    const char* colors[2] = {"#1f77b4", "#d62728"};
    int ci = 0;
    for (const auto& [method, a] : done) draw_approx(fig, a, colors[ci++ % 2]);
    fig.dot(Vector2d(g.mean), "#2ca02c");
    fig.write(out_path(sc, "occupyset.svg"));
  }
  return 0;
}

int run_cover(const Opts& o) {
  const scenario::Scenario sc = resolve_scenario(o);
  if (!uses_markov(sc))
    throw scenario::scenario_parse_error(
        sc.name + ": not a switched model; use the occupyset subcommand");
  const dyn::DmspModel model = scenario::build_dmsp(sc.model);
  const auto params = params_from(sc);
  const int tau = sc.query.tau;

  json rec = record_base(sc);
  rec["tau"] = tau;
  rec["alpha"] = sc.query.alpha;
  json results = json::object();
  std::vector<occupyset::DmspCover> covers;

  for (const auto& method : methods_from(sc)) {
    const double t0 = now_ms();
    const occupyset::DmspCover cover = occupyset::dmsp_cover(
        model, sc.obstacle, sc.query.alpha, tau, sc.x0, method, params);
    const double t1 = now_ms();
    json jc = to_json(cover);
    jc["timing_ms"] = t1 - t0;
    results[method] = jc;
    int empty_count = 0;
    for (const auto& piece : cover.pieces)
      if (piece.approx.outer_kind == occupyset::SetKind::empty) ++empty_count;
    std::printf("%s: %zu pieces (%d empty) (%0.2f ms)\n", method.c_str(),
                cover.pieces.size(), empty_count, t1 - t0);
    covers.push_back(cover);
  }
  rec["results"] = results;
  write_json(out_path(sc, "cover.json"), rec);

  const auto entries = reach_entries(sc, tau);
  Vector2d lo, hi;
  svg_window(entries, sc.obstacle, lo, hi);
  svg::Figure fig(lo(0), hi(0), lo(1), hi(1));
  for (const auto& cover : covers)
    for (const auto& piece : cover.pieces)
      draw_approx(fig, piece.approx, "#1f77b4");
  for (const auto& e : entries) fig.dot(Vector2d(e.gauss.mean), "#d62728");
  fig.write(out_path(sc, "cover.svg"));
  return 0;
}

// ---- oracle / compare ---------------------------------------------------

struct OracleRun {
  oracle::SampleSet samples;
  oracle::OccupancyGrid grid;
  double sample_ms = 0.0;
  double grid_ms = 0.0;
};

OracleRun run_mc(const scenario::Scenario& sc,
                 const std::vector<fsr::HybridReachEntry>& entries) {
  OracleRun run;
  const int tau = sc.query.tau;
  const double t0 = now_ms();
  if (uses_markov(sc)) {
    run.samples = oracle::sample_trajectories_dmsp(scenario::build_dmsp(sc.model),
                                                   tau, sc.x0, sc.oracle.Ns,
                                                   sc.oracle.seed);
  } else if (sc.model.kind == scenario::ModelSpec::Kind::dpv_constant) {
    run.samples = oracle::sample_trajectories_dpv(
        scenario::build_dpv(sc.model), dyn::constant_trajectory(tau), tau, sc.x0,
        sc.oracle.Ns, sc.oracle.seed);
  } else {
    run.samples = oracle::sample_trajectories_dpv(
        scenario::build_dmsp(sc.model).subsystem,
        scenario::fixed_rate_trajectory(sc.model, tau), tau, sc.x0, sc.oracle.Ns,
        sc.oracle.seed);
  }
  const double t1 = now_ms();
  Vector2d lo, hi;
  if (sc.oracle.lo && sc.oracle.hi) {
    lo = *sc.oracle.lo;
    hi = *sc.oracle.hi;
  } else {
    std::vector<fsr::GaussianState> states;
    for (const auto& e : entries) states.push_back(e.gauss);
    oracle::default_grid_extent(states, sc.obstacle, lo, hi);
  }
  run.grid = oracle::estimate_phi_grid(run.samples, sc.obstacle, lo, hi,
                                       sc.oracle.nx, sc.oracle.ny);
  run.grid_ms = now_ms() - t1;
  run.sample_ms = t1 - t0;
  return run;
}

void write_grid_csv(const std::string& path, const oracle::OccupancyGrid& grid) {
  std::ofstream csv(path);
  if (!csv) throw std::runtime_error("cannot open " + path);
  csv << "x,y,phi_hat,stderr\n";
  char buf[128];
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Vector2d c = grid.cell_center(ix, iy);
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g\n", c(0), c(1),
                    grid.phi_hat(iy, ix), grid.sigma_hat(iy, ix));
      csv << buf;
    }
}

struct Verdicts {
  json records = json::object();
  json timings = json::object();
  bool all_pass = true;
  std::vector<std::pair<std::string, occupyset::OccupySetApprox>> approxes;
  std::vector<occupyset::DmspCover> covers;
};

Verdicts run_methods_with_verdict(const scenario::Scenario& sc,
                                  const std::vector<fsr::HybridReachEntry>& entries,
                                  const OracleRun& mc) {
  Verdicts v;
  const auto params = params_from(sc);
  const int tau = sc.query.tau;
  for (const auto& method : methods_from(sc)) {
    const double t0 = now_ms();
    oracle::ContainmentReport report;
    json approx_json;
    if (uses_markov(sc)) {
      const occupyset::DmspCover cover =
          occupyset::dmsp_cover(scenario::build_dmsp(sc.model), sc.obstacle,
                                sc.query.alpha, tau, sc.x0, method, params);
      const double t1 = now_ms();
      v.timings[method] = t1 - t0;
      report = oracle::cover_containment(mc.samples, sc.obstacle, mc.grid,
                                         sc.query.alpha, cover);
      approx_json = to_json(cover);
      v.covers.push_back(cover);
    } else {
      const fsr::GaussianState& g = entries[0].gauss;
      const occupyset::OccupySetApprox a =
          method == "projection"
              ? occupyset::occupyset_projection(g, sc.obstacle, sc.query.alpha,
                                                tau, params)
              : occupyset::occupyset_minkowski(g, sc.obstacle, sc.query.alpha,
                                               tau, params);
      const double t1 = now_ms();
      v.timings[method] = t1 - t0;
      report = oracle::contour_and_containment(mc.samples, sc.obstacle, mc.grid,
                                               sc.query.alpha, a);
      approx_json = to_json(a);
      v.approxes.emplace_back(method, a);
    }
    v.records[method] = {{"approx", approx_json}, {"verdict", to_json(report)}};
    v.all_pass = v.all_pass && report.pass;
    std::printf("%s: containment %s (max phi_hat %.5g, %d cells above alpha)\n",
                method.c_str(), report.pass ? "PASS" : "FAIL", report.max_phi_hat,
                report.cells_above_alpha);
  }
  return v;
}

int run_oracle(const Opts& o) {
  const scenario::Scenario sc = resolve_scenario(o);
  const auto entries = reach_entries(sc, sc.query.tau);
  const OracleRun mc = run_mc(sc, entries);
  write_grid_csv(out_path(sc, "oracle.csv"), mc.grid);

  const Verdicts v = run_methods_with_verdict(sc, entries, mc);
  json rec = record_base(sc);
  rec["tau"] = sc.query.tau;
  rec["alpha"] = sc.query.alpha;
  rec["Ns"] = sc.oracle.Ns;
  rec["seed"] = sc.oracle.seed;
  rec["results"] = v.records;
  rec["timing_ms"] =
      json{{"sampling", mc.sample_ms}, {"grid", mc.grid_ms}, {"methods", v.timings}};
  write_json(out_path(sc, "verdict.json"), rec);

  svg::Figure fig(mc.grid.lo(0), mc.grid.hi(0), mc.grid.lo(1), mc.grid.hi(1));
  const double dx = (mc.grid.hi(0) - mc.grid.lo(0)) / mc.grid.nx;
  const double dy = (mc.grid.hi(1) - mc.grid.lo(1)) / mc.grid.ny;
  for (int iy = 0; iy < mc.grid.ny; ++iy)
    for (int ix = 0; ix < mc.grid.nx; ++ix)
      if (mc.grid.phi_hat(iy, ix) >= sc.query.alpha) {
        const Vector2d c = mc.grid.cell_center(ix, iy);
        fig.cell(c - Vector2d(dx / 2, dy / 2), c + Vector2d(dx / 2, dy / 2),
                 "#ff7f0e", 0.5);
      }
  for (const auto& [method, a] : v.approxes) draw_approx(fig, a, "#1f77b4");
  for (const auto& cover : v.covers)
    for (const auto& piece : cover.pieces) draw_approx(fig, piece.approx, "#1f77b4");
  fig.write(out_path(sc, "oracle.svg"));

  return v.all_pass ? 0 : 4;
}

int run_compare(const Opts& o) {
  const scenario::Scenario sc = resolve_scenario(o);
  const auto entries = reach_entries(sc, sc.query.tau);
  const OracleRun mc = run_mc(sc, entries);
  const Verdicts v = run_methods_with_verdict(sc, entries, mc);

  json rec = record_base(sc);
  rec["tau"] = sc.query.tau;
  rec["alpha"] = sc.query.alpha;
  rec["results"] = v.records;
  rec["timing_ms"] = json{{"oracle", mc.sample_ms + mc.grid_ms},
                          {"methods", v.timings}};
  write_json(out_path(sc, "compare.json"), rec);

  std::string line = sc.name + " |";
  for (const auto& [method, ms] : v.timings.items()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " %s %.1f ms |", method.c_str(),
                  ms.get<double>());
    line += buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), " oracle %.1f ms | %s",
                mc.sample_ms + mc.grid_ms, v.all_pass ? "PASS" : "FAIL");
  line += buf;
  std::cout << line << "\n";
  return v.all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forward stochastic reach densities and probabilistic keep-out sets"};
  app.require_subcommand(1);

  Opts o;
  std::function<int(const Opts&)> handler;

  auto* c_fsr = app.add_subcommand("fsr", "reach density and support at tau");
  add_common(c_fsr, o);
  c_fsr->callback([&] { handler = run_fsr; });

  auto* c_occ = app.add_subcommand("occupancy", "occupancy probability queries");
  add_common(c_occ, o);
  c_occ->add_option("--at", o.at, "query point x,y");
  c_occ->add_option("--grid", o.grid, "grid spec xmin:xmax:nx,ymin:ymax:ny");
  c_occ->callback([&] { handler = run_occupancy; });

  auto* c_set = app.add_subcommand("occupyset", "keep-out set approximation pair");
  add_common(c_set, o);
  c_set->add_option("--alg", o.alg, "projection|minkowski|both");
  c_set->callback([&] { handler = run_occupyset; });

  auto* c_cov = app.add_subcommand("cover", "mode-path cover for switched models");
  add_common(c_cov, o);
  c_cov->add_option("--alg", o.alg, "projection|minkowski|both");
  c_cov->callback([&] { handler = run_cover; });

  auto* c_orc = app.add_subcommand("oracle", "Monte-Carlo grid and verdict");
  add_common(c_orc, o);
  c_orc->add_option("--alg", o.alg, "projection|minkowski|both");
  c_orc->callback([&] { handler = run_oracle; });

  auto* c_cmp = app.add_subcommand("compare", "algorithm vs oracle timing line");
  add_common(c_cmp, o);
  c_cmp->add_option("--alg", o.alg, "projection|minkowski|both");
  c_cmp->callback([&] { handler = run_compare; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return handler(o);
  } catch (const fsreach::scenario::scenario_parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
