#include "fsreach/serialize.hpp"

#include <cstdio>

namespace fsreach {

json to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json to_json(const Eigen::MatrixXd& m) {
  json j = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("vector_from_json: array expected");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("matrix_from_json: nested array expected");
  const size_t rows = j.size();
  const size_t cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw std::invalid_argument("matrix_from_json: ragged rows");
    for (size_t c = 0; c < cols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) = j[r][c].get<double>();
  }
  return m;
}

json to_json(const geom::ConvexShape& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, geom::Box>)
          return {{"type", "box"},
                  {"center", to_json(v.center)},
                  {"half_width", to_json(v.half_width)}};
        else if constexpr (std::is_same_v<T, geom::Ball>)
          return {{"type", "ball"},
                  {"center", to_json(v.center)},
                  {"radius", v.radius}};
        else if constexpr (std::is_same_v<T, geom::HPolytope>)
          return {{"type", "hpolytope"}, {"A", to_json(v.A)}, {"b", to_json(v.b)}};
        else
          return {{"type", "vpolytope"}, {"vertices", to_json(Eigen::MatrixXd(v.V))}};
      },
      s);
}

geom::ConvexShape shape_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw std::invalid_argument("shape_from_json: object with 'type' expected");
  const std::string type = j.at("type").get<std::string>();
  if (type == "box")
    return geom::Box{vector_from_json(j.at("center")),
                     vector_from_json(j.at("half_width"))};
  if (type == "ball")
    return geom::Ball{vector_from_json(j.at("center")),
                      j.at("radius").get<double>()};
  if (type == "hpolytope")
    return geom::HPolytope{matrix_from_json(j.at("A")),
                           vector_from_json(j.at("b"))};
  if (type == "vpolytope")
    return geom::VPolytope{matrix_from_json(j.at("vertices"))};
  throw std::invalid_argument("shape_from_json: unknown type '" + type + "'");
}

json to_json(const geom::Ellipsoid& e) {
  return {{"center", to_json(e.center)}, {"Q", to_json(e.Q)}};
}

json to_json(const fsr::GaussianState& g) {
  return {{"mean", to_json(g.mean)},
          {"cov", to_json(g.cov)},
          {"rank", g.rank},
          {"col_basis", to_json(g.col_basis)}};
}

json to_json(const dyn::DiscreteSequence& s) {
  return {{"states", s.states}, {"probability", s.probability}};
}

namespace {

const char* kind_name(occupyset::SetKind k) {
  switch (k) {
    case occupyset::SetKind::polytope:
      return "polytope";
    case occupyset::SetKind::empty:
      return "empty";
    case occupyset::SetKind::all:
      return "all";
  }
  return "empty";
}

}  // namespace

json to_json(const occupyset::OccupySetApprox& a) {
  json j = {{"method", a.method},
            {"alpha", a.alpha},
            {"tau", a.tau},
            {"inner_kind", kind_name(a.inner_kind)},
            {"outer_kind", kind_name(a.outer_kind)},
            {"warnings", a.warnings}};
  if (a.inner_kind == occupyset::SetKind::polytope)
    j["inner_vertices"] = to_json(Eigen::MatrixXd(a.inner.V));
  if (a.outer_kind == occupyset::SetKind::polytope) {
    j["outer_A"] = to_json(a.outer.A);
    j["outer_b"] = to_json(a.outer.b);
  }
  return j;
}

json to_json(const occupyset::DmspCover& c) {
  json pieces = json::array();
  for (const auto& piece : c.pieces)
    pieces.push_back({{"sequence", to_json(piece.sequence)},
                      {"alpha_s", piece.alpha_s},
                      {"gauss", to_json(piece.gauss)},
                      {"approx", to_json(piece.approx)}});
  return {{"alpha", c.alpha},
          {"tau", c.tau},
          {"method", c.method},
          {"pieces", pieces}};
}

json to_json(const oracle::ContainmentReport& r) {
  json inner = json::array();
  for (const auto& v : r.inner_violations)
    inner.push_back({{"vertex", to_json(v.vertex)},
                     {"phi_hat", v.phi_hat},
                     {"threshold", v.threshold}});
  json outer = json::array();
  for (const auto& v : r.outer_violations)
    outer.push_back({{"cell", to_json(Eigen::VectorXd(v.cell))},
                     {"phi_hat", v.phi_hat},
                     {"threshold", v.threshold}});
  return {{"pass", r.pass},
          {"inner_violations", inner},
          {"outer_violations", outer},
          {"max_phi_hat", r.max_phi_hat},
          {"argmax_cell", to_json(Eigen::VectorXd(r.argmax_cell))},
          {"cells_above_alpha", r.cells_above_alpha}};
}

std::uint64_t canonical_hash(const json& j) {
  const std::string dump = j.dump(-1, ' ', false, json::error_handler_t::replace);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace fsreach
