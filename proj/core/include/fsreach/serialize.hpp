#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fsreach/dynamics.hpp"
#include "fsreach/fsr.hpp"
#include "fsreach/geometry.hpp"
#include "fsreach/occupyset.hpp"
#include "fsreach/oracle.hpp"

namespace fsreach {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v);
json to_json(const Eigen::MatrixXd& m);  // row-major nested arrays
Eigen::VectorXd vector_from_json(const json& j);
Eigen::MatrixXd matrix_from_json(const json& j);

json to_json(const geom::ConvexShape& s);
geom::ConvexShape shape_from_json(const json& j);
json to_json(const geom::Ellipsoid& e);

json to_json(const fsr::GaussianState& g);
json to_json(const dyn::DiscreteSequence& s);
json to_json(const occupyset::OccupySetApprox& a);
json to_json(const occupyset::DmspCover& c);
json to_json(const oracle::ContainmentReport& r);

// FNV-1a over the canonical (sorted-key, no-whitespace) dump.
std::uint64_t canonical_hash(const json& j);
std::string hash_hex(std::uint64_t h);

}  // namespace fsreach
