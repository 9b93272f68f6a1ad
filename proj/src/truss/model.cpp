#include "drrbdo/truss/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "drrbdo/conic/symmetric.hpp"
#include "drrbdo/errors.hpp"

namespace drrbdo::truss {

namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw ConfigurationError("truss model: " + msg);
}

}  // namespace

TrussModel::TrussModel(Data data) : data_(std::move(data)) {
  const Index num_nodes = Index(data_.nodes.size());
  const Index total_dofs = 2 * num_nodes;
  const Index n = num_members();
  check(num_nodes >= 2, "need at least two nodes");
  check(n >= 1, "need at least one member");
  check(data_.area_unit > 0, "area_unit must be positive");
  check(data_.compliance_unit > 0, "compliance_unit must be positive");
  check(data_.pi_bar_nmm > 0, "pi_bar must be positive");
  check(Index(data_.x_min_mm2.size()) == n, "x_min must have one entry per member");

  std::set<Index> fixed;
  for (Index dof : data_.fixed_dofs) {
    check(dof >= 0 && dof < total_dofs, "fixed dof " + std::to_string(dof) + " out of range");
    check(fixed.insert(dof).second, "fixed dof " + std::to_string(dof) + " listed twice");
  }
  std::vector<Index> free_index(total_dofs, -1);
  for (Index dof = 0; dof < total_dofs; ++dof) {
    if (!fixed.count(dof)) {
      free_index[dof] = Index(free_dofs_.size());
      free_dofs_.push_back(dof);
    }
  }
  const Index d = num_free_dofs();
  check(d >= 1, "no free degrees of freedom");

  load_ = VectorXd::Zero(d);
  for (const auto& [dof, value] : data_.loads) {
    check(dof >= 0 && dof < total_dofs, "load dof " + std::to_string(dof) + " out of range");
    check(free_index[dof] >= 0, "load applied at fixed dof " + std::to_string(dof));
    load_(free_index[dof]) += value;
  }

  lengths_.resize(n);
  axial_stiffness_.resize(n);
  lower_bounds_.resize(n);
  for (Index j = 0; j < n; ++j) {
    const Member& m = data_.members[j];
    check(m.start >= 0 && m.start < num_nodes && m.end >= 0 && m.end < num_nodes,
          "member " + std::to_string(j) + " references a missing node");
    check(m.start != m.end, "member " + std::to_string(j) + " has coincident endpoints");
    check(m.modulus > 0, "member " + std::to_string(j) + " has non-positive modulus");
    const double dx = data_.nodes[m.end].x - data_.nodes[m.start].x;
    const double dy = data_.nodes[m.end].y - data_.nodes[m.start].y;
    const double length = std::hypot(dx, dy);
    check(length > 0, "member " + std::to_string(j) + " has zero length");
    ElementGeometry geo;
    geo.length = length;
    geo.direction = VectorXd::Zero(d);
    const Index dofs[4] = {2 * m.start, 2 * m.start + 1, 2 * m.end, 2 * m.end + 1};
    const double cosines[4] = {-dx / length, -dy / length, dx / length, dy / length};
    for (int k = 0; k < 4; ++k)
      if (free_index[dofs[k]] >= 0) geo.direction(free_index[dofs[k]]) = cosines[k];
    elements_.push_back(std::move(geo));
    lengths_(j) = length;
    axial_stiffness_(j) = m.modulus * data_.area_unit / length;
    check(data_.x_min_mm2[j] > 0, "x_min must be positive");
    lower_bounds_(j) = data_.x_min_mm2[j] / data_.area_unit;
  }

  MatrixXd k = MatrixXd::Zero(d, d);
  for (Index j = 0; j < n; ++j)
    k += lower_bounds_(j) * axial_stiffness_(j) * elements_[j].direction * elements_[j].direction.transpose();
  if (!conic::factor_spd(k)) throw MechanismError("truss model: stiffness matrix at x_min is singular (mechanism)");
}

const ElementGeometry& TrussModel::element(Index j) const {
  if (j < 0 || j >= num_members()) throw StructuralError("member index " + std::to_string(j) + " out of range");
  return elements_[j];
}

const ElementGeometry& element_geometry(const TrussModel& model, Index j) { return model.element(j); }

TrussModel TrussModel::from_json(const nlohmann::json& doc) {
  Data data;
  try {
    for (const auto& node : doc.at("nodes")) {
      check(node.size() == 2, "node entries must be [x, y]");
      data.nodes.push_back({node[0].get<double>(), node[1].get<double>()});
    }
    for (const auto& m : doc.at("members")) {
      check(m.size() == 3, "member entries must be [i, j, E]");
      data.members.push_back({m[0].get<Index>(), m[1].get<Index>(), m[2].get<double>()});
    }
    data.fixed_dofs = doc.at("fixed_dofs").get<std::vector<Index>>();
    for (const auto& l : doc.at("loads")) {
      check(l.size() == 2, "load entries must be [dof, value]");
      data.loads.emplace_back(l[0].get<Index>(), l[1].get<double>());
    }
    const auto& xmin = doc.at("x_min");
    if (xmin.is_number()) {
      data.x_min_mm2.assign(data.members.size(), xmin.get<double>());
    } else {
      data.x_min_mm2 = xmin.get<std::vector<double>>();
    }
    data.pi_bar_nmm = doc.at("pi_bar").get<double>();
    data.area_unit = doc.value("area_unit", 1.0);
    data.compliance_unit = doc.value("compliance_unit", 1.0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("truss model json: ") + e.what());
  }
  return TrussModel(std::move(data));
}

TrussModel TrussModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open truss model file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json TrussModel::to_json() const {
  nlohmann::json doc;
  auto nodes = nlohmann::json::array();
  for (const auto& n : data_.nodes) nodes.push_back({n.x, n.y});
  auto members = nlohmann::json::array();
  for (const auto& m : data_.members) members.push_back({m.start, m.end, m.modulus});
  auto loads = nlohmann::json::array();
  for (const auto& [dof, v] : data_.loads) loads.push_back({dof, v});
  doc["nodes"] = std::move(nodes);
  doc["members"] = std::move(members);
  doc["fixed_dofs"] = data_.fixed_dofs;
  doc["loads"] = std::move(loads);
  doc["x_min"] = data_.x_min_mm2;
  doc["pi_bar"] = data_.pi_bar_nmm;
  doc["area_unit"] = data_.area_unit;
  doc["compliance_unit"] = data_.compliance_unit;
  return doc;
}

}  // namespace drrbdo::truss
