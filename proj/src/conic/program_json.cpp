#include "drrbdo/conic/program_json.hpp"

#include <vector>

namespace drrbdo::conic {

namespace {

nlohmann::json vector_json(const Vector<double>& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vector<double> vector_from(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector<double>>(values.data(), Eigen::Index(values.size()));
}

}  // namespace

nlohmann::json to_json(const ConeProgram<double>& program) {
  program.validate();
  nlohmann::json doc;
  doc["objective"] = vector_json(program.objective);
  doc["h"] = vector_json(program.h);
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < program.G.rows(); ++i) rows.push_back(vector_json(program.G.row(i).transpose()));
  doc["G"] = std::move(rows);
  auto cones = nlohmann::json::array();
  for (const auto& b : program.cones.blocks()) cones.push_back({{"kind", to_string(b.kind)}, {"dim", b.dim}});
  doc["cones"] = std::move(cones);
  return doc;
}

ConeProgram<double> program_from_json(const nlohmann::json& doc) {
  ConeProgram<double> program;
  try {
    program.objective = vector_from(doc.at("objective"));
    program.h = vector_from(doc.at("h"));
    const auto& rows = doc.at("G");
    program.G.resize(Eigen::Index(rows.size()), program.objective.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Vector<double> row = vector_from(rows[i]);
      if (row.size() != program.G.cols()) throw StructuralError("G row " + std::to_string(i) + " has wrong length");
      program.G.row(Eigen::Index(i)) = row.transpose();
    }
    for (const auto& b : doc.at("cones"))
      program.cones.add({cone_kind_from_string(b.at("kind").get<std::string>()), b.at("dim").get<Eigen::Index>()});
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("cone program json: ") + e.what());
  }
  program.validate();
  return program;
}

}  // namespace drrbdo::conic
