#ifndef DRRBDO_CONIC_PROGRAM_JSON_HPP
#define DRRBDO_CONIC_PROGRAM_JSON_HPP

#include <json.hpp>

#include "drrbdo/conic/cone.hpp"

namespace drrbdo::conic {

// Debug dump of a cone program; layout documented in
// schemas/cone_program.schema.json.
nlohmann::json to_json(const ConeProgram<double>& program);
ConeProgram<double> program_from_json(const nlohmann::json& doc);

}  // namespace drrbdo::conic

#endif  // DRRBDO_CONIC_PROGRAM_JSON_HPP
