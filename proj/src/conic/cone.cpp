#include "drrbdo/conic/cone.hpp"

#include <numeric>

namespace drrbdo::conic {

std::string to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::kNonneg: return "nonneg";
    case ConeKind::kSoc: return "soc";
    case ConeKind::kPsd: return "psd";
  }
  return "unknown";
}

ConeKind cone_kind_from_string(const std::string& name) {
  if (name == "nonneg") return ConeKind::kNonneg;
  if (name == "soc") return ConeKind::kSoc;
  if (name == "psd") return ConeKind::kPsd;
  throw StructuralError("unknown cone kind '" + name + "'");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kPrimalInfeasible: return "primal-infeasible";
    case SolveStatus::kDualInfeasible: return "dual-infeasible";
    case SolveStatus::kMaxIterations: return "max-iterations";
  }
  return "unknown";
}

ConeSpec::ConeSpec(std::vector<ConeBlock> blocks) {
  for (const auto& b : blocks) add(b);
}

ConeSpec& ConeSpec::add(ConeBlock block) {
  if (block.dim < 1) throw StructuralError("cone block dimension must be >= 1");
  blocks_.push_back(block);
  return *this;
}

Eigen::Index ConeSpec::slack_length() const {
  return std::accumulate(blocks_.begin(), blocks_.end(), Eigen::Index{0},
                         [](Eigen::Index acc, const ConeBlock& b) { return acc + b.slack_length(); });
}

Eigen::Index ConeSpec::degree() const {
  return std::accumulate(blocks_.begin(), blocks_.end(), Eigen::Index{0},
                         [](Eigen::Index acc, const ConeBlock& b) { return acc + b.degree(); });
}

Eigen::Index ConeSpec::offset(std::size_t i) const {
  Eigen::Index off = 0;
  for (std::size_t k = 0; k < i; ++k) off += blocks_[k].slack_length();
  return off;
}

}  // namespace drrbdo::conic
