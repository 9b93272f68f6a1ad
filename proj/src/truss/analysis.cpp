#include "drrbdo/truss/analysis.hpp"

#include <string>

#include "drrbdo/conic/symmetric.hpp"
#include "drrbdo/errors.hpp"

namespace drrbdo::truss {

namespace {

void check_areas(const TrussModel& model, const VectorXd& areas) {
  if (areas.size() != model.num_members())
    throw StructuralError("design has " + std::to_string(areas.size()) + " entries, model has " +
                          std::to_string(model.num_members()) + " members");
  for (Index j = 0; j < areas.size(); ++j)
    if (!(areas(j) >= 0)) throw StructuralError("negative area for member " + std::to_string(j));
}

}  // namespace

MatrixXd element_stiffness(const TrussModel& model, Index j) {
  const auto& geo = model.element(j);
  return model.axial_stiffness(j) * geo.direction * geo.direction.transpose();
}

MatrixXd assemble(const TrussModel& model, const VectorXd& areas) {
  check_areas(model, areas);
  const Index d = model.num_free_dofs();
  MatrixXd k = MatrixXd::Zero(d, d);
  for (Index j = 0; j < model.num_members(); ++j) {
    const auto& b = model.element(j).direction;
    k.selfadjointView<Eigen::Lower>().rankUpdate(b, areas(j) * model.axial_stiffness(j));
  }
  k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
  return k;
}

StaticResponse analyze(const TrussModel& model, const VectorXd& areas) {
  const MatrixXd k = assemble(model, areas);
  const auto factor = conic::factor_spd(k);
  if (!factor) throw MechanismError("stiffness matrix is singular at the given design (mechanism-unstable)");
  StaticResponse r;
  const auto& l = *factor;
  r.displacement = l.transpose().triangularView<Eigen::Upper>().solve(
      l.triangularView<Eigen::Lower>().solve(model.load()));
  r.compliance = model.load().dot(r.displacement) / model.compliance_unit();
  r.gradient.resize(model.num_members());
  for (Index j = 0; j < model.num_members(); ++j) {
    const double elongation = model.element(j).direction.dot(r.displacement);
    r.gradient(j) = -model.axial_stiffness(j) * elongation * elongation / model.compliance_unit();
  }
  return r;
}

double compliance(const TrussModel& model, const VectorXd& areas) { return analyze(model, areas).compliance; }

VectorXd compliance_gradient(const TrussModel& model, const VectorXd& areas) {
  return analyze(model, areas).gradient;
}

double volume(const TrussModel& model, const VectorXd& areas) {
  if (areas.size() != model.num_members()) throw StructuralError("design length does not match member count");
  return model.volume_coefficients().dot(areas);
}

DesignPoint evaluate_design(const TrussModel& model, const VectorXd& areas) {
  const VectorXd& lb = model.lower_bounds();
  if (areas.size() != lb.size()) throw StructuralError("design length does not match member count");
  for (Index j = 0; j < areas.size(); ++j)
    if (areas(j) < lb(j) * (1 - 1e-7))
      throw StructuralError("area of member " + std::to_string(j) + " is below its lower bound");
  const auto response = analyze(model, areas);
  DesignPoint point;
  point.areas = areas;
  point.volume = volume(model, areas);
  point.compliance = response.compliance;
  point.gradient = response.gradient;
  return point;
}

}  // namespace drrbdo::truss
