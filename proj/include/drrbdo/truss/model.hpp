#ifndef DRRBDO_TRUSS_MODEL_HPP
#define DRRBDO_TRUSS_MODEL_HPP

#include <Eigen/Dense>
#include <filesystem>
#include <json.hpp>
#include <vector>

namespace drrbdo::truss {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Node {
  double x = 0;
  double y = 0;
};

struct Member {
  Index start = 0;
  Index end = 0;
  double modulus = 0;  // MPa
};

/// Unit member vector over the free DOFs and undeformed length.
struct ElementGeometry {
  VectorXd direction;  // +/- direction cosines at the member's free DOFs
  double length = 0;   // mm
};

/// Plane truss with fixed geometry. Lengths are in mm, forces in N, moduli
/// in MPa. Design variables are member areas in units of `area_unit` mm^2;
/// compliance is reported in units of `compliance_unit` N*mm.
class TrussModel {
 public:
  struct Data {
    std::vector<Node> nodes;
    std::vector<Member> members;
    std::vector<Index> fixed_dofs;
    std::vector<std::pair<Index, double>> loads;  // (global dof, N)
    std::vector<double> x_min_mm2;                // one per member
    double pi_bar_nmm = 0;
    double area_unit = 1;
    double compliance_unit = 1;
  };

  /// Validates the data; throws ConfigurationError on inconsistent input
  /// and MechanismError when K(x_min) is singular.
  explicit TrussModel(Data data);

  static TrussModel from_json(const nlohmann::json& doc);
  static TrussModel load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const Data& data() const { return data_; }
  Index num_members() const { return Index(data_.members.size()); }
  Index num_free_dofs() const { return Index(free_dofs_.size()); }
  const std::vector<Index>& free_dofs() const { return free_dofs_; }

  const ElementGeometry& element(Index j) const;
  /// Axial stiffness factor E * area_unit / L of member j (N/mm per design unit).
  double axial_stiffness(Index j) const { return axial_stiffness_(j); }
  /// Member lengths c (mm).
  const VectorXd& lengths() const { return lengths_; }
  /// Volume per design unit of each member (mm^3), so volume = coeffs . x.
  VectorXd volume_coefficients() const { return data_.area_unit * lengths_; }
  /// Load vector over the free DOFs (N).
  const VectorXd& load() const { return load_; }
  /// Lower bounds in design units.
  const VectorXd& lower_bounds() const { return lower_bounds_; }
  /// Compliance bound in compliance units.
  double compliance_bound() const { return data_.pi_bar_nmm / data_.compliance_unit; }
  double area_unit() const { return data_.area_unit; }
  double compliance_unit() const { return data_.compliance_unit; }

 private:
  Data data_;
  std::vector<Index> free_dofs_;
  std::vector<ElementGeometry> elements_;
  VectorXd lengths_;
  VectorXd axial_stiffness_;
  VectorXd load_;
  VectorXd lower_bounds_;
};

/// b_j and L_j of member j.
const ElementGeometry& element_geometry(const TrussModel& model, Index j);

}  // namespace drrbdo::truss

#endif  // DRRBDO_TRUSS_MODEL_HPP
