#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "slamot/geometry.hpp"

namespace slamot {

enum class VariableKind { ego_pose, landmark, object_pose };

/// Variable identity. Per-frame object poses use (track, frame); a shared
/// object pose uses frame = -1. Ego poses use (frame, 0); landmarks (id, 0).
struct VarKey {
  VariableKind kind = VariableKind::ego_pose;
  int id = 0;
  int frame = 0;

  auto operator<=>(const VarKey&) const = default;

  static VarKey ego(int frame) { return {VariableKind::ego_pose, frame, 0}; }
  static VarKey landmark(int id) { return {VariableKind::landmark, id, 0}; }
  static VarKey object(int track, int frame) { return {VariableKind::object_pose, track, frame}; }
  static VarKey shared_object(int track) { return {VariableKind::object_pose, track, -1}; }
};

std::string to_string(const VarKey& k);

struct Variable {
  VariableKind kind = VariableKind::ego_pose;
  Pose pose;                  ///< ego and object variables
  Vec3 point = Vec3::Zero();  ///< landmark variables
  bool fixed = false;

  int dof() const { return kind == VariableKind::landmark ? 3 : 6; }
};

enum class FactorKind { map_point, object_detection };

/// Map factors bind (ego, landmark) to a sensor-frame point observation;
/// object factors bind (ego, object) to a sensor-frame detection pose.
struct Factor {
  FactorKind kind = FactorKind::map_point;
  int frame = 0;
  VarKey ego;
  VarKey other;
  Vec3 observed_point = Vec3::Zero();
  Pose observed_pose;
  double weight = 1.0;  ///< information scale applied to the squared residual
  bool robust = false;  ///< Huber-weighted when the solver enables it
};

/// invert(ego) * landmark - obs
Vec3 residual_map(const Pose& ego, const Vec3& landmark, const Vec3& obs);

/// Where the loop sensor -> world -> object -> sensor is closed.
/// `sensor` evaluates invert(ego) * obj * invert(det); `object` evaluates the
/// same loop from the object side, invert(det) * invert(ego) * obj, whose
/// translation part carries no lever arm from the detection range.
enum class ObjectResidualBase { sensor, object };

/// || invert(ego) * obj * invert(det) - I ||_F for the sensor base.
double residual_object(const Pose& ego, const Pose& obj, const Pose& det,
                       ObjectResidualBase base = ObjectResidualBase::sensor);

using ObjectResidual = Eigen::Matrix<double, 12, 1>;
/// Nonzero entries of the loop product minus I: the rotation block
/// column-major, then the translation column.
ObjectResidual residual_object_vector(const Pose& ego, const Pose& obj, const Pose& det,
                                      ObjectResidualBase base = ObjectResidualBase::sensor);

/// Jacobians with respect to the retraction increments (rotation vector, translation).
void object_jacobians(const Pose& ego, const Pose& obj, const Pose& det, Eigen::Matrix<double, 12, 6>& d_ego,
                      Eigen::Matrix<double, 12, 6>& d_obj, ObjectResidualBase base = ObjectResidualBase::sensor);
void map_jacobians(const Pose& ego, const Vec3& landmark, Eigen::Matrix<double, 3, 6>& d_ego,
                   Eigen::Matrix3d& d_landmark);

struct LmConfig {
  double initial_lambda = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.5;
  int max_iterations = 50;
  double relative_tolerance = 1e-9;
  double absolute_tolerance = 1e-20;  ///< costs at or below this count as solved
  bool robust_objects = true;
  double huber_delta = 1.0;
  /// The sensor base leaves object poses nearly free to orbit the sensor
  /// (only the bounded rotation block resists), so solves default to the object base.
  ObjectResidualBase object_residual = ObjectResidualBase::object;
};

struct LmTrace {
  std::vector<double> costs;  ///< initial cost, then the cost after each accepted step
  /// Same points in time as `costs`, evaluated on the monitor factor set.
  std::vector<double> monitor_costs;
  int iterations = 0;         ///< attempted steps, accepted or not
  bool converged = false;
  bool aborted = false;
  std::string diagnostic;

  double initial_cost() const { return costs.empty() ? 0.0 : costs.front(); }
  double final_cost() const { return costs.empty() ? 0.0 : costs.back(); }
};

class FactorGraph {
 public:
  Variable& add_variable(const VarKey& key, const Variable& v);
  bool has(const VarKey& key) const { return vars_.count(key) != 0; }
  Variable& at(const VarKey& key) { return vars_.at(key); }
  const Variable& at(const VarKey& key) const { return vars_.at(key); }
  void erase(const VarKey& key) { vars_.erase(key); }

  std::size_t add_factor(const Factor& f);
  const std::vector<Factor>& factors() const { return factors_; }
  std::vector<Factor>& factors() { return factors_; }
  const std::map<VarKey, Variable>& variables() const { return vars_; }

  /// Weighted, optionally robustified cost of one factor.
  double factor_cost(const Factor& f, const LmConfig& cfg) const;
  double total_cost(const std::vector<std::size_t>& factor_ids, const LmConfig& cfg) const;
  double total_cost(const LmConfig& cfg) const;

  /// Levenberg-Marquardt over the variables in `free_vars` (fixed flags are
  /// honoured as well) using only the listed factors. On a failed
  /// factorization the variables are restored and the trace is flagged.
  /// `monitor` optionally names a wider factor set whose cost is recorded
  /// alongside each accepted step.
  LmTrace optimize(const std::vector<std::size_t>& factor_ids, const std::set<VarKey>& free_vars,
                   const LmConfig& cfg, const std::vector<std::size_t>* monitor = nullptr);

  /// Copies the variables and factors needed for a sub-problem.
  FactorGraph extract(const std::vector<std::size_t>& factor_ids, std::vector<std::size_t>& new_ids) const;

 private:
  std::map<VarKey, Variable> vars_;
  std::vector<Factor> factors_;
};

}  // namespace slamot
