#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace slamot {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Rodrigues' formula; the argument is a rotation vector (axis * angle).
Mat3 so3_exp(const Vec3& omega);
Vec3 so3_log(const Mat3& R);
Mat3 skew(const Vec3& v);

/// Projects an arbitrary 3x3 matrix onto SO(3) in the Frobenius sense.
Mat3 project_to_so3(const Mat3& M);

/// Rigid transform in SE(3). Composition follows the homogeneous-matrix
/// product, so `a * b` maps points from b's source frame through a.
class Pose {
 public:
  Pose() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
  Pose(const Mat3& rotation, const Vec3& translation);

  static Pose identity() { return {}; }
  static Pose from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }
  static Pose from_yaw(double yaw, const Vec3& t = Vec3::Zero());
  static Pose from_quaternion(const Eigen::Quaterniond& q, const Vec3& t);
  static Pose from_matrix(const Mat4& m);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Mat4 matrix() const;
  Eigen::Quaterniond quaternion() const;
  /// Heading of the rotated x axis projected on the ground plane.
  double yaw() const;

  Pose inverse() const;
  Pose operator*(const Pose& other) const;
  Vec3 operator*(const Vec3& point) const { return rotation_ * point + translation_; }

  /// Decoupled retraction: R <- R * exp(delta.head(3)), t <- t + delta.tail(3).
  Pose retract(const Vec6& delta) const;

  /// Re-orthonormalizes the rotation block (SVD projection).
  void renormalize();

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

inline Pose compose(const Pose& a, const Pose& b) { return a * b; }
inline Pose invert(const Pose& p) { return p.inverse(); }

/// || homogeneous(t) - I4 ||_F
double frobenius_deviation(const Pose& t);

/// Oriented, gravity-aligned 3D box. dims = (length, width, height); the
/// length axis is the box's local x axis after rotating by yaw.
struct Box3 {
  Vec3 center = Vec3::Zero();
  Vec3 dims = Vec3::Ones();
  double yaw = 0.0;

  double volume() const { return dims.x() * dims.y() * dims.z(); }
  /// world <- box-local
  Pose pose() const { return Pose::from_yaw(yaw, center); }
  /// Eight corners; bottom four first, counter-clockwise.
  std::array<Vec3, 8> corners() const;
  /// Four bird's-eye-view corners, counter-clockwise.
  std::array<Eigen::Vector2d, 4> bev_corners() const;
  bool contains(const Vec3& p, double scale = 1.0) const;
};

/// Box expressed in another frame. Only the yaw component of the pose's
/// rotation is applied to the box heading.
Box3 transform_box(const Pose& p, const Box3& b);
Box3 box_from_pose(const Pose& p, const Vec3& dims);

enum class PointFrame { world, sensor };

struct PointSet {
  std::vector<Vec3> points;
  PointFrame frame = PointFrame::world;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

PointSet transform_points(const Pose& p, const PointSet& s, PointFrame target);

/// Area of the intersection of two convex polygons given counter-clockwise.
double convex_intersection_area(const std::vector<Eigen::Vector2d>& subject,
                                const std::vector<Eigen::Vector2d>& clip);

double intersection_volume(const Box3& a, const Box3& b);
double iou3d(const Box3& a, const Box3& b);

enum class GiouMode {
  enclosing,  ///< IoU - |C \ (A u B)| / |C| with C the convex footprint hull of both boxes times their joint height span
  literal,    ///< I/U - (U - I)/U, i.e. 2 IoU - 1
};

double giou3d(const Box3& a, const Box3& b, GiouMode mode = GiouMode::enclosing);
/// (giou3d + 1) / 2, always in [0, 1].
double ngiou(const Box3& a, const Box3& b, GiouMode mode = GiouMode::enclosing);

}  // namespace slamot
