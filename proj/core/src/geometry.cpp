#include "slamot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

namespace slamot {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Mat3 so3_exp(const Vec3& omega) {
  const double theta = omega.norm();
  const Mat3 K = skew(omega);
  if (theta < 1e-8) {
    return Mat3::Identity() + K + 0.5 * K * K;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * K + b * K * K;
}

Vec3 so3_log(const Mat3& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Mat3 project_to_so3(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  D(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return svd.matrixU() * D * svd.matrixV().transpose();
}

Pose::Pose(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {}

Pose Pose::from_yaw(double yaw, const Vec3& t) {
  return {Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(), t};
}

Pose Pose::from_quaternion(const Eigen::Quaterniond& q, const Vec3& t) {
  return {q.normalized().toRotationMatrix(), t};
}

Pose Pose::from_matrix(const Mat4& m) {
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

Mat4 Pose::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Eigen::Quaterniond Pose::quaternion() const {
  Eigen::Quaterniond q(rotation_);
  q.normalize();
  // canonical sign keeps serialization stable
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return q;
}

double Pose::yaw() const { return std::atan2(rotation_(1, 0), rotation_(0, 0)); }

Pose Pose::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return {rt, -rt * translation_};
}

Pose Pose::operator*(const Pose& other) const {
  return {rotation_ * other.rotation_, rotation_ * other.translation_ + translation_};
}

Pose Pose::retract(const Vec6& delta) const {
  return {rotation_ * so3_exp(delta.head<3>()), translation_ + delta.tail<3>()};
}

void Pose::renormalize() { rotation_ = project_to_so3(rotation_); }

double frobenius_deviation(const Pose& t) {
  return (t.matrix() - Mat4::Identity()).norm();
}

std::array<Vec3, 8> Box3::corners() const {
  const Pose p = pose();
  const double hl = 0.5 * dims.x(), hw = 0.5 * dims.y(), hh = 0.5 * dims.z();
  const std::array<Eigen::Vector2d, 4> xy = {
      Eigen::Vector2d(hl, hw), Eigen::Vector2d(-hl, hw),
      Eigen::Vector2d(-hl, -hw), Eigen::Vector2d(hl, -hw)};
  std::array<Vec3, 8> out;
  for (int k = 0; k < 4; ++k) {
    out[k] = p * Vec3(xy[k].x(), xy[k].y(), -hh);
    out[k + 4] = p * Vec3(xy[k].x(), xy[k].y(), hh);
  }
  return out;
}

std::array<Eigen::Vector2d, 4> Box3::bev_corners() const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double hl = 0.5 * dims.x(), hw = 0.5 * dims.y();
  const std::array<Eigen::Vector2d, 4> local = {
      Eigen::Vector2d(hl, -hw), Eigen::Vector2d(hl, hw),
      Eigen::Vector2d(-hl, hw), Eigen::Vector2d(-hl, -hw)};
  std::array<Eigen::Vector2d, 4> out;
  for (int k = 0; k < 4; ++k) {
    out[k] = Eigen::Vector2d(center.x() + c * local[k].x() - s * local[k].y(),
                             center.y() + s * local[k].x() + c * local[k].y());
  }
  return out;
}

bool Box3::contains(const Vec3& p, double scale) const {
  const Vec3 local = pose().inverse() * p;
  return std::abs(local.x()) <= 0.5 * scale * dims.x() &&
         std::abs(local.y()) <= 0.5 * scale * dims.y() &&
         std::abs(local.z()) <= 0.5 * scale * dims.z();
}

Box3 transform_box(const Pose& p, const Box3& b) {
  return {p * b.center, b.dims, wrap_angle(b.yaw + p.yaw())};
}

Box3 box_from_pose(const Pose& p, const Vec3& dims) {
  return {p.translation(), dims, wrap_angle(p.yaw())};
}

PointSet transform_points(const Pose& p, const PointSet& s, PointFrame target) {
  PointSet out;
  out.frame = target;
  out.points.reserve(s.points.size());
  for (const auto& q : s.points) out.points.push_back(p * q);
  return out;
}

namespace {

using Poly = std::vector<Eigen::Vector2d>;

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double polygon_area(const Poly& poly) {
  if (poly.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    acc += cross2(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * std::abs(acc);
}

// Andrew's monotone chain; counter-clockwise, collinear points dropped.
Poly convex_hull(Poly pts) {
  std::sort(pts.begin(), pts.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  if (pts.size() < 3) return pts;
  Poly hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

double convex_intersection_area(const Poly& subject, const Poly& clip) {
  // Sutherland-Hodgman: clip `subject` successively against each edge of `clip`.
  Poly output = subject;
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Eigen::Vector2d a = clip[e];
    const Eigen::Vector2d b = clip[(e + 1) % clip.size()];
    const Eigen::Vector2d edge = b - a;
    auto side = [&](const Eigen::Vector2d& p) { return cross2(edge, p - a); };

    Poly input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Eigen::Vector2d& cur = input[i];
      const Eigen::Vector2d& prev = input[(i + input.size() - 1) % input.size()];
      const double s_cur = side(cur), s_prev = side(prev);
      const bool in_cur = s_cur >= 0.0, in_prev = s_prev >= 0.0;
      if (in_cur != in_prev) {
        const double t = s_prev / (s_prev - s_cur);
        output.push_back(prev + t * (cur - prev));
      }
      if (in_cur) output.push_back(cur);
    }
  }
  return polygon_area(output);
}

double intersection_volume(const Box3& a, const Box3& b) {
  const double za0 = a.center.z() - 0.5 * a.dims.z(), za1 = a.center.z() + 0.5 * a.dims.z();
  const double zb0 = b.center.z() - 0.5 * b.dims.z(), zb1 = b.center.z() + 0.5 * b.dims.z();
  const double dz = std::min(za1, zb1) - std::max(za0, zb0);
  if (dz <= 0.0) return 0.0;

  // Bounding-circle rejection avoids clipping clearly disjoint footprints.
  const double ra = 0.5 * a.dims.head<2>().norm(), rb = 0.5 * b.dims.head<2>().norm();
  if ((a.center.head<2>() - b.center.head<2>()).norm() > ra + rb) return 0.0;

  const auto ca = a.bev_corners();
  const auto cb = b.bev_corners();
  const double area = convex_intersection_area(Poly(ca.begin(), ca.end()), Poly(cb.begin(), cb.end()));
  return area * dz;
}

double iou3d(const Box3& a, const Box3& b) {
  const double inter = intersection_volume(a, b);
  const double uni = a.volume() + b.volume() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double giou3d(const Box3& a, const Box3& b, GiouMode mode) {
  const double inter = intersection_volume(a, b);
  const double uni = a.volume() + b.volume() - inter;
  const double iou = inter / uni;
  if (mode == GiouMode::literal) {
    return iou - (uni - inter) / uni;
  }
  std::vector<Eigen::Vector2d> footprint;
  double z_lo = std::numeric_limits<double>::infinity();
  double z_hi = -z_lo;
  for (const auto* box : {&a, &b}) {
    for (const auto& c : box->bev_corners()) footprint.push_back(c);
    z_lo = std::min(z_lo, box->center.z() - 0.5 * box->dims.z());
    z_hi = std::max(z_hi, box->center.z() + 0.5 * box->dims.z());
  }
  const double hull = polygon_area(convex_hull(std::move(footprint))) * (z_hi - z_lo);
  return iou - (hull - uni) / hull;
}

double ngiou(const Box3& a, const Box3& b, GiouMode mode) {
  return std::clamp(0.5 * (giou3d(a, b, mode) + 1.0), 0.0, 1.0);
}

}  // namespace slamot
