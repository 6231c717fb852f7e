#pragma once

// Shared JSON encoders for the scenario and run-record formats (private).

#include "json.hpp"
#include "slamot/geometry.hpp"

namespace slamot::codec {

inline nlohmann::json vec_to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec_from_json(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline nlohmann::json pose_to_json(const Pose& p) {
  const Eigen::Quaterniond q = p.quaternion();
  return nlohmann::json{{"t", vec_to_json(p.translation())}, {"q", {q.x(), q.y(), q.z(), q.w()}}};
}

inline Pose pose_from_json(const nlohmann::json& j) {
  const auto& q = j.at("q");
  return Pose::from_quaternion(
      Eigen::Quaterniond(q.at(3).get<double>(), q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>()),
      vec_from_json(j.at("t")));
}

inline nlohmann::json box_to_json(const Box3& b) {
  return nlohmann::json{{"center", vec_to_json(b.center)}, {"dims", vec_to_json(b.dims)}, {"yaw", b.yaw}};
}

inline Box3 box_from_json(const nlohmann::json& j) {
  return {vec_from_json(j.at("center")), vec_from_json(j.at("dims")), j.at("yaw").get<double>()};
}

}  // namespace slamot::codec
