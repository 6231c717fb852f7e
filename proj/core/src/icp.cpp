#include "slamot/icp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>

namespace slamot {

namespace {

struct Pairing {
  std::vector<Vec3> src;
  std::vector<Vec3> dst;
  double sq_error = 0.0;
};

Pairing correspond(const std::vector<Vec3>& moved, const std::vector<Vec3>& target, double max_dist) {
  Pairing out;
  const double max_sq = max_dist * max_dist;
  for (const auto& p : moved) {
    double best = std::numeric_limits<double>::infinity();
    const Vec3* nearest = nullptr;
    for (const auto& q : target) {
      const double d = (p - q).squaredNorm();
      if (d < best) {
        best = d;
        nearest = &q;
      }
    }
    if (nearest && best <= max_sq) {
      out.src.push_back(p);
      out.dst.push_back(*nearest);
      out.sq_error += best;
    }
  }
  return out;
}

std::vector<Vec3> transform_all(const Pose& t, const std::vector<Vec3>& pts) {
  std::vector<Vec3> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(t * p);
  return out;
}

}  // namespace

Pose fit_rigid(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  const std::size_t n = src.size();
  if (n == 0 || n != dst.size()) return Pose::identity();
  Vec3 mu_s = Vec3::Zero(), mu_d = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_s += src[i];
    mu_d += dst[i];
  }
  mu_s /= static_cast<double>(n);
  mu_d /= static_cast<double>(n);
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) cov += (dst[i] - mu_d) * (src[i] - mu_s).transpose();
  const Mat3 R = project_to_so3(cov);
  return {R, mu_d - R * mu_s};
}

IcpResult icp_point_to_point(const PointSet& source, const PointSet& target, const Pose& initial,
                             const IcpConfig& cfg) {
  IcpResult result;
  result.transform = initial;
  if (source.empty() || target.empty()) return result;

  Pose current = initial;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const auto moved = transform_all(current, source.points);
    const Pairing pairs = correspond(moved, target.points, cfg.max_correspondence_distance);
    if (pairs.src.size() < 3) break;
    const Pose delta = fit_rigid(pairs.src, pairs.dst);
    current = delta * current;
    result.iterations = it + 1;
    if (frobenius_deviation(delta) < cfg.convergence_epsilon) {
      result.converged = true;
      break;
    }
  }

  const Pairing final_pairs = correspond(transform_all(current, source.points), target.points, cfg.max_correspondence_distance);
  result.transform = current;
  result.inliers = static_cast<int>(final_pairs.src.size());
  result.inlier_rmse = result.inliers > 0 ? std::sqrt(final_pairs.sq_error / result.inliers) : 0.0;
  return result;
}

IcpResult icp_with_yaw_hypotheses(const PointSet& source, const PointSet& target, const Pose& initial,
                                  const IcpConfig& cfg) {
  const int n = std::max(1, cfg.yaw_hypotheses);
  if (source.empty() || n == 1) return icp_point_to_point(source, target, initial, cfg);

  Vec3 centroid = Vec3::Zero();
  for (const auto& p : source.points) centroid += initial * p;
  centroid /= static_cast<double>(source.size());
  Vec3 target_centroid = Vec3::Zero();
  for (const auto& p : target.points) target_centroid += p;
  target_centroid /= static_cast<double>(target.size());

  IcpResult best;
  bool have = false;
  for (int k = 0; k < n; ++k) {
    const double yaw = 2.0 * std::numbers::pi * k / n;
    const Pose spin = Pose::from_translation(target_centroid) * Pose::from_yaw(yaw) * Pose::from_translation(-centroid);
    IcpResult r = icp_point_to_point(source, target, spin * initial, cfg);
    const bool better = !have || r.inliers > best.inliers ||
                        (r.inliers == best.inliers && r.inlier_rmse < best.inlier_rmse);
    if (better) {
      best = r;
      have = true;
    }
  }
  return best;
}

}  // namespace slamot
