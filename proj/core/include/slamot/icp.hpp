#pragma once

#include "slamot/geometry.hpp"

namespace slamot {

struct IcpConfig {
  double max_correspondence_distance = 0.3;
  int max_iterations = 30;
  double convergence_epsilon = 1e-6;  ///< stop when the update's Frobenius deviation drops below this
  int yaw_hypotheses = 4;             ///< yaw seeds at 360/n degree increments; 1 disables the pre-step
};

struct IcpResult {
  Pose transform;          ///< maps source points onto the target
  int inliers = 0;         ///< source points with a target neighbor within the threshold
  double inlier_rmse = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Point-to-point ICP from an initial guess. Nearest neighbors are found by
/// exhaustive search, which is adequate for per-object clouds of a few
/// hundred points.
IcpResult icp_point_to_point(const PointSet& source, const PointSet& target, const Pose& initial,
                             const IcpConfig& cfg);

/// Runs ICP from `initial` followed by each yaw hypothesis about the moved
/// source centroid, with that centroid placed on the target centroid. Keeps
/// the result with the most inliers (ties: lowest rmse, then earliest hypothesis).
IcpResult icp_with_yaw_hypotheses(const PointSet& source, const PointSet& target, const Pose& initial,
                                  const IcpConfig& cfg);

/// Closed-form rigid alignment (Kabsch/Umeyama without scale) of paired points.
Pose fit_rigid(const std::vector<Vec3>& src, const std::vector<Vec3>& dst);

}  // namespace slamot
