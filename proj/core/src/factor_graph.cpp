#include "slamot/factor_graph.hpp"

#include <cmath>
#include <unordered_map>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace slamot {

std::string to_string(const VarKey& k) {
  switch (k.kind) {
    case VariableKind::ego_pose: return "ego[" + std::to_string(k.id) + "]";
    case VariableKind::landmark: return "landmark[" + std::to_string(k.id) + "]";
    case VariableKind::object_pose:
      return k.frame < 0 ? "object[" + std::to_string(k.id) + "]"
                         : "object[" + std::to_string(k.id) + "@" + std::to_string(k.frame) + "]";
  }
  return "?";
}

Vec3 residual_map(const Pose& ego, const Vec3& landmark, const Vec3& obs) {
  return ego.inverse() * landmark - obs;
}

ObjectResidual residual_object_vector(const Pose& ego, const Pose& obj, const Pose& det, ObjectResidualBase base) {
  const Pose m = base == ObjectResidualBase::sensor ? ego.inverse() * obj * det.inverse()
                                                    : det.inverse() * ego.inverse() * obj;
  ObjectResidual r;
  const Mat3 a = m.rotation() - Mat3::Identity();
  r.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(a.data());
  r.tail<3>() = m.translation();
  return r;
}

double residual_object(const Pose& ego, const Pose& obj, const Pose& det, ObjectResidualBase base) {
  return residual_object_vector(ego, obj, det, base).norm();
}

void object_jacobians(const Pose& ego, const Pose& obj, const Pose& det, Eigen::Matrix<double, 12, 6>& d_ego,
                      Eigen::Matrix<double, 12, 6>& d_obj, ObjectResidualBase base) {
  const Mat3 Re_t = ego.rotation().transpose();
  const Mat3& Rx = obj.rotation();
  const Mat3 Rd_t = det.rotation().transpose();
  d_ego.setZero();
  d_obj.setZero();
  if (base == ObjectResidualBase::object) {
    // invert(det) * invert(ego) * obj: rotation Rd' Re' Rx, translation Rd' (Re' (tx - te) - td)
    const Mat3 M = Rd_t * Re_t * Rx;
    const Vec3 q = Re_t * (obj.translation() - ego.translation());
    for (int k = 0; k < 3; ++k) {
      const Mat3 ek = skew(Vec3::Unit(k));
      const Mat3 dA_obj = M * ek;
      const Mat3 dA_ego = -Rd_t * ek * Re_t * Rx;
      d_obj.block<9, 1>(0, k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(dA_obj.data());
      d_ego.block<9, 1>(0, k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(dA_ego.data());
    }
    d_obj.block<3, 3>(9, 3) = Rd_t * Re_t;
    d_ego.block<3, 3>(9, 0) = Rd_t * skew(q);
    d_ego.block<3, 3>(9, 3) = -Rd_t * Re_t;
    return;
  }
  const Vec3 td_inv = -Rd_t * det.translation();
  const Mat3 M = Re_t * Rx * Rd_t;  // rotation block of the product
  const Vec3 b = Re_t * (Rx * td_inv + obj.translation() - ego.translation());
  for (int k = 0; k < 3; ++k) {
    const Mat3 ek = skew(Vec3::Unit(k));
    const Mat3 dA_obj = Re_t * Rx * ek * Rd_t;
    const Mat3 dA_ego = -ek * M;
    d_obj.block<9, 1>(0, k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(dA_obj.data());
    d_ego.block<9, 1>(0, k) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(dA_ego.data());
  }
  d_obj.block<3, 3>(9, 0) = -Re_t * Rx * skew(td_inv);
  d_obj.block<3, 3>(9, 3) = Re_t;
  d_ego.block<3, 3>(9, 0) = skew(b);
  d_ego.block<3, 3>(9, 3) = -Re_t;
}

void map_jacobians(const Pose& ego, const Vec3& landmark, Eigen::Matrix<double, 3, 6>& d_ego,
                   Eigen::Matrix3d& d_landmark) {
  const Mat3 Rt = ego.rotation().transpose();
  const Vec3 q = Rt * (landmark - ego.translation());
  d_ego.block<3, 3>(0, 0) = skew(q);
  d_ego.block<3, 3>(0, 3) = -Rt;
  d_landmark = Rt;
}

Variable& FactorGraph::add_variable(const VarKey& key, const Variable& v) {
  auto [it, inserted] = vars_.insert_or_assign(key, v);
  (void)inserted;
  return it->second;
}

std::size_t FactorGraph::add_factor(const Factor& f) {
  factors_.push_back(f);
  return factors_.size() - 1;
}

namespace {

double huber_rho(double s, double delta) {
  if (s <= delta * delta) return s;
  return 2.0 * delta * std::sqrt(s) - delta * delta;
}

double huber_weight(double s, double delta) {
  if (s <= delta * delta) return 1.0;
  return delta / std::sqrt(s);
}

bool is_robust(const Factor& f, const LmConfig& cfg) { return f.robust && cfg.robust_objects; }

}  // namespace

double FactorGraph::factor_cost(const Factor& f, const LmConfig& cfg) const {
  const Variable& ego = vars_.at(f.ego);
  const Variable& other = vars_.at(f.other);
  double s = 0.0;
  if (f.kind == FactorKind::map_point) {
    s = f.weight * residual_map(ego.pose, other.point, f.observed_point).squaredNorm();
  } else {
    s = f.weight * residual_object_vector(ego.pose, other.pose, f.observed_pose, cfg.object_residual).squaredNorm();
  }
  return is_robust(f, cfg) ? huber_rho(s, cfg.huber_delta) : s;
}

double FactorGraph::total_cost(const std::vector<std::size_t>& factor_ids, const LmConfig& cfg) const {
  double c = 0.0;
  for (std::size_t id : factor_ids) c += factor_cost(factors_[id], cfg);
  return c;
}

double FactorGraph::total_cost(const LmConfig& cfg) const {
  double c = 0.0;
  for (const auto& f : factors_) c += factor_cost(f, cfg);
  return c;
}

FactorGraph FactorGraph::extract(const std::vector<std::size_t>& factor_ids, std::vector<std::size_t>& new_ids) const {
  FactorGraph out;
  new_ids.clear();
  for (std::size_t id : factor_ids) {
    const Factor& f = factors_[id];
    out.vars_.emplace(f.ego, vars_.at(f.ego));
    out.vars_.emplace(f.other, vars_.at(f.other));
    new_ids.push_back(out.add_factor(f));
  }
  return out;
}

LmTrace FactorGraph::optimize(const std::vector<std::size_t>& factor_ids, const std::set<VarKey>& free_vars,
                              const LmConfig& cfg, const std::vector<std::size_t>* monitor) {
  LmTrace trace;
  auto record = [&](double c) {
    trace.costs.push_back(c);
    if (monitor) trace.monitor_costs.push_back(total_cost(*monitor, cfg));
  };

  // Column layout of the free, unfixed variables.
  std::map<VarKey, int> offset;
  int dim = 0;
  for (const auto& key : free_vars) {
    auto it = vars_.find(key);
    if (it == vars_.end() || it->second.fixed) continue;
    offset[key] = dim;
    dim += it->second.dof();
  }

  double cost = total_cost(factor_ids, cfg);
  record(cost);
  if (dim == 0 || cost <= cfg.absolute_tolerance) {
    trace.converged = true;
    return trace;
  }

  auto column = [&](const VarKey& k) {
    auto it = offset.find(k);
    return it == offset.end() ? -1 : it->second;
  };

  std::map<VarKey, Variable> backup;
  for (const auto& [k, o] : offset) backup.emplace(k, vars_.at(k));

  double lambda = cfg.initial_lambda;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  while (trace.iterations < cfg.max_iterations) {
    // Gauss-Newton system with IRLS weights for robust factors.
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    auto accumulate = [&](int ca, const auto& Ja, int cb, const auto& Jb, const auto& r) {
      if (ca >= 0) g.segment(ca, Ja.cols()) += Ja.transpose() * r;
      if (cb >= 0) g.segment(cb, Jb.cols()) += Jb.transpose() * r;
      auto put = [&](int r0, int c0, const Eigen::MatrixXd& block) {
        for (int i = 0; i < block.rows(); ++i) {
          for (int j = 0; j < block.cols(); ++j) {
            if (block(i, j) != 0.0) triplets.emplace_back(r0 + i, c0 + j, block(i, j));
          }
        }
      };
      if (ca >= 0) put(ca, ca, Ja.transpose() * Ja);
      if (cb >= 0) put(cb, cb, Jb.transpose() * Jb);
      if (ca >= 0 && cb >= 0) {
        const Eigen::MatrixXd cross = Ja.transpose() * Jb;
        put(ca, cb, cross);
        put(cb, ca, cross.transpose());
      }
    };

    for (std::size_t id : factor_ids) {
      const Factor& f = factors_[id];
      const int ce = column(f.ego), co = column(f.other);
      if (ce < 0 && co < 0) continue;
      const Variable& ego = vars_.at(f.ego);
      const Variable& other = vars_.at(f.other);
      if (f.kind == FactorKind::map_point) {
        Eigen::Vector3d r = residual_map(ego.pose, other.point, f.observed_point);
        Eigen::Matrix<double, 3, 6> Je;
        Eigen::Matrix3d Jl;
        map_jacobians(ego.pose, other.point, Je, Jl);
        const double s = f.weight * r.squaredNorm();
        const double w = std::sqrt(f.weight * (is_robust(f, cfg) ? huber_weight(s, cfg.huber_delta) : 1.0));
        r *= w;
        Je *= w;
        Jl *= w;
        accumulate(ce, Je, co, Jl, r);
      } else {
        ObjectResidual r = residual_object_vector(ego.pose, other.pose, f.observed_pose, cfg.object_residual);
        Eigen::Matrix<double, 12, 6> Je, Jo;
        object_jacobians(ego.pose, other.pose, f.observed_pose, Je, Jo, cfg.object_residual);
        const double s = f.weight * r.squaredNorm();
        const double w = std::sqrt(f.weight * (is_robust(f, cfg) ? huber_weight(s, cfg.huber_delta) : 1.0));
        r *= w;
        Je *= w;
        Jo *= w;
        accumulate(ce, Je, co, Jo, r);
      }
    }
    if (g.lpNorm<Eigen::Infinity>() == 0.0) {
      trace.converged = true;
      break;
    }

    Eigen::SparseMatrix<double> H(dim, dim);
    H.setFromTriplets(triplets.begin(), triplets.end());

    bool accepted = false;
    while (!accepted && trace.iterations < cfg.max_iterations) {
      Eigen::SparseMatrix<double> A = H;
      for (int i = 0; i < dim; ++i) A.coeffRef(i, i) += lambda;
      solver.compute(A);
      if (solver.info() != Eigen::Success) {
        for (const auto& [k, v] : backup) vars_.at(k) = v;
        trace.aborted = true;
        trace.diagnostic = "singular normal equations";
        record(trace.costs.front());
        return trace;
      }
      const Eigen::VectorXd delta = solver.solve(-g);
      ++trace.iterations;

      std::map<VarKey, Variable> previous;
      for (const auto& [k, o] : offset) {
        Variable& v = vars_.at(k);
        previous.emplace(k, v);
        if (v.kind == VariableKind::landmark) {
          v.point += delta.segment<3>(o);
        } else {
          v.pose = v.pose.retract(delta.segment<6>(o));
        }
      }
      const double new_cost = total_cost(factor_ids, cfg);
      if (std::isfinite(new_cost) && new_cost < cost) {
        const double rel = (cost - new_cost) / cost;
        cost = new_cost;
        record(cost);
        lambda = std::max(lambda * cfg.lambda_down, 1e-12);
        accepted = true;
        if (rel < cfg.relative_tolerance || cost <= cfg.absolute_tolerance) {
          trace.converged = true;
        }
      } else {
        for (auto& [k, v] : previous) vars_.at(k) = v;
        lambda *= cfg.lambda_up;
        if (lambda > 1e12) {
          trace.converged = true;
          break;
        }
      }
    }
    if (trace.converged || !accepted) break;
  }
  for (const auto& [k, o] : offset) {
    Variable& v = vars_.at(k);
    if (v.kind != VariableKind::landmark) v.pose.renormalize();
  }
  return trace;
}

}  // namespace slamot
