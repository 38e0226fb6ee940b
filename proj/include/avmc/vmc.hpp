// Copyright 2026 The adaptive-vmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Virtual model controller: per-link spring/damper energies, virtual forces,
// weighted Jacobian-transpose aggregation, gravity compensation and torque
// saturation.
//
// Sign convention: the spring term is attractive,
//
//   F_i = Kp_i (p_tar - p_i) - Kd_i pdot_i
//
// i.e. F = -dE/dp - dD/dpdot for the quadratic energies below. (An
// alternative printed form with the spring term negated repels from the
// target and is inconsistent with those energies; we use the
// energy-consistent attractive form.)

#ifndef AVMC_VMC_HPP_
#define AVMC_VMC_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "avmc/chain.hpp"
#include "avmc/io.hpp"

namespace avmc {

struct GainBounds {
  double kp_min = 10.0, kp_max = 800.0;  // N/m
  double kd_min = 1.0, kd_max = 80.0;    // N*s/m
};

// Per-node proportional/derivative gains, indexed by controlled-link slot
// (same order as ChainModel::controlled_links).
struct GainSet {
  std::array<double, 3> kp = {0.0, 0.0, 0.0};
  std::array<double, 3> kd = {0.0, 0.0, 0.0};
};

struct ComponentWeights {
  double w4 = 0.0;
  double w6 = 0.0;
  double wE = 1.0;

  double for_role(NodeRole role) const {
    switch (role) {
      case NodeRole::kNode4: return w4;
      case NodeRole::kNode6: return w6;
      case NodeRole::kEndEffector: return wE;
    }
    return 0.0;
  }
};

// w4 = alpha(1-beta), w6 = alpha*beta, wE = 1-alpha. The three weights are
// nonnegative and sum to 1 for alpha, beta in [0,1]. Out-of-range inputs are
// clamped with a warning.
inline ComponentWeights component_weights(double alpha, double beta) {
  if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0) {
    log_warn("component_weights: (alpha,beta)=(" + fmt_double(alpha) + "," +
             fmt_double(beta) + ") clamped to [0,1]");
  }
  alpha = std::clamp(alpha, 0.0, 1.0);
  beta = std::clamp(beta, 0.0, 1.0);
  ComponentWeights w;
  w.w4 = alpha * (1.0 - beta);
  w.w6 = alpha * beta;
  w.wE = 1.0 - alpha;
  return w;
}

struct CoordinationWeights {
  double alpha = 0.5;
  double beta = 0.5;
  ComponentWeights weights = component_weights(0.5, 0.5);

  static CoordinationWeights from_alpha_beta(double alpha, double beta) {
    CoordinationWeights c;
    c.alpha = std::clamp(alpha, 0.0, 1.0);
    c.beta = std::clamp(beta, 0.0, 1.0);
    c.weights = component_weights(alpha, beta);
    return c;
  }
};

// E = 1/2 Kp |p_tar - p|^2, D = 1/2 Kd |pdot|^2.
inline std::pair<double, double> spring_damper_energies(double kp, double kd,
                                                        const Vec3& p,
                                                        const Vec3& pdot,
                                                        const Vec3& p_tar) {
  const double e = 0.5 * kp * (p_tar - p).squaredNorm();
  const double d = 0.5 * kd * pdot.squaredNorm();
  return {e, d};
}

inline Vec3 virtual_force(double kp, double kd, const Vec3& p, const Vec3& pdot,
                          const Vec3& p_tar) {
  return kp * (p_tar - p) - kd * pdot;
}

// tau_task = sum_i w_i J_i^T F_i over the controlled links, with
// pdot_i = J_i qdot.
inline VecX task_torque(const ChainModel& chain, const VecX& q, const VecX& qdot,
                        const GainSet& gains, const CoordinationWeights& coord,
                        const Vec3& p_tar) {
  check_dim(chain, q, "task_torque(q)");
  check_dim(chain, qdot, "task_torque(qdot)");
  auto poses = forward_kinematics(chain, q);
  VecX tau = VecX::Zero(chain.dof());
  for (int s = 0; s < chain.num_controlled(); ++s) {
    const auto& node = chain.controlled_links[s];
    const double w = coord.weights.for_role(node.role);
    const Mat3X jac = point_jacobian(chain, poses, node.link_index,
                                     chain.links[node.link_index].control_point);
    const Vec3 p = poses[node.link_index] * chain.links[node.link_index].control_point;
    const Vec3 pdot = jac * qdot;
    const Vec3 f = virtual_force(gains.kp[s], gains.kd[s], p, pdot, p_tar);
    tau.noalias() += w * (jac.transpose() * f);
  }
  return tau;
}

// tau = clip(tau_task + tau_g, -tau_max, tau_max), elementwise.
inline VecX command_torque(const VecX& tau_task, const VecX& tau_g, double tau_max) {
  if (tau_max <= 0.0) throw std::invalid_argument("command_torque: tau_max must be > 0");
  return (tau_task + tau_g).cwiseMax(-tau_max).cwiseMin(tau_max);
}

}  // namespace avmc

#endif  // AVMC_VMC_HPP_
