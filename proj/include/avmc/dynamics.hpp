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

// Joint-space time stepping under commanded torques with a diagonal inertia
// approximation, plus sphere-obstacle repulsive forces at the monitored
// (controlled) link points. Semi-implicit Euler:
//
//   qddot = I^-1 (tau_cmd - tau_g(q) - b qdot + tau_ext)
//   qdot <- qdot + dt qddot;  q <- q + dt qdot
//
// tau_g enters as the true gravity load; a controller that adds its own
// gravity compensation cancels it exactly.

#ifndef AVMC_DYNAMICS_HPP_
#define AVMC_DYNAMICS_HPP_

#include <cmath>
#include <vector>

#include "avmc/chain.hpp"
#include "avmc/io.hpp"

namespace avmc {

struct InertiaModel {
  VecX joint_inertia;      // kg*m^2, diagonal
  VecX viscous_friction;   // N*m*s/rad

  void validate(int dof) const {
    if (joint_inertia.size() != dof || viscous_friction.size() != dof) {
      throw std::invalid_argument("inertia model dimensions do not match chain");
    }
    if ((joint_inertia.array() <= 0.0).any()) {
      throw std::invalid_argument("joint inertias must be positive");
    }
    if ((viscous_friction.array() < 0.0).any()) {
      throw std::invalid_argument("viscous friction must be nonnegative");
    }
  }

  static InertiaModel uniform(int dof, double inertia, double friction) {
    InertiaModel m;
    m.joint_inertia = VecX::Constant(dof, inertia);
    m.viscous_friction = VecX::Constant(dof, friction);
    return m;
  }
};

struct Obstacle {
  Vec3 center = Vec3::Zero();
  double radius = 0.1;      // m
  double stiffness = 1000;  // N/m
  double cutoff = 0.05;     // influence distance beyond the surface, m
};

// Repulsive force on the monitored points. `forces` is aligned with
// ChainModel::controlled_links; total_norm is the sum of per-point magnitudes
// (the scalar safety metric reported per step).
struct ContactState {
  std::vector<Vec3> forces;
  double total_norm = 0.0;
};

// Linear shell model: with signed surface distance d = |point-center| - radius,
// the magnitude is stiffness*(cutoff - d) inside the shell (d < cutoff), zero
// outside, and keeps growing linearly under penetration (d <= 0). A point
// exactly at the center has no defined normal; +x is used with the maximum
// magnitude.
inline Vec3 repulsive_force(const Obstacle& obstacle, const Vec3& point) {
  const Vec3 offset = point - obstacle.center;
  const double dist = offset.norm();
  if (dist == 0.0) {
    log_warn("repulsive_force: point at obstacle center, using +x normal");
    return obstacle.stiffness * (obstacle.cutoff + obstacle.radius) * Vec3::UnitX();
  }
  const double d = dist - obstacle.radius;
  if (d >= obstacle.cutoff) return Vec3::Zero();
  const Vec3 normal = offset / dist;
  return obstacle.stiffness * (obstacle.cutoff - d) * normal;
}

inline ContactState contact_state(const ChainModel& chain,
                                  const std::vector<Transform>& poses,
                                  const std::vector<Obstacle>& obstacles) {
  ContactState contacts;
  contacts.forces.resize(chain.num_controlled(), Vec3::Zero());
  for (int s = 0; s < chain.num_controlled(); ++s) {
    const auto& node = chain.controlled_links[s];
    const Vec3 point = poses[node.link_index] * chain.links[node.link_index].control_point;
    for (const auto& obstacle : obstacles) {
      contacts.forces[s] += repulsive_force(obstacle, point);
    }
    contacts.total_norm += contacts.forces[s].norm();
  }
  return contacts;
}

// Maps per-point contact forces into joint torques via Jacobian transposes.
inline VecX external_joint_torque(const ChainModel& chain, const VecX& q,
                                  const ContactState& contacts) {
  check_dim(chain, q, "external_joint_torque");
  auto poses = forward_kinematics(chain, q);
  VecX tau = VecX::Zero(chain.dof());
  for (int s = 0; s < chain.num_controlled(); ++s) {
    if (contacts.forces[s].isZero()) continue;
    const auto& node = chain.controlled_links[s];
    const Mat3X jac = point_jacobian(chain, poses, node.link_index,
                                     chain.links[node.link_index].control_point);
    tau.noalias() += jac.transpose() * contacts.forces[s];
  }
  return tau;
}

struct StepResult {
  JointState state;
  ContactState contacts;
  bool fault = false;  // non-finite state encountered; episode must abort
};

// One simulation step. Contacts are evaluated at the incoming configuration
// and, when apply_contact_dynamics is set, act on the arm through Jacobian
// transposes in the same step.
inline StepResult step(const ChainModel& chain, const InertiaModel& inertia,
                       const JointState& state, const VecX& tau_cmd,
                       const std::vector<Obstacle>& obstacles, double dt,
                       bool apply_contact_dynamics = true) {
  if (dt <= 0.0) throw std::invalid_argument("step: dt must be > 0");
  check_dim(chain, state.q, "step(q)");
  check_dim(chain, state.qdot, "step(qdot)");
  check_dim(chain, tau_cmd, "step(tau_cmd)");

  StepResult result;
  auto poses = forward_kinematics(chain, state.q);
  result.contacts = contact_state(chain, poses, obstacles);

  VecX tau_ext = VecX::Zero(chain.dof());
  if (apply_contact_dynamics && result.contacts.total_norm > 0.0) {
    tau_ext = external_joint_torque(chain, state.q, result.contacts);
  }

  const VecX tau_g = gravity_torques(chain, state.q);
  const VecX qddot = (tau_cmd - tau_g -
                      inertia.viscous_friction.cwiseProduct(state.qdot) + tau_ext)
                         .cwiseQuotient(inertia.joint_inertia);

  result.state.qdot = state.qdot + dt * qddot;
  result.state.q = state.q + dt * result.state.qdot;

  if (!result.state.finite()) {
    log_warn("step: non-finite state, simulation fault");
    result.fault = true;
  }
  return result;
}

}  // namespace avmc

#endif  // AVMC_DYNAMICS_HPP_
