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

// Serial-link chain model: forward kinematics, positional Jacobians and
// gravity torques for a chain of revolute joints. Link k's world pose is
//
//   T_k = T_{k-1} * parent_offset_k * Rot(joint_axis_k, q_k)
//
// so the joint-k axis passes through the origin of T_k with world direction
// R_k * joint_axis_k.

#ifndef AVMC_CHAIN_HPP_
#define AVMC_CHAIN_HPP_

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace avmc {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using Mat3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;
using Transform = Eigen::Isometry3d;

// Role tags for the controlled-link set: the two intermediate nodes and the
// end-effector node.
enum class NodeRole { kNode4, kNode6, kEndEffector };

inline std::string node_role_name(NodeRole role) {
  switch (role) {
    case NodeRole::kNode4: return "4";
    case NodeRole::kNode6: return "6";
    case NodeRole::kEndEffector: return "E";
  }
  return "?";
}

inline NodeRole parse_node_role(const std::string& s) {
  if (s == "4") return NodeRole::kNode4;
  if (s == "6") return NodeRole::kNode6;
  if (s == "E") return NodeRole::kEndEffector;
  throw std::invalid_argument("unknown controlled-link role: " + s);
}

struct LinkSpec {
  Vec3 joint_axis = Vec3::UnitZ();       // unit vector, link frame
  Transform parent_offset = Transform::Identity();
  double mass = 0.0;                     // kg
  Vec3 com_offset = Vec3::Zero();        // link frame, m
  Vec3 control_point = Vec3::Zero();     // link frame, m
};

struct ControlledLink {
  int link_index = 0;
  NodeRole role = NodeRole::kEndEffector;
};

struct ChainModel {
  std::vector<LinkSpec> links;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);  // m/s^2
  double tau_max = 120.0;                // Nm
  std::vector<ControlledLink> controlled_links;

  int dof() const { return static_cast<int>(links.size()); }
  int num_controlled() const { return static_cast<int>(controlled_links.size()); }

  // Throws std::invalid_argument on a malformed model.
  void validate() const {
    if (links.empty()) throw std::invalid_argument("chain has no links");
    for (size_t k = 0; k < links.size(); ++k) {
      if (std::abs(links[k].joint_axis.norm() - 1.0) >= 1e-9) {
        throw std::invalid_argument("joint_axis of link " + std::to_string(k) +
                                    " is not unit norm");
      }
      if (links[k].mass < 0.0) {
        throw std::invalid_argument("negative mass on link " + std::to_string(k));
      }
    }
    if (tau_max <= 0.0) throw std::invalid_argument("tau_max must be positive");
    if (controlled_links.empty()) {
      throw std::invalid_argument("controlled_links must be non-empty");
    }
    int prev = -1;
    for (const auto& c : controlled_links) {
      if (c.link_index <= prev) {
        throw std::invalid_argument("controlled_links indices must be strictly increasing");
      }
      if (c.link_index < 0 || c.link_index >= dof()) {
        throw std::invalid_argument("controlled link index out of range");
      }
      prev = c.link_index;
    }
    if (controlled_links.back().link_index != dof() - 1 ||
        controlled_links.back().role != NodeRole::kEndEffector) {
      throw std::invalid_argument("last controlled link must be the terminal link with role E");
    }
  }

  int end_effector_index() const { return controlled_links.back().link_index; }
};

struct JointState {
  VecX q;     // rad
  VecX qdot;  // rad/s

  bool finite() const { return q.allFinite() && qdot.allFinite(); }
};

inline void check_dim(const ChainModel& chain, const VecX& q, const char* what) {
  if (q.size() != chain.dof()) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(chain.dof()) + ", got " +
                                std::to_string(q.size()));
  }
}

// World pose of every link frame.
inline std::vector<Transform> forward_kinematics(const ChainModel& chain,
                                                 const VecX& q) {
  check_dim(chain, q, "forward_kinematics");
  std::vector<Transform> poses(chain.links.size());
  Transform t = Transform::Identity();
  for (size_t k = 0; k < chain.links.size(); ++k) {
    t = t * chain.links[k].parent_offset *
        Transform(Eigen::AngleAxisd(q[static_cast<int>(k)], chain.links[k].joint_axis));
    poses[k] = t;
  }
  return poses;
}

inline Vec3 link_point_position(const ChainModel& chain, const VecX& q, int link_id) {
  if (link_id < 0 || link_id >= chain.dof()) {
    throw std::out_of_range("link_point_position: link_id out of range");
  }
  auto poses = forward_kinematics(chain, q);
  return poses[link_id] * chain.links[link_id].control_point;
}

// Jacobian of a point rigidly attached to `link_id` (given in that link's
// frame). Column j is a_j x (p - o_j) for joints on the path, zero beyond.
inline Mat3X point_jacobian(const ChainModel& chain,
                            const std::vector<Transform>& poses, int link_id,
                            const Vec3& local_point) {
  const int n = chain.dof();
  Mat3X jac = Mat3X::Zero(3, n);
  const Vec3 p = poses[link_id] * local_point;
  for (int j = 0; j <= link_id; ++j) {
    const Vec3 axis_world = poses[j].rotation() * chain.links[j].joint_axis;
    const Vec3 origin = poses[j].translation();
    jac.col(j) = axis_world.cross(p - origin);
  }
  return jac;
}

inline Mat3X geometric_jacobian(const ChainModel& chain, const VecX& q, int link_id) {
  if (link_id < 0 || link_id >= chain.dof()) {
    throw std::out_of_range("geometric_jacobian: link_id out of range");
  }
  auto poses = forward_kinematics(chain, q);
  return point_jacobian(chain, poses, link_id, chain.links[link_id].control_point);
}

// U(q) = -sum_k m_k g^T p_com,k(q)
inline double potential_energy(const ChainModel& chain, const VecX& q) {
  check_dim(chain, q, "potential_energy");
  auto poses = forward_kinematics(chain, q);
  double u = 0.0;
  for (int k = 0; k < chain.dof(); ++k) {
    const Vec3 p_com = poses[k] * chain.links[k].com_offset;
    u -= chain.links[k].mass * chain.gravity.dot(p_com);
  }
  return u;
}

// tau_g = dU/dq. Commanding exactly tau_g statically balances gravity.
inline VecX gravity_torques(const ChainModel& chain, const VecX& q) {
  check_dim(chain, q, "gravity_torques");
  auto poses = forward_kinematics(chain, q);
  const int n = chain.dof();
  VecX tau = VecX::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (chain.links[k].mass == 0.0) continue;
    const Vec3 p_com = poses[k] * chain.links[k].com_offset;
    const Vec3 weight = chain.links[k].mass * chain.gravity;  // force on COM
    for (int j = 0; j <= k; ++j) {
      const Vec3 axis_world = poses[j].rotation() * chain.links[j].joint_axis;
      const Vec3 origin = poses[j].translation();
      // dU/dq_j contribution: -m g^T (a_j x (p_com - o_j))
      tau[j] -= weight.dot(axis_world.cross(p_com - origin));
    }
  }
  return tau;
}

// --- chain description file -------------------------------------------------
//
// Plain-text, line oriented, '#' starts a comment:
//
//   chain v1
//   gravity  gx gy gz
//   tau_max  value
//   link  ax ay az  tx ty tz  roll pitch yaw  mass  cx cy cz  px py pz
//   ...one `link` line per joint, base to tip...
//   controlled  index:role  index:role  index:role
//
// axis (ax,ay,az) is the joint axis in the link frame; (tx,ty,tz) and
// roll/pitch/yaw (radians, applied as Rz(yaw)*Ry(pitch)*Rx(roll)) give the
// fixed parent offset; (cx,cy,cz) the COM and (px,py,pz) the control point,
// both in the link frame. Roles are 4, 6 or E.

inline ChainModel parse_chain_text(const std::string& text) {
  ChainModel chain;
  std::istringstream stream(text);
  std::string line;
  bool versioned = false;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    auto fail = [&](const std::string& why) {
      throw std::invalid_argument("chain file line " + std::to_string(line_no) +
                                  ": " + why);
    };
    if (key == "chain") {
      std::string version;
      ls >> version;
      if (version != "v1") fail("unsupported version '" + version + "'");
      versioned = true;
    } else if (key == "gravity") {
      if (!(ls >> chain.gravity.x() >> chain.gravity.y() >> chain.gravity.z())) {
        fail("gravity needs 3 values");
      }
    } else if (key == "tau_max") {
      if (!(ls >> chain.tau_max)) fail("tau_max needs a value");
    } else if (key == "link") {
      LinkSpec link;
      Vec3 t;
      double roll, pitch, yaw;
      if (!(ls >> link.joint_axis.x() >> link.joint_axis.y() >> link.joint_axis.z()
               >> t.x() >> t.y() >> t.z() >> roll >> pitch >> yaw >> link.mass
               >> link.com_offset.x() >> link.com_offset.y() >> link.com_offset.z()
               >> link.control_point.x() >> link.control_point.y()
               >> link.control_point.z())) {
        fail("link needs 16 values");
      }
      link.parent_offset = Transform::Identity();
      link.parent_offset.translate(t);
      link.parent_offset.rotate(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                                Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                                Eigen::AngleAxisd(roll, Vec3::UnitX()));
      chain.links.push_back(link);
    } else if (key == "controlled") {
      std::string entry;
      while (ls >> entry) {
        const auto colon = entry.find(':');
        if (colon == std::string::npos) fail("controlled entries are index:role");
        ControlledLink c;
        c.link_index = std::stoi(entry.substr(0, colon));
        c.role = parse_node_role(entry.substr(colon + 1));
        chain.controlled_links.push_back(c);
      }
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!versioned) throw std::invalid_argument("chain file missing 'chain v1' header");
  chain.validate();
  return chain;
}

inline ChainModel load_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open chain file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_chain_text(text);
}

// Planar chain in the xy plane: all joints about +z, each link a pure +x
// offset of the given length, control point at the link tip, COM halfway.
inline ChainModel make_planar_chain(const std::vector<double>& lengths,
                                    double mass_per_link = 1.0) {
  ChainModel chain;
  for (size_t k = 0; k < lengths.size(); ++k) {
    LinkSpec link;
    link.joint_axis = Vec3::UnitZ();
    link.parent_offset = Transform::Identity();
    if (k > 0) link.parent_offset.translate(Vec3(lengths[k - 1], 0, 0));
    link.mass = mass_per_link;
    link.com_offset = Vec3(lengths[k] / 2.0, 0, 0);
    link.control_point = Vec3(lengths[k], 0, 0);
    chain.links.push_back(link);
  }
  const int n = static_cast<int>(lengths.size());
  if (n >= 3) {
    chain.controlled_links = {{n - 3, NodeRole::kNode4},
                              {n - 2, NodeRole::kNode6},
                              {n - 1, NodeRole::kEndEffector}};
  } else {
    chain.controlled_links = {{n - 1, NodeRole::kEndEffector}};
  }
  return chain;
}

}  // namespace avmc

#endif  // AVMC_CHAIN_HPP_
