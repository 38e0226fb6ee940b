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

#include "avmc/vmc.hpp"

#include <catch2/catch_amalgamated.hpp>

#include "avmc/dynamics.hpp"
#include "test_chains.hpp"

using namespace avmc;
using Catch::Approx;

TEST_CASE("spring and damper energies by direct substitution") {
  auto [e, d] = spring_damper_energies(100.0, 20.0, Vec3(0, 0, 0), Vec3::Zero(),
                                       Vec3(0.1, 0, 0));
  CHECK(e == Approx(0.5).margin(1e-15));
  CHECK(d == 0.0);

  // equilibrium
  auto [e0, d0] = spring_damper_energies(100.0, 20.0, Vec3(1, 2, 3), Vec3::Zero(),
                                         Vec3(1, 2, 3));
  CHECK(e0 == 0.0);
  CHECK(d0 == 0.0);

  // hand arithmetic: E = 0.5*50*0.09 = 2.25, D = 0.5*10*0.09 = 0.45
  auto [e1, d1] = spring_damper_energies(50.0, 10.0, Vec3::Zero(), Vec3(0, 0.3, 0),
                                         Vec3(0.1, 0.2, -0.2));
  CHECK(e1 == Approx(2.25).epsilon(1e-12));
  CHECK(d1 == Approx(0.45).epsilon(1e-12));
}

TEST_CASE("virtual force is attractive and damps velocity") {
  Vec3 f = virtual_force(100.0, 20.0, Vec3::Zero(), Vec3::Zero(), Vec3(0.1, 0, 0));
  CHECK(f.isApprox(Vec3(10, 0, 0), 1e-12));  // toward the target

  Vec3 fd = virtual_force(100.0, 20.0, Vec3(1, 1, 1), Vec3(0, 1, 0), Vec3(1, 1, 1));
  CHECK(fd.isApprox(Vec3(0, -20, 0), 1e-12));  // pure damping
}

TEST_CASE("virtual force equals the negative energy gradients") {
  // F = -dE/dp - dD/dpdot, by central finite differences.
  Rng rng(101);
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double kp = rng.uniform(5, 500);
    const double kd = rng.uniform(0.5, 50);
    Vec3 p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    Vec3 tar(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    Vec3 f = virtual_force(kp, kd, p, v, tar);
    for (int axis = 0; axis < 3; ++axis) {
      Vec3 pp = p, pm = p;
      pp[axis] += h;
      pm[axis] -= h;
      const double de = (spring_damper_energies(kp, kd, pp, v, tar).first -
                         spring_damper_energies(kp, kd, pm, v, tar).first) / (2 * h);
      Vec3 vp = v, vm = v;
      vp[axis] += h;
      vm[axis] -= h;
      const double dd = (spring_damper_energies(kp, kd, p, vp, tar).second -
                         spring_damper_energies(kp, kd, p, vm, tar).second) / (2 * h);
      worst = std::max(worst, std::abs(f[axis] - (-de - dd)));
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("component weights by substitution and at the boundaries") {
  auto w = component_weights(0.5, 0.4);
  CHECK(w.w4 == Approx(0.3).epsilon(1e-12));
  CHECK(w.w6 == Approx(0.2).epsilon(1e-12));
  CHECK(w.wE == Approx(0.5).epsilon(1e-12));

  auto we = component_weights(0.0, 0.7);
  CHECK(we.w4 == 0.0);
  CHECK(we.w6 == 0.0);
  CHECK(we.wE == 1.0);

  auto w11 = component_weights(1.0, 1.0);
  CHECK(w11.w4 == 0.0);
  CHECK(w11.w6 == 1.0);
  CHECK(w11.wE == 0.0);
}

TEST_CASE("weights lie on the 3-simplex over a 200-point grid") {
  for (int ia = 0; ia < 20; ++ia) {
    for (int ib = 0; ib < 10; ++ib) {
      const double alpha = ia / 19.0;
      const double beta = ib / 9.0;
      auto w = component_weights(alpha, beta);
      CHECK(w.w4 >= 0.0);
      CHECK(w.w6 >= 0.0);
      CHECK(w.wE >= 0.0);
      CHECK(std::abs(w.w4 + w.w6 + w.wE - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("out-of-range coordination inputs are clamped") {
  auto w = component_weights(1.5, -0.2);
  CHECK(w.w4 == 1.0);
  CHECK(w.w6 == 0.0);
  CHECK(w.wE == 0.0);
}

TEST_CASE("task torque on a single link is the scalar J^T F product") {
  const double L = 0.5;
  auto chain = testutil::one_link(L);
  VecX q = VecX::Zero(1), qdot = VecX::Zero(1);
  // one_link has a single controlled entry with role E in slot 0.
  // Target 0.1 m along +y from the control point: F = (0, 10, 0),
  // J column (0, L, 0) -> tau = 10 L.
  GainSet gains;
  gains.kp = {100.0, 0, 0};
  gains.kd = {0.0, 0, 0};
  auto coord = CoordinationWeights::from_alpha_beta(0.0, 0.5);
  VecX tau = task_torque(chain, q, qdot, gains, coord, Vec3(L, 0.1, 0));
  CHECK(tau[0] == Approx(10.0 * L).epsilon(1e-12));
}

TEST_CASE("zero gains give zero task torque") {
  auto chain = testutil::random_spatial_chain(55);
  Rng rng(56);
  VecX q = testutil::random_q(rng, chain.dof());
  VecX qdot = testutil::random_q(rng, chain.dof(), 1.0);
  GainSet gains;  // all zero
  auto coord = CoordinationWeights::from_alpha_beta(0.3, 0.6);
  CHECK(task_torque(chain, q, qdot, gains, coord, Vec3(0.2, 0.1, 0.4)).norm() == 0.0);
}

TEST_CASE("task torque equals the explicit three-term sum") {
  auto chain = testutil::random_spatial_chain(77);
  Rng rng(78);
  VecX q = testutil::random_q(rng, chain.dof());
  VecX qdot = testutil::random_q(rng, chain.dof(), 1.0);
  GainSet gains;
  gains.kp = {120.0, 250.0, 400.0};
  gains.kd = {12.0, 8.0, 30.0};
  const Vec3 target(0.3, -0.2, 0.5);
  auto coord = CoordinationWeights::from_alpha_beta(0.45, 0.7);

  VecX expected = VecX::Zero(chain.dof());
  const double w[3] = {coord.weights.w4, coord.weights.w6, coord.weights.wE};
  for (int s = 0; s < 3; ++s) {
    const int link = chain.controlled_links[s].link_index;
    Mat3X jac = geometric_jacobian(chain, q, link);
    Vec3 p = link_point_position(chain, q, link);
    Vec3 pdot = jac * qdot;
    Vec3 f = gains.kp[s] * (target - p) - gains.kd[s] * pdot;
    expected += w[s] * (jac.transpose() * f);
  }

  VecX tau = task_torque(chain, q, qdot, gains, coord, target);
  CHECK((tau - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("command torque clips at the limit and passes values inside") {
  VecX task(3), grav(3);
  task << 100.0, -50.0, 10.0;
  grav << 30.0, -100.0, 5.0;
  VecX tau = command_torque(task, grav, 120.0);
  CHECK(tau[0] == 120.0);    // 130 clipped
  CHECK(tau[1] == -120.0);   // -150 clipped
  CHECK(tau[2] == 15.0);     // pass-through

  CHECK(command_torque(VecX::Zero(3), VecX::Zero(3), 120.0).norm() == 0.0);
  CHECK_THROWS_AS(command_torque(task, grav, 0.0), std::invalid_argument);
}

TEST_CASE("weighted spring plus kinetic energy is non-increasing under VMC") {
  // Fixed gains, no obstacle, no saturation: V = sum_i w_i E_i + KE must not
  // increase along the simulated trajectory beyond integrator tolerance.
  auto chain = make_planar_chain({0.5, 0.4, 0.3});
  chain.links[2].mass = 0.5;
  chain.tau_max = 1e12;
  auto inertia = InertiaModel::uniform(3, 0.15, 0.0);
  GainSet gains;
  gains.kp = {150.0, 150.0, 300.0};
  gains.kd = {15.0, 15.0, 30.0};
  auto coord = CoordinationWeights::from_alpha_beta(0.4, 0.5);
  const Vec3 target(0.6, 0.5, 0.0);
  const double dt = 1.0 / 240.0;

  JointState state;
  state.q = VecX::Zero(3);
  state.q << 0.3, -0.5, 0.4;
  state.qdot = VecX::Zero(3);

  auto lyapunov_value = [&](const JointState& s) {
    auto poses = forward_kinematics(chain, s.q);
    double v = 0.0;
    const double w[3] = {coord.weights.w4, coord.weights.w6, coord.weights.wE};
    for (int i = 0; i < 3; ++i) {
      const int link = chain.controlled_links[i].link_index;
      Vec3 p = poses[link] * chain.links[link].control_point;
      v += w[i] * 0.5 * gains.kp[i] * (target - p).squaredNorm();
    }
    v += 0.5 * s.qdot.dot(inertia.joint_inertia.cwiseProduct(s.qdot));
    return v;
  };

  const double v0 = lyapunov_value(state);
  double v_prev = v0;
  for (int k = 0; k < 2000; ++k) {
    VecX tau_task = task_torque(chain, state.q, state.qdot, gains, coord, target);
    VecX tau_g = gravity_torques(chain, state.q);
    VecX tau = command_torque(tau_task, tau_g, chain.tau_max);
    auto result = step(chain, inertia, state, tau, {}, dt);
    REQUIRE_FALSE(result.fault);
    state = result.state;
    const double v = lyapunov_value(state);
    CHECK(v <= v_prev + 1e-3 * v0);
    v_prev = v;
  }
  // and it actually dissipates
  CHECK(v_prev < 0.5 * v0);
}

TEST_CASE("saturation holds for adversarial inputs") {
  Rng rng(91);
  for (int trial = 0; trial < 200; ++trial) {
    VecX task(4), grav(4);
    for (int i = 0; i < 4; ++i) {
      task[i] = rng.uniform(-1e6, 1e6);
      grav[i] = rng.uniform(-500, 500);
    }
    VecX tau = command_torque(task, grav, 120.0);
    CHECK(tau.cwiseAbs().maxCoeff() <= 120.0);
  }
}
