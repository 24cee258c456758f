// Copyright 2026 The Swarmplane Authors
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

#ifndef SWARMPLANE_PLANT_HPP_
#define SWARMPLANE_PLANT_HPP_

#include <cmath>

#include "swarmplane/types.hpp"

namespace swarmplane {

/// Stribeck friction torque on the plane axle.  Odd in omega and passive:
/// omega * friction_torque(omega) >= 0.
inline double friction_torque(double omega, const PhysicalParams& p) {
  return p.gamma1 * (std::tanh(p.gamma2 * omega) - std::tanh(p.gamma3 * omega)) +
         p.gamma4 * std::tanh(p.gamma5 * omega) + p.gamma6 * omega;
}

/// d/domega of friction_torque; used by the adaptive controller's regressor
/// derivatives and the disturbance-bound calculators.
inline double friction_torque_slope(double omega, const PhysicalParams& p) {
  const auto sech2 = [](double x) {
    const double c = std::cosh(x);
    return 1.0 / (c * c);
  };
  return p.gamma1 * (p.gamma2 * sech2(p.gamma2 * omega) -
                     p.gamma3 * sech2(p.gamma3 * omega)) +
         p.gamma4 * p.gamma5 * sech2(p.gamma5 * omega) + p.gamma6;
}

/// Angular acceleration of the plane given the swarm's abstract state.
/// The gravity torque enters as g * M1; tau_d is an external disturbance
/// torque.
inline double parent_accel(const ParentState& x, const AbstractState& a,
                           const PhysicalParams& p, double tau_d = 0.0) {
  const double inertia = p.J + a.Js;
  if (inertia <= 0.0)
    throw NonPositiveInertia("parent_accel: J + Js must be positive");
  return (-std::cos(x.theta) * p.g * a.M1 - x.omega * a.Jdot_s -
          friction_torque(x.omega, p) - tau_d) /
         inertia;
}

struct MemberDeriv {
  double pdot = 0.0;
  double vdot = 0.0;  // zero for single integrators
};

/// Open-loop member dynamics.  Single integrators are driven directly by a
/// velocity input; double integrators by a force input with passive linear
/// damping.
inline MemberDeriv member_deriv(const SwarmMember& m, double u) {
  if (m.kind == MemberKind::SingleIntegrator) return {u, 0.0};
  return {m.velocity, (u - m.damping * m.velocity) / m.mass};
}

inline bool parent_constraint_ok(const ParentState& x, const PhysicalParams& p) {
  return std::abs(x.theta) <= p.theta_max;
}

inline bool member_constraint_ok(const SwarmMember& m, const PhysicalParams& p) {
  return std::abs(m.position) <= p.L / 2.0;
}

}  // namespace swarmplane

#endif  // SWARMPLANE_PLANT_HPP_
