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

#ifndef SWARMPLANE_TYPES_HPP_
#define SWARMPLANE_TYPES_HPP_

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmplane {

struct NonPositiveInertia : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySwarm : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularSwarm : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SecantDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RiccatiFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFiniteState : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConstraintBreach : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyPreimage : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Physical parameters of the tilting plane and its axle friction.
/// gamma1..gamma6 are the Stribeck friction coefficients; the model is
///   f(w) = g1*(tanh(g2 w) - tanh(g3 w)) + g4*tanh(g5 w) + g6*w
struct PhysicalParams {
  double J = 0.5;          // plane inertia about its axis (kg m^2)
  double L = 1.0;          // plane length (m)
  double g = 9.81;         // gravity (m/s^2)
  double gamma1 = 0.01;    // N m
  double gamma2 = 1000.0;  // s
  double gamma3 = 700.0;   // s
  double gamma4 = 0.02;    // N m
  double gamma5 = 1000.0;  // s
  double gamma6 = 1.0;     // N m s
  double theta_max = 0.2;  // tilt constraint (rad)
  double tau_max = 5.0;    // desired-torque saturation (N m)

  void validate() const {
    if (J <= 0.0) throw ConfigError("PhysicalParams: J must be > 0");
    if (L <= 0.0) throw ConfigError("PhysicalParams: L must be > 0");
    if (gamma1 <= 0.0 || gamma2 <= 0.0 || gamma3 <= 0.0 || gamma4 <= 0.0 ||
        gamma5 <= 0.0 || gamma6 <= 0.0)
      throw ConfigError("PhysicalParams: all friction coefficients must be > 0");
    if (gamma2 <= gamma3)
      throw ConfigError("PhysicalParams: gamma2 must exceed gamma3");
    // Note: gamma4 <= gamma1 is sometimes quoted for Stribeck fits, but the
    // reference parameter set has gamma4 = 2*gamma1 and the model stays
    // passive either way, so it is not enforced here.
    if (theta_max <= 0.0 || theta_max >= M_PI / 2.0)
      throw ConfigError("PhysicalParams: theta_max must lie in (0, pi/2)");
    if (tau_max <= 0.0) throw ConfigError("PhysicalParams: tau_max must be > 0");
  }
};

/// Tilt angle and rate of the plane.
struct ParentState {
  double theta = 0.0;  // rad
  double omega = 0.0;  // rad/s
};

enum class MemberKind { SingleIntegrator, DoubleIntegrator };

/// One robot on the plane.  Single integrators are velocity-controlled and
/// carry no dynamic velocity state; `velocity` then records the last
/// commanded input (used when differentiating the swarm inertia).
struct SwarmMember {
  MemberKind kind = MemberKind::SingleIntegrator;
  double mass = 1.0;      // kg
  double damping = 0.0;   // N s/m, double integrators only
  double position = 0.0;  // m, relative to the axis of rotation
  double velocity = 0.0;  // m/s
};

using SwarmState = std::vector<SwarmMember>;

/// Sinusoidal torque disturbance tau_d(t) = amplitude * sin(omega * t).
struct Disturbance {
  double amplitude = 0.0;  // N m
  double omega = 0.0;      // rad/s

  double operator()(double t) const { return amplitude * std::sin(omega * t); }
  double rate(double t) const {
    return amplitude * omega * std::cos(omega * t);
  }
};

/// Mass moment and swarm inertia: the coupling channel between the swarm
/// and the plane.  The gravity torque is g * M1; we keep the mass moment
/// itself so the swarm-side control algebra needs no gravity factor.
struct AbstractState {
  double M1 = 0.0;      // sum m_i p_i (kg m)
  double Js = 0.0;      // sum m_i p_i^2 (kg m^2)
  double Jdot_s = 0.0;  // sum 2 m_i p_i v_i (kg m^2/s)
};

/// Swarm-internal sums that let a member compute its own input without the
/// other members' states.  C_a entries are only populated for swarms with
/// double-integrator members.
struct AuxAbstractState {
  double S0 = 0.0;  // sum m_i^2
  double S1 = 0.0;  // sum m_i^2 p_i
  double S2 = 0.0;  // sum m_i^2 p_i^2
  double S3 = 0.0;  // sum_{i<j} m_i^2 m_j^2 (p_i - p_j)^2
  bool has_Ca = false;
  double Ca11 = 0.0, Ca12 = 0.0, Ca21 = 0.0, Ca22 = 0.0;
};

/// Desired abstract state handed from the parent controller to the swarm,
/// with enough derivatives for the member control laws.
struct DesiredAbstract {
  double tau_sd = 0.0;   // desired gravity torque (N m), |tau_sd| <= tau_max
  double M1 = 0.0;       // tau_sd / g
  double Js = 0.0;       // manifold value
  double M1_dot = 0.0;
  double Js_dot = 0.0;
  double M1_ddot = 0.0;  // filled only when a second derivative is available
  double Js_ddot = 0.0;
};

}  // namespace swarmplane

#endif  // SWARMPLANE_TYPES_HPP_
