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

#ifndef SWARMPLANE_ABSTRACTION_HPP_
#define SWARMPLANE_ABSTRACTION_HPP_

#include <Eigen/Dense>
#include <cmath>

#include "swarmplane/types.hpp"

namespace swarmplane {

/// Relative singularity guard on S3.  Scale-free: proportional to S0 and the
/// square of the half-length of the plane.
inline double s3_epsilon(const AuxAbstractState& aux, double L) {
  return 1e-12 * aux.S0 * (L / 2.0) * (L / 2.0);
}

/// Map the full swarm state to (M1, Js, Jdot_s).  Single-integrator members
/// contribute their last commanded input as velocity.
inline AbstractState abstract_map(const SwarmState& s) {
  if (s.empty()) throw EmptySwarm("abstract_map: swarm is empty");
  AbstractState a;
  for (const auto& m : s) {
    a.M1 += m.mass * m.position;
    a.Js += m.mass * m.position * m.position;
    a.Jdot_s += 2.0 * m.mass * m.position * m.velocity;
  }
  return a;
}

/// Swarm-internal sums S0..S3.  S3 is accumulated with the identity
/// S3 = S0*S2 - S1^2 held exactly by construction of the pair sum.
inline AuxAbstractState aux_state(const SwarmState& s) {
  if (s.empty()) throw EmptySwarm("aux_state: swarm is empty");
  AuxAbstractState aux;
  for (const auto& m : s) {
    const double m2 = m.mass * m.mass;
    aux.S0 += m2;
    aux.S1 += m2 * m.position;
    aux.S2 += m2 * m.position * m.position;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const double d = s[i].position - s[j].position;
      aux.S3 += s[i].mass * s[i].mass * s[j].mass * s[j].mass * d * d;
    }
  }
  return aux;
}

/// Jacobian of the abstract map: row 0 is d(M1)/dp, row 1 is d(Js)/dp.
inline Eigen::Matrix<double, 2, Eigen::Dynamic> abstract_jacobian(
    const SwarmState& s) {
  if (s.empty()) throw EmptySwarm("abstract_jacobian: swarm is empty");
  Eigen::Matrix<double, 2, Eigen::Dynamic> phi(2, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    phi(0, i) = s[i].mass;
    phi(1, i) = 2.0 * s[i].mass * s[i].position;
  }
  return phi;
}

/// One row of the closed-form pseudo-inverse of the abstract Jacobian.
/// Valid only when S3 is away from zero; callers guard with s3_epsilon.
inline Eigen::Vector2d pinv_row(const AuxAbstractState& aux, double mass,
                                double position) {
  return {(mass * aux.S2 - mass * position * aux.S1) / aux.S3,
          0.5 * (mass * position * aux.S0 - mass * aux.S1) / aux.S3};
}

/// Closed-form Moore-Penrose pseudo-inverse of the abstract Jacobian,
/// one row per member.  Throws SingularSwarm when the swarm is (close to)
/// concentrated at a single position.
inline Eigen::Matrix<double, Eigen::Dynamic, 2> pinv_jacobian(
    const AuxAbstractState& aux, const SwarmState& s, double L) {
  if (s.empty()) throw EmptySwarm("pinv_jacobian: swarm is empty");
  if (aux.S3 <= s3_epsilon(aux, L))
    throw SingularSwarm("pinv_jacobian: S3 ~ 0, swarm concentrated at a point");
  Eigen::Matrix<double, Eigen::Dynamic, 2> pinv(s.size(), 2);
  for (std::size_t i = 0; i < s.size(); ++i)
    pinv.row(i) = pinv_row(aux, s[i].mass, s[i].position).transpose();
  return pinv;
}

/// aux_state plus the velocity-coupling matrix C_a needed by the
/// force-controlled member law:
///   C_a = Phi M^-1 (C + k_sd I) Phi^+
/// with M = diag(m_i) and C = diag(c_i).  Requires a nonsingular swarm.
inline AuxAbstractState aux_state_with_Ca(const SwarmState& s, double k_sd,
                                          double L) {
  AuxAbstractState aux = aux_state(s);
  if (aux.S3 <= s3_epsilon(aux, L))
    throw SingularSwarm("aux_state_with_Ca: S3 ~ 0");
  Eigen::Matrix2d Ca = Eigen::Matrix2d::Zero();
  for (const auto& m : s) {
    const Eigen::Vector2d col(m.mass, 2.0 * m.mass * m.position);
    const Eigen::Vector2d row = pinv_row(aux, m.mass, m.position);
    Ca += ((m.damping + k_sd) / m.mass) * col * row.transpose();
  }
  aux.has_Ca = true;
  aux.Ca11 = Ca(0, 0);
  aux.Ca12 = Ca(0, 1);
  aux.Ca21 = Ca(1, 0);
  aux.Ca22 = Ca(1, 1);
  return aux;
}

/// Time derivative of the Jacobian along the current member velocities.
/// Row 0 is identically zero; row 1 is 2 m_i v_i.
inline Eigen::Matrix<double, 2, Eigen::Dynamic> abstract_jacobian_rate(
    const SwarmState& s) {
  Eigen::Matrix<double, 2, Eigen::Dynamic> phidot(2, s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    phidot(0, i) = 0.0;
    phidot(1, i) = 2.0 * s[i].mass * s[i].velocity;
  }
  return phidot;
}

inline double total_mass(const SwarmState& s) {
  double sum = 0.0;
  for (const auto& m : s) sum += m.mass;
  return sum;
}

}  // namespace swarmplane

#endif  // SWARMPLANE_ABSTRACTION_HPP_
