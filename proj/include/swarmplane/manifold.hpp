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

#ifndef SWARMPLANE_MANIFOLD_HPP_
#define SWARMPLANE_MANIFOLD_HPP_

#include <algorithm>
#include <cmath>

#include "swarmplane/types.hpp"

namespace swarmplane {

/// Quadratic manifold tying the desired swarm inertia to the desired
/// gravity torque: j(tau) = quad * tau^2 + offset.  Keeping the inertia on
/// this curve keeps the swarm away from singular configurations while the
/// torque command moves.
struct ManifoldSpec {
  double quad = 0.0125;   // kg m^2 / (N m)^2
  double offset = 0.025;  // kg m^2
  double tau_max = 5.0;   // saturation applied to the torque command (N m)

  void validate() const {
    if (quad < 0.0) throw ConfigError("ManifoldSpec: quad must be >= 0");
    if (offset <= 0.0) throw ConfigError("ManifoldSpec: offset must be > 0");
    if (tau_max <= 0.0) throw ConfigError("ManifoldSpec: tau_max must be > 0");
  }

  double j(double tau) const { return quad * tau * tau + offset; }
  double dj_dtau(double tau) const { return 2.0 * quad * tau; }
  double d2j_dtau2() const { return 2.0 * quad; }

  double clamp_tau(double tau) const {
    return std::clamp(tau, -tau_max, tau_max);
  }

  /// Smallest and largest inertia reachable under the saturation.
  double j_min() const { return offset; }
  double j_max() const { return j(tau_max); }

  /// Largest |dj/dtau| over the saturated torque range; bounds how fast the
  /// desired inertia can move per unit torque rate.
  double slope_max() const { return 2.0 * quad * tau_max; }
};

}  // namespace swarmplane

#endif  // SWARMPLANE_MANIFOLD_HPP_
