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

#ifndef SWARMPLANE_ATLAS_HPP
#define SWARMPLANE_ATLAS_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "swarmplane/abstraction.hpp"
#include "swarmplane/manifold.hpp"
#include "swarmplane/types.hpp"

namespace swarmplane {

/// Classification of an abstract point by its preimage in position space.
///   Absolutely:   every preimage point lies inside the box.
///   Partially:    some preimage points lie inside, some outside.
///   Unconstrained: every preimage point lies outside the box.
///   BoundaryUncertain: the sampler could not decide (no solutions found, or
///                      the nearest preimage point sits on the box boundary).
///   Infeasible:   the preimage over all of R^N is empty.
enum class AtlasLabel {
  Absolutely,
  Partially,
  Unconstrained,
  BoundaryUncertain,
  Infeasible,
};

inline const char* to_string(AtlasLabel l) {
  switch (l) {
    case AtlasLabel::Absolutely: return "A_A";
    case AtlasLabel::Partially: return "A_P";
    case AtlasLabel::Unconstrained: return "A_U";
    case AtlasLabel::BoundaryUncertain: return "boundary-uncertain";
    case AtlasLabel::Infeasible: return "infeasible";
  }
  return "?";
}

struct PointClass {
  AtlasLabel label = AtlasLabel::BoundaryUncertain;
  double confidence = 0.0;
  long n_inside = 0;
  long n_outside = 0;
  long n_found = 0;
  // L/2 minus the largest coordinate magnitude seen on the preimage.
  // Positive only when every observed preimage point is strictly inside.
  double box_margin = 0.0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

/// Deterministic per-point stream: the same (point, seed) always classifies
/// identically regardless of grid layout or thread schedule.
inline std::uint64_t point_seed(double M1, double Js, std::uint64_t seed) {
  return mix64(mix64(seed, std::bit_cast<std::uint64_t>(M1)),
               std::bit_cast<std::uint64_t>(Js));
}

/// Real roots p1 of the two-mass system m1 p1 + m2 p2 = M1,
/// m1 p1^2 + m2 p2^2 = Js.  Returns the root count (0, 1, or 2).
inline int line_ellipse_roots(double m1, double m2, double M1, double Js,
                              double out[2]) {
  const double disc = m1 * m2 * ((m1 + m2) * Js - M1 * M1);
  if (disc < 0.0) return 0;
  const double denom = m1 * (m1 + m2);
  if (disc == 0.0) {
    out[0] = M1 * m1 / denom;
    return 1;
  }
  const double root = std::sqrt(disc);
  out[0] = (M1 * m1 + root) / denom;
  out[1] = (M1 * m1 - root) / denom;
  return 2;
}

}  // namespace detail

/// Label the abstract point (M1, Js) against the box [-L/2, L/2]^N.
/// N = 2 is exact (the preimage is at most two points); N >= 3 samples the
/// preimage manifold by fixing coordinates 3..N and solving the remaining
/// two in closed form.  Throws EmptyPreimage when no preimage exists in R^N.
inline PointClass classify_point(double M1, double Js,
                                 const std::vector<double>& masses, double L,
                                 long budget = 20000,
                                 std::uint64_t seed = 0) {
  if (masses.empty()) throw ConfigError("classify_point: no masses");
  for (double m : masses)
    if (!(m > 0.0)) throw ConfigError("classify_point: nonpositive mass");
  if (!(L > 0.0)) throw ConfigError("classify_point: nonpositive L");
  if (budget <= 0) throw ConfigError("classify_point: nonpositive budget");

  const std::size_t N = masses.size();
  const double half = L / 2.0;
  const double btol = 1e-9 * L;
  double S0 = 0.0;
  for (double m : masses) S0 += m;
  // S3 of any preimage of (M1, Js) equals S0*Js - M1^2 (Cauchy-Schwarz).
  const double S3a = S0 * Js - M1 * M1;
  const double ftol = 1e-12 * S0 * half * half;
  if (Js < 0.0 || S3a < -ftol)
    throw EmptyPreimage("classify_point: no preimage in R^N");
  if (N == 1 && S3a > ftol)
    throw EmptyPreimage("classify_point: off the one-robot parabola");

  PointClass out;
  auto account = [&](double maxabs) {
    ++out.n_found;
    if (maxabs <= half)
      ++out.n_inside;
    else
      ++out.n_outside;
    out.box_margin = std::min(out.box_margin, half - maxabs);
  };
  out.box_margin = std::numeric_limits<double>::infinity();

  bool exact = true;
  double nearest_boundary = std::numeric_limits<double>::infinity();
  auto visit = [&](double maxabs) {
    account(maxabs);
    nearest_boundary = std::min(nearest_boundary, std::abs(half - maxabs));
  };

  if (S3a <= ftol) {
    // Equality case of Cauchy-Schwarz: the unique preimage has every
    // coordinate equal to M1/S0.
    visit(std::abs(M1 / S0));
  } else if (N == 2) {
    double p1[2];
    const int n = detail::line_ellipse_roots(masses[0], masses[1], M1, Js, p1);
    for (int k = 0; k < n; ++k) {
      const double p2 = (M1 - masses[0] * p1[k]) / masses[1];
      visit(std::max(std::abs(p1[k]), std::abs(p2)));
    }
  } else {
    exact = false;
    std::mt19937_64 rng(detail::point_seed(M1, Js, seed));
    // The preimage lies inside |p_i| <= sqrt(Js / m_i); sampling that range
    // (independent of L) also exposes out-of-box witnesses.
    std::vector<double> radius(N), tail(N - 2);
    for (std::size_t i = 0; i < N; ++i) radius[i] = std::sqrt(Js / masses[i]);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (long it = 0; it < budget; ++it) {
      double M1r = M1, Jsr = Js, tail_max = 0.0;
      for (std::size_t i = 2; i < N; ++i) {
        tail[i - 2] = radius[i] * uni(rng);
        M1r -= masses[i] * tail[i - 2];
        Jsr -= masses[i] * tail[i - 2] * tail[i - 2];
        tail_max = std::max(tail_max, std::abs(tail[i - 2]));
      }
      if (Jsr < 0.0) continue;
      double p1[2];
      const int n =
          detail::line_ellipse_roots(masses[0], masses[1], M1r, Jsr, p1);
      for (int k = 0; k < n; ++k) {
        const double p2 = (M1r - masses[0] * p1[k]) / masses[1];
        visit(std::max({std::abs(p1[k]), std::abs(p2), tail_max}));
      }
    }
  }

  if (out.n_found == 0) {
    out.label = AtlasLabel::BoundaryUncertain;
    out.confidence = 0.0;
    out.box_margin = 0.0;
    return out;
  }
  out.confidence =
      exact ? 1.0
            : std::min(1.0, static_cast<double>(out.n_found) /
                                static_cast<double>(budget));
  if (out.n_inside > 0 && out.n_outside > 0)
    out.label = AtlasLabel::Partially;
  else if (nearest_boundary < btol)
    out.label = AtlasLabel::BoundaryUncertain;
  else
    out.label = out.n_inside > 0 ? AtlasLabel::Absolutely
                                 : AtlasLabel::Unconstrained;
  return out;
}

struct Polyline {
  std::vector<std::array<double, 2>> points;  // (M1, Js)
};

/// Image of every edge of the box [-L/2, L/2]^N under the abstract map.
/// One polyline per edge, N * 2^(N-1) edges in total.
inline std::vector<Polyline> map_hypercube_edges(
    const std::vector<double>& masses, double L, int samples_per_edge) {
  const std::size_t N = masses.size();
  if (N < 1) throw ConfigError("map_hypercube_edges: no masses");
  if (N > 20) throw ConfigError("map_hypercube_edges: too many dimensions");
  if (samples_per_edge < 2)
    throw ConfigError("map_hypercube_edges: need at least 2 samples");
  if (!(L > 0.0)) throw ConfigError("map_hypercube_edges: nonpositive L");

  const double half = L / 2.0;
  std::vector<Polyline> edges;
  std::vector<double> p(N);
  for (std::size_t free = 0; free < N; ++free) {
    const std::uint64_t combos = std::uint64_t{1} << (N - 1);
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
      std::uint64_t bits = mask;
      for (std::size_t i = 0; i < N; ++i) {
        if (i == free) continue;
        p[i] = (bits & 1) ? half : -half;
        bits >>= 1;
      }
      Polyline line;
      line.points.reserve(static_cast<std::size_t>(samples_per_edge));
      for (int s = 0; s < samples_per_edge; ++s) {
        p[free] = -half + L * static_cast<double>(s) /
                             static_cast<double>(samples_per_edge - 1);
        double M1 = 0.0, Js = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
          M1 += masses[i] * p[i];
          Js += masses[i] * p[i] * p[i];
        }
        line.points.push_back({M1, Js});
      }
      edges.push_back(std::move(line));
    }
  }
  return edges;
}

inline void write_polylines_csv(const std::vector<Polyline>& edges,
                                std::ostream& os) {
  os << "edge,M1,Js\n";
  os.precision(17);
  for (std::size_t e = 0; e < edges.size(); ++e)
    for (const auto& pt : edges[e].points)
      os << e << ',' << pt[0] << ',' << pt[1] << '\n';
}

/// Rectangular grid of classified abstract points (cell centers).
struct AtlasGrid {
  double M1_min = 0.0, M1_max = 0.0, Js_min = 0.0, Js_max = 0.0;
  int nx = 0, ny = 0;
  std::vector<double> masses;
  double L = 1.0;
  long budget = 20000;
  std::uint64_t seed = 0;
  std::vector<PointClass> cells;  // row-major: j * nx + i

  double M1_at(int i) const {
    return M1_min + (M1_max - M1_min) * (i + 0.5) / nx;
  }
  double Js_at(int j) const {
    return Js_min + (Js_max - Js_min) * (j + 0.5) / ny;
  }
  const PointClass& at(int i, int j) const {
    return cells[static_cast<std::size_t>(j) * nx + i];
  }

  void write_csv(std::ostream& os) const {
    os << "M1,Js,label,confidence\n";
    os.precision(17);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const auto& c = at(i, j);
        os << M1_at(i) << ',' << Js_at(j) << ',' << to_string(c.label) << ','
           << c.confidence << '\n';
      }
  }

  void write_meta(std::ostream& os) const {
    os.precision(17);
    os << "{\"masses\":[";
    for (std::size_t i = 0; i < masses.size(); ++i)
      os << (i ? "," : "") << masses[i];
    os << "],\"L\":" << L << ",\"seed\":" << seed << ",\"budget\":" << budget
       << ",\"grid\":{\"M1_min\":" << M1_min << ",\"M1_max\":" << M1_max
       << ",\"Js_min\":" << Js_min << ",\"Js_max\":" << Js_max
       << ",\"nx\":" << nx << ",\"ny\":" << ny << "}}\n";
  }
};

inline AtlasGrid build_atlas(const std::vector<double>& masses, double L,
                             double M1_min, double M1_max, double Js_min,
                             double Js_max, int nx, int ny,
                             long budget = 20000, std::uint64_t seed = 0,
                             int threads = 1) {
  if (nx < 1 || ny < 1) throw ConfigError("build_atlas: empty grid");
  if (!(M1_max > M1_min) || !(Js_max > Js_min))
    throw ConfigError("build_atlas: degenerate grid extent");
  if (threads < 1) threads = 1;

  AtlasGrid grid;
  grid.M1_min = M1_min;
  grid.M1_max = M1_max;
  grid.Js_min = Js_min;
  grid.Js_max = Js_max;
  grid.nx = nx;
  grid.ny = ny;
  grid.masses = masses;
  grid.L = L;
  grid.budget = budget;
  grid.seed = seed;
  grid.cells.resize(static_cast<std::size_t>(nx) * ny);

  auto classify_row = [&grid, budget, seed](int j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double M1 = grid.M1_at(i);
      const double Js = grid.Js_at(j);
      PointClass c;
      try {
        c = classify_point(M1, Js, grid.masses, grid.L, budget, seed);
      } catch (const EmptyPreimage&) {
        c.label = AtlasLabel::Infeasible;
        c.confidence = 1.0;
        c.box_margin = -grid.L / 2.0;
      }
      grid.cells[static_cast<std::size_t>(j) * grid.nx + i] = c;
    }
  };

  if (threads == 1) {
    for (int j = 0; j < ny; ++j) classify_row(j);
  } else {
    std::vector<std::future<void>> futures;
    for (int w = 0; w < threads; ++w)
      futures.push_back(std::async(std::launch::async, [&, w] {
        for (int j = w; j < grid.ny; j += threads) classify_row(j);
      }));
    for (auto& f : futures) f.get();
  }
  return grid;
}

struct ManifoldCert {
  bool pass = false;
  double worst_margin = 0.0;
  double worst_tau = 0.0;
  int n_points = 0;
  int n_failed = 0;
};

/// Certify that the manifold (tau/g, Jsd(tau)) for |tau| <= tau_max lies in
/// the interior of the absolutely constrained region: every sampled point
/// classifies Absolutely with positive distance to the box boundary, and
/// none sits at the S3 = 0 singularity.
inline ManifoldCert certify_manifold(const ManifoldSpec& manifold,
                                     const std::vector<double>& masses,
                                     double L, int n_tau,
                                     double gravity = 9.81,
                                     long budget = 20000,
                                     std::uint64_t seed = 0) {
  // offset = 0 is admissible here on purpose: it yields a failing
  // certificate (singular point at tau = 0) rather than a config error.
  if (manifold.quad < 0.0 || manifold.offset < 0.0 || manifold.tau_max <= 0.0)
    throw ConfigError("certify_manifold: bad manifold");
  if (n_tau < 2) throw ConfigError("certify_manifold: need at least 2 points");
  if (!(gravity > 0.0)) throw ConfigError("certify_manifold: bad gravity");

  double S0 = 0.0;
  for (double m : masses) S0 += m;
  const double half = L / 2.0;
  const double s3eps = 1e-12 * S0 * half * half;

  ManifoldCert cert;
  cert.worst_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_tau; ++k) {
    const double tau = -manifold.tau_max +
                       2.0 * manifold.tau_max * static_cast<double>(k) /
                           static_cast<double>(n_tau - 1);
    const double M1 = tau / gravity;
    const double Js = manifold.j(tau);
    ++cert.n_points;

    double margin;
    bool ok;
    if (S0 * Js - M1 * M1 <= s3eps) {
      // Singular preimage: all members collapse to one position.
      ok = false;
      margin = -half;
    } else {
      try {
        const PointClass c = classify_point(M1, Js, masses, L, budget, seed);
        ok = c.label == AtlasLabel::Absolutely && c.box_margin > 0.0;
        margin = c.box_margin;
      } catch (const EmptyPreimage&) {
        ok = false;
        margin = -half;
      }
    }
    if (!ok) ++cert.n_failed;
    if (margin < cert.worst_margin) {
      cert.worst_margin = margin;
      cert.worst_tau = tau;
    }
  }
  cert.pass = cert.n_failed == 0;
  return cert;
}

}  // namespace swarmplane

#endif  // SWARMPLANE_ATLAS_HPP
