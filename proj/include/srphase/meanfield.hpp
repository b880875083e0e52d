// meanfield.hpp — Rescaled ground-state energy on the unit disk and its minimizers.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "srphase/model.hpp"
#include "srphase/simplex.hpp"

namespace srphase {

// Rescaled coherences (y, z); admissible states live in the closed unit disk.
struct CoherencePoint {
  double y{0.0};
  double z{0.0};
};

enum class Phase { Normal, Superradiant };

// |x| threshold separating numerical zero from genuine photonic coherence.
inline constexpr double x_tol = 1e-6;

struct GroundState {
  double x{0.0};                // photonic order parameter, signed
  CoherencePoint point{};       // minimizing coherences
  double energy_per_atom{0.0};  // units of omega_cav
  // (p0, p1, p2); sums to 1.0 exactly when accumulated as (p0 + p2) + p1
  std::array<double, 3> populations{1.0, 0.0, 0.0};
  Phase phase{Phase::Normal};
};

namespace detail {

// Couplings resolved to Rabi form, prefactors fixed; the hot evaluation path.
struct EnergyContext {
  double w10{1.0};
  double w21{1.0};
  double K{4.0};  // 4 / (omega_cav + 4 D)
  double o01{0.0};
  double o02{0.0};
  double o12{0.0};

  static EnergyContext make(const ModelParams& p) {
    RabiTriple r = rabi_from_trk(p);  // validates
    return {p.omega10, p.omega21, 4.0 / (omega_cav + 4.0 * p.D),
            r.omega01, r.omega02, r.omega12};
  }

  double bracket(double y, double z, double s) const {
    return (o01 * y + o12 * z) * s + o02 * y * z;
  }
  double energy(double y, double z, double s) const {
    double b = bracket(y, z, s);
    return -w10 * y * y + w21 * z * z + w10 - K * b * b;
  }
  double energy_polar(double rho, double theta) const {
    double y = rho * std::cos(theta);
    double z = rho * std::sin(theta);
    double s2 = 1.0 - rho * rho;  // exactly 0 on the rim
    return energy(y, z, std::sqrt(s2 > 0.0 ? s2 : 0.0));
  }
};

}  // namespace detail

inline double photon_amplitude(const CoherencePoint& p, const ModelParams& params) {
  auto ctx = detail::EnergyContext::make(params);
  double s2 = 1.0 - p.y * p.y - p.z * p.z;
  if (s2 < 0.0) {
    if (s2 < -1e-12) throw out_of_domain("(y, z) outside the unit disk");
    s2 = 0.0;
  }
  double x = -0.5 * ctx.K * ctx.bracket(p.y, p.z, std::sqrt(s2));
  return x == 0.0 ? 0.0 : x;
}

inline double reduced_energy(const CoherencePoint& p, const ModelParams& params) {
  auto ctx = detail::EnergyContext::make(params);
  double s2 = 1.0 - p.y * p.y - p.z * p.z;
  if (s2 < 0.0) {
    if (s2 < -1e-12) throw out_of_domain("(y, z) outside the unit disk");
    s2 = 0.0;
  }
  return ctx.energy(p.y, p.z, std::sqrt(s2));
}

struct EnergyGradient {
  double de_dy{0.0};
  double de_dz{0.0};
};

inline EnergyGradient reduced_gradient(const CoherencePoint& p, const ModelParams& params) {
  auto ctx = detail::EnergyContext::make(params);
  double s2 = 1.0 - p.y * p.y - p.z * p.z;
  if (s2 <= 0.0)
    throw out_of_domain("gradient undefined on or outside the unit rim");
  double s = std::sqrt(s2);
  double u = ctx.o01 * p.y + ctx.o12 * p.z;
  double b = u * s + ctx.o02 * p.y * p.z;
  double db_dy = ctx.o01 * s - u * p.y / s + ctx.o02 * p.z;
  double db_dz = ctx.o12 * s - u * p.z / s + ctx.o02 * p.y;
  return {-2.0 * ctx.w10 * p.y - 2.0 * ctx.K * b * db_dy,
          2.0 * ctx.w21 * p.z - 2.0 * ctx.K * b * db_dz};
}

// Energy before eliminating the photon coordinate; stationary in x at
// photon_amplitude(p), where it reproduces reduced_energy(p).
inline double energy_with_photon(double x, const CoherencePoint& p,
                                 const ModelParams& params) {
  auto ctx = detail::EnergyContext::make(params);
  double s2 = 1.0 - p.y * p.y - p.z * p.z;
  if (s2 < 0.0) {
    if (s2 < -1e-12) throw out_of_domain("(y, z) outside the unit disk");
    s2 = 0.0;
  }
  double b = ctx.bracket(p.y, p.z, std::sqrt(s2));
  return (omega_cav + 4.0 * params.D) * x * x + 4.0 * x * b -
         ctx.w10 * p.y * p.y + ctx.w21 * p.z * p.z + ctx.w10;
}

namespace detail {

// Explicit (y, z, s) with s = sqrt(1 - y^2 - z^2) carried alongside, so rim
// states (s = 0) and axis states (y or z exactly 0) stay exact.
struct Candidate {
  double y{0.0};
  double z{0.0};
  double s{1.0};
};

struct Endpoint {
  double rho{0.0};
  double theta{0.0};
  double energy{0.0};
};

// 24x24 uniform starts in (rho, theta), each refined by bounded Nelder-Mead.
inline std::vector<Endpoint> multistart_endpoints(const EnergyContext& ctx) {
  constexpr int n_rho = 24;
  constexpr int n_theta = 24;
  SimplexOptions<2> opt;
  opt.lower = {0.0, -1e9};
  opt.upper = {1.0, 1e9};
  opt.f_tol = 1e-12;
  opt.x_tol = 1e-8;
  opt.max_iter = 400;

  std::vector<Endpoint> ends;
  ends.reserve(n_rho * n_theta);
  auto f = [&ctx](const std::array<double, 2>& v) {
    return ctx.energy_polar(v[0], v[1]);
  };
  for (int i = 0; i < n_rho; ++i) {
    const double rho0 = (i + 0.5) / n_rho;
    for (int j = 0; j < n_theta; ++j) {
      const double theta0 = 2.0 * std::numbers::pi * j / n_theta;
      auto r = nelder_mead<2>(f, {rho0, theta0}, {0.04, 0.26}, opt);
      ends.push_back({r.x[0], r.x[1], r.value});
    }
  }
  return ends;
}

// Snap near-axis and near-rim endpoints to exact coordinates when that does
// not raise the energy beyond a rounding allowance. Exact rim/axis points keep
// normal-phase order parameters at bitwise zero.
inline Candidate refine_candidate(const EnergyContext& ctx, double rho, double theta) {
  constexpr double allowance = 1e-13;
  rho = std::clamp(rho, 0.0, 1.0);
  double s2 = 1.0 - rho * rho;
  Candidate best{rho * std::cos(theta), rho * std::sin(theta),
                 std::sqrt(s2 > 0.0 ? s2 : 0.0)};
  double best_e = ctx.energy(best.y, best.z, best.s);
  auto consider = [&](const Candidate& c) {
    double e = ctx.energy(c.y, c.z, c.s);
    if (e <= best_e + allowance) {
      best = c;
      best_e = e;
    }
  };

  if (std::abs(best.z) < 1e-4)
    consider({std::copysign(rho, best.y), 0.0, best.s});
  else if (std::abs(best.y) < 1e-4)
    consider({0.0, std::copysign(rho, best.z), best.s});
  if (rho > 1.0 - 1e-6 && rho > 0.0)
    consider({best.y / rho, best.z / rho, 0.0});
  if (rho < 1e-6) consider({0.0, 0.0, 1.0});
  return best;
}

// Canonical sign representative under the exact symmetries available for the
// coupling pattern: prefer bracket >= 0 (hence x <= 0), then lexicographically
// largest (y, z). The flips negate the bracket bitwise, so energy is unchanged.
inline GroundState assemble_state(const EnergyContext& ctx, const Candidate& c) {
  double y = c.y;
  double z = c.z;
  double s = c.s;

  std::array<std::pair<double, double>, 4> orbit;
  std::size_t n = 0;
  auto push = [&](double yy, double zz) {
    for (std::size_t i = 0; i < n; ++i)
      if (orbit[i].first == yy && orbit[i].second == zz) return;
    orbit[n++] = {yy, zz};
  };
  push(y, z);
  if (ctx.o02 == 0.0)
    for (std::size_t i = 0, m = n; i < m; ++i) push(-orbit[i].first, -orbit[i].second);
  if (ctx.o12 == 0.0)
    for (std::size_t i = 0, m = n; i < m; ++i) push(-orbit[i].first, orbit[i].second);
  if (ctx.o01 == 0.0)
    for (std::size_t i = 0, m = n; i < m; ++i) push(orbit[i].first, -orbit[i].second);

  std::size_t pick = 0;
  double pick_b = ctx.bracket(orbit[0].first, orbit[0].second, s);
  for (std::size_t i = 1; i < n; ++i) {
    double b = ctx.bracket(orbit[i].first, orbit[i].second, s);
    bool better;
    if ((b >= 0.0) != (pick_b >= 0.0)) {
      better = b >= 0.0;
    } else {
      better = orbit[i].first > orbit[pick].first ||
               (orbit[i].first == orbit[pick].first &&
                orbit[i].second > orbit[pick].second);
    }
    if (better) {
      pick = i;
      pick_b = b;
    }
  }
  y = orbit[pick].first;
  z = orbit[pick].second;

  GroundState g;
  double b = pick_b;
  double x = -0.5 * ctx.K * b;
  g.x = x == 0.0 ? 0.0 : x;
  g.point = {y, z};
  g.energy_per_atom = -ctx.w10 * y * y + ctx.w21 * z * z + ctx.w10 - ctx.K * b * b;

  double p0 = y * y;
  double p2 = z * z;
  double p1;
  double sum = p0 + p2;
  if (sum <= 1.0) {
    p1 = 1.0 - sum;
  } else {  // rim roundoff pushed y^2 + z^2 one ulp above 1
    p1 = 0.0;
    if (p0 >= p2)
      p2 = 1.0 - p0;
    else
      p0 = 1.0 - p2;
  }
  g.populations = {p0, p1, p2};
  g.phase = std::abs(g.x) > x_tol ? Phase::Superradiant : Phase::Normal;
  return g;
}

// Strict-descent probe: rejects saddles, maxima, and rim shoulders. Probes are
// pulled back into the disk so rim minima are tested along the rim arc.
inline bool is_local_min(const EnergyContext& ctx, const GroundState& g) {
  constexpr int n_dir = 16;
  constexpr double radius = 1e-4;
  for (int k = 0; k < n_dir; ++k) {
    double phi = 2.0 * std::numbers::pi * k / n_dir;
    double y = g.point.y + radius * std::cos(phi);
    double z = g.point.z + radius * std::sin(phi);
    double n2 = y * y + z * z;
    if (n2 > 1.0) {
      double scale = 1.0 / std::sqrt(n2);
      y *= scale;
      z *= scale;
      n2 = y * y + z * z;
    }
    double s2 = 1.0 - n2;
    double e = ctx.energy(y, z, std::sqrt(s2 > 0.0 ? s2 : 0.0));
    if (e < g.energy_per_atom - 1e-12) return false;
  }
  return true;
}

}  // namespace detail

// Global minimum of the reduced energy over the unit disk via the fixed
// multistart scheme; deterministic for identical inputs.
inline GroundState minimize_global(const ModelParams& params) {
  auto ctx = detail::EnergyContext::make(params);
  auto ends = detail::multistart_endpoints(ctx);
  detail::Candidate best{1.0, 0.0, 0.0};
  double best_e = ctx.energy(best.y, best.z, best.s);
  for (const auto& e : ends) {
    auto c = detail::refine_candidate(ctx, e.rho, e.theta);
    double ce = ctx.energy(c.y, c.z, c.s);
    if (ce < best_e) {
      best = c;
      best_e = ce;
    }
  }
  return detail::assemble_state(ctx, best);
}

// All distinct local minima found by the multistart scheme, deduplicated at
// Euclidean distance 1e-3 in (y, z) after sign canonicalization, ascending in
// energy.
inline std::vector<GroundState> local_minima(const ModelParams& params) {
  auto ctx = detail::EnergyContext::make(params);
  auto ends = detail::multistart_endpoints(ctx);

  std::vector<GroundState> states;
  states.reserve(ends.size());
  for (const auto& e : ends) {
    auto c = detail::refine_candidate(ctx, e.rho, e.theta);
    states.push_back(detail::assemble_state(ctx, c));
  }
  std::stable_sort(states.begin(), states.end(),
                   [](const GroundState& a, const GroundState& b) {
                     if (a.energy_per_atom != b.energy_per_atom)
                       return a.energy_per_atom < b.energy_per_atom;
                     if (a.point.y != b.point.y) return a.point.y > b.point.y;
                     return a.point.z > b.point.z;
                   });

  std::vector<GroundState> reps;
  for (const auto& st : states) {
    bool merged = false;
    for (const auto& r : reps) {
      double dy = st.point.y - r.point.y;
      double dz = st.point.z - r.point.z;
      if (dy * dy + dz * dz <= 1e-6) {
        merged = true;
        break;
      }
    }
    if (!merged) reps.push_back(st);
  }

  std::vector<GroundState> minima;
  for (const auto& r : reps)
    if (detail::is_local_min(ctx, r)) minima.push_back(r);
  return minima;
}

}  // namespace srphase
