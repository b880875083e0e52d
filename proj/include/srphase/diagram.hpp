// diagram.hpp — phase diagram scans, boundary refinement, transition order.
//
// A 2D scan varies two oscillator strengths over a closed uniform grid and
// records the mean-field ground state plus sum-rule feasibility per cell.
// Boundaries between Normal and Superradiant cells are sharpened by bisection
// and classified first/second order from the behaviour of |x| across them.
#pragma once

#include <srphase/io.hpp>
#include <srphase/meanfield.hpp>
#include <srphase/model.hpp>
#include <srphase/parallel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace srphase {

enum class ScanAxis { F01, F02, F12 };

inline const char* to_string(ScanAxis a) {
  switch (a) {
    case ScanAxis::F01: return "f01";
    case ScanAxis::F02: return "f02";
    default: return "f12";
  }
}

inline ScanAxis axis_from_string(const std::string& name) {
  if (name == "f01") return ScanAxis::F01;
  if (name == "f02") return ScanAxis::F02;
  if (name == "f12") return ScanAxis::F12;
  throw invalid_parameter("unknown scan axis: " + name);
}

struct AxisSpec {
  ScanAxis axis{ScanAxis::F01};
  double min{0.0};
  double max{1.0};
  int steps{201};  // node count, endpoints included
};

struct ScanSpec {
  ModelParams base{};  // oscillator-strength coupling; scanned entries get overwritten
  AxisSpec axis1{ScanAxis::F01, 0.0, 1.0, 201};
  AxisSpec axis2{ScanAxis::F12, 0.0, 1.0, 201};
  int threads{1};
};

namespace detail {

inline void set_axis(TrkCoupling& c, ScanAxis axis, double value) {
  switch (axis) {
    case ScanAxis::F01: c.f01 = value; break;
    case ScanAxis::F02: c.f02 = value; break;
    case ScanAxis::F12: c.f12 = value; break;
  }
}

inline double axis_value(const AxisSpec& a, int i) {
  if (a.steps <= 1) return a.min;
  return a.min + (a.max - a.min) * (static_cast<double>(i) / (a.steps - 1));
}

inline ModelParams params_at(const ScanSpec& spec, double v1, double v2) {
  ModelParams p = spec.base;
  TrkCoupling c = std::get<TrkCoupling>(p.coupling);
  set_axis(c, spec.axis1.axis, v1);
  set_axis(c, spec.axis2.axis, v2);
  p.coupling = c;
  return p;
}

}  // namespace detail

inline void validate(const AxisSpec& a) {
  if (a.steps < 2) throw invalid_parameter("axis needs at least 2 steps");
  if (!(a.min >= 0.0 && a.max <= 3.0 && a.min < a.max))
    throw invalid_parameter("axis range must satisfy 0 <= min < max <= 3");
}

inline void validate(const ScanSpec& spec) {
  if (!std::holds_alternative<TrkCoupling>(spec.base.coupling))
    throw invalid_parameter("scan requires oscillator-strength coupling");
  if (spec.axis1.axis == spec.axis2.axis)
    throw invalid_parameter("scan axes must differ");
  validate(spec.axis1);
  validate(spec.axis2);
  validate(detail::params_at(spec, spec.axis1.max, spec.axis2.max));
}

struct CellResult {
  GroundState state{};
  bool trk_feasible{false};
};

struct PhaseGrid {
  ScanSpec spec{};
  std::vector<CellResult> cells;  // row-major: index i1 * axis2.steps + i2

  double axis1_value(int i1) const { return detail::axis_value(spec.axis1, i1); }
  double axis2_value(int i2) const { return detail::axis_value(spec.axis2, i2); }
  const CellResult& at(int i1, int i2) const {
    return cells[static_cast<std::size_t>(i1) * spec.axis2.steps + i2];
  }
};

inline PhaseGrid scan_2d(const ScanSpec& spec) {
  validate(spec);
  PhaseGrid grid;
  grid.spec = spec;
  const std::size_t n1 = spec.axis1.steps;
  const std::size_t n2 = spec.axis2.steps;
  grid.cells.resize(n1 * n2);
  parallel_for(n1 * n2, spec.threads, [&](std::size_t idx) {
    const int i1 = static_cast<int>(idx / n2);
    const int i2 = static_cast<int>(idx % n2);
    ModelParams p = detail::params_at(grid.spec, detail::axis_value(spec.axis1, i1),
                                      detail::axis_value(spec.axis2, i2));
    CellResult cell;
    cell.trk_feasible = trk_check(std::get<TrkCoupling>(p.coupling)).feasible;
    cell.state = minimize_global(p);
    grid.cells[idx] = cell;
  });
  return grid;
}

inline std::size_t sr_trk_count(const PhaseGrid& grid) {
  std::size_t n = 0;
  for (const auto& cell : grid.cells)
    if (cell.trk_feasible && cell.state.phase == Phase::Superradiant) ++n;
  return n;
}

// ---------------------------------------------------------------------------
// Boundary refinement and order classification.

enum class TransitionOrder { First, Second, Ambiguous };

inline const char* to_string(TransitionOrder o) {
  switch (o) {
    case TransitionOrder::First: return "first";
    case TransitionOrder::Second: return "second";
    default: return "ambiguous";
  }
}

struct BoundarySegment {
  double axis1{};  // line coordinate the crossing sits on
  double axis2{};  // bisected crossing location along the varied axis
  double jump{};   // |x| discontinuity estimate across the boundary
  TransitionOrder order{TransitionOrder::Second};
};

namespace detail {

struct CrossingProbe {
  double t{};            // flip location after bisection
  double step_jump{};    // ||x(t+eps)| - |x(t-eps)||, eps = 1e-9
  double coexistence{};  // |x| spread among near-degenerate minima at t +- eps
};

inline TransitionOrder order_from_jumps(double step_jump, double coexistence) {
  if (coexistence > 1e-3) return TransitionOrder::First;
  if (step_jump <= 1e-3) return TransitionOrder::Second;
  return TransitionOrder::Ambiguous;
}

// mk maps the varied coordinate to full model parameters. [t_lo, t_hi] must
// bracket exactly one phase flip.
template <class MK>
inline CrossingProbe locate_crossing(const MK& mk, double t_lo, double t_hi) {
  auto superradiant = [&](double t) {
    return minimize_global(mk(t)).phase == Phase::Superradiant;
  };
  const bool lo_phase = superradiant(t_lo);
  double lo = t_lo;
  double hi = t_hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (superradiant(mid) == lo_phase)
      lo = mid;
    else
      hi = mid;
  }

  CrossingProbe probe;
  probe.t = 0.5 * (lo + hi);
  const double eps = 1e-9;
  const double x_below = std::abs(minimize_global(mk(probe.t - eps)).x);
  const double x_above = std::abs(minimize_global(mk(probe.t + eps)).x);
  probe.step_jump = std::abs(x_above - x_below);

  probe.coexistence = 0.0;
  for (double side : {probe.t - eps, probe.t + eps}) {
    const auto minima = local_minima(mk(side));
    if (minima.empty()) continue;
    const double e0 = minima.front().energy_per_atom;
    double x_min = std::abs(minima.front().x);
    double x_max = x_min;
    for (const auto& m : minima) {
      if (m.energy_per_atom - e0 > 1e-6) break;  // sorted ascending
      const double ax = std::abs(m.x);
      x_min = std::min(x_min, ax);
      x_max = std::max(x_max, ax);
    }
    probe.coexistence = std::max(probe.coexistence, x_max - x_min);
  }
  return probe;
}

inline BoundarySegment segment_from_probe(double a1, const CrossingProbe& probe) {
  BoundarySegment seg;
  seg.axis1 = a1;
  seg.axis2 = probe.t;
  seg.jump = std::max(probe.step_jump, probe.coexistence);
  seg.order = order_from_jumps(probe.step_jump, probe.coexistence);
  return seg;
}

// Crossing search along one grid line. vary_axis1 picks which coordinate
// moves during bisection; the other stays pinned at the line's node value.
inline std::vector<BoundarySegment> line_crossings(const PhaseGrid& grid, int line_index,
                                                   bool vary_axis1, bool first_only) {
  const ScanSpec& spec = grid.spec;
  const double pinned =
      vary_axis1 ? grid.axis2_value(line_index) : grid.axis1_value(line_index);
  auto mk = [&](double t) {
    return vary_axis1 ? params_at(spec, t, pinned) : params_at(spec, pinned, t);
  };
  auto phase_at = [&](int i) {
    return vary_axis1 ? grid.at(i, line_index).state.phase
                      : grid.at(line_index, i).state.phase;
  };
  auto node = [&](int i) {
    return vary_axis1 ? grid.axis1_value(i) : grid.axis2_value(i);
  };
  std::vector<BoundarySegment> segments;
  const int n = vary_axis1 ? spec.axis1.steps : spec.axis2.steps;
  for (int i = 0; i + 1 < n; ++i) {
    if (phase_at(i) == phase_at(i + 1)) continue;
    const auto probe = locate_crossing(mk, node(i), node(i + 1));
    BoundarySegment seg;
    seg.axis1 = vary_axis1 ? probe.t : pinned;
    seg.axis2 = vary_axis1 ? pinned : probe.t;
    seg.jump = std::max(probe.step_jump, probe.coexistence);
    seg.order = order_from_jumps(probe.step_jump, probe.coexistence);
    segments.push_back(seg);
    if (first_only) break;
  }
  return segments;
}

inline bool vary_selects_axis1(const ScanSpec& spec, ScanAxis vary) {
  if (vary == spec.axis1.axis) return true;
  if (vary == spec.axis2.axis) return false;
  throw invalid_parameter("refinement axis is not part of the scan");
}

}  // namespace detail

// All phase flips along one grid line, each sharpened by bisection over the
// bracketing interval. `vary` names the scanned axis that moves during
// refinement; `line_index` indexes the nodes of the other axis.
inline std::vector<BoundarySegment> refine_line_crossings(const PhaseGrid& grid,
                                                          int line_index, ScanAxis vary) {
  return detail::line_crossings(grid, line_index,
                                detail::vary_selects_axis1(grid.spec, vary), false);
}

// Row form: axis2 varies along the row at axis1 index i1.
inline std::vector<BoundarySegment> refine_line_crossings(const PhaseGrid& grid, int i1) {
  return detail::line_crossings(grid, i1, false, false);
}

// First crossing on the line, if the line changes phase at all.
inline std::optional<BoundarySegment> refine_boundary(const PhaseGrid& grid,
                                                      int line_index, ScanAxis vary) {
  auto found = detail::line_crossings(grid, line_index,
                                      detail::vary_selects_axis1(grid.spec, vary), true);
  if (found.empty()) return std::nullopt;
  return found.front();
}

inline std::optional<BoundarySegment> refine_boundary(const PhaseGrid& grid, int i1) {
  auto found = detail::line_crossings(grid, i1, false, true);
  if (found.empty()) return std::nullopt;
  return found.front();
}

// Refined, classified boundary over the whole grid: every row in axis1 order,
// crossings within a row in axis2 order.
inline std::vector<BoundarySegment> classify_order(const PhaseGrid& grid) {
  std::vector<BoundarySegment> all;
  for (int i1 = 0; i1 < grid.spec.axis1.steps; ++i1) {
    auto row = refine_line_crossings(grid, i1);
    all.insert(all.end(), row.begin(), row.end());
  }
  return all;
}

// Critical coupling of a two-level configuration driven through its
// transition by the 0-1 Rabi amplitude. The base must use direct coupling;
// axis1 of the result carries omega10, axis2 the critical amplitude.
inline std::optional<BoundarySegment> dicke_critical(const ModelParams& base, double lo,
                                                     double hi) {
  if (!std::holds_alternative<DirectCoupling>(base.coupling))
    throw invalid_parameter("dicke_critical requires direct coupling");
  if (!(lo < hi)) throw invalid_parameter("dicke_critical needs lo < hi");
  auto mk = [&](double t) {
    ModelParams p = base;
    DirectCoupling c = std::get<DirectCoupling>(p.coupling);
    c.omega01 = t;
    p.coupling = c;
    return p;
  };
  if (minimize_global(mk(lo)).phase == minimize_global(mk(hi)).phase) return std::nullopt;
  return detail::segment_from_probe(base.omega10, detail::locate_crossing(mk, lo, hi));
}

// ---------------------------------------------------------------------------
// 3D strength scan, stored sparsely.

struct VolumeSpec {
  ModelParams base{};  // oscillator-strength coupling; all three strengths scanned
  double min{0.0};
  double max{1.0};
  int steps{41};
  int threads{1};
};

struct Voxel {
  double f01{};
  double f02{};
  double f12{};
  GroundState state{};
};

inline void validate(const VolumeSpec& spec) {
  if (!std::holds_alternative<TrkCoupling>(spec.base.coupling))
    throw invalid_parameter("volume scan requires oscillator-strength coupling");
  if (spec.steps < 1) throw invalid_parameter("steps must be >= 1");
  if (spec.steps == 1) {
    if (spec.min != spec.max)
      throw invalid_parameter("single-step volume needs min == max");
  } else if (!(spec.min < spec.max)) {
    throw invalid_parameter("volume range must satisfy min < max");
  }
  if (!(spec.min >= 0.0 && spec.max <= 3.0))
    throw invalid_parameter("volume range must lie in [0, 3]");
  ModelParams probe = spec.base;
  probe.coupling = TrkCoupling{spec.max, spec.max, spec.max};
  validate(probe);
}

// Voxels that are simultaneously superradiant and sum-rule feasible.
// Sum-rule infeasible points are skipped without minimizing.
inline std::vector<Voxel> scan_3d(const VolumeSpec& spec) {
  validate(spec);
  const std::size_t n = spec.steps;
  AxisSpec axis{ScanAxis::F01, spec.min, spec.max, spec.steps};
  std::vector<std::optional<Voxel>> slots(n * n * n);
  parallel_for(n * n * n, spec.threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / (n * n));
    const int j = static_cast<int>((idx / n) % n);
    const int k = static_cast<int>(idx % n);
    TrkCoupling c{detail::axis_value(axis, i), detail::axis_value(axis, j),
                  detail::axis_value(axis, k)};
    if (!trk_check(c).feasible) return;
    ModelParams p = spec.base;
    p.coupling = c;
    GroundState g = minimize_global(p);
    if (g.phase != Phase::Superradiant) return;
    slots[idx] = Voxel{c.f01, c.f02, c.f12, g};
  });
  std::vector<Voxel> voxels;
  for (auto& slot : slots)
    if (slot) voxels.push_back(*slot);
  return voxels;
}

// ---------------------------------------------------------------------------
// CSV serialization. Numbers use %.9g; byte-identical for identical inputs.

namespace detail {

inline void append_g(std::string& out, double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", v);
  out += buffer;
}

}  // namespace detail

inline std::string cells_csv(const PhaseGrid& grid) {
  std::string out = "axis1,axis2,x,abs_x,y,z,energy,p0,p1,p2,phase,trk_feasible\n";
  const int n1 = grid.spec.axis1.steps;
  const int n2 = grid.spec.axis2.steps;
  for (int i1 = 0; i1 < n1; ++i1) {
    for (int i2 = 0; i2 < n2; ++i2) {
      const CellResult& cell = grid.at(i1, i2);
      const GroundState& g = cell.state;
      detail::append_g(out, grid.axis1_value(i1));
      out += ',';
      detail::append_g(out, grid.axis2_value(i2));
      out += ',';
      detail::append_g(out, g.x);
      out += ',';
      detail::append_g(out, std::abs(g.x));
      out += ',';
      detail::append_g(out, g.point.y);
      out += ',';
      detail::append_g(out, g.point.z);
      out += ',';
      detail::append_g(out, g.energy_per_atom);
      out += ',';
      detail::append_g(out, g.populations[0]);
      out += ',';
      detail::append_g(out, g.populations[1]);
      out += ',';
      detail::append_g(out, g.populations[2]);
      out += ',';
      out += g.phase == Phase::Superradiant ? "SR" : "N";
      out += ',';
      out += cell.trk_feasible ? '1' : '0';
      out += '\n';
    }
  }
  return out;
}

inline std::string boundary_csv(const std::vector<BoundarySegment>& segments) {
  std::string out = "axis1,axis2,jump,order\n";
  for (const auto& seg : segments) {
    detail::append_g(out, seg.axis1);
    out += ',';
    detail::append_g(out, seg.axis2);
    out += ',';
    detail::append_g(out, seg.jump);
    out += ',';
    out += to_string(seg.order);
    out += '\n';
  }
  return out;
}

inline std::string voxels_csv(const std::vector<Voxel>& voxels) {
  std::string out = "f01,f02,f12,x,abs_x,energy\n";
  for (const auto& v : voxels) {
    detail::append_g(out, v.f01);
    out += ',';
    detail::append_g(out, v.f02);
    out += ',';
    detail::append_g(out, v.f12);
    out += ',';
    detail::append_g(out, v.state.x);
    out += ',';
    detail::append_g(out, std::abs(v.state.x));
    out += ',';
    detail::append_g(out, v.state.energy_per_atom);
    out += '\n';
  }
  return out;
}

inline void write_cells_csv(const std::string& path, const PhaseGrid& grid) {
  write_text_file(path, cells_csv(grid));
}

inline void write_boundary_csv(const std::string& path,
                               const std::vector<BoundarySegment>& segments) {
  write_text_file(path, boundary_csv(segments));
}

inline void write_voxels_csv(const std::string& path, const std::vector<Voxel>& voxels) {
  write_text_file(path, voxels_csv(voxels));
}

}  // namespace srphase
