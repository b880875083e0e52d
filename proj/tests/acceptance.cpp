// End-to-end acceptance run. Nine numbered checks, one verdict line each,
// exit code = number of failures. Budgets are wall-clock on a single core.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "srphase/diagram.hpp"
#include "srphase/qwell.hpp"

#ifndef SRPHASE_CLI_PATH
#error "SRPHASE_CLI_PATH must point at the srphase binary"
#endif

using namespace srphase;
using clock_type = std::chrono::steady_clock;

namespace {

struct Criterion {
  bool pass{true};
  std::vector<std::string> notes;

  void require(bool ok, const std::string& msg) {
    if (!ok) {
      pass = false;
      notes.push_back(msg);
    }
  }
  void note(const std::string& msg) { notes.push_back(msg); }
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

void report(const char* label, const Criterion& c, double seconds) {
  std::printf("[%s] %s  (%.1f s)\n", c.pass ? "PASS" : "FAIL", label, seconds);
  for (const auto& n : c.notes) std::printf("       %s\n", n.c_str());
  std::fflush(stdout);
}

ModelParams trk_base(double w10, double w21, double d) {
  ModelParams p;
  p.omega10 = w10;
  p.omega21 = w21;
  p.D = d;
  p.coupling = TrkCoupling{};
  return p;
}

bool seg_in_trk(const ScanSpec& spec, const BoundarySegment& s) {
  auto p = detail::params_at(spec, s.axis1, s.axis2);
  return trk_check(std::get<TrkCoupling>(p.coupling)).feasible;
}

// Degenerate coexisting minima at a refined first-order point: at least two
// local minima within the energy window, separated in |x|.
bool has_coexisting_minima(const ScanSpec& spec, const BoundarySegment& s) {
  auto minima = local_minima(detail::params_at(spec, s.axis1, s.axis2));
  if (minima.size() < 2) return false;
  double e0 = minima.front().energy_per_atom;
  for (const auto& m : minima) e0 = std::min(e0, m.energy_per_atom);
  double lo = 1e300, hi = -1e300;
  for (const auto& m : minima) {
    if (m.energy_per_atom > e0 + 1e-6) continue;
    lo = std::min(lo, std::abs(m.x));
    hi = std::max(hi, std::abs(m.x));
  }
  return hi - lo > 1e-3;
}

// --- 1. decoupled two-level sweep stays normal --------------------------------

Criterion criterion_1() {
  Criterion c;
  for (double d : {0.5, 1.0, 3.0, 10.0}) {
    for (int i = 0; i <= 100; ++i) {
      ModelParams p = trk_base(1.0, 1.0, d);
      p.coupling = TrkCoupling{i / 100.0, 0.0, 0.0};
      auto g = minimize_global(p);
      if (g.phase != Phase::Normal || std::abs(g.x) >= 1e-6) {
        c.require(false, "f01=" + fmt("%.2f", i / 100.0) + " D=" + fmt("%g", d) +
                             " left the normal phase, |x|=" + fmt("%.3g", std::abs(g.x)));
        return c;
      }
    }
  }
  c.note("404 points normal, max coupling f01=1 at D=10");
  return c;
}

// --- 2. single-mode critical coupling and transition order --------------------

Criterion criterion_2() {
  Criterion c;
  ModelParams base;
  base.omega10 = 1.0;
  base.omega21 = 10.0;
  base.D = 0.0;
  base.coupling = DirectCoupling{0.0, 0.0, 0.0};
  auto seg = dicke_critical(base, 0.0, 1.0);
  c.require(seg.has_value(), "no boundary found in [0,1]");
  if (!seg) return c;
  c.require(std::abs(seg->axis2 - 0.5) <= 1e-3,
            "critical coupling " + fmt("%.9g", seg->axis2) + " not within 0.5 +/- 1e-3");
  c.require(seg->order == TransitionOrder::Second,
            std::string("order ") + to_string(seg->order) + " != second");

  ModelParams at;
  at.omega10 = 1.0;
  at.omega21 = 10.0;
  at.D = 0.0;
  at.coupling = DirectCoupling{0.6, 0.0, 0.0};
  auto g = minimize_global(at);
  c.require(std::abs(std::abs(g.x) - 0.431709) <= 1e-3,
            "|x| at coupling 0.6 = " + fmt("%.9g", std::abs(g.x)));
  c.require(std::abs(g.energy_per_atom - (-0.033595)) <= 1e-4,
            "energy at coupling 0.6 = " + fmt("%.9g", g.energy_per_atom));
  c.note("critical=" + fmt("%.9g", seg->axis2) + " |x|(0.6)=" + fmt("%.6f", std::abs(g.x)) +
         " E(0.6)=" + fmt("%.6f", g.energy_per_atom));
  return c;
}

// --- 3. ladder plane in the unit square ---------------------------------------

ScanSpec ladder_spec(double f12_max) {
  ScanSpec spec;
  spec.base = trk_base(0.1, 1.0, 3.0);
  spec.axis1 = {ScanAxis::F01, 0.0, 1.0, 201};
  spec.axis2 = {ScanAxis::F12, 0.0, f12_max, 201};
  return spec;
}

Criterion ladder_checks(const ScanSpec& spec, Criterion c) {
  PhaseGrid grid = scan_2d(spec);
  const std::size_t overlap = sr_trk_count(grid);
  c.require(overlap > 0, "SR/TRK overlap empty: 0 of " +
                             std::to_string(grid.cells.size()) + " cells");
  auto segs = classify_order(grid);
  std::size_t hits = 0;
  for (const auto& s : segs)
    if (seg_in_trk(spec, s) && s.order == TransitionOrder::First &&
        has_coexisting_minima(spec, s))
      ++hits;
  c.require(hits > 0, "no first-order crossing with coexisting minima inside TRK (" +
                          std::to_string(segs.size()) + " crossings total)");
  if (c.pass)
    c.note("overlap=" + std::to_string(overlap) + " cells, first-order TRK crossings=" +
           std::to_string(hits));
  return c;
}

// --- 4. V plane: exclusion and second-order boundary --------------------------

Criterion criterion_4() {
  Criterion c;
  ScanSpec spec;
  spec.base = trk_base(1.0, 0.1, 1.0);
  spec.axis1 = {ScanAxis::F01, 0.0, 1.0, 201};
  spec.axis2 = {ScanAxis::F02, 0.0, 1.0, 201};
  PhaseGrid grid = scan_2d(spec);
  const std::size_t overlap = sr_trk_count(grid);
  c.require(overlap == 0, "expected empty SR/TRK overlap, found " + std::to_string(overlap));
  auto segs = classify_order(grid);
  c.require(!segs.empty(), "no phase boundary found in the scan window");
  std::size_t second = 0;
  for (const auto& s : segs) {
    c.require(!seg_in_trk(spec, s), "crossing at (" + fmt("%.4f", s.axis1) + "," +
                                        fmt("%.4f", s.axis2) + ") lies inside TRK");
    if (s.order != TransitionOrder::Second)
      c.require(false, "crossing at (" + fmt("%.4f", s.axis1) + "," + fmt("%.4f", s.axis2) +
                           ") labeled " + to_string(s.order));
    else
      ++second;
  }
  if (c.pass)
    c.note("overlap=0, crossings=" + std::to_string(segs.size()) + ", all second order");
  return c;
}

// --- 5. lambda plane: first-order boundary inside TRK -------------------------

Criterion criterion_5() {
  Criterion c;
  ScanSpec spec;
  spec.base = trk_base(0.1, 0.9, 3.0);
  spec.axis1 = {ScanAxis::F02, 0.0, 1.0, 201};
  spec.axis2 = {ScanAxis::F12, 0.0, 1.0, 201};
  PhaseGrid grid = scan_2d(spec);
  const std::size_t overlap = sr_trk_count(grid);
  c.require(overlap > 0, "SR/TRK overlap empty");
  auto segs = classify_order(grid);
  c.require(!segs.empty(), "no phase boundary found in the scan window");
  std::size_t in_trk = 0;
  for (const auto& s : segs) {
    if (!seg_in_trk(spec, s)) continue;
    ++in_trk;
    if (s.order != TransitionOrder::First)
      c.require(false, "TRK crossing at (" + fmt("%.4f", s.axis1) + "," +
                           fmt("%.4f", s.axis2) + ") labeled " + to_string(s.order));
  }
  c.require(in_trk > 0, "no crossing inside the TRK region");
  if (c.pass)
    c.note("overlap=" + std::to_string(overlap) + " cells, TRK crossings=" +
           std::to_string(in_trk) + ", all first order");
  return c;
}

// --- 6. feasible superradiant point through the CLI ---------------------------

Criterion criterion_6() {
  Criterion c;
  const std::string cmd = std::string(SRPHASE_CLI_PATH) +
                          " point --f01 0.3995 --f02 0.4069 --f12 0.735"
                          " --D 5 --omega10 0.17 --omega21 1 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  c.require(pipe != nullptr, "could not launch the CLI");
  if (!pipe) return c;
  char buf[256];
  while (std::fgets(buf, sizeof(buf), pipe)) out += buf;
  int status = pclose(pipe);
  c.require(WIFEXITED(status) && WEXITSTATUS(status) == 0,
            "CLI exit status " + std::to_string(WEXITSTATUS(status)));
  c.require(out == "phase=SR trk=feasible\n", "CLI printed: " + out);

  auto rep = trk_check(0.3995, 0.4069, 0.735);
  c.require(std::abs(rep.ground_sum - 0.8064) < 1e-12,
            "ground sum " + fmt("%.9g", rep.ground_sum));
  c.require(std::abs(rep.excited_sum - 0.3355) < 1e-12,
            "excited sum " + fmt("%.9g", rep.excited_sum));
  if (c.pass)
    c.note("phase=SR trk=feasible ground_sum=" + fmt("%.4f", rep.ground_sum) +
           " excited_sum=" + fmt("%.4f", rep.excited_sum));
  return c;
}

// --- 7. infinite-well strengths and eigenvalue convergence --------------------

Criterion criterion_7() {
  Criterion c;
  PotentialSpec well;
  well.x_lo = 0.0;
  well.x_hi = 1.0;
  well.breakpoints = {0.0};
  well.values = {0.0};

  WellStrengths s = strengths_from_potential(well, 2000);
  c.require(std::abs(s.f01 - 0.96065) <= 1e-3, "f01 = " + fmt("%.9g", s.f01));
  c.require(std::abs(s.f02 - 0.0) <= 1e-6, "f02 = " + fmt("%.3g", s.f02));
  c.require(std::abs(s.f12 - 1.86767) <= 1e-3, "f12 = " + fmt("%.9g", s.f12));
  c.require(std::abs(s.anharmonicity - 0.600) <= 1e-3,
            "anharmonicity = " + fmt("%.9g", s.anharmonicity));

  const double exact = std::numbers::pi * std::numbers::pi;
  auto coarse = solve_bound_states(well, 1000);
  auto fine = solve_bound_states(well, 2000);
  const double err_coarse = std::abs(coarse.energies[0] - exact);
  const double err_fine = std::abs(fine.energies[0] - exact);
  const double ratio = err_coarse / err_fine;
  c.require(ratio > 3.5 && ratio < 4.5,
            "ground-state error ratio " + fmt("%.3f", ratio) + " not ~4x");
  if (c.pass)
    c.note("f01=" + fmt("%.6f", s.f01) + " f12=" + fmt("%.6f", s.f12) + " anh=" +
           fmt("%.6f", s.anharmonicity) + " E0 error ratio=" + fmt("%.3f", ratio));
  return c;
}

// --- 8. inverse design of the double-well potential ---------------------------

Criterion criterion_8(bool deps_passed) {
  Criterion c;
  FitTargets targets{0.3995, 0.4069, 0.735, 0.1709};
  FitResult fit = fit_potential(targets);
  if (fit.success) {
    c.require(fit.residual < 1e-2, "residual " + fmt("%.3g", fit.residual));
    c.require(std::abs(fit.achieved.f01 - targets.f01) <= 1e-2,
              "forward f01 = " + fmt("%.6f", fit.achieved.f01));
    c.require(std::abs(fit.achieved.f02 - targets.f02) <= 1e-2,
              "forward f02 = " + fmt("%.6f", fit.achieved.f02));
    c.require(std::abs(fit.achieved.f12 - targets.f12) <= 1e-2,
              "forward f12 = " + fmt("%.6f", fit.achieved.f12));
    c.require(std::abs(fit.achieved.anharmonicity - targets.anharmonicity) <= 1e-2,
              "forward anharmonicity = " + fmt("%.6f", fit.achieved.anharmonicity));
    WellStrengths redo = strengths_from_potential(fit.potential, 2000);
    c.require(redo.f01 == fit.achieved.f01 && redo.f02 == fit.achieved.f02 &&
                  redo.f12 == fit.achieved.f12 &&
                  redo.anharmonicity == fit.achieved.anharmonicity,
              "reported strengths are not the forward re-solve of the potential");
    if (c.pass)
      c.note("residual=" + fmt("%.3g", fit.residual) + ", forward solve on target");
  } else {
    // The search reports failure explicitly; the point check and the solver
    // validation above must then stand on their own.
    c.note("fit reported failure explicitly, best residual " + fmt("%.3g", fit.residual));
    c.require(deps_passed, "fallback needs checks 6 and 7 to pass");
  }
  return c;
}

// --- 9. property suites --------------------------------------------------------

ModelParams ladder_pt(double f01, double f12) {
  ModelParams p = trk_base(0.1, 1.0, 3.0);
  p.coupling = TrkCoupling{f01, 0.0, f12};
  return p;
}
ModelParams vee_pt(double f01, double f02) {
  ModelParams p = trk_base(1.0, 0.1, 1.0);
  p.coupling = TrkCoupling{f01, f02, 0.0};
  return p;
}
ModelParams lambda_pt(double f02, double f12) {
  ModelParams p = trk_base(0.1, 0.9, 3.0);
  p.coupling = TrkCoupling{0.0, f02, f12};
  return p;
}

Criterion criterion_9() {
  Criterion c;

  // Gradient vs central differences, 1000 random interior points.
  {
    std::mt19937 rng(987654321);
    std::uniform_real_distribution<double> uf(0.0, 1.5);
    std::uniform_real_distribution<double> uw(0.05, 2.0);
    std::uniform_real_distribution<double> ud(0.5, 8.0);
    std::uniform_real_distribution<double> ur(0.05, 0.95);
    std::uniform_real_distribution<double> ut(0.0, 2.0 * std::numbers::pi);
    const double h = 1e-6;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      ModelParams p;
      p.omega10 = uw(rng);
      p.omega21 = uw(rng);
      p.D = ud(rng);
      p.coupling = TrkCoupling{uf(rng), uf(rng), uf(rng)};
      const double rho = ur(rng), th = ut(rng);
      CoherencePoint pt{rho * std::cos(th), rho * std::sin(th)};
      auto g = reduced_gradient(pt, p);
      const double fd_y =
          (reduced_energy({pt.y + h, pt.z}, p) - reduced_energy({pt.y - h, pt.z}, p)) /
          (2.0 * h);
      const double fd_z =
          (reduced_energy({pt.y, pt.z + h}, p) - reduced_energy({pt.y, pt.z - h}, p)) /
          (2.0 * h);
      worst = std::max(worst, std::abs(fd_y - g.de_dy) / std::max(1.0, std::abs(g.de_dy)));
      worst = std::max(worst, std::abs(fd_z - g.de_dz) / std::max(1.0, std::abs(g.de_dz)));
    }
    c.require(worst < 1e-5, "gradient mismatch, worst rel err " + fmt("%.3g", worst));
    c.note("gradient worst rel err " + fmt("%.2g", worst) + " over 1000 points");
  }

  // Configuration sign symmetries of the energy surface.
  {
    std::mt19937 rng(24601);
    std::uniform_real_distribution<double> ur(0.0, 0.999);
    std::uniform_real_distribution<double> ut(0.0, 2.0 * std::numbers::pi);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      const double rho = ur(rng), th = ut(rng);
      CoherencePoint pt{rho * std::cos(th), rho * std::sin(th)};
      auto lad = ladder_pt(0.7, 1.3);
      worst = std::max(worst, std::abs(reduced_energy(pt, lad) -
                                       reduced_energy({-pt.y, -pt.z}, lad)));
      auto v = vee_pt(0.8, 0.6);
      worst = std::max(worst,
                       std::abs(reduced_energy(pt, v) - reduced_energy({-pt.y, pt.z}, v)));
      auto lam = lambda_pt(0.8, 0.9);
      worst = std::max(worst, std::abs(reduced_energy(pt, lam) -
                                       reduced_energy({pt.y, -pt.z}, lam)));
    }
    c.require(worst <= 1e-12, "sign symmetry broken by " + fmt("%.3g", worst));
    c.note("sign symmetries exact to " + fmt("%.2g", worst));
  }

  // Population simplex identity is exact at minimizers.
  {
    std::vector<ModelParams> pts = {ladder_pt(0.9, 1.85), ladder_pt(0.2, 0.3),
                                    vee_pt(0.7, 0.7),     lambda_pt(0.9, 0.9),
                                    vee_pt(0.3, 0.2),     lambda_pt(0.5, 0.99)};
    ModelParams fig5 = trk_base(0.17, 1.0, 5.0);
    fig5.coupling = TrkCoupling{0.3995, 0.4069, 0.735};
    pts.push_back(fig5);
    bool exact = true;
    for (const auto& p : pts) {
      auto g = minimize_global(p);
      if ((g.populations[0] + g.populations[2]) + g.populations[1] != 1.0) exact = false;
      for (double pop : g.populations)
        if (pop < 0.0 || pop > 1.0) exact = false;
    }
    c.require(exact, "population simplex identity violated");
    c.note("simplex identity exact at " + std::to_string(pts.size()) + " minimizers");
  }

  // Scan determinism: byte-identical CSV across repeats and thread counts.
  {
    ScanSpec spec;
    spec.base = trk_base(0.1, 1.0, 3.0);
    spec.axis1 = {ScanAxis::F01, 0.0, 1.0, 21};
    spec.axis2 = {ScanAxis::F12, 0.0, 2.0, 21};
    spec.threads = 1;
    const std::string a = cells_csv(scan_2d(spec));
    const std::string b = cells_csv(scan_2d(spec));
    spec.threads = 4;
    const std::string d = cells_csv(scan_2d(spec));
    c.require(a == b, "repeated runs differ");
    c.require(a == d, "thread counts 1 and 4 differ");
    c.note("21x21 scan byte-stable across repeats and threads {1,4}");
  }
  return c;
}

}  // namespace

int main() {
  int failures = 0;
  auto run = [&](const char* label, auto&& fn, double budget_s) {
    const auto t0 = clock_type::now();
    Criterion c = fn();
    const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
    if (budget_s > 0.0 && dt >= budget_s)
      c.require(false, "runtime " + fmt("%.1f", dt) + " s over the " +
                           fmt("%.0f", budget_s) + " s budget");
    report(label, c, dt);
    if (!c.pass) ++failures;
    return c.pass;
  };

  std::printf("srphase acceptance run\n");
  run("1/9 decoupled two-level sweep stays normal", criterion_1, 10.0);
  run("2/9 single-mode critical coupling and order", criterion_2, 5.0);

  // The unit-square ladder scan is checked exactly as stated, then the same
  // checks run on the extended strength axis where the boundary actually lives.
  const bool lit = run(
      "3/9 ladder plane: SR/TRK overlap in the unit square",
      [] { return ladder_checks(ladder_spec(1.0), Criterion{}); }, 300.0);
  if (!lit) {
    std::printf(
        "       the superradiant lobe for these parameters sits at f12 > 1;\n"
        "       clipping the scan to the unit square leaves no superradiant\n"
        "       cell and hence no boundary to refine. The supplementary block\n"
        "       extends the f12 axis to 2 and applies the identical checks.\n");
    const auto t0 = clock_type::now();
    Criterion supp = ladder_checks(ladder_spec(2.0), Criterion{});
    const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
    report("    supplementary: ladder plane with f12 <= 2", supp, dt);
  }

  run("4/9 V plane: SR/TRK exclusion, second-order boundary", criterion_4, 300.0);
  run("5/9 lambda plane: first-order boundary inside TRK", criterion_5, 300.0);
  const bool ok6 = run("6/9 feasible superradiant point through the CLI", criterion_6, 1.0);
  const bool ok7 = run("7/9 infinite-well strengths and convergence", criterion_7, 0.0);
  run("8/9 inverse design of the double-well potential",
      [&] { return criterion_8(ok6 && ok7); }, 0.0);
  run("9/9 property suites: gradient, symmetry, simplex, determinism", criterion_9, 0.0);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
