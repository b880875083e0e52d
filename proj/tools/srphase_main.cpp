// srphase — ground-state phase diagrams of three cavity-coupled levels with a
// diamagnetic term, plus the companion 1D quantum-well solver.
//
// Modes: point, scan2d, scan3d, trk, well-solve, well-fit, dicke-oracle.
// Exit codes: 0 success, 2 validation/usage error, 3 numerical failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <srphase/diagram.hpp>
#include <srphase/io.hpp>
#include <srphase/meanfield.hpp>
#include <srphase/model.hpp>
#include <srphase/qwell.hpp>

#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace srphase;

// A numerical no-result: computation ran fine, the answer is "not found".
struct numerical_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g9(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", v);
  return buffer;
}

struct Cli {
  CLI::App app{
      "Mean-field ground-state phase diagrams of N three-level systems in a "
      "cavity, with sum-rule feasibility and a 1D quantum-well companion"};

  std::string mode_positional, mode_flag, config_path, axis1{"f01"}, axis2{"f12"};
  std::string out, potential;
  double f01{}, f02{}, f12{}, D{}, omega10{1.0}, omega21{1.0};
  double omega01{}, omega02{}, omega12{}, fixed_f12{}, anharmonicity{};
  bool direct{false};
  bool have_fixed_f12{false};
  std::vector<double> range;
  int steps{}, threads{}, n_grid{2000};

  Cli() {
    app.name("srphase");
    app.add_option("MODE", mode_positional,
                   "point | scan2d | scan3d | trk | well-solve | well-fit | "
                   "dicke-oracle");
    app.add_option("--mode", mode_flag, "Mode (same choices as the positional)");
    app.add_option("--config", config_path, "Flat JSON config; flags win");
    app.add_option("--f01", f01, "Oscillator strength 0-1 (or fit target)");
    app.add_option("--f02", f02, "Oscillator strength 0-2 (or fit target)");
    app.add_option("--f12", f12, "Oscillator strength 1-2 (or fit target)");
    app.add_option("--D", D, "Diamagnetic amplitude, omega_cav units");
    app.add_option("--omega10", omega10, "0-1 splitting, omega_cav units");
    app.add_option("--omega21", omega21, "1-2 splitting, omega_cav units");
    app.add_flag("--direct", direct, "Couplings are Rabi amplitudes, not strengths");
    app.add_option("--omega01", omega01, "Rabi amplitude 0-1 (direct mode)");
    app.add_option("--omega02", omega02, "Rabi amplitude 0-2 (direct mode)");
    app.add_option("--omega12", omega12, "Rabi amplitude 1-2 (direct mode)");
    app.add_option("--axis1", axis1, "First scan axis: f01 | f02 | f12");
    app.add_option("--axis2", axis2, "Second scan axis: f01 | f02 | f12");
    app.add_option("--range", range,
                   "Scan range: lo hi (both axes / volume / bisection bracket) "
                   "or lo1 hi1 lo2 hi2")
        ->expected(2, 4);
    app.add_option("--steps", steps, "Nodes per axis (scan2d 201, scan3d 41)");
    app.add_option("--fixed-f12", fixed_f12, "Pinned f12 for an f01 x f02 plane");
    app.add_option("--out", out, "Output path prefix");
    app.add_option("--threads", threads, "Worker threads; 0 = machine cores");
    app.add_option("--n-grid", n_grid, "Interior grid points for the well solver");
    app.add_option("--anharmonicity", anharmonicity, "Fit target (E1-E0)/(E2-E1)");
    app.add_option("--potential", potential, "Potential file for well-solve");
  }

  bool flag_given(const std::string& name) const { return app.count(name) > 0; }
};

// Config keys mirror long flag names. "results" is tolerated so a summary
// file can be fed straight back in; "config" and "mode-positional" cannot.
void merge_config(Cli& cli, const json& cfg) {
  static const std::set<std::string> allowed = {
      "mode",    "f01",     "f02",     "f12",       "D",
      "omega10", "omega21", "direct",  "omega01",   "omega02",
      "omega12", "axis1",   "axis2",   "range",     "steps",
      "fixed-f12", "out",   "threads", "n-grid",    "anharmonicity",
      "potential", "results"};
  if (!cfg.is_object()) throw invalid_parameter("config must be a JSON object");
  for (const auto& item : cfg.items())
    if (!allowed.count(item.key()))
      throw invalid_parameter("unknown config key: " + item.key());

  auto number = [&](const char* key, const char* flag, double& slot) {
    if (!cfg.contains(key) || cli.flag_given(flag)) return;
    if (!cfg[key].is_number())
      throw invalid_parameter(std::string("config key ") + key + " must be a number");
    slot = cfg[key].get<double>();
  };
  auto integer = [&](const char* key, const char* flag, int& slot) {
    if (!cfg.contains(key) || cli.flag_given(flag)) return;
    if (!cfg[key].is_number_integer())
      throw invalid_parameter(std::string("config key ") + key + " must be an integer");
    slot = cfg[key].get<int>();
  };
  auto text = [&](const char* key, const char* flag, std::string& slot) {
    if (!cfg.contains(key) || cli.flag_given(flag)) return;
    if (!cfg[key].is_string())
      throw invalid_parameter(std::string("config key ") + key + " must be a string");
    slot = cfg[key].get<std::string>();
  };

  text("mode", "--mode", cli.mode_flag);
  number("f01", "--f01", cli.f01);
  number("f02", "--f02", cli.f02);
  number("f12", "--f12", cli.f12);
  number("D", "--D", cli.D);
  number("omega10", "--omega10", cli.omega10);
  number("omega21", "--omega21", cli.omega21);
  number("omega01", "--omega01", cli.omega01);
  number("omega02", "--omega02", cli.omega02);
  number("omega12", "--omega12", cli.omega12);
  if (cfg.contains("fixed-f12")) cli.have_fixed_f12 = true;
  number("fixed-f12", "--fixed-f12", cli.fixed_f12);
  number("anharmonicity", "--anharmonicity", cli.anharmonicity);
  text("axis1", "--axis1", cli.axis1);
  text("axis2", "--axis2", cli.axis2);
  text("out", "--out", cli.out);
  text("potential", "--potential", cli.potential);
  integer("steps", "--steps", cli.steps);
  integer("threads", "--threads", cli.threads);
  integer("n-grid", "--n-grid", cli.n_grid);
  if (cfg.contains("direct") && !cli.flag_given("--direct")) {
    if (!cfg["direct"].is_boolean())
      throw invalid_parameter("config key direct must be a boolean");
    cli.direct = cfg["direct"].get<bool>();
  }
  if (cfg.contains("range") && !cli.flag_given("--range")) {
    if (!cfg["range"].is_array())
      throw invalid_parameter("config key range must be an array of numbers");
    cli.range.clear();
    for (const auto& v : cfg["range"]) {
      if (!v.is_number()) throw invalid_parameter("range entries must be numbers");
      cli.range.push_back(v.get<double>());
    }
  }
}

std::string resolve_mode(const Cli& cli) {
  if (!cli.mode_positional.empty() && !cli.mode_flag.empty() &&
      cli.mode_positional != cli.mode_flag)
    throw invalid_parameter("conflicting modes: " + cli.mode_positional + " vs " +
                            cli.mode_flag);
  std::string mode = !cli.mode_positional.empty() ? cli.mode_positional : cli.mode_flag;
  if (mode.empty())
    throw invalid_parameter(
        "a mode is required: point, scan2d, scan3d, trk, well-solve, well-fit, "
        "or dicke-oracle");
  return mode;
}

// [lo1, hi1, lo2, hi2]; a two-value range applies to both axes.
std::array<double, 4> resolve_range4(const std::vector<double>& range) {
  if (range.empty()) return {0.0, 1.0, 0.0, 1.0};
  if (range.size() == 2) return {range[0], range[1], range[0], range[1]};
  if (range.size() == 4) return {range[0], range[1], range[2], range[3]};
  throw invalid_parameter("--range takes 2 or 4 values");
}

std::array<double, 2> resolve_range2(const std::vector<double>& range) {
  if (range.empty()) return {0.0, 1.0};
  if (range.size() == 2) return {range[0], range[1]};
  throw invalid_parameter("this mode takes a 2-value --range");
}

ModelParams base_params(const Cli& cli, bool use_fixed_f12) {
  ModelParams p;
  p.omega10 = cli.omega10;
  p.omega21 = cli.omega21;
  p.D = cli.D;
  if (cli.direct)
    p.coupling = DirectCoupling{cli.omega01, cli.omega02, cli.omega12};
  else
    p.coupling = TrkCoupling{
        cli.f01, cli.f02,
        use_fixed_f12 && cli.have_fixed_f12 ? cli.fixed_f12 : cli.f12};
  return p;
}

void write_summary(const std::string& out, json echo, json results) {
  echo["results"] = std::move(results);
  write_text_file(out + "_summary.json", echo.dump(2) + "\n");
}

json model_echo(const Cli& cli, const std::string& mode) {
  json j;
  j["mode"] = mode;
  j["omega10"] = cli.omega10;
  j["omega21"] = cli.omega21;
  j["D"] = cli.D;
  j["direct"] = cli.direct;
  if (cli.direct) {
    j["omega01"] = cli.omega01;
    j["omega02"] = cli.omega02;
    j["omega12"] = cli.omega12;
  } else {
    j["f01"] = cli.f01;
    j["f02"] = cli.f02;
    j["f12"] = cli.f12;
  }
  return j;
}

int run_point(const Cli& cli) {
  ModelParams p = base_params(cli, false);
  GroundState g = minimize_global(p);
  std::string trk = "n/a";
  json trk_results;
  if (const auto* c = std::get_if<TrkCoupling>(&p.coupling)) {
    TrkReport report = trk_check(*c);
    trk = report.feasible ? "feasible" : "infeasible";
    trk_results = {{"feasible", report.feasible},
                   {"ground_sum", report.ground_sum},
                   {"excited_sum", report.excited_sum}};
  }
  std::printf("phase=%s trk=%s\n", g.phase == Phase::Superradiant ? "SR" : "N",
              trk.c_str());
  if (!cli.out.empty()) {
    json results = {{"phase", g.phase == Phase::Superradiant ? "SR" : "N"},
                    {"x", g.x},
                    {"abs_x", std::abs(g.x)},
                    {"y", g.point.y},
                    {"z", g.point.z},
                    {"energy", g.energy_per_atom},
                    {"p0", g.populations[0]},
                    {"p1", g.populations[1]},
                    {"p2", g.populations[2]}};
    if (!trk_results.is_null()) results["trk"] = trk_results;
    write_summary(cli.out, model_echo(cli, "point"), results);
  }
  return 0;
}

int run_trk(const Cli& cli) {
  TrkReport report = trk_check(cli.f01, cli.f02, cli.f12);
  if (report.feasible) {
    std::printf("feasible: ground_sum=%s excited_sum=%s\n",
                g9(report.ground_sum).c_str(), g9(report.excited_sum).c_str());
  } else {
    std::string line = "infeasible:";
    bool ground = false, excited = false;
    for (const auto& v : report.violated_constraints) {
      ground = ground || v.rfind("ground", 0) == 0;
      excited = excited || v.rfind("excited", 0) == 0;
    }
    if (ground) line += " ground_sum=" + g9(report.ground_sum);
    if (excited) line += " excited_sum=" + g9(report.excited_sum);
    std::printf("%s\n", line.c_str());
  }
  if (!cli.out.empty()) {
    json echo = {{"mode", "trk"}, {"f01", cli.f01}, {"f02", cli.f02}, {"f12", cli.f12}};
    json results = {{"feasible", report.feasible},
                    {"ground_sum", report.ground_sum},
                    {"excited_sum", report.excited_sum},
                    {"violated", report.violated_constraints}};
    write_summary(cli.out, echo, results);
  }
  return 0;
}

int run_scan2d(const Cli& cli) {
  if (cli.direct)
    throw invalid_parameter("scan2d sweeps oscillator strengths; drop --direct");
  if (cli.out.empty()) throw invalid_parameter("scan2d requires --out");
  const auto r = resolve_range4(cli.range);
  ScanSpec spec;
  spec.base = base_params(cli, true);
  const int steps = cli.steps > 0 ? cli.steps : 201;
  spec.axis1 = {axis_from_string(cli.axis1), r[0], r[1], steps};
  spec.axis2 = {axis_from_string(cli.axis2), r[2], r[3], steps};
  spec.threads = cli.threads;

  PhaseGrid grid = scan_2d(spec);
  std::vector<BoundarySegment> boundary = classify_order(grid);
  write_cells_csv(cli.out + "_cells.csv", grid);
  write_boundary_csv(cli.out + "_boundary.csv", boundary);

  std::size_t first = 0, second = 0, ambiguous = 0;
  for (const auto& s : boundary) {
    if (s.order == TransitionOrder::First) ++first;
    if (s.order == TransitionOrder::Second) ++second;
    if (s.order == TransitionOrder::Ambiguous) ++ambiguous;
  }
  const std::size_t overlap = sr_trk_count(grid);

  json echo = model_echo(cli, "scan2d");
  echo["axis1"] = cli.axis1;
  echo["axis2"] = cli.axis2;
  echo["range"] = {r[0], r[1], r[2], r[3]};
  echo["steps"] = steps;
  if (const auto* c = std::get_if<TrkCoupling>(&spec.base.coupling))
    echo["f12"] = c->f12;  // fixed-f12 folds into the base strength
  json results = {{"cells", grid.cells.size()},
                  {"sr_trk_cells", overlap},
                  {"boundary",
                   {{"first", first}, {"second", second}, {"ambiguous", ambiguous}}}};
  write_summary(cli.out, echo, results);
  std::printf("SR∩TRK=%zu cells\n", overlap);
  return 0;
}

int run_scan3d(const Cli& cli) {
  if (cli.direct)
    throw invalid_parameter("scan3d sweeps oscillator strengths; drop --direct");
  if (cli.out.empty()) throw invalid_parameter("scan3d requires --out");
  const auto r = resolve_range2(cli.range);
  VolumeSpec spec;
  spec.base = base_params(cli, false);
  spec.base.coupling = TrkCoupling{};
  spec.min = r[0];
  spec.max = r[1];
  spec.steps = cli.steps > 0 ? cli.steps : 41;
  spec.threads = cli.threads;

  std::vector<Voxel> voxels = scan_3d(spec);
  write_voxels_csv(cli.out + "_voxels.csv", voxels);

  json echo;
  echo["mode"] = "scan3d";
  echo["omega10"] = cli.omega10;
  echo["omega21"] = cli.omega21;
  echo["D"] = cli.D;
  echo["range"] = {r[0], r[1]};
  echo["steps"] = spec.steps;
  json results = {{"voxels", voxels.size()},
                  {"grid", static_cast<std::size_t>(spec.steps) * spec.steps * spec.steps}};
  write_summary(cli.out, echo, results);
  std::printf("SR∩TRK=%zu voxels\n", voxels.size());
  return 0;
}

int run_dicke(const Cli& cli) {
  const auto r = resolve_range2(cli.range);
  ModelParams base;
  base.omega10 = cli.omega10;
  base.omega21 = cli.omega21;
  base.D = cli.D;
  base.coupling = DirectCoupling{0.0, cli.omega02, cli.omega12};
  auto seg = dicke_critical(base, r[0], r[1]);
  if (!seg) throw numerical_failure("no phase boundary inside the bisection range");
  std::printf("critical=%s order=%s\n", g9(seg->axis2).c_str(), to_string(seg->order));
  if (!cli.out.empty()) {
    json echo;
    echo["mode"] = "dicke-oracle";
    echo["omega10"] = cli.omega10;
    echo["omega21"] = cli.omega21;
    echo["D"] = cli.D;
    echo["omega02"] = cli.omega02;
    echo["omega12"] = cli.omega12;
    echo["range"] = {r[0], r[1]};
    json results = {{"critical", seg->axis2},
                    {"order", to_string(seg->order)},
                    {"jump", seg->jump}};
    write_summary(cli.out, echo, results);
  }
  return 0;
}

int run_well_solve(const Cli& cli) {
  if (cli.potential.empty()) throw invalid_parameter("well-solve requires --potential");
  PotentialSpec pot = read_potential_file(cli.potential);
  WellSolution sol = solve_bound_states(pot, cli.n_grid);
  std::printf("E0=%s E1=%s E2=%s f01=%s f02=%s f12=%s anharmonicity=%s bound=%d\n",
              g9(sol.energies[0]).c_str(), g9(sol.energies[1]).c_str(),
              g9(sol.energies[2]).c_str(), g9(sol.f01).c_str(), g9(sol.f02).c_str(),
              g9(sol.f12).c_str(), g9(sol.anharmonicity).c_str(), sol.bound_count);
  if (!cli.out.empty()) {
    json echo = {{"mode", "well-solve"},
                 {"potential", cli.potential},
                 {"n-grid", cli.n_grid}};
    json results = {{"energies", {sol.energies[0], sol.energies[1], sol.energies[2]}},
                    {"dipoles", {{"d01", sol.d01}, {"d02", sol.d02}, {"d12", sol.d12}}},
                    {"strengths", {{"f01", sol.f01}, {"f02", sol.f02}, {"f12", sol.f12}}},
                    {"anharmonicity", sol.anharmonicity},
                    {"bound_count", sol.bound_count}};
    write_summary(cli.out, echo, results);
    write_wavefunctions_csv(cli.out + "_wavefunctions.csv", sol);
  }
  return 0;
}

int run_well_fit(const Cli& cli) {
  FitTargets targets{cli.f01, cli.f02, cli.f12, cli.anharmonicity};
  FitResult fit = fit_potential(targets);
  std::printf("residual=%s success=%s\n", g9(fit.residual).c_str(),
              fit.success ? "true" : "false");
  if (!cli.out.empty()) {
    json echo = {{"mode", "well-fit"},
                 {"f01", cli.f01},
                 {"f02", cli.f02},
                 {"f12", cli.f12},
                 {"anharmonicity", cli.anharmonicity}};
    json results = {{"residual", fit.residual},
                    {"success", fit.success},
                    {"parameters",
                     {{"width1", fit.parameters[0]},
                      {"barrier_width", fit.parameters[1]},
                      {"width2", fit.parameters[2]},
                      {"barrier_height", fit.parameters[3]},
                      {"depth_offset", fit.parameters[4]}}},
                    {"achieved",
                     {{"f01", fit.achieved.f01},
                      {"f02", fit.achieved.f02},
                      {"f12", fit.achieved.f12},
                      {"anharmonicity", fit.achieved.anharmonicity}}}};
    write_summary(cli.out, echo, results);
    write_potential_file(cli.out + "_potential.txt", fit.potential);
  }
  if (!fit.success) {
    std::fprintf(stderr,
                 "fit failed: best residual %s is above 1e-2; outputs hold the "
                 "best-effort geometry\n",
                 g9(fit.residual).c_str());
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  try {
    cli.app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::printf("%s", cli.app.help().c_str());
    return 0;
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n%s", e.what(), cli.app.help().c_str());
    return 2;
  }

  try {
    cli.have_fixed_f12 = cli.flag_given("--fixed-f12");
    if (!cli.config_path.empty())
      merge_config(cli, json::parse(read_text_file(cli.config_path)));
    const std::string mode = resolve_mode(cli);
    if (mode == "point") return run_point(cli);
    if (mode == "trk") return run_trk(cli);
    if (mode == "scan2d") return run_scan2d(cli);
    if (mode == "scan3d") return run_scan3d(cli);
    if (mode == "dicke-oracle") return run_dicke(cli);
    if (mode == "well-solve") return run_well_solve(cli);
    if (mode == "well-fit") return run_well_fit(cli);
    throw invalid_parameter("unknown mode: " + mode);
  } catch (const insufficient_spectrum& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const numerical_failure& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
}
