// noether: command-line front end for symmetry checks, conservation laws,
// extremals and multiplier sweeps.
//
// Exit codes: 0 pass, 1 check failed, 2 input error, 3 integration error,
// 4 shooting error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noether/aircraft.hpp"
#include "noether/io.hpp"
#include "noether/pareto.hpp"
#include "noether/version.hpp"

namespace {

using noether::io::InputError;
using noether::io::json;

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;
constexpr int kIntegrationError = 3;
constexpr int kShootingError = 4;

struct RunConfig {
  std::string subcommand;
  std::string problemPath;
  std::string groupPath;
  std::string samplesPath;
  std::string outPath;
  std::string csvPath;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string form = "auto";
  bool serial = false;
  std::string x0;
  std::string psi0;
  std::string lambda;
  std::optional<double> costMultiplier;
  std::size_t steps = 1000;
  std::string control = "grid";
  std::string controlExpr;
  std::string switchingExpr;
  std::size_t gridResolution = 64;
  std::size_t gridRefinements = 20;
  std::size_t grid = 11;
  bool dedupe = false;
  bool shootCostate = false;
  std::size_t maxIterations = 50;
  std::string dir = ".";
  noether::aircraft::AircraftConfig aircraft;
};

json echo(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  auto put = [&](const char* key, const std::string& v) {
    if (!v.empty()) j[key] = v;
  };
  put("problem", c.problemPath);
  put("group", c.groupPath);
  put("samplesConfig", c.samplesPath);
  put("out", c.outPath);
  put("csv", c.csvPath);
  if (c.samples) j["samples"] = *c.samples;
  if (c.seed) j["seed"] = *c.seed;
  if (c.tolerance) j["tolerance"] = *c.tolerance;
  j["form"] = c.form;
  j["serial"] = c.serial;
  put("x0", c.x0);
  put("psi0", c.psi0);
  put("lambda", c.lambda);
  if (c.costMultiplier) j["costMultiplier"] = *c.costMultiplier;
  j["steps"] = c.steps;
  j["control"] = c.control;
  put("controlExpr", c.controlExpr);
  put("switchingExpr", c.switchingExpr);
  if (c.control == "grid") j["gridResolution"] = c.gridResolution;
  return j;
}

json runHeader(const RunConfig& c) { return {{"tool", "noether"}, {"version", noether::kVersion}, {"config", echo(c)}}; }

std::string csvComment(const RunConfig& c, const std::string& label) {
  std::string out = std::string("noether ") + noether::kVersion;
  if (!label.empty()) out += " " + label;
  return out + " config=" + echo(c).dump();
}

void emitJson(const RunConfig& c, json body) {
  body["run"] = runHeader(c);
  if (c.outPath.empty()) {
    std::cout << body.dump(2) << '\n';
  } else {
    noether::io::writeJsonFile(c.outPath, body);
  }
}

template <typename Writer>
void emitText(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write(out);
}

std::vector<double> parseList(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(what + ": '" + item + "' is not a number");
    }
  }
  return out;
}

std::vector<std::string> splitExprs(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(item);
  return out;
}

struct LoadedProblem {
  noether::ControlProblem problem;
  json raw;
};

LoadedProblem loadProblem(const std::string& path) {
  json raw = noether::io::readJsonFile(path);
  return {noether::io::problemFromJson(raw), raw};
}

noether::ProblemForm resolveForm(const noether::ControlProblem& p, const std::string& form) {
  if (form == "P") return noether::ProblemForm::P;
  if (form == "P1") return noether::ProblemForm::P1;
  return !p.constraints.empty() || p.costCount() == 1 ? noether::ProblemForm::P1 : noether::ProblemForm::P;
}

noether::Hamiltonian hamiltonianFor(const noether::ControlProblem& p, noether::ProblemForm form) {
  return form == noether::ProblemForm::P1 ? noether::buildHamiltonianP1(p) : noether::buildHamiltonianP(p);
}

noether::Multipliers multipliersFor(const noether::ControlProblem& p, noether::ProblemForm form, const RunConfig& c) {
  const noether::Signature sig = noether::signatureOf(p, form);
  noether::Multipliers m;
  if (form == noether::ProblemForm::P1) m.psi0 = c.costMultiplier.value_or(-1.0);
  if (!c.lambda.empty()) {
    m.lambda = parseList(c.lambda, "--lambda");
  } else if (form == noether::ProblemForm::P) {
    m.lambda.assign(sig.multiplierCount, -1.0 / static_cast<double>(sig.multiplierCount));
  } else {
    m.lambda.assign(sig.multiplierCount, 0.0);
  }
  m.validate(sig);
  return m;
}

noether::AnalyticLaw aircraftLawFor(const noether::ControlProblem& p, noether::ProblemForm form) {
  if (p.n != 5 || p.r != 2 || !p.constants.count("c1") || !p.constants.count("c2"))
    throw InputError("--control aircraft needs the aircraft problem (n = 5, r = 2, constants c1 and c2)");
  if (p.omega[0].lo != 0.0 || !p.omega[0].bounded() || !p.omega[1].bounded())
    throw InputError("--control aircraft needs u1 in [0, u1max] and a bounded thrust-angle interval");
  noether::aircraft::AircraftConfig cfg;
  cfg.c1 = p.constants.at("c1");
  cfg.c2 = p.constants.at("c2");
  cfg.u1max = p.omega[0].hi;
  cfg.u2lo = p.omega[1].lo;
  cfg.u2hi = p.omega[1].hi;
  cfg.horizon = p.b - p.a;
  return noether::aircraft::analyticControlLaw(
      cfg, form == noether::ProblemForm::P1 ? noether::aircraft::FuelWeight::Psi0 : noether::aircraft::FuelWeight::Lambda1);
}

noether::ControlLaw controlLawFor(const noether::ControlProblem& p, noether::ProblemForm form, const RunConfig& c) {
  if (c.control == "grid") return noether::GridSearch{c.gridResolution, c.gridRefinements};
  if (c.control == "aircraft") return aircraftLawFor(p, form);
  if (c.control != "expr") throw InputError("--control must be grid, aircraft or expr");
  if (c.controlExpr.empty()) throw InputError("--control expr needs --control-expr");
  std::vector<noether::Expr> exprs;
  try {
    for (const auto& text : splitExprs(c.controlExpr)) exprs.push_back(noether::parse(text));
    std::optional<noether::Expr> switching;
    if (!c.switchingExpr.empty()) switching = noether::parse(c.switchingExpr);
    return noether::analyticLawFromExprs(exprs, noether::signatureOf(p, form), switching);
  } catch (const noether::ParseError& err) {
    throw InputError(std::string("--control-expr: ") + err.what());
  }
}

std::vector<double> initialState(const noether::ControlProblem& p, const RunConfig& c) {
  std::vector<double> x;
  if (!c.x0.empty()) x = parseList(c.x0, "--x0");
  else if (p.alpha) x = *p.alpha;
  else throw InputError("no initial state: pass --x0 or give the problem an 'alpha'");
  if (x.size() != p.n) throw InputError("initial state must have " + std::to_string(p.n) + " entries");
  return x;
}

std::optional<std::vector<double>> initialCostate(const LoadedProblem& lp, const RunConfig& c) {
  std::vector<double> psi;
  if (!c.psi0.empty()) psi = parseList(c.psi0, "--psi0");
  else if (lp.raw.contains("psiA")) psi = lp.raw.at("psiA").get<std::vector<double>>();
  else return std::nullopt;
  if (psi.size() != lp.problem.n) throw InputError("initial costate must have " + std::to_string(lp.problem.n) + " entries");
  return psi;
}

std::vector<double> requiredCostate(const LoadedProblem& lp, const RunConfig& c) {
  auto psi = initialCostate(lp, c);
  if (!psi) throw InputError("no initial costate: pass --psi0 or give the problem a 'psiA'");
  return *psi;
}

// Missing intervals default to the bounded control boxes and to half the
// group's parameter range for s.
noether::SampleConfig sampleConfigFor(const noether::ControlProblem& p, const noether::OneParamGroup& g,
                                      const RunConfig& c) {
  noether::SampleConfig cfg;
  if (!c.samplesPath.empty()) cfg = noether::io::sampleConfigFromJson(noether::io::readJsonFile(c.samplesPath));
  if (!cfg.intervals.count("s")) cfg.intervals["s"] = {-0.5 * g.epsilon, 0.5 * g.epsilon};
  for (std::size_t j = 0; j < p.r; ++j)
    if (p.omega[j].bounded() && !cfg.intervals.count(noether::controlName(j)))
      cfg.intervals[noether::controlName(j)] = p.omega[j];
  if (c.samples) cfg.samples = *c.samples;
  if (c.seed) cfg.seed = *c.seed;
  if (c.tolerance) cfg.tolerance = *c.tolerance;
  if (cfg.samples == 0) throw InputError("--samples must be positive");
  return cfg;
}

bool controlJumps(const noether::Trajectory& traj) {
  for (std::size_t k = 0; k + 1 < traj.nodes(); ++k)
    for (std::size_t j = 0; j < traj.u[k].size(); ++j)
      if (std::abs(traj.u[k + 1][j] - traj.u[k][j]) > 1e-2) return true;
  return false;
}

void writeCsvIfRequested(const RunConfig& c, const noether::Trajectory& traj, const std::string& label) {
  if (c.csvPath.empty()) return;
  emitText(c.csvPath, [&](std::ostream& out) { noether::writeTrajectoryCsv(out, traj, csvComment(c, label)); });
}

int cmdCheck(const RunConfig& c, bool infinitesimal) {
  const auto lp = loadProblem(c.problemPath);
  const auto g = noether::io::groupFromJson(noether::io::readJsonFile(c.groupPath));
  const auto cfg = sampleConfigFor(lp.problem, g, c);
  const auto form = resolveForm(lp.problem, c.form);
  const auto exec = c.serial ? noether::Execution::Serial : noether::Execution::Parallel;
  noether::InvarianceReport report;
  if (infinitesimal) report = noether::checkInfinitesimal(lp.problem, g, cfg, exec);
  else if (form == noether::ProblemForm::P1) report = noether::checkInvarianceP1(lp.problem, g, cfg, exec);
  else report = noether::checkInvarianceP(lp.problem, g, cfg, exec);
  emitJson(c, {{"group", g.name},
               {"form", noether::io::formName(form)},
               {"sampling", noether::io::toJson(cfg)},
               {"report", noether::io::toJson(report)}});
  return report.passed() ? kPass : kCheckFailed;
}

noether::ConservationLaw lawFor(const noether::ControlProblem& p, const noether::OneParamGroup& g,
                                noether::ProblemForm form, const RunConfig& c) {
  noether::validateGroup(p, g, sampleConfigFor(p, g, c));
  const auto gen = noether::generator(g);
  return form == noether::ProblemForm::P1 ? noether::lawP1(p, gen, g.name) : noether::lawP(p, gen, g.name);
}

int cmdLaw(const RunConfig& c) {
  const auto lp = loadProblem(c.problemPath);
  const auto g = noether::io::groupFromJson(noether::io::readJsonFile(c.groupPath));
  const auto law = lawFor(lp.problem, g, resolveForm(lp.problem, c.form), c);
  std::cout << noether::print(law.expr) << '\n';
  if (!c.outPath.empty()) emitJson(c, {{"law", noether::io::toJson(law)}});
  return kPass;
}

int cmdExtremal(const RunConfig& c) {
  const auto lp = loadProblem(c.problemPath);
  const auto form = resolveForm(lp.problem, c.form);
  const auto h = hamiltonianFor(lp.problem, form);
  const auto m = multipliersFor(lp.problem, form, c);
  const auto law = controlLawFor(lp.problem, form, c);
  const auto x = initialState(lp.problem, c);
  const auto psi = requiredCostate(lp, c);
  const std::string comment = csvComment(c, "");
  try {
    const auto traj = noether::integrateExtremal(lp.problem, h, x, psi, m, law, c.steps);
    emitText(c.outPath, [&](std::ostream& out) { noether::writeTrajectoryCsv(out, traj, comment); });
    return kPass;
  } catch (const noether::IntegrationError& err) {
    emitText(c.outPath, [&](std::ostream& out) {
      noether::writeTrajectoryCsv(out, err.partial(), comment + " partial: " + err.what());
    });
    throw;
  }
}

int cmdConserve(const RunConfig& c) {
  const auto lp = loadProblem(c.problemPath);
  const auto g = noether::io::groupFromJson(noether::io::readJsonFile(c.groupPath));
  const auto form = resolveForm(lp.problem, c.form);
  const auto h = hamiltonianFor(lp.problem, form);
  const auto law = lawFor(lp.problem, g, form, c);
  const auto m = multipliersFor(lp.problem, form, c);
  const auto control = controlLawFor(lp.problem, form, c);
  const auto traj = noether::integrateExtremal(lp.problem, h, initialState(lp.problem, c), requiredCostate(lp, c), m,
                                               control, c.steps);
  writeCsvIfRequested(c, traj, "");

  json switches = json::array();
  bool switchPresent = controlJumps(traj);
  if (const auto* analytic = std::get_if<noether::AnalyticLaw>(&control); analytic && analytic->switching) {
    const auto sw = noether::detectSwitches(lp.problem, h, traj, *analytic);
    for (double t : sw.times) switches.push_back(t);
    switchPresent = switchPresent || !sw.times.empty();
  }
  const double step = (lp.problem.b - lp.problem.a) / static_cast<double>(c.steps);
  const double tol = c.tolerance.value_or(noether::defaultLawTolerance(step, switchPresent));
  const auto report = noether::checkLaw(traj, law, tol);
  emitJson(c, {{"law", noether::io::toJson(law)},
               {"step", step},
               {"switchPresent", switchPresent},
               {"switchTimes", switches},
               {"report", noether::io::toJson(report)}});
  return report.pass ? kPass : kCheckFailed;
}

int cmdDhdt(const RunConfig& c) {
  const auto lp = loadProblem(c.problemPath);
  const auto form = resolveForm(lp.problem, c.form);
  const auto h = hamiltonianFor(lp.problem, form);
  const auto traj = noether::integrateExtremal(lp.problem, h, initialState(lp.problem, c), requiredCostate(lp, c),
                                               multipliersFor(lp.problem, form, c), controlLawFor(lp.problem, form, c),
                                               c.steps);
  writeCsvIfRequested(c, traj, "");
  const auto report = noether::checkHamiltonianIdentity(traj, h, c.tolerance.value_or(1e-4));
  emitJson(c, {{"report", noether::io::toJson(report)}});
  return report.pass ? kPass : kCheckFailed;
}

int cmdShoot(const RunConfig& c) {
  const auto lp = loadProblem(c.problemPath);
  const auto form = resolveForm(lp.problem, c.form);
  const auto h = hamiltonianFor(lp.problem, form);
  noether::ShootOptions opts;
  opts.maxIterations = c.maxIterations;
  if (c.tolerance) opts.tolerance = *c.tolerance;
  opts.initialGuess = initialCostate(lp, c);
  try {
    const auto result = noether::shoot(lp.problem, h, multipliersFor(lp.problem, form, c),
                                       controlLawFor(lp.problem, form, c), c.steps, opts);
    writeCsvIfRequested(c, result.trajectory, "");
    emitJson(c, {{"psiA", result.psiA}, {"iterations", result.iterations}, {"residual", result.residual}});
    return kPass;
  } catch (const noether::ShootingError& err) {
    json diag{{"error", err.what()},
              {"bestPsi", err.bestPsi()},
              {"residual", err.residual()},
              {"iterations", err.iterations()},
              {"run", runHeader(c)}};
    std::cerr << diag.dump(2) << '\n';
    return kShootingError;
  }
}

int cmdPareto(const RunConfig& c) {
  const auto lp = loadProblem(c.problemPath);
  if (!lp.problem.constraints.empty() || lp.problem.costCount() < 2)
    throw InputError("pareto needs a vector-cost problem with at least two costs and no constraints");
  const auto form = noether::ProblemForm::P;
  const auto control = controlLawFor(lp.problem, form, c);
  const auto x = initialState(lp.problem, c);
  noether::CostatePolicy costate;
  const auto psi = initialCostate(lp, c);
  if (psi && !c.shootCostate) {
    costate = noether::FixedCostate{*psi};
  } else if (lp.problem.beta) {
    noether::ShootOptions opts;
    opts.maxIterations = c.maxIterations;
    opts.initialGuess = psi;
    costate = noether::ShootCostate{opts};
  } else {
    throw InputError("no initial costate: pass --psi0, give the problem a 'psiA', or give it a 'beta' to shoot");
  }
  if (c.grid == 0) throw InputError("--grid must be positive");
  const auto grid = noether::simplexGrid(lp.problem.costCount(), c.grid);
  noether::SweepOptions opts;
  opts.steps = c.steps;
  const auto points = noether::sweep(lp.problem, control, x, costate, grid, opts,
                                     c.serial ? noether::Execution::Serial : noether::Execution::Parallel);
  emitText(c.outPath, [&](std::ostream& out) {
    noether::writeSweepCsv(out, points, lp.problem.costCount(), csvComment(c, "extremal outcomes, dominance-filtered"),
                           c.dedupe);
  });
  return kPass;
}

int cmdAircraftExport(const RunConfig& c) {
  namespace fs = std::filesystem;
  const fs::path dir(c.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create '" + c.dir + "': " + ec.message());

  noether::ControlProblem p = noether::aircraft::buildAircraftProblem(c.aircraft);
  p.alpha = std::vector<double>{0.0, 0.0, 1.0, 0.5, 4.0};
  json problem = noether::io::toJson(p);
  problem["psiA"] = {0.2, -0.1, 2.0, 1.0, 0.0};
  std::vector<std::pair<std::string, json>> files{{"aircraft.json", problem}};
  for (const auto& g : noether::aircraft::builtinGroups()) files.emplace_back(g.name + ".json", noether::io::toJson(g));
  files.emplace_back("samples.json", noether::io::toJson(noether::aircraft::defaultSampleBox()));
  for (const auto& [name, body] : files) {
    noether::io::writeJsonFile(dir / name, body);
    std::cout << (dir / name).string() << '\n';
  }
  return kPass;
}

void addSampling(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--samples-config", c.samplesPath, "sampling box JSON");
  cmd->add_option("--samples", c.samples, "number of samples");
  cmd->add_option("--seed", c.seed, "sampler seed");
  cmd->add_option("--tolerance", c.tolerance, "residual tolerance");
  cmd->add_flag("--serial", c.serial, "run the serial reference path");
}

void addForm(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--form", c.form, "problem form")->check(CLI::IsMember({"auto", "P", "P1"}));
}

void addExtremal(CLI::App* cmd, RunConfig& c) {
  addForm(cmd, c);
  cmd->add_option("--x0", c.x0, "initial state, comma separated");
  cmd->add_option("--psi0", c.psi0, "initial costate, comma separated");
  cmd->add_option("--lambda", c.lambda, "multipliers lambda, comma separated");
  cmd->add_option("--cost-multiplier", c.costMultiplier, "psi0 of the scalar form (default -1)");
  cmd->add_option("--steps", c.steps, "RK4 steps")->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  cmd->add_option("--control", c.control, "control law")->check(CLI::IsMember({"grid", "aircraft", "expr"}));
  cmd->add_option("--control-expr", c.controlExpr, "analytic controls, ';' separated");
  cmd->add_option("--switching-expr", c.switchingExpr, "switching function of u1 for --control expr");
  cmd->add_option("--grid-resolution", c.gridResolution, "grid-search points per control");
  cmd->add_option("--grid-refinements", c.gridRefinements, "golden-section steps per control");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noether symmetry checks and conservation laws for multiobjective optimal control"};
  app.set_version_flag("--version", noether::kVersion);
  app.require_subcommand(1);
  RunConfig c;

  auto* check = app.add_subcommand("check", "finite-parameter invariance check");
  auto* checkInf = app.add_subcommand("check-infinitesimal", "linearized invariance check from the generator");
  for (auto* cmd : {check, checkInf}) {
    cmd->add_option("problem", c.problemPath, "problem JSON")->required();
    cmd->add_option("group", c.groupPath, "group JSON")->required();
    cmd->add_option("--out", c.outPath, "report path (default stdout)");
    addSampling(cmd, c);
    addForm(cmd, c);
  }

  auto* law = app.add_subcommand("law", "conservation law of a symmetry group");
  law->add_option("problem", c.problemPath, "problem JSON")->required();
  law->add_option("group", c.groupPath, "group JSON")->required();
  law->add_option("--out", c.outPath, "JSON output path");
  law->add_option("--samples-config", c.samplesPath, "sampling box JSON for the group validation");
  addForm(law, c);

  auto* extremal = app.add_subcommand("extremal", "integrate an extremal and write its CSV");
  extremal->add_option("problem", c.problemPath, "problem JSON")->required();
  extremal->add_option("--out", c.outPath, "CSV path (default stdout)");
  addExtremal(extremal, c);

  auto* conserve = app.add_subcommand("conserve", "check a group's law along an extremal");
  conserve->add_option("problem", c.problemPath, "problem JSON")->required();
  conserve->add_option("group", c.groupPath, "group JSON")->required();
  conserve->add_option("--out", c.outPath, "report path (default stdout)");
  conserve->add_option("--csv", c.csvPath, "trajectory CSV path");
  conserve->add_option("--tolerance", c.tolerance, "normalized drift tolerance");
  conserve->add_option("--samples-config", c.samplesPath, "sampling box JSON for the group validation");
  addExtremal(conserve, c);

  auto* dhdt = app.add_subcommand("dhdt", "check dH/dt against the explicit time partial");
  dhdt->add_option("problem", c.problemPath, "problem JSON")->required();
  dhdt->add_option("--out", c.outPath, "report path (default stdout)");
  dhdt->add_option("--csv", c.csvPath, "trajectory CSV path");
  dhdt->add_option("--tolerance", c.tolerance, "residual tolerance (default 1e-4)");
  addExtremal(dhdt, c);

  auto* shootCmd = app.add_subcommand("shoot", "solve the two-point boundary problem by shooting");
  shootCmd->add_option("problem", c.problemPath, "problem JSON")->required();
  shootCmd->add_option("--out", c.outPath, "result path (default stdout)");
  shootCmd->add_option("--csv", c.csvPath, "trajectory CSV path");
  shootCmd->add_option("--tolerance", c.tolerance, "terminal residual tolerance");
  shootCmd->add_option("--max-iterations", c.maxIterations, "Newton iteration limit");
  addExtremal(shootCmd, c);

  auto* pareto = app.add_subcommand("pareto", "multiplier sweep with dominance filter");
  pareto->add_option("problem", c.problemPath, "problem JSON")->required();
  pareto->add_option("--out", c.outPath, "CSV path (default stdout)");
  pareto->add_option("--grid", c.grid, "simplex points per edge");
  pareto->add_flag("--dedupe", c.dedupe, "mark only the first of equal kept outcomes as kept");
  pareto->add_flag("--shoot", c.shootCostate, "shoot for the costate at every point");
  pareto->add_option("--max-iterations", c.maxIterations, "Newton iteration limit when shooting");
  pareto->add_flag("--serial", c.serial, "run the serial reference path");
  addExtremal(pareto, c);

  auto* aircraftCmd = app.add_subcommand("aircraft", "built-in aircraft example");
  aircraftCmd->require_subcommand(1);
  auto* exportCmd = aircraftCmd->add_subcommand("export", "write the example problem, groups and sampling box");
  exportCmd->add_option("--dir", c.dir, "output directory");
  exportCmd->add_option("--c1", c.aircraft.c1, "thrust constant");
  exportCmd->add_option("--c2", c.aircraft.c2, "gravity constant");
  exportCmd->add_option("--u1max", c.aircraft.u1max, "maximum fuel rate");
  exportCmd->add_option("--u2lo", c.aircraft.u2lo, "lowest thrust angle");
  exportCmd->add_option("--u2hi", c.aircraft.u2hi, "highest thrust angle");
  exportCmd->add_option("--horizon", c.aircraft.horizon, "terminal time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (check->parsed()) return c.subcommand = "check", cmdCheck(c, false);
    if (checkInf->parsed()) return c.subcommand = "check-infinitesimal", cmdCheck(c, true);
    if (law->parsed()) return c.subcommand = "law", cmdLaw(c);
    if (extremal->parsed()) return c.subcommand = "extremal", cmdExtremal(c);
    if (conserve->parsed()) return c.subcommand = "conserve", cmdConserve(c);
    if (dhdt->parsed()) return c.subcommand = "dhdt", cmdDhdt(c);
    if (shootCmd->parsed()) return c.subcommand = "shoot", cmdShoot(c);
    if (pareto->parsed()) return c.subcommand = "pareto", cmdPareto(c);
    if (exportCmd->parsed()) return c.subcommand = "aircraft export", cmdAircraftExport(c);
  } catch (const noether::IntegrationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kIntegrationError;
  } catch (const noether::ShootingError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kShootingError;
  } catch (const noether::Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kInputError;
  } catch (const noether::io::json::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
