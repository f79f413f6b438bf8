#include "noether/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace noether::io {

namespace {

Expr parseField(const json& value, const std::string& field) {
  if (!value.is_string()) throw InputError("'" + field + "' must be an expression string");
  try {
    return parse(value.get<std::string>());
  } catch (const ParseError& err) {
    throw InputError("'" + field + "': " + err.what());
  }
}

std::vector<Expr> parseList(const json& j, const std::string& key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw InputError("missing array '" + key + "'");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < j.at(key).size(); ++i)
    out.push_back(parseField(j.at(key)[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename T>
T required(const json& j, const std::string& key) {
  if (!j.contains(key)) throw InputError("missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& err) {
    throw InputError("key '" + key + "': " + err.what());
  }
}

json stringList(const std::vector<Expr>& exprs) {
  json out = json::array();
  for (const auto& e : exprs) out.push_back(print(e));
  return out;
}

Interval intervalFromJson(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw InputError(where + " must be a [lo, hi] pair");
  Interval box{j[0].get<double>(), j[1].get<double>()};
  if (!(box.lo <= box.hi)) throw InputError(where + " is empty");
  return box;
}

json pointJson(const std::map<std::string, double>& point) {
  json out = json::object();
  for (const auto& [name, value] : point) out[name] = value;
  return out;
}

}  // namespace

json readJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& err) {
    throw InputError("malformed JSON in '" + path.string() + "' at byte " + std::to_string(err.byte) + ": " +
                     err.what());
  }
}

void writeJsonFile(const std::filesystem::path& path, const json& value) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << value.dump(2) << '\n';
}

ControlProblem problemFromJson(const json& j) {
  if (!j.is_object()) throw InputError("problem must be a JSON object");
  ControlProblem p;
  p.n = required<std::size_t>(j, "n");
  p.r = required<std::size_t>(j, "r");
  p.a = required<double>(j, "a");
  p.b = required<double>(j, "b");
  if (j.contains("alpha") && !j.at("alpha").is_null()) p.alpha = j.at("alpha").get<std::vector<double>>();
  if (j.contains("beta") && !j.at("beta").is_null()) p.beta = j.at("beta").get<std::vector<double>>();
  if (j.contains("constants")) {
    for (const auto& [name, value] : j.at("constants").items()) p.constants[name] = value.get<double>();
  }
  p.phi = parseList(j, "phi");
  p.L = parseList(j, "L");
  if (j.contains("N") && required<std::size_t>(j, "N") != p.L.size())
    throw InputError("N does not match the number of cost integrands in L");
  if (j.contains("constraints")) {
    const json& cs = j.at("constraints");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "constraints[" + std::to_string(i) + "]";
      IsoConstraint c;
      c.g = parseField(cs[i].at("g"), where + ".g");
      c.xi = required<double>(cs[i], "xi");
      const std::string kind = cs[i].value("kind", "equality");
      if (kind == "equality") c.kind = ConstraintKind::Equality;
      else if (kind == "inequality") c.kind = ConstraintKind::Inequality;
      else throw InputError(where + ".kind must be 'equality' or 'inequality'");
      p.constraints.push_back(std::move(c));
    }
  }
  if (j.contains("omega")) {
    for (const auto& box : j.at("omega")) {
      Interval iv;
      if (box.contains("lo") && !box.at("lo").is_null()) iv.lo = box.at("lo").get<double>();
      if (box.contains("hi") && !box.at("hi").is_null()) iv.hi = box.at("hi").get<double>();
      p.omega.push_back(iv);
    }
  } else {
    p.omega.assign(p.r, Interval{});
  }
  if (j.contains("stateDomain")) {
    for (const auto& box : j.at("stateDomain")) {
      Interval iv;
      if (box.contains("lo") && !box.at("lo").is_null()) iv.lo = box.at("lo").get<double>();
      if (box.contains("hi") && !box.at("hi").is_null()) iv.hi = box.at("hi").get<double>();
      p.stateDomain.push_back(iv);
    }
  }
  try {
    p.validate();
  } catch (const ModelError& err) {
    throw InputError(std::string("invalid problem: ") + err.what());
  }
  return p;
}

json toJson(const ControlProblem& p) {
  json j;
  j["n"] = p.n;
  j["r"] = p.r;
  j["N"] = p.costCount();
  j["a"] = p.a;
  j["b"] = p.b;
  if (p.alpha) j["alpha"] = *p.alpha;
  if (p.beta) j["beta"] = *p.beta;
  j["constants"] = json::object();
  for (const auto& [name, value] : p.constants) j["constants"][name] = value;
  j["phi"] = stringList(p.phi);
  j["L"] = stringList(p.L);
  j["constraints"] = json::array();
  for (const auto& c : p.constraints)
    j["constraints"].push_back(
        {{"g", print(c.g)}, {"xi", c.xi}, {"kind", c.kind == ConstraintKind::Equality ? "equality" : "inequality"}});
  j["omega"] = json::array();
  for (const auto& box : p.omega) {
    json b = json::object();
    if (std::isfinite(box.lo)) b["lo"] = box.lo;
    if (std::isfinite(box.hi)) b["hi"] = box.hi;
    j["omega"].push_back(b);
  }
  if (!p.stateDomain.empty()) {
    j["stateDomain"] = json::array();
    for (const auto& box : p.stateDomain) {
      json b = json::object();
      if (std::isfinite(box.lo)) b["lo"] = box.lo;
      if (std::isfinite(box.hi)) b["hi"] = box.hi;
      j["stateDomain"].push_back(b);
    }
  }
  return j;
}

OneParamGroup groupFromJson(const json& j) {
  if (!j.is_object()) throw InputError("group must be a JSON object");
  OneParamGroup g;
  g.name = j.value("name", "group");
  if (!j.contains("T")) throw InputError("missing key 'T'");
  g.T = parseField(j.at("T"), "T");
  g.X = parseList(j, "X");
  g.U = parseList(j, "U");
  g.epsilon = required<double>(j, "epsilon");
  if (!(g.epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (j.contains("uDot") && !j.at("uDot").is_null()) g.uDot = parseList(j, "uDot");
  return g;
}

json toJson(const OneParamGroup& g) {
  json j;
  j["name"] = g.name;
  j["T"] = print(g.T);
  j["X"] = stringList(g.X);
  j["U"] = stringList(g.U);
  j["epsilon"] = g.epsilon;
  if (g.uDot) j["uDot"] = stringList(*g.uDot);
  return j;
}

SampleConfig sampleConfigFromJson(const json& j) {
  if (!j.is_object()) throw InputError("sample config must be a JSON object");
  SampleConfig cfg;
  if (j.contains("intervals"))
    for (const auto& [name, box] : j.at("intervals").items())
      cfg.intervals[name] = intervalFromJson(box, "interval '" + name + "'");
  if (j.contains("default")) cfg.fallback = intervalFromJson(j.at("default"), "default interval");
  cfg.samples = j.value("samples", cfg.samples);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.tolerance = j.value("tolerance", cfg.tolerance);
  cfg.skipDomainErrors = j.value("skipDomainErrors", cfg.skipDomainErrors);
  if (cfg.samples == 0) throw InputError("sample count must be positive");
  return cfg;
}

json toJson(const SampleConfig& cfg) {
  json j;
  j["intervals"] = json::object();
  for (const auto& [name, box] : cfg.intervals) j["intervals"][name] = {box.lo, box.hi};
  j["default"] = {cfg.fallback.lo, cfg.fallback.hi};
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  j["tolerance"] = cfg.tolerance;
  j["skipDomainErrors"] = cfg.skipDomainErrors;
  return j;
}

json toJson(const InvarianceReport& report) {
  json j;
  j["pass"] = report.passed();
  j["samples"] = report.samples;
  j["skipped"] = report.skipped;
  j["domainFailures"] = report.domainFailures;
  if (!report.firstDomainError.empty()) j["firstDomainError"] = report.firstDomainError;
  j["tolerance"] = report.tolerance;
  j["conditions"] = json::array();
  for (const auto& c : report.conditions)
    j["conditions"].push_back(
        {{"name", c.name}, {"worstResidual", c.worst}, {"worstPoint", pointJson(c.worstPoint)}, {"pass", c.pass}});
  j["notes"] = report.notes;
  return j;
}

std::string formName(ProblemForm form) { return form == ProblemForm::P1 ? "P1" : "P"; }

json toJson(const ConservationLaw& law) {
  return {{"expr", print(law.expr)}, {"form", formName(law.form())}, {"provenance", law.provenance}};
}

json toJson(const ConservationReport& report) {
  return {{"initial", report.initial},
          {"maxDrift", report.maxDrift},
          {"normalizedDrift", report.normalizedDrift},
          {"worstTime", report.worstTime},
          {"tolerance", report.tolerance},
          {"pass", report.pass}};
}

json toJson(const HamiltonianIdentityReport& report) {
  return {{"worstResidual", report.worstResidual},
          {"worstTime", report.worstTime},
          {"nodesChecked", report.nodesChecked},
          {"nodesExcluded", report.nodesExcluded},
          {"tolerance", report.tolerance},
          {"pass", report.pass}};
}

}  // namespace noether::io
