#include "cylsp/config.hpp"

#include "cylsp/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace cylsp {

namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double num(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double num_or(const json& j, const char* key, double dflt, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : dflt;
}

Term parse_term(const json& j, const std::string& where) {
  if (j.is_number()) return ConstantTerm{j.get<double>()};
  if (!j.is_object() || !j.contains("kind")) throw ConfigError(where + ": term needs a kind");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    only_keys(j, {"kind", "c"}, where);
    return ConstantTerm{num(j, "c", where)};
  }
  if (kind == "axis_power") {
    only_keys(j, {"kind", "c", "q"}, where);
    return AxisPowerTerm{num(j, "c", where), num(j, "q", where)};
  }
  if (kind == "ring_poly") {
    only_keys(j, {"kind", "c", "r0", "coeffs", "window"}, where);
    RingPolyTerm t;
    t.c = num_or(j, "c", 1.0, where);
    t.r0 = num_or(j, "r0", 0.0, where);
    if (!j.contains("coeffs") || !j.at("coeffs").is_array())
      throw ConfigError(where + ": ring_poly needs coeffs[i][j] for s^i (r-r0)^j");
    for (const auto& row : j.at("coeffs")) {
      std::vector<double> r;
      for (const auto& x : row) r.push_back(x.get<double>());
      t.coeffs.push_back(std::move(r));
    }
    if (j.contains("window")) {
      const json& w = j.at("window");
      only_keys(w, {"s_min", "s_max", "r_min", "r_max"}, where + ".window");
      t.window = Window{num(w, "s_min", where), num(w, "s_max", where), num(w, "r_min", where),
                        num(w, "r_max", where)};
    }
    return t;
  }
  if (kind == "gaussian") {
    only_keys(j, {"kind", "c", "s0", "r0", "width"}, where);
    return GaussianTerm{num(j, "c", where), num_or(j, "s0", 0.0, where), num(j, "r0", where),
                        num(j, "width", where)};
  }
  if (kind == "bump") {
    only_keys(j, {"kind", "c", "inner", "outer"}, where);
    return CompactBumpTerm{num(j, "c", where), num(j, "inner", where), num(j, "outer", where)};
  }
  throw ConfigError(where + ": unknown term kind '" + kind + "'");
}

PotentialField parse_field(const json& j, const std::string& where) {
  std::vector<Term> terms;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      terms.push_back(parse_term(j[i], where + "[" + std::to_string(i) + "]"));
  } else {
    terms.push_back(parse_term(j, where));
  }
  return PotentialField(std::move(terms));
}

} // namespace

ProblemConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  only_keys(j, {"V", "K", "rho", "Lambda", "p", "exponents", "penalization", "grid", "solver",
                "sweep", "comment"},
            "config");
  ProblemConfig cfg;
  PenalizedProblem& pb = cfg.problem;
  try {
    for (const char* f : {"V", "K", "rho"})
      if (!j.contains(f)) throw ConfigError(std::string("config: missing section ") + f);
    pb.spec.V = parse_field(j.at("V"), "V");
    pb.spec.K = parse_field(j.at("K"), "K");
    pb.spec.rho = parse_field(j.at("rho"), "rho");
    if (j.contains("exponents")) {
      const json& e = j.at("exponents");
      only_keys(e, {"sigma", "tau", "alpha", "gamma"}, "exponents");
      if (e.contains("sigma")) pb.spec.sigma = num(e, "sigma", "exponents");
      if (e.contains("tau")) pb.spec.tau = num(e, "tau", "exponents");
      if (e.contains("alpha")) pb.spec.alpha = num(e, "alpha", "exponents");
      if (e.contains("gamma")) pb.spec.gamma = num(e, "gamma", "exponents");
    }
    if (j.contains("Lambda")) {
      const json& l = j.at("Lambda");
      only_keys(l, {"r0", "a_s", "a_r"}, "Lambda");
      pb.region = RegionLambda{num(l, "r0", "Lambda"), num(l, "a_s", "Lambda"),
                               num(l, "a_r", "Lambda")};
    }
    pb.p = j.contains("p") ? num(j, "p", "config") : 4.0;
    if (j.contains("penalization")) {
      const json& q = j.at("penalization");
      only_keys(q, {"eps", "kappa", "beta", "mu"}, "penalization");
      pb.par.eps = num_or(q, "eps", pb.par.eps, "penalization");
      pb.par.kappa = num_or(q, "kappa", pb.par.kappa, "penalization");
      pb.par.beta = num_or(q, "beta", pb.par.beta, "penalization");
      pb.par.mu = num_or(q, "mu", pb.par.mu, "penalization");
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      only_keys(g, {"cells_per_eps", "fine_halfwidth", "stretch", "coarse_h", "pad",
                    "excluded_radius"},
                "grid");
      GridPolicy& gp = pb.grid;
      gp.cells_per_eps = num_or(g, "cells_per_eps", gp.cells_per_eps, "grid");
      gp.fine_halfwidth = num_or(g, "fine_halfwidth", gp.fine_halfwidth, "grid");
      gp.stretch = num_or(g, "stretch", gp.stretch, "grid");
      gp.coarse_h = num_or(g, "coarse_h", gp.coarse_h, "grid");
      gp.pad = num_or(g, "pad", gp.pad, "grid");
      gp.excluded_radius = num_or(g, "excluded_radius", gp.excluded_radius, "grid");
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      only_keys(s, {"tol", "max_iterations", "refresh_every", "conjugate", "negative_tol",
                    "armijo"},
                "solver");
      SolverOptions& o = pb.opts;
      o.tol = num_or(s, "tol", o.tol, "solver");
      o.max_iterations = static_cast<int>(num_or(s, "max_iterations", o.max_iterations, "solver"));
      o.refresh_every = static_cast<int>(num_or(s, "refresh_every", o.refresh_every, "solver"));
      o.negative_tol = num_or(s, "negative_tol", o.negative_tol, "solver");
      o.armijo = num_or(s, "armijo", o.armijo, "solver");
      if (s.contains("conjugate")) o.conjugate = s.at("conjugate").get<bool>();
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      only_keys(s, {"eps", "out", "envelope", "profile_window", "tail_radius", "tail_delta"},
                "sweep");
      SweepSection& w = cfg.sweep;
      if (s.contains("eps"))
        for (const auto& x : s.at("eps")) w.eps.push_back(x.get<double>());
      if (s.contains("out")) w.out = s.at("out").get<std::string>();
      if (s.contains("envelope")) w.envelope = s.at("envelope").get<std::string>();
      w.profile_window = num_or(s, "profile_window", w.profile_window, "sweep");
      w.tail_radius = num_or(s, "tail_radius", w.tail_radius, "sweep");
      w.tail_delta = num_or(s, "tail_delta", w.tail_delta, "sweep");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    pb.spec.validate();
    pb.region.validate();
    pb.par.validate();
  } catch (const InvariantViolation& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  pb.grid.validate();
  return cfg;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

} // namespace cylsp
