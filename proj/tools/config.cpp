// Copyright 2026 The kpzlab Authors
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

#include "config.hpp"

#include <cmath>
#include <set>

#include "kpz/errors.hpp"
#include "kpz/scaling.hpp"

namespace kpzlab {

using nlohmann::json;

namespace {

const std::set<std::string> kSubcommands{"simulate-lpp", "simulate-tasep", "limit-cdf", "compare", "validate"};

// One JSON object; every member must be consumed before finish().
class Section {
 public:
  Section(const json& node, std::string path) : path_(std::move(path)) {
    if (!node.is_object()) throw ConfigError(path_ + ": expected an object");
    node_ = &node;
  }

  bool has(const std::string& key) const { return node_->contains(key); }

  const json* member(const std::string& key) {
    used_.insert(key);
    auto it = node_->find(key);
    return it == node_->end() ? nullptr : &*it;
  }

  Section child(const std::string& key) {
    static const json empty = json::object();
    const json* v = member(key);
    return Section(v ? *v : empty, path_ + "." + key);
  }

  void number(const std::string& key, double& out) {
    if (const json* v = member(key)) out = as_number(*v, name(key));
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (const json* v = member(key)) out = as_number(*v, name(key));
  }
  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = member(key)) out = as_integer<Int>(*v, name(key));
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = member(key)) {
      if (!v->is_boolean()) throw ConfigError(name(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void string(const std::string& key, std::string& out) {
    if (const json* v = member(key)) {
      if (!v->is_string()) throw ConfigError(name(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (const json* v = member(key)) out = as_numbers(*v, name(key));
  }
  void matrix(const std::string& key, std::vector<std::vector<double>>& out) {
    if (const json* v = member(key)) {
      if (!v->is_array()) throw ConfigError(name(key) + ": expected an array of arrays");
      out.clear();
      for (std::size_t k = 0; k < v->size(); ++k) out.push_back(as_numbers((*v)[k], name(key) + "[" + std::to_string(k) + "]"));
    }
  }
  template <typename Int>
  void integers(const std::string& key, std::vector<Int>& out) {
    if (const json* v = member(key)) {
      if (!v->is_array()) throw ConfigError(name(key) + ": expected an array");
      out.clear();
      for (std::size_t k = 0; k < v->size(); ++k)
        out.push_back(as_integer<Int>((*v)[k], name(key) + "[" + std::to_string(k) + "]"));
    }
  }

  void finish() const {
    for (auto it = node_->begin(); it != node_->end(); ++it)
      if (!used_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
  }

  std::string name(const std::string& key) const { return path_ + "." + key; }

 private:
  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where + ": must be finite");
    return d;
  }
  template <typename Int>
  static Int as_integer(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return static_cast<Int>(v.get<std::uint64_t>());
    if (v.is_number_integer()) {
      const auto i = v.get<std::int64_t>();
      if (std::is_unsigned_v<Int> && i < 0) throw ConfigError(where + ": must be non-negative");
      return static_cast<Int>(i);
    }
    throw ConfigError(where + ": expected an integer");
  }
  static std::vector<double> as_numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(as_number(v[k], where + "[" + std::to_string(k) + "]"));
    return out;
  }

  const json* node_ = nullptr;
  std::string path_;
  std::set<std::string> used_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void parse_validate(Section v, ValidateSection& out) {
  {
    Section s = v.child("burke");
    s.boolean("enabled", out.burke.enabled);
    s.number("rho", out.burke.rho);
    s.number("duration", out.burke.duration);
    s.integer("queues", out.burke.queues);
    s.number("p_threshold", out.burke.p_threshold);
    s.finish();
  }
  {
    Section s = v.child("shift");
    s.boolean("enabled", out.shift.enabled);
    s.number("a", out.shift.a);
    s.number("b", out.shift.b);
    if (const json* g = s.member("grids")) {
      require(g->is_array(), s.name("grids") + ": expected an array of point lists");
      out.shift.grids.clear();
      for (const json& grid : *g) {
        require(grid.is_array() && !grid.empty(), s.name("grids") + ": each grid is a non-empty list of [x, y]");
        std::vector<kpz::LatticePoint> pts;
        for (const json& p : grid) {
          require(p.is_array() && p.size() == 2 && p[0].is_number_integer() && p[1].is_number_integer(),
                  s.name("grids") + ": points are [x, y] integer pairs");
          pts.push_back({p[0].get<std::int64_t>(), p[1].get<std::int64_t>()});
        }
        out.shift.grids.push_back(std::move(pts));
      }
    }
    s.integer("n_samples", out.shift.n_samples);
    s.number("threshold", out.shift.threshold);
    s.integer("coupling_instances", out.shift.coupling_instances);
    if (const json* p = s.member("coupling_point")) {
      require(p->is_array() && p->size() == 2 && (*p)[0].is_number_integer() && (*p)[1].is_number_integer(),
              s.name("coupling_point") + ": expected an [x, y] integer pair");
      out.shift.coupling_point = {(*p)[0].get<std::int64_t>(), (*p)[1].get<std::int64_t>()};
    }
    s.finish();
  }
  {
    Section s = v.child("slow_decorrelation");
    s.boolean("enabled", out.slow.enabled);
    s.number("T", out.slow.T);
    s.number("rho", out.slow.rho);
    s.number("nu", out.slow.nu);
    s.number("c1", out.slow.c1);
    s.number("c2", out.slow.c2);
    s.number("theta", out.slow.theta);
    s.number("beta", out.slow.beta);
    s.number("control_beta", out.slow.control_beta);
    s.integer("n_samples", out.slow.n_samples);
    s.number("threshold", out.slow.threshold);
    s.number("control_ceiling", out.slow.control_ceiling);
    s.finish();
  }
  {
    Section s = v.child("gaussian");
    s.boolean("enabled", out.gaussian.enabled);
    s.number("rho", out.gaussian.rho);
    s.numbers("gammas", out.gaussian.gammas);
    s.number("N", out.gaussian.N);
    s.integer("n_samples", out.gaussian.n_samples);
    s.number("ks_threshold", out.gaussian.ks_threshold);
    s.string("reading", out.gaussian.reading);
    require(out.gaussian.reading == "calibrated" || out.gaussian.reading == "printed" ||
                out.gaussian.reading == "symmetric",
            s.name("reading") + ": one of calibrated, printed, symmetric");
    s.boolean("control", out.gaussian.control);
    s.number("control_p", out.gaussian.control_p);
    s.finish();
  }
  {
    Section s = v.child("bridge");
    s.boolean("enabled", out.bridge.enabled);
    s.integer("instances", out.bridge.instances);
    s.integer("max_grid", out.bridge.max_grid);
    s.integer("time_points", out.bridge.time_points);
    require(out.bridge.max_grid >= 1 && out.bridge.time_points >= 1, s.name("max_grid") + ": must be positive");
    s.finish();
  }
  {
    Section s = v.child("kernel_dual");
    s.boolean("enabled", out.kernel_dual.enabled);
    s.number("threshold", out.kernel_dual.threshold);
    s.finish();
  }
  {
    Section s = v.child("invertibility");
    s.boolean("enabled", out.invertibility.enabled);
    s.matrix("taus", out.invertibility.taus);
    s.numbers("s_values", out.invertibility.s_values);
    s.finish();
  }
  v.finish();
}

json grid_json(const std::vector<kpz::LatticePoint>& pts) {
  json g = json::array();
  for (const auto& p : pts) g.push_back({p.x, p.y});
  return g;
}

}  // namespace

RunConfig parse_config(const json& doc, const std::string& subcommand) {
  require(kSubcommands.count(subcommand) > 0, "unknown subcommand '" + subcommand + "'");
  RunConfig c;
  c.subcommand = subcommand;
  Section root(doc, "config");
  if (root.has("subcommand")) {
    std::string named;
    root.string("subcommand", named);
    require(named == subcommand, "config.subcommand is '" + named + "' but '" + subcommand + "' was requested");
  }
  {
    Section f = root.child("frame");
    f.number("T", c.frame.T);
    f.number("rho", c.frame.rho);
    f.number("nu", c.frame.nu);
    f.finish();
  }
  {
    Section m = root.child("model");
    m.string("kind", c.model.kind);
    m.number("rho", c.model.rho);
    m.number("a", c.model.a);
    m.number("b", c.model.b);
    m.finish();
  }
  {
    Section s = root.child("spec");
    s.numbers("taus", c.spec.taus);
    s.numbers("s", c.spec.s);
    s.number("theta", c.spec.theta);
    if (s.has("s_grid")) {
      Section g = s.child("s_grid");
      SGrid grid;
      g.number("lo", grid.lo);
      g.number("hi", grid.hi);
      g.number("step", grid.step);
      g.finish();
      require(grid.step > 0.0 && grid.hi >= grid.lo, g.name("step") + ": need step > 0 and hi >= lo");
      c.spec.s_grid = grid;
    }
    s.matrix("points", c.spec.points);
    s.finish();
    require(!c.spec.taus.empty(), "config.spec.taus: must not be empty");
    for (const auto& p : c.spec.points)
      require(p.size() == c.spec.taus.size(), "config.spec.points: every point needs one s per tau");
  }
  {
    Section q = root.child("quadrature");
    q.integer("nodes", c.quadrature.nodes);
    q.number("truncation", c.quadrature.truncation);
    q.number("fd_step", c.quadrature.fd_step);
    q.integer("lambda_nodes", c.quadrature.lambda_nodes);
    q.number("lambda_panel", c.quadrature.lambda_panel);
    q.finish();
  }
  root.integer("n_samples", c.n_samples);
  root.integer("master_seed", c.master_seed);
  root.integer("threads", c.threads);
  {
    Section o = root.child("output");
    o.string("dir", c.output_dir);
    o.finish();
  }
  {
    Section s = root.child("compare");
    kpz::McVsLimitOptions& o = c.compare.options;
    s.number("s_lo", o.s_lo);
    s.number("s_hi", o.s_hi);
    s.number("s_step", o.s_step);
    s.number("ks_threshold", o.ks_threshold);
    s.matrix("joint_points", o.joint_points);
    s.number("sigma_factor", o.sigma_factor);
    s.number("bias_allowance", o.bias_allowance);
    s.numbers("trend_T", c.compare.trend_T);
    s.integers("trend_seeds", c.compare.trend_seeds);
    s.finish();
  }
  parse_validate(root.child("validate"), c.validate);
  root.finish();

  // Range checks that do not depend on the library.
  require(c.n_samples >= 1, "config.n_samples: must be positive");
  require(c.quadrature.lambda_nodes >= 1 && c.quadrature.lambda_panel > 0.0,
          "config.quadrature: lambda_nodes and lambda_panel must be positive");
  try {
    c.quadrature.validate();
    (void)kpz::ScalingFrame(c.frame.T, c.frame.rho, c.frame.nu);
    (void)model_params(c);
  } catch (const kpz::Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

kpz::ModelParams model_params(const RunConfig& c) {
  const double rho = c.model.rho.value_or(c.frame.rho);
  const std::string& k = c.model.kind;
  try {
    if (k == "two_sided_stationary") return kpz::ModelParams::two_sided_stationary(rho);
    if (k == "shifted_plus") return kpz::ModelParams::shifted_plus(c.model.a, c.model.b);
    if (k == "shifted_zero") return kpz::ModelParams::shifted_zero(c.model.a, c.model.b);
    if (k == "bernoulli_domain") return kpz::ModelParams::bernoulli_domain(rho);
    if (k == "no_source") return kpz::ModelParams::no_source();
  } catch (const kpz::Error& e) {
    throw ConfigError(std::string("config.model: ") + e.what());
  }
  throw ConfigError("config.model.kind: unknown model '" + k + "'");
}

json to_json(const RunConfig& c) {
  json j;
  j["subcommand"] = c.subcommand;
  j["frame"] = {{"T", c.frame.T}, {"rho", c.frame.rho}, {"nu", c.frame.nu}};
  j["model"] = {{"kind", c.model.kind},
                {"rho", c.model.rho.value_or(c.frame.rho)},
                {"a", c.model.a},
                {"b", c.model.b}};
  j["spec"] = {{"taus", c.spec.taus}, {"s", c.spec.s}, {"theta", c.spec.theta}, {"points", c.spec.points}};
  if (c.spec.s_grid)
    j["spec"]["s_grid"] = {{"lo", c.spec.s_grid->lo}, {"hi", c.spec.s_grid->hi}, {"step", c.spec.s_grid->step}};
  j["quadrature"] = {{"nodes", c.quadrature.nodes},
                     {"truncation", c.quadrature.truncation},
                     {"fd_step", c.quadrature.fd_step},
                     {"lambda_nodes", c.quadrature.lambda_nodes},
                     {"lambda_panel", c.quadrature.lambda_panel}};
  j["n_samples"] = c.n_samples;
  j["master_seed"] = c.master_seed;
  j["threads"] = c.threads;
  j["output"] = {{"dir", c.output_dir}};
  const auto& o = c.compare.options;
  j["compare"] = {{"s_lo", o.s_lo},
                  {"s_hi", o.s_hi},
                  {"s_step", o.s_step},
                  {"ks_threshold", o.ks_threshold},
                  {"joint_points", o.joint_points.empty() ? kpz::default_joint_points() : o.joint_points},
                  {"sigma_factor", o.sigma_factor},
                  {"bias_allowance", o.bias_allowance},
                  {"trend_T", c.compare.trend_T},
                  {"trend_seeds", c.compare.trend_seeds}};
  const ValidateSection& v = c.validate;
  json grids = json::array();
  for (const auto& g : v.shift.grids) grids.push_back(grid_json(g));
  j["validate"] = {
      {"burke",
       {{"enabled", v.burke.enabled},
        {"rho", v.burke.rho},
        {"duration", v.burke.duration},
        {"queues", v.burke.queues},
        {"p_threshold", v.burke.p_threshold}}},
      {"shift",
       {{"enabled", v.shift.enabled},
        {"a", v.shift.a},
        {"b", v.shift.b},
        {"grids", grids},
        {"n_samples", v.shift.n_samples},
        {"threshold", v.shift.threshold},
        {"coupling_instances", v.shift.coupling_instances},
        {"coupling_point", {v.shift.coupling_point.x, v.shift.coupling_point.y}}}},
      {"slow_decorrelation",
       {{"enabled", v.slow.enabled},
        {"T", v.slow.T},
        {"rho", v.slow.rho},
        {"nu", v.slow.nu},
        {"c1", v.slow.c1},
        {"c2", v.slow.c2},
        {"theta", v.slow.theta},
        {"beta", v.slow.beta},
        {"control_beta", v.slow.control_beta},
        {"n_samples", v.slow.n_samples},
        {"threshold", v.slow.threshold},
        {"control_ceiling", v.slow.control_ceiling}}},
      {"gaussian",
       {{"enabled", v.gaussian.enabled},
        {"rho", v.gaussian.rho},
        {"gammas", v.gaussian.gammas},
        {"N", v.gaussian.N},
        {"n_samples", v.gaussian.n_samples},
        {"ks_threshold", v.gaussian.ks_threshold},
        {"reading", v.gaussian.reading},
        {"control", v.gaussian.control},
        {"control_p", v.gaussian.control_p}}},
      {"bridge",
       {{"enabled", v.bridge.enabled},
        {"instances", v.bridge.instances},
        {"max_grid", v.bridge.max_grid},
        {"time_points", v.bridge.time_points}}},
      {"kernel_dual", {{"enabled", v.kernel_dual.enabled}, {"threshold", v.kernel_dual.threshold}}},
      {"invertibility",
       {{"enabled", v.invertibility.enabled},
        {"taus", v.invertibility.taus},
        {"s_values", v.invertibility.s_values}}}};
  return j;
}

}  // namespace kpzlab
