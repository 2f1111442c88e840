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
// kpzlab command-line driver.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or
// parameter error, 3 numerical accuracy failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "kpz/errors.hpp"
#include "kpz/experiments.hpp"
#include "kpz/limit_law.hpp"
#include "kpz/parallel.hpp"
#include "kpz/scaling.hpp"
#include "kpz/tasep.hpp"
#include "output.hpp"

#ifndef KPZLAB_VERSION
#define KPZLAB_VERSION "unknown"
#endif

namespace kpzlab {
namespace {

using nlohmann::json;

enum ExitCode { kPass = 0, kCheckFailed = 1, kConfigFailure = 2, kAccuracyFailure = 3 };

struct Run {
  RunConfig config;
  Provenance provenance;
  std::size_t threads = 1;
  OutputSet outputs;
};

//---------------------------------------------------------------------------//
// simulate-lpp
//---------------------------------------------------------------------------//

int simulate_lpp(Run& run) {
  const RunConfig& c = run.config;
  const kpz::ScalingFrame frame(c.frame.T, c.frame.rho, c.frame.nu);
  const double shift = c.spec.theta * std::pow(c.frame.T, c.frame.nu);
  std::vector<kpz::LatticePoint> points;
  for (double tau : c.spec.taus) {
    const kpz::DppQuery q = kpz::scale_dpp_ext(frame, tau, c.spec.theta, 0.0);
    points.push_back({q.x, q.y});
  }
  const kpz::PassageSamples samples =
      kpz::sample_passage_times(model_params(c), points, c.n_samples, c.master_seed, run.threads);

  std::string csv = run.provenance.csv_header();
  csv += "sample_index,tau,raw_G,s_rescaled\n";
  for (std::size_t i = 0; i < samples.values.size(); ++i)
    for (std::size_t k = 0; k < c.spec.taus.size(); ++k) {
      const double g = samples.values[i][k];
      const double tau = c.spec.taus[k];
      csv += std::to_string(i) + "," + fmt17(tau) + "," + fmt17(g) + "," +
             fmt17(kpz::rescale_sample(frame, tau, g - shift)) + "\n";
    }
  run.outputs.add("samples.csv", std::move(csv));
  return kPass;
}

//---------------------------------------------------------------------------//
// simulate-tasep
//---------------------------------------------------------------------------//

int simulate_tasep(Run& run) {
  const RunConfig& c = run.config;
  const kpz::ScalingFrame frame(c.frame.T, c.frame.rho, c.frame.nu);
  const double T = c.frame.T, rho = c.frame.rho;
  const double t13 = std::cbrt(T), t23 = t13 * t13, c13 = std::cbrt(frame.chi());

  struct Probe {
    double tau;
    kpz::ParticleQuery particle;
    kpz::HeightQuery height;
  };
  std::vector<Probe> probes;
  for (double tau : c.spec.taus)
    probes.push_back({tau, kpz::scale_particle(frame, tau, 0.0), kpz::scale_height(frame, tau, 0.0)});

  // Particles only feel those ahead of them, so the left edge of the fill is
  // harmless; the right edge sits beyond the reach of every probed site.
  const std::int64_t margin = 100 + static_cast<std::int64_t>(std::ceil(2.0 * T));
  const kpz::SiteWindow fill{-margin, margin};
  const std::int64_t runway = kpz::runway_for(T);

  struct Row {
    std::int64_t position, height;
  };
  std::vector<std::vector<Row>> rows(c.n_samples);
  kpz::parallel_for(c.n_samples, run.threads, [&](std::size_t i) {
    const kpz::SeedSpec seed{c.master_seed, i};
    kpz::TasepState state = kpz::init_stationary(rho, fill, seed, runway);
    kpz::evolve(state, kpz::WaitingTimes(seed), T);
    for (const Probe& p : probes) {
      if (!state.has_label(p.particle.n))
        throw kpz::BoundaryError("tagged particle " + std::to_string(p.particle.n) + " is outside the fill");
      rows[i].push_back({state.position(p.particle.n), state.height(p.height.J)});
    }
  });

  std::string csv = run.provenance.csv_header();
  csv += "sample_index,tau,label,position,site_threshold,s_particle,site,height,height_threshold,s_height,queue\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const Probe& p = probes[k];
      const Row& r = rows[i][k];
      // Inverses of the site and height thresholds in s.
      const double s_particle = ((1.0 - 2.0 * rho) * T + 2.0 * p.tau * c13 * t23 - double(r.position)) * c13 /
                                ((1.0 - rho) * t13);
      const double s_height = ((1.0 - 2.0 * frame.chi()) * T + 2.0 * p.tau * (1.0 - 2.0 * rho) * c13 * t23 -
                               double(r.height)) /
                              (2.0 * c13 * c13 * t13);
      csv += std::to_string(i) + "," + fmt17(p.tau) + "," + std::to_string(p.particle.n) + "," +
             std::to_string(r.position) + "," + std::to_string(p.particle.q) + "," + fmt17(s_particle) + "," +
             std::to_string(p.height.J) + "," + std::to_string(r.height) + "," + std::to_string(p.height.H) +
             "," + fmt17(s_height) + "," + std::to_string(r.position + p.particle.n) + "\n";
    }
  run.outputs.add("tasep.csv", std::move(csv));
  return kPass;
}

//---------------------------------------------------------------------------//
// limit-cdf
//---------------------------------------------------------------------------//

std::vector<std::vector<double>> s_rows(const RunConfig& c) {
  const std::size_t m = c.spec.taus.size();
  std::vector<std::vector<double>> rows;
  if (c.spec.s_grid) {
    const SGrid& g = *c.spec.s_grid;
    const auto count = static_cast<std::size_t>(std::floor((g.hi - g.lo) / g.step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) rows.emplace_back(m, g.lo + double(k) * g.step);
  }
  for (const auto& p : c.spec.points) rows.push_back(p);
  if (rows.empty()) {
    if (c.spec.s.size() != m) throw ConfigError("config.spec.s: needs one value per tau");
    rows.push_back(c.spec.s);
  }
  return rows;
}

int limit_cdf_table(Run& run) {
  const RunConfig& c = run.config;
  const std::size_t m = c.spec.taus.size();
  const auto rows = s_rows(c);
  std::vector<kpz::LimitLawResult> results(rows.size());
  kpz::parallel_for(rows.size(), run.threads, [&](std::size_t k) {
    results[k] = kpz::limit_cdf(kpz::MultiPointSpec(c.spec.taus, rows[k]), c.quadrature);
  });

  std::string csv = run.provenance.csv_header();
  csv += "# taus:";
  for (double t : c.spec.taus) csv += " " + fmt17(t);
  csv += "\n";
  std::string header;
  for (std::size_t k = 1; k <= m; ++k) header += "s_" + std::to_string(k) + ",";
  header += "F,det,g";
  for (std::size_t k = 1; k <= m; ++k) header += ",partial_" + std::to_string(k);
  for (std::size_t k = 1; k <= m; ++k) header += ",richardson_" + std::to_string(k);
  csv += header + ",nodes,truncation,lambda_extent\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const kpz::LimitLawResult& v = results[r];
    std::string line;
    for (double s : rows[r]) line += fmt17(s) + ",";
    line += fmt17(v.cdf) + "," + fmt17(v.det) + "," + fmt17(v.g);
    for (double d : v.partials) line += "," + fmt17(d);
    for (double d : v.richardson) line += "," + fmt17(d);
    line += "," + std::to_string(v.nodes) + "," + fmt17(v.truncation) + "," + fmt17(v.lambda_extent);
    csv += line + "\n";
  }
  run.outputs.add("cdf.csv", std::move(csv));
  return kPass;
}

//---------------------------------------------------------------------------//
// compare and validate
//---------------------------------------------------------------------------//

int emit_reports(Run& run, const std::vector<kpz::ValidationReport>& reports) {
  json list = json::array();
  bool ok = true;
  for (const auto& r : reports) {
    list.push_back(report_json(r));
    ok = ok && r.pass;
    std::fprintf(stderr, "[%s] %s: %s=%.6g (%s %.6g)%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                 r.statistic_name.c_str(), r.statistic, r.relation.c_str(), r.threshold,
                 r.expected_failure ? " [expected-failure control]" : "");
  }
  json doc = {{"provenance", run.provenance.as_json()}, {"reports", list}, {"all_pass", ok}};
  run.outputs.add("report.json", doc.dump(2) + "\n");
  return ok ? kPass : kCheckFailed;
}

int compare_run(Run& run) {
  const RunConfig& c = run.config;
  kpz::McVsLimitOptions opts = c.compare.options;
  opts.quad = c.quadrature;
  opts.threads = run.threads;
  std::vector<kpz::ValidationReport> reports;
  reports.push_back(kpz::mc_vs_limit(kpz::ScalingFrame(c.frame.T, c.frame.rho, c.frame.nu), c.spec.taus,
                                     c.n_samples, c.master_seed, opts));
  if (!c.compare.trend_T.empty())
    reports.push_back(kpz::mc_bias_trend(c.frame.rho, c.compare.trend_T, c.compare.trend_seeds, c.n_samples, 2, opts));
  return emit_reports(run, reports);
}

kpz::ValidationReport bridge_report(const ValidateSection::Bridge& b, std::uint64_t seed, std::size_t threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto side = static_cast<std::size_t>(b.max_grid);
  std::vector<std::uint8_t> bad(b.instances, 0);
  kpz::parallel_for(b.instances, threads, [&](std::size_t k) {
    const auto x = 1 + std::int64_t(k % side);
    const auto y = 1 + std::int64_t((k / side) % side);
    const double horizon = 2.5 * double(x + y) + 5.0;
    std::vector<double> grid(static_cast<std::size_t>(b.time_points));
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = horizon * double(i + 1) / double(grid.size());
    bad[k] = !kpz::lpp_bridge_check({seed, k}, x, y, grid).ok;
  });
  kpz::ValidationReport r;
  r.name = "pathwise_bridge";
  r.statistic_name = "violations";
  r.statistic = double(std::count(bad.begin(), bad.end(), 1));
  r.relation = "<=";
  r.threshold = 0.0;
  r.pass = r.statistic == 0.0;
  r.seeds = {seed};
  r.details = {{"instances", double(b.instances)}, {"max_grid", double(b.max_grid)},
               {"time_points", double(b.time_points)}};
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

kpz::ValidationReport dual_report(double threshold) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (auto [ti, tj] : {std::pair{1.0, 0.0}, {2.0, -1.0}, {0.5, -0.5}})
    for (double x : {-1.0, 0.0, 1.0})
      for (double y : {-1.0, 0.0, 1.0})
        worst = std::max(worst, kpz::khat_dual_check(kpz::MultiPointSpec({tj, ti}, {0, 0}), 2, 1, x, y).gap);
  kpz::ValidationReport r;
  r.name = "kernel_dual";
  r.statistic_name = "max_gap";
  r.statistic = worst;
  r.relation = "<=";
  r.threshold = threshold;
  r.pass = worst <= threshold;
  r.details = {{"points", 27.0}};
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

kpz::ValidationReport invertibility_report(const ValidateSection::Invertibility& v,
                                           const kpz::QuadratureConfig& quad, std::size_t threads) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<kpz::MultiPointSpec> specs;
  for (const auto& taus : v.taus)
    for (double s : v.s_values) specs.emplace_back(taus, std::vector<double>(taus.size(), s));
  std::vector<kpz::GuardReport> guards(specs.size());
  kpz::parallel_for(specs.size(), threads, [&](std::size_t k) { guards[k] = kpz::invertibility_guard(specs[k], quad); });
  double min_det = 1.0;
  double failures = 0.0;
  for (const auto& g : guards) {
    min_det = std::min(min_det, g.det);
    failures += g.ok ? 0.0 : 1.0;
  }
  kpz::ValidationReport r;
  r.name = "invertibility";
  r.statistic_name = "min_det";
  r.statistic = min_det;
  r.relation = ">";
  r.threshold = 0.0;
  r.pass = failures == 0.0 && min_det > 0.0;
  r.details = {{"specs", double(specs.size())}, {"guard_failures", failures}};
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

kpz::C2Reading reading_of(const std::string& s) {
  if (s == "printed") return kpz::C2Reading::kPrinted;
  if (s == "symmetric") return kpz::C2Reading::kSymmetric;
  return kpz::C2Reading::kCalibrated;
}

int validate_run(Run& run) {
  const RunConfig& c = run.config;
  const ValidateSection& v = c.validate;
  const std::uint64_t seed = c.master_seed;
  const std::size_t th = run.threads;
  std::vector<kpz::ValidationReport> reports;
  // Distinct seed blocks keep the checks statistically independent.
  if (v.burke.enabled)
    reports.push_back(kpz::burke_validate(v.burke.rho, v.burke.duration, seed + 100,
                                          {v.burke.queues, v.burke.p_threshold, 20}));
  if (v.shift.enabled) {
    std::uint64_t k = 200;
    for (const auto& grid : v.shift.grids) {
      reports.push_back(kpz::shift_argument_validate(v.shift.a, v.shift.b, grid, v.shift.n_samples, seed + k,
                                                     {9, v.shift.threshold, th}));
      k += 2;
    }
    reports.push_back(kpz::shift_coupling_check(v.shift.a, v.shift.b, v.shift.coupling_point,
                                                v.shift.coupling_instances, seed + 299, th));
  }
  if (v.slow.enabled) {
    const kpz::ScalingFrame frame(v.slow.T, v.slow.rho, v.slow.nu);
    reports.push_back(kpz::slow_decorrelation_validate(frame, v.slow.c1, v.slow.c2, v.slow.theta, v.slow.beta,
                                                       v.slow.n_samples, seed + 300, v.slow.threshold, th));
    reports.push_back(kpz::slow_decorrelation_control(frame, v.slow.c1, v.slow.c2, v.slow.theta,
                                                      v.slow.control_beta, v.slow.n_samples, seed + 300,
                                                      v.slow.control_ceiling, th));
  }
  if (v.gaussian.enabled) {
    kpz::GaussianOptions opts;
    opts.reading = reading_of(v.gaussian.reading);
    opts.ks_threshold = v.gaussian.ks_threshold;
    opts.threads = th;
    std::uint64_t k = 400;
    for (double gamma : v.gaussian.gammas) {
      reports.push_back(
          kpz::gaussian_offchar_validate(v.gaussian.rho, gamma, v.gaussian.N, v.gaussian.n_samples, seed + k, opts));
      k += 2;
    }
    if (v.gaussian.control)
      reports.push_back(kpz::gaussian_control_validate(v.gaussian.rho, v.gaussian.N, v.gaussian.n_samples,
                                                       seed + 499, v.gaussian.control_p, th));
  }
  if (v.bridge.enabled) reports.push_back(bridge_report(v.bridge, seed + 500, th));
  if (v.kernel_dual.enabled) reports.push_back(dual_report(v.kernel_dual.threshold));
  if (v.invertibility.enabled) reports.push_back(invertibility_report(v.invertibility, c.quadrature, th));
  return emit_reports(run, reports);
}

//---------------------------------------------------------------------------//

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

std::size_t env_threads() {
  const char* env = std::getenv("THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) throw ConfigError("THREADS must be a positive integer");
  return static_cast<std::size_t>(v);
}

int dispatch(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
             std::size_t cli_threads) {
  Run run;
  run.config = parse_config(load_json(config_path), subcommand);
  if (!out_dir.empty()) run.config.output_dir = out_dir;
  if (const std::size_t t = env_threads()) run.config.threads = t;
  if (cli_threads > 0) run.config.threads = cli_threads;
  run.threads = run.config.threads > 0 ? run.config.threads : kpz::default_thread_count();

  // The hash covers everything that can change a result; the output location
  // and the thread count cannot.
  json resolved = to_json(run.config);
  json hashed = resolved;
  hashed.erase("output");
  hashed.erase("threads");
  run.provenance = {KPZLAB_VERSION, subcommand, fnv1a64(hashed.dump()), run.config.master_seed, resolved.dump()};

  int code = kPass;
  if (subcommand == "simulate-lpp") code = simulate_lpp(run);
  else if (subcommand == "simulate-tasep") code = simulate_tasep(run);
  else if (subcommand == "limit-cdf") code = limit_cdf_table(run);
  else if (subcommand == "compare") code = compare_run(run);
  else code = validate_run(run);
  run.outputs.commit(run.config.output_dir);
  return code;
}

}  // namespace
}  // namespace kpzlab

int main(int argc, char** argv) {
  using namespace kpzlab;
  CLI::App app{"kpzlab: last-passage percolation, TASEP and multi-point KPZ limit laws"};
  app.set_version_flag("--version", KPZLAB_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::size_t threads = 0;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"simulate-lpp", "raw last-passage samples at scaled points (samples.csv)"},
      {"simulate-tasep", "tagged-particle, height and queue observables (tasep.csv)"},
      {"limit-cdf", "multi-point limit law over an s grid (cdf.csv)"},
      {"compare", "Monte Carlo against the limit law (report.json)"},
      {"validate", "full validation suite (report.json)"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "JSON configuration file")->required();
    sub->add_option("-o,--output", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "worker threads (overrides THREADS and the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string subcommand = app.get_subcommands().front()->get_name();

  try {
    return dispatch(subcommand, config_path, out_dir, threads);
  } catch (const ConfigError& e) {
    std::cerr << "kpzlab: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const kpz::AccuracyError& e) {
    std::cerr << "kpzlab: accuracy failure: " << e.what() << "\n";
    return 3;
  } catch (const kpz::InvertibilityError& e) {
    std::cerr << "kpzlab: accuracy failure: " << e.what() << "\n";
    return 3;
  } catch (const kpz::BoundaryError& e) {
    std::cerr << "kpzlab: simulation window too small: " << e.what() << "\n";
    return 3;
  } catch (const kpz::Error& e) {
    std::cerr << "kpzlab: invalid parameters: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kpzlab: " << e.what() << "\n";
    return 2;
  }
}
