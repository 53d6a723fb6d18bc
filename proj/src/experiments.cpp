// Copyright 2026 The spikediff Authors.
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

#include "spikediff/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "spikediff/error.hpp"
#include "spikediff/metrics.hpp"
#include "spikediff/parallel.hpp"
#include "spikediff/stats.hpp"

#ifndef SPIKEDIFF_VERSION
#define SPIKEDIFF_VERSION "0.1.0+unknown"
#endif

namespace spikediff {

using nlohmann::json;

const char* version_string() { return SPIKEDIFF_VERSION; }

namespace {

const std::set<std::string> kExperiments = {"mse-curve", "generate", "oracle-phase",
                                            "reduction", "cheat-demo"};

// Shortest round-trip decimal form; identical on every run.
std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

[[noreturn]] void config_fail(const std::string& what) { throw ConfigError("config: " + what); }

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) config_fail("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_fail(std::string("key '") + key + "' has the wrong type");
  }
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    config_fail(std::string("key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double positive(double v, const char* key) {
  if (!(v > 0.0) || !std::isfinite(v)) config_fail(std::string(key) + " must be positive");
  return v;
}

GridSpec parse_grid(const json& g) {
  if (!g.is_object()) config_fail("grid must be an object");
  reject_unknown(g, {"kind", "lo", "hi", "points", "values", "inject_thresholds"}, "grid");
  GridSpec spec;
  spec.kind = get_or<std::string>(g, "kind", "");
  spec.inject_thresholds = get_or<bool>(g, "inject_thresholds", true);
  if (spec.kind == "explicit") {
    spec.values = get_or<std::vector<double>>(g, "values", {});
    if (spec.values.empty()) config_fail("explicit grid needs non-empty 'values'");
    for (double v : spec.values) {
      if (!(v >= 0.0) || !std::isfinite(v)) config_fail("grid values must be >= 0");
    }
    spec.lo = *std::min_element(spec.values.begin(), spec.values.end());
    spec.hi = *std::max_element(spec.values.begin(), spec.values.end());
    return spec;
  }
  if (spec.kind != "linear" && spec.kind != "log") {
    config_fail("grid kind must be linear, log or explicit");
  }
  if (!g.contains("lo") || !g.contains("hi") || !g.contains("points")) {
    config_fail("grid needs lo, hi and points");
  }
  spec.lo = get_or<double>(g, "lo", 0.0);
  spec.hi = get_or<double>(g, "hi", 0.0);
  spec.points = get_count(g, "points", 0);
  if (spec.points == 0) config_fail("grid points must be >= 1");
  if (!(spec.lo >= 0.0) || !(spec.hi >= spec.lo) || !std::isfinite(spec.hi)) {
    config_fail("grid needs 0 <= lo <= hi");
  }
  if (spec.kind == "log" && !(spec.lo > 0.0)) config_fail("log grid needs lo > 0");
  if (spec.points > 1 && spec.hi == spec.lo) config_fail("grid with several points needs hi > lo");
  return spec;
}

json grid_json(const GridSpec& g) {
  json j;
  j["kind"] = g.kind;
  j["inject_thresholds"] = g.inject_thresholds;
  if (g.kind == "explicit") {
    j["values"] = g.values;
  } else {
    j["lo"] = g.lo;
    j["hi"] = g.hi;
    j["points"] = g.points;
  }
  return j;
}

std::string base_id(const json& spec) {
  if (!spec.is_object() || !spec.contains("id") || !spec.at("id").is_string()) {
    config_fail("each denoiser needs a string 'id'");
  }
  return spec.at("id").get<std::string>();
}

// "power25" is shorthand for {"id": "power", "iters": 25}.
std::optional<std::size_t> power_shorthand(const std::string& id) {
  if (id.rfind("power", 0) != 0 || id.size() == 5) return std::nullopt;
  std::size_t iters = 0;
  const char* first = id.data() + 5;
  const char* last = id.data() + id.size();
  auto res = std::from_chars(first, last, iters);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return iters;
}

std::string output_label(const json& spec, const std::string& id) {
  if (spec.contains("label")) {
    if (!spec.at("label").is_string()) config_fail("denoiser label must be a string");
    return spec.at("label").get<std::string>();
  }
  return id;
}

}  // namespace

std::vector<double> resolve_grid(const GridSpec& grid, std::size_t n, std::size_t k) {
  std::vector<double> out;
  if (grid.kind == "explicit") {
    out = grid.values;
  } else if (grid.points == 1) {
    out.push_back(grid.lo);
  } else {
    for (std::size_t i = 0; i < grid.points; ++i) {
      const double f = static_cast<double>(i) / static_cast<double>(grid.points - 1);
      double v = grid.kind == "linear"
                     ? grid.lo + f * (grid.hi - grid.lo)
                     : std::exp(std::log(grid.lo) + f * (std::log(grid.hi) - std::log(grid.lo)));
      if (i == 0) v = grid.lo;
      if (i + 1 == grid.points) v = grid.hi;
      out.push_back(v);
    }
  }
  if (grid.inject_thresholds) {
    for (double t : {t_alg(n, k), t_bayes(n, k)}) {
      if (t >= grid.lo && t <= grid.hi) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

NamedFactory make_factory(const json& spec, std::size_t n, std::size_t k, double enum_cap) {
  const std::string id = base_id(spec);
  const auto shorthand = power_shorthand(id);

  if (id == "null") {
    reject_unknown(spec, {"id", "label"}, "denoiser null");
    return {output_label(spec, "null"),
            [n](NoiseStream) { return std::make_unique<NullDenoiser>(n); }};
  }
  if (id == "alg1" || id == "power" || shorthand) {
    reject_unknown(spec, {"id", "label", "epsilon", "iters"}, "denoiser " + id);
    Alg1Params p = Alg1Params::defaults(n, k);
    p.epsilon = get_or<double>(spec, "epsilon", p.epsilon);
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) config_fail("epsilon must lie in (0, 1)");
    if (id == "alg1") {
      if (spec.contains("iters")) config_fail("alg1 takes no 'iters'; use power");
      return {output_label(spec, "alg1"),
              [p](NoiseStream) { return std::make_unique<SpectralDenoiser>(p); }};
    }
    std::size_t iters = shorthand.value_or(25);
    iters = get_count(spec, "iters", iters);
    if (iters == 0) config_fail("power iters must be >= 1");
    return {output_label(spec, "power" + std::to_string(iters)),
            [p, iters](NoiseStream s) {
              return std::make_unique<SpectralDenoiser>(p, iters, std::move(s));
            }};
  }
  if (id == "alg2") {
    reject_unknown(spec, {"id", "label", "s", "split_eps", "signed", "noise"}, "denoiser alg2");
    Alg2Params p;
    p.n = n;
    p.k = k;
    if (k * k < n) {
      p = Alg2Params::defaults(n, k);
    } else if (!spec.contains("s")) {
      config_fail("alg2 needs an explicit 's' when k^2 >= n");
    }
    p.s = get_or<double>(spec, "s", p.s);
    p.split_eps = get_or<double>(spec, "split_eps", p.split_eps);
    p.signed_output = get_or<bool>(spec, "signed", true);
    const std::string noise = get_or<std::string>(spec, "noise", "fresh");
    if (noise != "fresh" && noise != "path") config_fail("alg2 noise must be fresh or path");
    const SplitNoiseMode mode = noise == "path" ? SplitNoiseMode::kPath : SplitNoiseMode::kFresh;
    if (!(p.s > 0.0)) config_fail("alg2 s must be positive");
    if (!(p.split_eps > 0.0 && p.split_eps < 1.0)) config_fail("split_eps must lie in (0, 1)");
    return {output_label(spec, "alg2"), [p, mode](NoiseStream s) {
              return std::make_unique<SplitSpectralDenoiser>(p, mode, std::move(s));
            }};
  }
  if (id == "bayes") {
    reject_unknown(spec, {"id", "label"}, "denoiser bayes");
    // Fail on capacity before any work is scheduled.
    BayesOracleDenoiser probe(n, k, enum_cap);
    return {output_label(spec, "bayes"), [n, k, enum_cap](NoiseStream) {
              return std::make_unique<BayesOracleDenoiser>(n, k, enum_cap);
            }};
  }
  if (id == "composite") {
    reject_unknown(spec, {"id", "label", "base", "gamma", "eps_clip", "delta", "beta"},
                   "denoiser composite");
    if (!spec.contains("base")) config_fail("composite needs a 'base' denoiser");
    NamedFactory base = make_factory(spec.at("base"), n, k, enum_cap);
    CompositeParams p;
    p.gamma = get_or<double>(spec, "gamma", p.gamma);
    p.eps_clip = get_or<double>(spec, "eps_clip", p.eps_clip);
    p.delta = get_or<double>(spec, "delta", p.delta);
    p.beta = get_or<double>(spec, "beta", p.beta);
    for (double v : {p.gamma, p.eps_clip, p.delta, p.beta}) {
      if (!(v > 0.0 && v < 1.0)) config_fail("composite constants must lie in (0, 1)");
    }
    auto make_base = base.make;
    return {output_label(spec, "composite(" + base.id + ")"),
            [make_base, k, p](NoiseStream s) {
              return std::make_unique<CompositeDenoiser>(make_base(std::move(s)), k, p);
            }};
  }
  if (id == "cheat") config_fail("the cheat drift is only available in generate and cheat-demo");
  config_fail("unknown denoiser id '" + id + "'");
}

ExperimentConfig parse_config(const json& doc, const std::string& subcommand,
                              const RunOverrides& overrides) {
  if (!doc.is_object()) config_fail("document must be a JSON object");
  reject_unknown(doc,
                 {"experiment", "n", "k", "target", "denoisers", "grid", "trials", "delta",
                  "t_max", "seed", "output", "target_samples", "sigma", "theta", "repeats",
                  "chi_n", "chi_k", "chi_draws", "enum_cap"},
                 "config");
  ExperimentConfig c;
  c.experiment = get_or<std::string>(doc, "experiment", subcommand);
  if (!subcommand.empty() && c.experiment != subcommand) {
    config_fail("config is for '" + c.experiment + "' but the subcommand is '" + subcommand + "'");
  }
  if (!kExperiments.count(c.experiment)) config_fail("unknown experiment '" + c.experiment + "'");

  if (!doc.contains("n") || !doc.contains("k")) config_fail("n and k are required");
  c.n = get_count(doc, "n", 0);
  c.k = get_count(doc, "k", 0);
  if (c.n == 0 || c.k == 0 || c.k > c.n) config_fail("need 1 <= k <= n");

  try {
    c.target = parse_target_kind(get_or<std::string>(doc, "target", "spiked"));
  } catch (const ConfigError& e) {
    config_fail(e.what());
  }

  if (overrides.seed) {
    c.seed = *overrides.seed;
  } else if (doc.contains("seed")) {
    c.seed = get_or<std::uint64_t>(doc, "seed", 0);
  } else {
    config_fail("seed is required");
  }
  c.output = overrides.output.value_or(get_or<std::string>(doc, "output", ""));
  c.enum_cap = overrides.enum_cap.value_or(get_or<double>(doc, "enum_cap", kDefaultEnumerationCap));
  positive(c.enum_cap, "enum_cap");

  const double nd = static_cast<double>(c.n);
  c.trials = get_count(doc, "trials", 0);
  c.delta = get_or<double>(doc, "delta", nd / 100.0);
  c.t_max = get_or<double>(doc, "t_max", 4.0 * nd);
  if (doc.contains("grid")) c.grid = parse_grid(doc.at("grid"));

  std::vector<json> specs;
  if (doc.contains("denoisers")) {
    if (!doc.at("denoisers").is_array()) config_fail("denoisers must be an array");
    for (const auto& d : doc.at("denoisers")) specs.push_back(d);
  }

  const std::string& e = c.experiment;
  if (e == "mse-curve" || e == "oracle-phase") {
    if (!c.grid) config_fail(e + " needs a grid");
    if (c.trials < 2) config_fail("trials must be >= 2");
    if (e == "oracle-phase" && specs.empty()) specs.push_back(json{{"id", "bayes"}});
    if (specs.empty()) config_fail("denoisers must be non-empty");
  }
  if (e == "generate") {
    if (c.trials < 2) config_fail("trials must be >= 2");
    if (specs.empty()) config_fail("denoisers must be non-empty");
    positive(c.delta, "delta");
    positive(c.t_max, "t_max");
    c.target_samples = get_count(doc, "target_samples", c.trials);
    if (c.target_samples < 2) config_fail("target_samples must be >= 2");
  }
  if (e == "reduction") {
    if (specs.empty()) specs.push_back(json{{"id", "bayes"}});
    if (specs.size() != 1) config_fail("reduction takes exactly one denoiser");
    c.sigma = positive(get_or<double>(doc, "sigma", 0.0), "sigma");
    c.theta = positive(get_or<double>(doc, "theta", 0.0), "theta");
    c.repeats = get_count(doc, "repeats", 0);
    if (c.repeats < 1) config_fail("repeats must be >= 1");
    positive(c.delta, "delta");
    const double t0 = 1.0 / (c.sigma * c.sigma);
    if (t0 > c.theta * nd * nd) config_fail("1/sigma^2 exceeds T = theta*n^2");
  }
  if (e == "cheat-demo") {
    if (c.trials < 2) config_fail("trials must be >= 2");
    positive(c.delta, "delta");
    positive(c.t_max, "t_max");
    c.chi_n = get_count(doc, "chi_n", c.chi_n);
    c.chi_k = get_count(doc, "chi_k", c.chi_k);
    c.chi_draws = get_count(doc, "chi_draws", c.chi_draws);
    if (c.chi_k == 0 || c.chi_k > c.chi_n) config_fail("need 1 <= chi_k <= chi_n");
    if (c.chi_draws < 1) config_fail("chi_draws must be >= 1");
    if (enumeration_size(c.chi_n, c.chi_k) > c.enum_cap) {
      throw CapacityError("cheat-demo: uniformity check over B_{chi_n,chi_k} exceeds the enumeration cap",
                          enumeration_size(c.chi_n, c.chi_k));
    }
    specs = {json{{"id", "cheat"}}};
  }

  // Resolve every spec now so unknown ids fail before any output is written.
  std::set<std::string> labels;
  for (const auto& s : specs) {
    std::string label;
    if (base_id(s) == "cheat") {
      reject_unknown(s, {"id", "label"}, "denoiser cheat");
      if (e != "generate" && e != "cheat-demo") make_factory(s, c.n, c.k, c.enum_cap);
      label = output_label(s, "cheat");
    } else {
      label = make_factory(s, c.n, c.k, c.enum_cap).id;
    }
    if (!labels.insert(label).second) {
      config_fail("duplicate estimator id '" + label + "'; set a distinct 'label'");
    }
  }
  c.denoisers = std::move(specs);
  return c;
}

json resolved_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["n"] = c.n;
  j["k"] = c.k;
  j["target"] = std::string(to_string(c.target));
  j["denoisers"] = c.denoisers;
  j["seed"] = c.seed;
  j["enum_cap"] = c.enum_cap;
  if (c.grid) j["grid"] = grid_json(*c.grid);
  if (c.experiment != "reduction") j["trials"] = c.trials;
  if (c.experiment == "generate" || c.experiment == "cheat-demo" ||
      c.experiment == "reduction") {
    j["delta"] = c.delta;
  }
  if (c.experiment == "generate" || c.experiment == "cheat-demo") j["t_max"] = c.t_max;
  if (c.experiment == "generate") j["target_samples"] = c.target_samples;
  if (c.experiment == "reduction") {
    j["sigma"] = c.sigma;
    j["theta"] = c.theta;
    j["repeats"] = c.repeats;
  }
  if (c.experiment == "cheat-demo") {
    j["chi_n"] = c.chi_n;
    j["chi_k"] = c.chi_k;
    j["chi_draws"] = c.chi_draws;
  }
  return j;
}

namespace {

void write_csv_header(std::ostream& out, const ExperimentConfig& c) {
  out << "# schema_version=" << kSchemaVersion << '\n';
  out << "# version=" << version_string() << '\n';
  out << "# experiment=" << c.experiment << '\n';
  out << "# config=" << resolved_json(c).dump() << '\n';
  out << "# n=" << c.n << '\n';
  out << "# k=" << c.k << '\n';
  out << "# t_alg=" << fmt(t_alg(c.n, c.k)) << '\n';
  out << "# t_bayes=" << fmt(t_bayes(c.n, c.k)) << '\n';
}

json report_preamble(const ExperimentConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["version"] = version_string();
  j["experiment"] = c.experiment;
  j["config"] = resolved_json(c);
  j["t_alg"] = t_alg(c.n, c.k);
  j["t_bayes"] = t_bayes(c.n, c.k);
  return j;
}

void run_curves(const ExperimentConfig& c, std::ostream& out, std::size_t threads) {
  const std::vector<double> grid = resolve_grid(*c.grid, c.n, c.k);
  std::vector<NamedFactory> estimators;
  for (const auto& s : c.denoisers) estimators.push_back(make_factory(s, c.n, c.k, c.enum_cap));
  std::sort(estimators.begin(), estimators.end(),
            [](const NamedFactory& a, const NamedFactory& b) { return a.id < b.id; });
  const TargetDistribution dist{c.target, c.n, c.k};
  const auto curves = mse_curves(estimators, dist, grid, c.trials, NoiseStream(c.seed), threads);

  write_csv_header(out, c);
  out << "t,t_over_n,estimator_id,mse_mean,mse_stderr,trials,seed\n";
  const double nd = static_cast<double>(c.n);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (const auto& curve : curves) {
      const MetricRecord& r = curve.records[g];
      out << fmt(r.t) << ',' << fmt(r.t / nd) << ',' << r.estimator_id << ',' << fmt(r.mean)
          << ',' << fmt(r.stderr_) << ',' << r.trials << ',' << r.seed << '\n';
    }
  }
}

struct GeneratedSample {
  double frobenius = 0.0;
  double trace = 0.0;
  double top_eigenvalue = 0.0;
};

std::unique_ptr<Denoiser> build_drift(const json& spec, const ExperimentConfig& c,
                                      const NoiseStream& trial) {
  if (base_id(spec) == "cheat") {
    return std::make_unique<CheatDenoiser>(first_noise_draw(c.n, trial.split("diffusion")), c.k);
  }
  return make_factory(spec, c.n, c.k, c.enum_cap).make(trial.split("den"));
}

std::string drift_label(const json& spec, const ExperimentConfig& c) {
  if (base_id(spec) == "cheat") return output_label(spec, "cheat");
  return make_factory(spec, c.n, c.k, c.enum_cap).id;
}

void run_generate(const ExperimentConfig& c, std::ostream& out, std::size_t threads) {
  const NoiseStream root(c.seed);
  const TargetDistribution dist{c.target, c.n, c.k};
  DiffusionConfig dc;
  dc.n = c.n;
  dc.delta = c.delta;
  dc.t_max = c.t_max;

  // Target-side statistic values, shared by every drift.
  std::vector<double> target_norms(c.target_samples);
  parallel_for(c.target_samples, threads, [&](std::size_t i) {
    NoiseStream s = root.split("target").split(i);
    target_norms[i] = std::sqrt(frobenius_squared(sample_target(dist, s).x));
  });

  std::vector<std::pair<std::string, json>> specs;
  for (const auto& s : c.denoisers) specs.emplace_back(drift_label(s, c), s);
  std::sort(specs.begin(), specs.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::vector<GeneratedSample>> samples(specs.size(),
                                                    std::vector<GeneratedSample>(c.trials));
  for (std::size_t e = 0; e < specs.size(); ++e) {
    parallel_for(c.trials, threads, [&](std::size_t r) {
      // Trials share their noise across drifts so drifts are compared on
      // the same Brownian increments.
      const NoiseStream trial = root.split("trial").split(r);
      auto drift = build_drift(specs[e].second, c, trial);
      const DiffusionRun run = euler_sample(*drift, dc, trial.split("diffusion"));
      GeneratedSample& g = samples[e][r];
      g.frobenius = std::sqrt(frobenius_squared(run.final_sample));
      g.trace = run.final_sample.matrix().trace();
      g.top_eigenvalue = top_eigenpairs(run.final_sample, 1)[0].value;
    });
  }

  write_csv_header(out, c);
  out << "# t_end=" << fmt(c.delta * static_cast<double>(step_count(dc))) << '\n';
  out << "# w1_statistic=frobenius_norm\n";
  out << "# target_mean_frobenius="
      << fmt(compensated_sum(target_norms) / static_cast<double>(target_norms.size())) << '\n';
  for (std::size_t e = 0; e < specs.size(); ++e) {
    std::vector<double> norms;
    for (const auto& g : samples[e]) norms.push_back(g.frobenius);
    const W1Bound w1 = w1_from_statistics(norms, target_norms);
    const auto small = std::count_if(norms.begin(), norms.end(), [](double v) { return v <= 0.05; });
    const std::string& id = specs[e].first;
    out << "# w1_bound." << id << '=' << fmt(w1.bound) << '\n';
    out << "# w1_stderr." << id << '=' << fmt(w1.stderr_) << '\n';
    out << "# sample_mean_frobenius." << id << '=' << fmt(w1.mean_a) << '\n';
    out << "# fraction_norm_le_0.05." << id << '='
        << fmt(static_cast<double>(small) / static_cast<double>(norms.size())) << '\n';
  }
  out << "trial,estimator_id,frobenius_norm,trace,top_eigenvalue,seed\n";
  for (std::size_t e = 0; e < specs.size(); ++e) {
    for (std::size_t r = 0; r < c.trials; ++r) {
      const GeneratedSample& g = samples[e][r];
      out << r << ',' << specs[e].first << ',' << fmt(g.frobenius) << ',' << fmt(g.trace) << ','
          << fmt(g.top_eigenvalue) << ',' << c.seed << '\n';
    }
  }
}

double relative_error(const Matrix& est, const Matrix& truth) {
  return std::sqrt(frobenius_squared(Matrix(est - truth)) / frobenius_squared(truth));
}

void run_reduction(const ExperimentConfig& c, std::ostream& out, std::size_t threads) {
  const NoiseStream root(c.seed);
  const TargetDistribution dist{c.target, c.n, c.k};
  NoiseStream xs = root.split("x");
  NoiseStream ys = root.split("y");
  const TargetDraw draw = sample_target(dist, xs);
  const Matrix y = draw.x.matrix() + c.sigma * gaussian_matrix(c.n, ys);
  const double t0 = 1.0 / (c.sigma * c.sigma);
  const Matrix y_t0 = y * t0;

  ReductionConfig rc{c.sigma, c.theta, c.delta, c.repeats};
  const NamedFactory drift = make_factory(c.denoisers.front(), c.n, c.k, c.enum_cap);
  const std::vector<Matrix> samples =
      reduction_samples(y, drift.make, rc, root.split("reduction"), threads);

  BayesOracleDenoiser oracle(c.n, c.k, c.enum_cap);
  const AtomSnapper snapper = AtomSnapper::spikes_and_zero(c.n, c.k);
  const std::vector<double> posterior = snapped_posterior(oracle, y_t0, snapper);
  const std::vector<double> empirical = snapped_frequencies(samples, snapper);
  const Matrix posterior_mean = oracle.evaluate(y_t0, t0).matrix();

  json curve = json::array();
  Matrix running = Matrix::Zero(y.rows(), y.cols());
  std::size_t next = 1;
  double mean_error = 0.0;
  for (std::size_t r = 0; r < samples.size(); ++r) {
    running += samples[r];
    const std::size_t m = r + 1;
    if (m == next || m == samples.size()) {
      const double err = relative_error(running / static_cast<double>(m), posterior_mean);
      curve.push_back({{"repeats", m}, {"relative_error", err}});
      if (m == next) next *= 4;
      if (m == samples.size()) mean_error = err;
    }
  }

  json report = report_preamble(c);
  report["estimator_id"] = drift.id;
  report["t0"] = t0;
  report["T"] = c.theta * static_cast<double>(c.n * c.n);
  report["truth"] = {{"support", draw.spike ? json(draw.spike->support()) : json::array()},
                     {"signs", draw.spike ? json(draw.spike->signs()) : json::array()}};
  report["tv"] = tv_discrete(empirical, posterior);
  report["posterior_mean_relative_error"] = mean_error;
  report["posterior_mean_error_by_repeats"] = curve;
  report["other_fraction"] = empirical.back();
  report["posterior"] = posterior;
  report["empirical"] = empirical;
  out << report.dump(2) << '\n';
}

void run_cheat_demo(const ExperimentConfig& c, std::ostream& out, std::size_t threads) {
  const NoiseStream root(c.seed);
  const TargetDistribution dist{c.target, c.n, c.k};
  const double nd = static_cast<double>(c.n);

  // (i) score-matching error of the cheat drift against fresh targets.
  const double t_eval = t_alg(c.n, c.k);
  std::vector<double> errs(c.trials);
  parallel_for(c.trials, threads, [&](std::size_t r) {
    const NoiseStream trial = root.split("mse").split(r);
    CheatDenoiser cheat(first_noise_draw(c.n, trial.split("diffusion")), c.k);
    NoiseStream xs = trial.split("x");
    NoiseStream ys = trial.split("y");
    const TargetDraw draw = sample_target(dist, xs);
    const Observation obs = observe_single(draw.x, t_eval, ys);
    errs[r] = squared_error(cheat.evaluate(obs.y, obs.t), draw);
  });
  const MeanStderr mse = mean_stderr(errs);
  const double analytic = 2.0 - 2.0 / nd;

  // (ii) uniformity of the cheat spike over B_{chi_n, chi_k}.
  const BayesOracleDenoiser atoms(c.chi_n, c.chi_k, c.enum_cap);
  std::map<std::pair<std::vector<std::size_t>, std::vector<int>>, std::size_t> index;
  for (std::size_t a = 0; a < atoms.atom_count(); ++a) {
    const SparseSpike u = atoms.atom(a);
    index[{u.support(), u.signs()}] = a;
  }
  std::vector<std::size_t> draws(c.chi_draws);
  parallel_for(c.chi_draws, threads, [&](std::size_t d) {
    const NoiseStream s = root.split("uniformity").split(d);
    const CheatDenoiser cheat(first_noise_draw(c.chi_n, s), c.chi_k);
    draws[d] = index.at({cheat.spike().support(), cheat.spike().signs()});
  });
  std::vector<std::size_t> counts(atoms.atom_count(), 0);
  for (std::size_t a : draws) ++counts[a];
  const std::vector<double> expected(counts.size(), 1.0 / static_cast<double>(counts.size()));
  const double pvalue = chi_squared_uniformity_pvalue(counts, expected);

  // (iii) ŷ_t / t approaches the cheat spike at rate n / √t.
  const NoiseStream traj = root.split("trajectory");
  CheatDenoiser cheat(first_noise_draw(c.n, traj), c.k);
  DiffusionConfig dc;
  dc.n = c.n;
  dc.delta = c.delta;
  dc.t_max = c.t_max;
  dc.record_steps = log_spaced_steps(step_count(dc), 50);
  const DiffusionRun run = euler_sample(cheat, dc, traj);
  json trajectory = json::array();
  std::vector<double> lt;
  std::vector<double> le;
  std::size_t within = 0;
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    const double t = run.times[i];
    if (!(t > 0.0)) continue;
    const double err =
        std::sqrt(frobenius_squared(Matrix(run.states[i] / t - cheat.spike().matrix().matrix())));
    const double bound = nd / std::sqrt(t);
    trajectory.push_back({{"t", t}, {"error", err}, {"bound", bound}});
    lt.push_back(std::log(t));
    le.push_back(std::log(err));
    if (err <= 1.1 * bound) ++within;
  }
  // Least-squares slope of log error against log t.
  double slope = 0.0;
  if (lt.size() >= 2) {
    const double mt = compensated_sum(lt) / static_cast<double>(lt.size());
    const double me = compensated_sum(le) / static_cast<double>(le.size());
    CompensatedSum num;
    CompensatedSum den;
    for (std::size_t i = 0; i < lt.size(); ++i) {
      num.add((lt[i] - mt) * (le[i] - me));
      den.add((lt[i] - mt) * (lt[i] - mt));
    }
    slope = num.value() / den.value();
  }

  json report = report_preamble(c);
  report["mse"] = {{"mean", mse.mean},
                   {"stderr", mse.stderr_},
                   {"trials", c.trials},
                   {"analytic", analytic},
                   {"z_score", mse.stderr_ > 0.0 ? (mse.mean - analytic) / mse.stderr_ : 0.0}};
  report["uniformity"] = {{"n", c.chi_n},
                          {"k", c.chi_k},
                          {"draws", c.chi_draws},
                          {"categories", counts.size()},
                          {"chi2_pvalue", pvalue}};
  report["trajectory"] = trajectory;
  report["trajectory_loglog_slope"] = slope;
  report["trajectory_within_1.1_bound"] = within;
  out << report.dump(2) << '\n';
}

}  // namespace

void run_experiment(const ExperimentConfig& config, std::ostream& out, std::size_t threads) {
  const std::string& e = config.experiment;
  if (e == "mse-curve" || e == "oracle-phase") return run_curves(config, out, threads);
  if (e == "generate") return run_generate(config, out, threads);
  if (e == "reduction") return run_reduction(config, out, threads);
  if (e == "cheat-demo") return run_cheat_demo(config, out, threads);
  config_fail("unknown experiment '" + e + "'");
}

}  // namespace spikediff
