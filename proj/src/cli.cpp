// Copyright 2026 The tomoplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tomoplan/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "tomoplan/highdim_strategies.hpp"
#include "tomoplan/qubit_strategies.hpp"
#include "tomoplan/serialize.hpp"
#include "tomoplan/simulate.hpp"

namespace tomoplan::cli {

namespace {

using io::Json;

/// Invalid user input; exit code 2.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_double(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(x)) {
    throw SchemaError("not a number: '" + std::string(text) + "'");
  }
  return x;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

BlochVector parse_bloch(std::string_view text) {
  const auto v = parse_list(text);
  if (v.size() != 3) throw SchemaError("Bloch vector needs 3 components");
  return BlochVector(v[0], v[1], v[2]);
}

int require_dim(std::optional<int> dim, std::string_view what) {
  if (!dim) throw SchemaError(std::string(what) + " needs a dimension (--dim/--d)");
  if (*dim < 1) throw SchemaError("dimension must be positive");
  return *dim;
}

struct Common {
  std::string out_dir = ".";
  std::string format = "auto";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool quiet = false;
};

struct Artifact {
  std::string name;
  std::string content;
};

void emit(const Common& common, std::string_view command, const Json& config,
          const std::vector<std::uint64_t>& seeds, const std::vector<Artifact>& files,
          std::string_view stdout_text, std::ostream& out) {
  std::filesystem::create_directories(common.out_dir);
  std::vector<std::string> names;
  for (const auto& f : files) {
    io::write_file((std::filesystem::path(common.out_dir) / f.name).string(), f.content);
    names.push_back(f.name);
  }
  const Json manifest = io::run_manifest(command, config, seeds, names);
  io::write_file(
      (std::filesystem::path(common.out_dir) / (std::string(command) + ".manifest.json")).string(),
      manifest.dump(2) + "\n");
  if (!common.quiet) out << stdout_text;
}

bool want_csv(const Common& common, bool default_csv) {
  return common.format == "csv" || (common.format == "auto" && default_csv);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// --- plan-qubit -----------------------------------------------------------

struct PlanArgs {
  std::string u = "0,0,0";
  double n = 0.0;
  std::string mode = "volume";
  bool numeric = false;
  int m = 3;
  int restarts = 32;
  int iterations = 2000;
};

void run_plan(const PlanArgs& a, const Common& common, std::ostream& out) {
  const BlochVector u = parse_bloch(a.u);
  if (!(u.norm() < 1.0)) throw SchemaError("--u must lie strictly inside the unit ball");
  const Mode mode = parse_mode(a.mode);
  Json config{{"u", {u.x(), u.y(), u.z()}}, {"n", a.n}, {"mode", a.mode}, {"numeric", a.numeric}};
  if (a.numeric) {
    config["m"] = a.m;
    config["restarts"] = a.restarts;
    config["iterations"] = a.iterations;
    config["seed"] = common.seed;
  }

  const qubit::QubitOptimum opt = qubit::lemma_optimum(u, a.n, mode);
  const KnowledgeReport report = knowledge_report(qubit::qubit_matrix(u, opt.config));
  Json result{{"command", "plan-qubit"}, {"u", {u.x(), u.y(), u.z()}}, {"n", a.n}};
  result["optimum"] = io::to_json(opt);
  if (a.n >= 1.0) {
    result["counts"] =
        sim::largest_remainder(opt.config.weights, static_cast<std::size_t>(std::llround(a.n)));
  }
  result["report"] = io::to_json(report);
  std::vector<std::uint64_t> seeds;
  if (a.numeric) {
    qubit::OptimizerOptions options;
    options.restarts = a.restarts;
    options.iterations = a.iterations;
    options.seed = common.seed;
    const auto numeric = qubit::optimize_config_numeric(u, a.n, a.m, mode, options);
    result["numeric"] = io::to_json(numeric, mode);
    result["numeric"]["relative_gap"] = (numeric.value - opt.value) / opt.value;
    seeds.push_back(common.seed);
  }
  const std::string text = result.dump(2) + "\n";
  io::CsvWriter csv({"axis", "cx", "cy", "cz", "weight", "count"});
  for (std::size_t b = 0; b < opt.config.axes.size(); ++b) {
    const Vec3& c = opt.config.axes[b];
    csv.cell(b + 1).cell(c.x()).cell(c.y()).cell(c.z()).cell(opt.config.weights[b]);
    if (result.contains("counts")) {
      csv.cell(result["counts"][b].get<std::size_t>());
    } else {
      csv.cell("");
    }
    csv.end_row();
  }
  emit(common, "plan-qubit", config, seeds,
       {{"plan-qubit.json", text}, {"plan-qubit.csv", csv.str()}},
       want_csv(common, false) ? csv.str() : text, out);
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string strategy = "adaptive";
  std::string u;
  std::string state;
  std::optional<int> dim;
  std::size_t n = 10000;
  std::size_t batch = 500;
  std::string mode = "distance";
  std::size_t trials = 100;
  bool trajectory = false;
};

void run_simulate(const SimulateArgs& a, const Common& common, std::ostream& out) {
  const Mode mode = parse_mode(a.mode);
  if (!a.u.empty() && !a.state.empty()) throw SchemaError("give either --u or --state, not both");
  const DensityMatrix truth = !a.u.empty() ? bloch_to_density(parse_bloch(a.u))
                              : !a.state.empty() ? parse_state(a.state, a.dim)
                                                 : bloch_to_density(BlochVector::Zero());
  const int d = truth.dim();
  if (a.trials < 1) throw SchemaError("--trials must be >= 1");
  if (a.n < 1) throw SchemaError("--n must be >= 1");

  std::function<sim::TrialResult(std::size_t, std::uint64_t)> trial;
  double predicted_tr = 0.0;
  const bool qubit = d == 2;
  if (a.strategy == "adaptive" || a.strategy == "fixed-lemma" || a.strategy == "fixed-xyz") {
    if (!qubit) throw SchemaError("strategy '" + a.strategy + "' needs a qubit state");
  }
  BlochVector u = qubit ? density_to_bloch(truth) : BlochVector::Zero();
  if (qubit && !(u.norm() < 1.0)) throw SchemaError("qubit state must be mixed (|u| < 1)");
  const double n = static_cast<double>(a.n);

  if (a.strategy == "adaptive") {
    if (a.batch < 30 || a.n < 10 * a.batch) {
      throw SchemaError("adaptive runs need --batch >= 30 and --n >= 10 * batch");
    }
    sim::AdaptiveOptions options;
    options.batch = a.batch;
    trial = [u, n = a.n, mode, options](std::size_t, std::uint64_t seed) {
      return sim::run_adaptive_qubit(u, n, mode, seed, options);
    };
    predicted_tr = knowledge_report(qubit::qubit_matrix(u, qubit::lemma_optimum(u, n, mode).config)).tr_M_inv;
  } else if (a.strategy == "fixed-lemma" || a.strategy == "fixed-xyz") {
    qubit::QubitConfig cfg;
    if (a.strategy == "fixed-lemma") {
      cfg = qubit::lemma_optimum(u, n, mode).config;
    } else {
      cfg.axes = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
      cfg.weights = {n / 3.0, n / 3.0, n / 3.0};
      cfg.total = n;
    }
    predicted_tr = knowledge_report(qubit::qubit_matrix(u, cfg)).tr_M_inv;
    std::vector<StrategyItem> items;
    for (std::size_t b = 0; b < cfg.axes.size(); ++b) {
      items.push_back({axis_observable(cfg.axes[b]), cfg.weights[b]});
    }
    const StrategyConfig strategy(std::move(items), n);
    trial = [truth, strategy](std::size_t, std::uint64_t seed) {
      return sim::run_fixed(truth, strategy, seed);
    };
  } else if (a.strategy == "strategy1") {
    if (!truth.invertible()) throw SchemaError("strategy1 needs an interior state");
    const auto split = highdim::strategy1_split(truth, n, mode);
    const StrategyConfig strategy = highdim::strategy1_realization(truth, split.n1, split.n2);
    predicted_tr = highdim::strategy1(truth, n, mode).tr_M_inv;
    trial = [truth, strategy](std::size_t, std::uint64_t seed) {
      return sim::run_fixed(truth, strategy, seed);
    };
  } else {
    throw SchemaError("unknown strategy '" + a.strategy + "'");
  }

  const auto results = sim::run_ensemble(a.trials, common.seed, common.threads, trial);
  const sim::ErrorMetric metric = qubit ? sim::ErrorMetric::Bloch : sim::ErrorMetric::HilbertSchmidt;
  const sim::EnsembleStats stats = sim::aggregate(results, metric, std::string(mode_name(mode)));
  // Bloch error estimates Tr(M^-1); the Hilbert-Schmidt error is half of it.
  const double predicted = qubit ? predicted_tr : predicted_tr / 2.0;

  std::vector<std::uint64_t> seeds;
  std::string jsonl;
  io::CsvWriter csv({"trial", "seed", "n", "squared_error", "bloch_squared_error"});
  for (std::size_t k = 0; k < results.size(); ++k) {
    seeds.push_back(results[k].seed);
    jsonl += io::to_json(results[k], a.trajectory).dump() + "\n";
    csv.cell(k).cell(std::to_string(results[k].seed)).cell(results[k].n_used).cell(results[k].squared_error);
    if (results[k].bloch_squared_error) {
      csv.cell(*results[k].bloch_squared_error);
    } else {
      csv.cell(std::string_view(""));
    }
    csv.end_row();
  }

  Json config{{"strategy", a.strategy}, {"state", io::to_json(truth.matrix())}, {"n", a.n},
              {"batch", a.batch},       {"mode", a.mode},               {"trials", a.trials},
              {"seed", common.seed},    {"trajectory", a.trajectory}};
  Json result{{"command", "simulate"},
              {"strategy", a.strategy},
              {"dim", d},
              {"metric", qubit ? "bloch" : "hilbert_schmidt"},
              {"summary", io::to_json(stats)},
              {"n_times_mean", n * stats.mean_sq_error},
              {"n_times_stderr", n * stats.std_error},
              {"predicted_n_times_mean", n * predicted}};
  const std::string text = result.dump(2) + "\n";
  emit(common, "simulate", config, seeds,
       {{"simulate.json", text}, {"simulate.jsonl", jsonl}, {"simulate.csv", csv.str()}},
       want_csv(common, false) ? csv.str() : text, out);
}

// --- compare --------------------------------------------------------------

struct CompareArgs {
  std::vector<int> d{4};
  std::vector<std::string> state{"tracial"};
  std::vector<double> n{1000.0};
  std::string mode = "both";
};

void run_compare(const CompareArgs& a, const Common& common, std::ostream& out) {
  std::vector<Mode> modes;
  if (a.mode == "both") {
    modes = {Mode::Volume, Mode::Distance};
  } else {
    modes = {parse_mode(a.mode)};
  }
  io::CsvWriter csv({"d", "state", "strategy", "mode", "n", "value"});
  Json rows = Json::array();
  auto add = [&](int d, const std::string& state, const char* strategy, Mode mode, double n,
                 double value) {
    csv.cell(d).cell(state).cell(std::string_view(strategy)).cell(mode_name(mode)).cell(n).cell(value);
    csv.end_row();
    rows.push_back(Json{{"d", d}, {"state", state}, {"strategy", strategy},
                        {"mode", std::string(mode_name(mode))}, {"n", n}, {"value", value}});
  };
  for (int d : a.d) {
    if (d < 2) throw SchemaError("--d values must be >= 2");
    for (const auto& desc : a.state) {
      const DensityMatrix tau = parse_state(desc, d);
      if (tau.dim() != d) throw SchemaError("state '" + desc + "' does not have dimension " + std::to_string(d));
      for (double n : a.n) {
        if (!(n > 0.0)) throw SchemaError("--n values must be positive");
        for (Mode mode : modes) {
          const auto s1 = highdim::strategy1(tau, n, mode);
          add(d, desc, "strategy1", mode, n, mode == Mode::Volume ? s1.det_M : s1.tr_M_inv);
          if (d % 2 == 0) {
            const auto s2 = highdim::strategy2_uniform(tau, n, mode);
            add(d, desc, "strategy2", mode, n, mode == Mode::Volume ? s2.det_M : s2.tr_M_inv);
          }
        }
      }
    }
  }
  Json config{{"d", a.d}, {"state", a.state}, {"n", a.n}, {"mode", a.mode}};
  const Json result{{"command", "compare"}, {"rows", rows}};
  const std::string text = result.dump(2) + "\n";
  emit(common, "compare", config, {}, {{"compare.json", text}, {"compare.csv", csv.str()}},
       want_csv(common, true) ? csv.str() : text, out);
}

// --- partition ------------------------------------------------------------

void run_partition(int d, const Common& common, std::ostream& out) {
  if (d < 2 || d % 2 != 0) throw SchemaError("--d must be even and >= 2");
  Json result{{"command", "partition"}};
  result.update(io::to_json(highdim::round_robin(d)));
  Json config{{"d", d}};
  const std::string text = result.dump(2) + "\n";
  io::CsvWriter csv({"round", "first", "second"});
  const highdim::PairSchedule schedule = highdim::round_robin(d);
  for (std::size_t r = 0; r < schedule.rounds.size(); ++r) {
    for (auto [i, j] : schedule.rounds[r]) {
      csv.cell(r + 1).cell(i).cell(j);
      csv.end_row();
    }
  }
  emit(common, "partition", config, {},
       {{"partition.json", text}, {"partition.csv", csv.str()}},
       want_csv(common, false) ? csv.str() : text, out);
}

// --- escalate -------------------------------------------------------------

struct EscalateArgs {
  int dim = 50;
  std::string state = "basis:10";
  double eps0 = 0.1;
  std::size_t runs = 1;
  std::vector<std::size_t> n_tomo;
  bool refine = false;
  std::size_t refine_shots = 100;
  double refine_threshold = 0.01;
  std::size_t budget = 1'000'000;
};

struct EscalateRun {
  std::uint64_t seed;
  sim::EscalationResult escalation;
  std::vector<double> distances;
  std::vector<std::size_t> shots;
};

void run_escalate(const EscalateArgs& a, const Common& common, std::ostream& out) {
  if (a.dim < 1 || a.dim > 64) throw SchemaError("--dim must be in [1, 64]");
  if (!(a.eps0 > 0.0)) throw SchemaError("--eps0 must be positive");
  if (a.runs < 1) throw SchemaError("--runs must be >= 1");
  const DensityMatrix tau = parse_state(a.state, a.dim);
  if (tau.dim() != a.dim) throw SchemaError("state dimension differs from --dim");
  sim::EscalationOptions options;
  options.refine = a.refine;
  options.refine_shots = a.refine_shots;
  options.refine_threshold = a.refine_threshold;
  options.budget = a.budget;

  const auto runs = sim::parallel_map<EscalateRun>(a.runs, common.threads, [&](std::size_t k) {
    const std::uint64_t seed = derive_seed(common.seed, k);
    EscalateRun r{seed, sim::dimension_escalation(tau, a.eps0, derive_seed(seed, 0), options), {}, {}};
    for (std::size_t n : a.n_tomo) {
      const auto t = sim::escalate_and_estimate(tau, a.eps0, n, seed, options);
      r.distances.push_back(t.distance);
      r.shots.push_back(t.tomography_shots);
    }
    return r;
  });

  Json runs_json = Json::array();
  std::vector<double> d_eff, n0;
  std::vector<std::uint64_t> seeds;
  for (const auto& r : runs) {
    seeds.push_back(r.seed);
    d_eff.push_back(r.escalation.d_eff);
    n0.push_back(static_cast<double>(r.escalation.n0));
    Json j{{"seed", r.seed}, {"escalation", io::to_json(r.escalation)}};
    if (!a.n_tomo.empty()) j["distances"] = r.distances;
    runs_json.push_back(std::move(j));
  }

  io::CsvWriter csv({"n", "runs", "eps_rms", "eps_median", "mean_shots"});
  Json tomo = Json::array();
  std::vector<double> log_n, log_eps;
  for (std::size_t i = 0; i < a.n_tomo.size(); ++i) {
    std::vector<double> eps;
    double sq = 0.0;
    double shots = 0.0;
    for (const auto& r : runs) {
      eps.push_back(r.distances[i]);
      sq += r.distances[i] * r.distances[i];
      shots += static_cast<double>(r.shots[i]);
    }
    const double rms = std::sqrt(sq / static_cast<double>(runs.size()));
    const double med = median(eps);
    shots /= static_cast<double>(runs.size());
    csv.cell(a.n_tomo[i]).cell(runs.size()).cell(rms).cell(med).cell(shots);
    csv.end_row();
    tomo.push_back(Json{{"n", a.n_tomo[i]}, {"eps_rms", rms}, {"eps_median", med}, {"mean_shots", shots}});
    log_n.push_back(std::log(static_cast<double>(a.n_tomo[i])));
    log_eps.push_back(std::log(rms));
  }

  Json result{{"command", "escalate"},
              {"dim", a.dim},
              {"eps0", a.eps0},
              {"median_d_eff", median(d_eff)},
              {"median_n0", median(n0)},
              {"runs", runs_json}};
  if (!a.n_tomo.empty()) result["tomography"] = tomo;
  if (log_n.size() >= 2) {
    // Least-squares slope of ln n against ln eps_rms; n ~ eps^-2 gives -2.
    const double k = static_cast<double>(log_n.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      mx += log_eps[i] / k;
      my += log_n[i] / k;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sxy += (log_eps[i] - mx) * (log_n[i] - my);
      sxx += (log_eps[i] - mx) * (log_eps[i] - mx);
    }
    result["slope_log_n_vs_log_eps"] = sxy / sxx;
  }

  Json config{{"dim", a.dim},         {"state", a.state},       {"eps0", a.eps0},
              {"runs", a.runs},       {"n_tomo", a.n_tomo},     {"refine", a.refine},
              {"refine_shots", a.refine_shots}, {"refine_threshold", a.refine_threshold},
              {"budget", a.budget},   {"seed", common.seed}};
  const std::string text = result.dump(2) + "\n";
  std::vector<Artifact> files{{"escalate.json", text}};
  if (!a.n_tomo.empty()) files.push_back({"escalate.csv", csv.str()});
  emit(common, "escalate", config, seeds, files,
       want_csv(common, false) && !a.n_tomo.empty() ? csv.str() : text, out);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("TOMOPLAN_SEED")) {
    std::uint64_t s = 0;
    const std::string_view text(env);
    const auto res = std::from_chars(text.data(), text.data() + text.size(), s);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
      throw SchemaError("TOMOPLAN_SEED is not an unsigned integer");
    }
    return s;
  }
  return 1;
}

}  // namespace

DensityMatrix parse_state(std::string_view descriptor, std::optional<int> dim) {
  const auto colon = descriptor.find(':');
  const std::string_view kind = descriptor.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view() : descriptor.substr(colon + 1);
  try {
    if (kind == "tracial") {
      return DensityMatrix::maximally_mixed(require_dim(dim, "tracial"));
    }
    if (kind == "bloch") {
      if (dim && *dim != 2) throw SchemaError("bloch states are qubits");
      return bloch_to_density(parse_bloch(arg));
    }
    if (kind == "diag") {
      std::vector<double> p = parse_list(arg);
      if (dim) {
        if (static_cast<int>(p.size()) > *dim) throw SchemaError("diag has more entries than --dim");
        p.resize(static_cast<std::size_t>(*dim), 0.0);
      }
      return DensityMatrix::diagonal(p);
    }
    if (kind == "basis") {
      const int d = require_dim(dim, "basis");
      const double k = parse_double(arg);
      if (k != std::floor(k) || k < 1 || k > d) throw SchemaError("basis index out of range");
      ComplexVector psi = ComplexVector::Zero(d);
      psi(static_cast<Eigen::Index>(k) - 1) = 1.0;
      return DensityMatrix::pure(psi);
    }
    if (kind == "small-a") {
      return highdim::small_a_state(require_dim(dim, "small-a"), parse_double(arg));
    }
    if (kind == "file") {
      std::ifstream in{std::string(arg)};
      if (!in) throw SchemaError("cannot read state file '" + std::string(arg) + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      const DensityMatrix rho(io::matrix_from_json(io::Json::parse(buf.str())));
      if (dim && rho.dim() != *dim) throw SchemaError("state file dimension differs from --dim");
      return rho;
    }
  } catch (const io::Json::exception& e) {
    throw SchemaError(std::string("bad state file: ") + e.what());
  } catch (const Error& e) {
    throw SchemaError(std::string("invalid state '") + std::string(descriptor) + "': " + e.what());
  }
  throw SchemaError("unknown state descriptor '" + std::string(descriptor) + "'");
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Measurement-strategy planner and tomography simulator", "tomoplan"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  std::optional<std::uint64_t> seed;
  app.add_option("--out-dir", common.out_dir, "Directory for artifacts")->capture_default_str();
  app.add_option("--format", common.format, "Format printed to stdout")
      ->check(CLI::IsMember({"auto", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--seed", seed, "Base seed (default: $TOMOPLAN_SEED or 1)");
  app.add_option("--threads", common.threads, "Worker threads for ensembles")
      ->check(CLI::Range(1u, 1024u));
  app.add_flag("--quiet", common.quiet, "Do not print the result");
  common.threads = std::max(1u, std::thread::hardware_concurrency());

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan-qubit", "Optimal qubit configuration for given u and n");
  plan_cmd->add_option("--u", plan.u, "Bloch vector x,y,z of the current guess")->required();
  plan_cmd->add_option("--n", plan.n, "Number of measurements")->required()->check(CLI::PositiveNumber);
  plan_cmd->add_option("--mode", plan.mode)->check(CLI::IsMember({"volume", "distance"}))->capture_default_str();
  plan_cmd->add_flag("--numeric", plan.numeric, "Also run the numerical optimizer");
  plan_cmd->add_option("--m", plan.m, "Axes for the numerical optimizer")->check(CLI::Range(3, 64));
  plan_cmd->add_option("--restarts", plan.restarts)->check(CLI::Range(1, 100000));
  plan_cmd->add_option("--iterations", plan.iterations)->check(CLI::Range(1, 10000000));

  SimulateArgs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo ensembles of measurement runs");
  sim_cmd->add_option("--strategy", simulate.strategy)
      ->check(CLI::IsMember({"adaptive", "fixed-lemma", "fixed-xyz", "strategy1"}))
      ->capture_default_str();
  sim_cmd->add_option("--u", simulate.u, "True Bloch vector (qubit)");
  sim_cmd->add_option("--state", simulate.state, "True state descriptor");
  sim_cmd->add_option("--dim", simulate.dim, "Dimension for --state")->check(CLI::Range(1, 64));
  sim_cmd->add_option("--n", simulate.n, "Measurements per trial")->capture_default_str();
  sim_cmd->add_option("--batch", simulate.batch, "Adaptive batch size")->capture_default_str();
  sim_cmd->add_option("--mode", simulate.mode)->check(CLI::IsMember({"volume", "distance"}))->capture_default_str();
  sim_cmd->add_option("--trials", simulate.trials)->capture_default_str();
  sim_cmd->add_flag("--trajectory", simulate.trajectory, "Include per-batch snapshots in the JSONL");

  CompareArgs compare;
  auto* cmp_cmd = app.add_subcommand("compare", "Strategy 1 vs strategy 2 knowledge measures");
  cmp_cmd->add_option("--d", compare.d, "Dimensions")->delimiter(',')->capture_default_str();
  cmp_cmd->add_option("--state", compare.state, "State descriptors")->capture_default_str();
  cmp_cmd->add_option("--n", compare.n, "Measurement budgets")->delimiter(',')->capture_default_str();
  cmp_cmd->add_option("--mode", compare.mode)
      ->check(CLI::IsMember({"volume", "distance", "both"}))
      ->capture_default_str();

  int partition_d = 0;
  auto* part_cmd = app.add_subcommand("partition", "Round-robin pair schedule");
  part_cmd->add_option("--d", partition_d, "Even dimension")->required();

  EscalateArgs escalate;
  auto* esc_cmd = app.add_subcommand("escalate", "Dimension escalation demo");
  esc_cmd->add_option("--dim", escalate.dim)->capture_default_str();
  esc_cmd->add_option("--state", escalate.state)->capture_default_str();
  esc_cmd->add_option("--eps0", escalate.eps0)->capture_default_str();
  esc_cmd->add_option("--runs", escalate.runs, "Independent seeded runs")->capture_default_str();
  esc_cmd->add_option("--n-tomo", escalate.n_tomo, "Tomography budgets inside P")->delimiter(',');
  esc_cmd->add_flag("--refine", escalate.refine, "Test each new vector before keeping it");
  esc_cmd->add_option("--refine-shots", escalate.refine_shots)->capture_default_str();
  esc_cmd->add_option("--refine-threshold", escalate.refine_threshold)->capture_default_str();
  esc_cmd->add_option("--budget", escalate.budget)->capture_default_str();

  std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return 2;
  }

  try {
    common.seed = seed ? *seed : default_seed();
    if (*plan_cmd) run_plan(plan, common, out);
    if (*sim_cmd) run_simulate(simulate, common, out);
    if (*cmp_cmd) run_compare(compare, common, out);
    if (*part_cmd) run_partition(partition_d, common, out);
    if (*esc_cmd) run_escalate(escalate, common, out);
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int dispatch(int argc, const char* const* argv) {
  return dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace tomoplan::cli
