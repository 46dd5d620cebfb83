#include "growgraph/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "growgraph/bounds.hpp"
#include "growgraph/dataset_io.hpp"
#include "growgraph/distance.hpp"
#include "growgraph/errors.hpp"
#include "growgraph/flocking.hpp"
#include "growgraph/gnn.hpp"
#include "growgraph/graph.hpp"
#include "growgraph/graphon.hpp"
#include "growgraph/parallel.hpp"
#include "growgraph/params_io.hpp"
#include "growgraph/random.hpp"
#include "growgraph/spectral.hpp"
#include "growgraph/strict_json.hpp"
#include "growgraph/teacher_student.hpp"
#include "growgraph/trainer.hpp"

namespace growgraph::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Raised when a run finishes but its own checks fail.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Run {
  fs::path dir;
  fs::path base_dir;  // directory of the config file
  std::size_t threads = 1;
  bool record_wall_time = false;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  json summary = json::object();
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  std::ofstream open(const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    outputs.push_back(name);
    return f;
  }
  fs::path path(const std::string& name) {
    outputs.push_back(name);
    return dir / name;
  }
  fs::path resolve(const std::string& p) const {
    const fs::path q(p);
    return q.is_absolute() ? q : base_dir / q;
  }
};

// ---- shared config blocks ------------------------------------------------------------------

struct ModelSpec {
  std::size_t taps = 1;
  std::vector<std::size_t> dims;
  ActivationPlan plan;
  double init_margin = 1e-3;
};

ModelSpec parse_model(const json& j, const std::string& where) {
  strict::require_keys(j, {"taps", "dims", "activation", "identity_readout", "init_margin"}, where);
  ModelSpec m;
  m.taps = strict::unsigned_int(j, "taps", where);
  if (m.taps < 1) throw ConfigError(where + ".taps must be >= 1");
  if (!j.contains("dims") || !j.at("dims").is_array() || j.at("dims").size() < 2) {
    throw ConfigError(where + ".dims: expected an array of at least two widths");
  }
  for (const auto& d : j.at("dims")) {
    if (!d.is_number_unsigned() || d.get<std::size_t>() == 0) {
      throw ConfigError(where + ".dims: widths must be positive integers");
    }
    m.dims.push_back(d.get<std::size_t>());
  }
  m.plan.hidden = activation_from_string(strict::string_or(j, "activation", "tanh", where));
  m.plan.identity_readout = strict::boolean_or(j, "identity_readout", false, where);
  m.init_margin = strict::number_or(j, "init_margin", 1e-3, where);
  if (!(m.init_margin > 0.0 && m.init_margin < 1.0)) {
    throw ConfigError(where + ".init_margin must lie in (0,1)");
  }
  return m;
}

SignalSpec parse_signal(const json& j, const std::string& where) {
  strict::require_keys(j, {"family", "modes", "noise_std"}, where);
  SignalSpec s;
  try {
    s.family = signal_family_from_string(strict::string_or(j, "family", "fourier", where));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ".family: " + e.what());
  }
  s.modes = strict::unsigned_or(j, "modes", 4, where);
  s.noise_std = strict::number_or(j, "noise_std", 0.0, where);
  if (s.noise_std < 0.0) throw ConfigError(where + ".noise_std must be >= 0");
  return s;
}

std::vector<std::size_t> parse_sizes(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty()) {
    throw ConfigError(where + "." + key + ": expected a non-empty array of positive integers");
  }
  std::vector<std::size_t> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
      throw ConfigError(where + "." + key + ": expected positive integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

LossKind parse_loss(const std::string& name, const std::string& where) {
  if (name == "half_mean_square") return LossKind::HalfMeanSquare;
  if (name == "half_square") return LossKind::HalfSquare;
  throw ConfigError(where + ": unknown loss '" + name + "'");
}

Graphon parse_graphon(const json& cfg, const Run& run) {
  return Graphon::from_json(strict::object(cfg, "graphon", "config"), run.base_dir);
}

/// The nested train block takes its seed from the master seed.
TrainConfig parse_train(const json& cfg, std::uint64_t seed) {
  const auto& t = strict::object(cfg, "train", "config");
  if (t.contains("seed")) throw ConfigError("train.seed: set the top-level 'seed' instead");
  auto c = TrainConfig::from_json(t);
  c.seed = seed;
  c.validate();
  return c;
}

void write_params(Run& run, const ParamTensor& params, const ActivationPlan& plan) {
  save_params(run.path("params.bin"), params, plan, run.seed);
  auto csv = run.open("params.csv");
  export_params_csv(csv, params);
}

void write_log(Run& run, const TrainResult& r) {
  auto csv = run.open("train_log.csv");
  write_train_log_csv(csv, r.log, run.record_wall_time);
  for (const auto& w : r.warnings) *run.err << "warning: " << w << '\n';
  run.summary["epochs_run"] = r.log.rows.size();
  run.summary["stopped_early"] = r.stopped_early;
  if (!r.log.rows.empty()) {
    run.summary["final_n"] = r.log.rows.back().n;
    run.summary["final_mean_loss"] = r.log.rows.back().mean_loss;
  }
}

// ---- subcommands ---------------------------------------------------------------------------

void graphon_check(const json& cfg, Run& run) {
  strict::require_keys(cfg, {"seed", "graphon", "signal", "sizes", "grid_factor", "signal_grid",
                             "slack", "xi"},
                       "config");
  const auto w = parse_graphon(cfg, run);
  GraphonSignal x = GraphonSignal::identity();
  try {
    x = signal_from_name(strict::string_or(cfg, "signal", "identity", "config"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config.signal: ") + e.what());
  }
  const auto sizes = parse_sizes(cfg, "sizes", "config");
  const auto grid_factor = strict::unsigned_or(cfg, "grid_factor", 8, "config");
  const auto signal_grid = strict::unsigned_or(cfg, "signal_grid", 4096, "config");
  const double slack = strict::number_or(cfg, "slack", 1e-3, "config");
  const double xi = strict::number_or(cfg, "xi", 0.1, "config");
  if (grid_factor < 1) throw ConfigError("config.grid_factor must be >= 1");
  if (signal_grid < 2) throw ConfigError("config.signal_grid must be >= 2");
  if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("config.xi must lie in (0,1)");

  auto csv = run.open("graphon_check.csv");
  csv << "n,signal_distance,signal_bound,graphon_distance,graphon_bound,grid_m,within_bounds,"
         "d_w,size_condition\n";
  std::size_t failures = 0;
  for (std::size_t n : sizes) {
    const double sd = l2_signal_distance(x, induced_step_signal(x.sample(n)), signal_grid);
    const std::size_t grid_m = std::max<std::size_t>(2, grid_factor * n);
    const double gd = l2_graphon_distance(w, template_step(w, n), grid_m);
    const double sb = 1.0 / static_cast<double>(n);
    const double gb = 2.0 / static_cast<double>(n) + slack;
    const bool ok = sd <= sb && gd <= gb;
    failures += !ok;
    const auto deg = degree_condition_check(w, n, xi, std::max<std::size_t>(16, grid_m));
    csv << n << ',' << format_double(sd) << ',' << format_double(sb) << ',' << format_double(gd)
        << ',' << format_double(gb) << ',' << grid_m << ',' << (ok ? 1 : 0) << ','
        << format_double(deg.d_w) << ',' << (deg.holds ? 1 : 0) << '\n';
  }
  run.summary["rows"] = sizes.size();
  run.summary["violations"] = failures;
  if (failures > 0) throw ValidationFailure(std::to_string(failures) + " size(s) exceed the distance bounds");
}

void spectra(const json& cfg, Run& run) {
  strict::require_keys(cfg, {"seed", "graphon", "sizes", "c", "samples"}, "config");
  const auto w = parse_graphon(cfg, run);
  const auto sizes = parse_sizes(cfg, "sizes", "config");
  const double c = strict::number_or(cfg, "c", 0.5, "config");
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("config.c must lie in (0,1]");
  const auto samples = strict::unsigned_or(cfg, "samples", 1, "config");

  auto eig = run.open("spectra.csv");
  auto sum = run.open("spectra_summary.csv");
  eig << "n,sample,index,template_eigenvalue,sampled_eigenvalue\n";
  sum << "n,sample,c,band_cardinality,eigenvalue_margin\n";
  for (std::size_t n : sizes) {
    const auto tmpl = template_graph(w, n);
    const auto ref = sorted_eigenvalues(tmpl.gso());
    std::vector<SpectralSummary> results(samples);
    parallel_for(samples, run.threads, [&](std::size_t s) {
      const auto g = sample_stochastic(tmpl, derive_seed(derive_seed(run.seed, n), s));
      results[s] = spectral_summary(tmpl.gso(), g.gso(), c);
    });
    for (std::size_t s = 0; s < samples; ++s) {
      const auto& r = results[s];
      for (std::size_t i = 0; i < n; ++i) {
        eig << n << ',' << s << ',' << i << ',' << format_double(ref[i]) << ','
            << format_double(r.eigenvalues[i]) << '\n';
      }
      const double m = *r.eigenvalue_margin;
      sum << n << ',' << s << ',' << format_double(c) << ',' << r.band_cardinality << ','
          << (std::isinf(m) ? std::string("inf") : format_double(m)) << '\n';
    }
  }
}

struct TeacherStudentSetup {
  ModelSpec model;
  ParamTensor teacher;
  ParamTensor student;
  std::unique_ptr<TeacherStudentTask> task;
};

TeacherStudentSetup teacher_student_setup(const json& cfg, const Run& run, std::size_t samples) {
  TeacherStudentSetup s;
  s.model = parse_model(strict::object(cfg, "model", "config"), "model");
  const double scale = strict::number_or(cfg, "teacher_scale", 1.0, "config");
  const auto signal = cfg.contains("signal") ? parse_signal(cfg.at("signal"), "signal") : SignalSpec{};
  s.teacher = init_params(s.model.taps, s.model.dims, derive_seed(run.seed, 1), s.model.init_margin);
  s.teacher *= scale;
  s.teacher = project_nonamplifying(std::move(s.teacher), s.model.init_margin);
  s.student = init_params(s.model.taps, s.model.dims, derive_seed(run.seed, 2), s.model.init_margin);
  s.task = std::make_unique<TeacherStudentTask>(parse_graphon(cfg, run), s.teacher, s.model.plan,
                                                samples, signal, derive_seed(run.seed, 3));
  return s;
}

void train_ts(const json& cfg, Run& run) {
  strict::require_keys(cfg, {"seed", "graphon", "model", "teacher_scale", "signal", "samples", "train"},
                       "config");
  const auto samples = strict::unsigned_or(cfg, "samples", 32, "config");
  const auto train = parse_train(cfg, derive_seed(run.seed, 4));
  auto setup = teacher_student_setup(cfg, run, samples);
  const auto r = train_growing(train, *setup.task, setup.student, setup.model.plan, run.threads);
  write_log(run, r);
  write_params(run, r.params, setup.model.plan);
}

void grad_dist(const json& cfg, Run& run) {
  strict::require_keys(cfg, {"seed", "graphon", "model", "teacher_scale", "signal", "sizes", "ref_n",
                             "trials", "loss"},
                       "config");
  const auto sizes = parse_sizes(cfg, "sizes", "config");
  const auto ref_n = strict::unsigned_int(cfg, "ref_n", "config");
  const auto trials = strict::unsigned_or(cfg, "trials", 50, "config");
  if (trials < 1) throw ConfigError("config.trials must be >= 1");
  for (auto n : sizes) {
    if (n > ref_n) throw ConfigError("config.ref_n must be >= every entry of config.sizes");
  }
  const auto loss = parse_loss(strict::string_or(cfg, "loss", "half_mean_square", "config"), "config.loss");
  auto setup = teacher_student_setup(cfg, run, 1);

  auto per = run.open("grad_dist.csv");
  auto sum = run.open("grad_dist_summary.csv");
  per << "n,ref_n,trial,distance\n";
  sum << "n,ref_n,trials,mean,median\n";
  json medians = json::array();
  for (std::size_t n : sizes) {
    const auto est = grad_distance_estimate(setup.student, setup.model.plan, loss, *setup.task, n,
                                            ref_n, trials, derive_seed(run.seed, 5), run.threads);
    for (std::size_t t = 0; t < trials; ++t) {
      per << n << ',' << ref_n << ',' << t << ',' << format_double(est.per_trial[t]) << '\n';
    }
    sum << n << ',' << ref_n << ',' << trials << ',' << format_double(est.mean) << ','
        << format_double(est.median) << '\n';
    medians.push_back(est.median);
  }
  run.summary["medians"] = medians;
}

flock::FlockConfig parse_flock(const json& cfg) {
  return cfg.contains("flock") ? flock::FlockConfig::from_json(cfg.at("flock")) : flock::FlockConfig{};
}

void flock_gen(const json& cfg, Run& run) {
  strict::require_keys(cfg, {"seed", "flock", "n", "episodes", "horizon"}, "config");
  const auto fc = parse_flock(cfg);
  const auto n = strict::unsigned_int(cfg, "n", "config");
  const auto episodes = strict::unsigned_int(cfg, "episodes", "config");
  const auto horizon = strict::unsigned_or(cfg, "horizon", fc.horizon, "config");
  if (n < 1) throw ConfigError("config.n must be >= 1");
  if (episodes < 1) throw ConfigError("config.episodes must be >= 1");
  const auto data = flock::generate_dataset(n, episodes, horizon, fc, run.seed, run.threads);
  save_dataset(run.path("dataset.bin"), data);
  const json manifest = {{"n", n},           {"episodes", episodes}, {"horizon", horizon},
                         {"seed", run.seed}, {"config", fc.to_json()}, {"samples", data.size()}};
  auto m = run.open("dataset.json");
  m << manifest.dump(2) << '\n';
  run.summary["samples"] = data.size();
}

void flock_train(const json& cfg, Run& run) {
  strict::require_keys(cfg, {"seed", "flock", "model", "episodes", "horizon", "train"}, "config");
  const auto fc = parse_flock(cfg);
  const auto model = parse_model(strict::object(cfg, "model", "config"), "model");
  if (model.dims.front() != 6 || model.dims.back() != 2) {
    throw ConfigError("model.dims must start at 6 and end at 2 for flocking");
  }
  const auto episodes = strict::unsigned_int(cfg, "episodes", "config");
  const auto horizon = strict::unsigned_or(cfg, "horizon", fc.horizon, "config");
  if (episodes < 1) throw ConfigError("config.episodes must be >= 1");
  const auto train = parse_train(cfg, derive_seed(run.seed, 4));
  flock::FlockTask task(fc, episodes, horizon, derive_seed(run.seed, 3), run.threads);
  const auto initial = init_params(model.taps, model.dims, derive_seed(run.seed, 2), model.init_margin);
  const auto r = train_growing(train, task, initial, model.plan, run.threads);
  write_log(run, r);
  write_params(run, r.params, model.plan);
}

void flock_eval(const json& cfg, Run& run) {
  strict::require_keys(cfg, {"seed", "flock", "n", "episodes", "horizon", "policy", "trajectories",
                             "max_sigma_ratio", "min_distance"},
                       "config");
  const auto fc = parse_flock(cfg);
  const auto n = strict::unsigned_int(cfg, "n", "config");
  const auto episodes = strict::unsigned_int(cfg, "episodes", "config");
  const auto horizon = strict::unsigned_or(cfg, "horizon", fc.horizon, "config");
  const bool trajectories = strict::boolean_or(cfg, "trajectories", false, "config");
  if (n < 1 || episodes < 1) throw ConfigError("config.n and config.episodes must be >= 1");
  // Optional pass/fail thresholds on final/initial sigma_v and the closest approach.
  const bool check_ratio = cfg.contains("max_sigma_ratio");
  const bool check_dist = cfg.contains("min_distance");
  const double max_ratio = strict::number_or(cfg, "max_sigma_ratio", 0.0, "config");
  const double min_dist = strict::number_or(cfg, "min_distance", 0.0, "config");

  flock::Policy policy = flock::ExpertPolicy{};
  std::string label = "expert";
  const auto& p = strict::object(cfg, "policy", "config");
  strict::require_keys(p, {"kind", "params"}, "policy");
  const auto kind = strict::string(p, "kind", "policy");
  if (kind == "gnn") {
    const auto stored = load_params(run.resolve(strict::string(p, "params", "policy")));
    policy = flock::GnnPolicy{stored.params, stored.plan};
    label = "gnn";
  } else if (kind != "expert") {
    throw ConfigError("policy.kind: expected 'expert' or 'gnn', got '" + kind + "'");
  } else if (p.contains("params")) {
    throw ConfigError("policy.params: only valid with kind 'gnn'");
  }

  std::vector<flock::Trajectory> pol(episodes), exp(episodes);
  parallel_for(episodes, run.threads, [&](std::size_t e) {
    const auto init = flock::init_swarm(n, fc, flock::episode_seed(run.seed, e));
    exp[e] = flock::rollout(init, flock::ExpertPolicy{}, fc, horizon);
    pol[e] = std::holds_alternative<flock::ExpertPolicy>(policy) ? exp[e]
                                                                 : flock::rollout(init, policy, fc, horizon);
  });

  auto csv = run.open("flock_eval.csv");
  csv << "episode,policy,steps,sigma_v_initial,sigma_v_final,sigma_v_sum,sigma_v_mean,min_distance,"
         "relative_cost,passed\n";
  std::size_t passed = 0;
  for (std::size_t e = 0; e < episodes; ++e) {
    const auto& t = pol[e];
    double sum = 0.0;
    double closest = flock::min_pairwise_distance(t.final_state.positions);
    for (const auto& s : t.steps) {
      sum += s.sigma_v;
      closest = std::min(closest, flock::min_pairwise_distance(s.state.positions));
    }
    const double initial = t.steps.empty() ? flock::velocity_variation(t.final_state) : t.steps.front().sigma_v;
    const double final_sigma = flock::velocity_variation(t.final_state);
    const auto rc = flock::relative_cost(t, exp[e]);
    bool ok = true;
    if (check_ratio) ok = ok && final_sigma <= max_ratio * initial;
    if (check_dist && n > 1) ok = ok && closest >= min_dist;
    passed += ok;
    const double mean = t.steps.empty() ? 0.0 : sum / static_cast<double>(t.steps.size());
    csv << e << ',' << label << ',' << t.steps.size() << ',' << format_double(initial) << ','
        << format_double(final_sigma) << ',' << format_double(sum) << ',' << format_double(mean) << ','
        << format_double(closest) << ',' << (rc.degenerate ? std::string("inf") : format_double(rc.value))
        << ',' << (ok ? 1 : 0) << '\n';
  }
  const auto total = flock::relative_cost(pol, exp);
  run.summary["relative_cost"] = total.degenerate ? json("inf") : json(total.value);
  run.summary["episodes_passed"] = passed;
  if (trajectories) {
    auto tc = run.open("trajectories.csv");
    flock::write_trajectory_csv_header(tc);
    for (std::size_t e = 0; e < episodes; ++e) flock::write_trajectory_csv(tc, pol[e], e);
  }
  if ((check_ratio || check_dist) && passed < episodes) {
    run.summary["episodes_failed"] = episodes - passed;
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void report(const json& cfg, Run& run) {
  strict::require_keys(cfg, {"seed", "inputs"}, "config");
  if (!cfg.contains("inputs") || !cfg.at("inputs").is_array() || cfg.at("inputs").empty()) {
    throw ConfigError("config.inputs: expected a non-empty array of {label, path}");
  }
  auto csv = run.open("report.csv");
  csv << "source,row,column,value\n";
  std::size_t rows = 0;
  for (const auto& item : cfg.at("inputs")) {
    strict::require_keys(item, {"label", "path"}, "inputs[]");
    const auto label = strict::string(item, "label", "inputs[]");
    const auto path = run.resolve(strict::string(item, "path", "inputs[]"));
    std::ifstream in(path);
    if (!in) throw ConfigError("inputs[].path: cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) continue;
    const auto header = split_csv_line(line);
    std::size_t r = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = split_csv_line(line);
      for (std::size_t c = 0; c < header.size() && c < fields.size(); ++c) {
        if (fields[c].empty()) continue;
        csv << label << ',' << r << ',' << header[c] << ',' << fields[c] << '\n';
      }
      ++r;
    }
    rows += r;
  }
  run.summary["rows"] = rows;
}

using Command = void (*)(const json&, Run&);

struct CommandEntry {
  const char* name;
  const char* help;
  Command fn;
};

constexpr CommandEntry kCommands[] = {
    {"graphon-check", "Sampling and discretization distance sweep", graphon_check},
    {"spectra", "Eigenvalues, band cardinality and eigenvalue margins", spectra},
    {"train-ts", "Teacher-student training on growing graphs", train_ts},
    {"grad-dist", "Gradient distance to a large reference graph", grad_dist},
    {"flock-gen", "Expert imitation dataset", flock_gen},
    {"flock-train", "Imitation training on growing swarms", flock_train},
    {"flock-eval", "Policy rollouts and velocity variation", flock_eval},
    {"report", "Merge CSV files into long format", report},
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph neural networks trained on growing graphs sampled from graphons", "growgraph"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::string out_dir = "runs";
  std::size_t threads = 1;
  bool record_wall_time = false;
  std::vector<CLI::App*> subs;
  for (const auto& c : kCommands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed_override, "Master seed (overrides the config)");
    sub->add_option("--out", out_dir, "Parent directory of the run directory");
    sub->add_option("--threads", threads, "Worker threads (outputs do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--record-wall-time", record_wall_time, "Fill the wall_time_s column of training logs");
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  const CommandEntry* entry = nullptr;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) entry = &kCommands[i];
  }

  Run run;
  run.out = &out;
  run.err = &err;
  run.threads = threads;
  run.record_wall_time = record_wall_time;
  json cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config: expected a JSON object");
    if (seed_override) cfg["seed"] = *seed_override;
    run.seed = strict::unsigned_or(cfg, "seed", 0, "config");
    cfg["seed"] = run.seed;
    run.base_dir = fs::absolute(fs::path(config_path)).parent_path();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  const json hashed = {{"command", entry->name}, {"config", cfg}};
  const std::string hash = hex64(fnv1a64(hashed.dump()));
  run.dir = fs::path(out_dir) / hash;
  const std::string started = utc_now();

  int code = kOk;
  std::string failure;
  try {
    fs::create_directories(run.dir);
    entry->fn(cfg, run);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationFailure& e) {
    failure = e.what();
    code = kValidationFailure;
  } catch (const TrainingError& e) {
    failure = std::string(e.what()) + " (sample " + std::to_string(e.sample_index()) + ")";
    code = kValidationFailure;
  } catch (const std::exception& e) {
    failure = e.what();
    code = kValidationFailure;
  }

  if (run.summary.contains("episodes_failed") && code == kOk) {
    failure = std::to_string(run.summary["episodes_failed"].get<std::size_t>()) +
              " episode(s) failed the configured thresholds";
    code = kValidationFailure;
  }

  json manifest = {{"command", entry->name},
                   {"config_hash", hash},
                   {"seed", run.seed},
                   {"version", kVersion},
                   {"threads", run.threads},
                   {"start_time", started},
                   {"end_time", utc_now()},
                   {"outputs", run.outputs},
                   {"config", cfg},
                   {"summary", run.summary},
                   {"exit_code", code}};
  if (!failure.empty()) manifest["failure"] = failure;
  try {
    std::ofstream m(run.dir / "manifest.json");
    m << manifest.dump(2) << '\n';
    std::ofstream c(run.dir / "config.json");
    c << cfg.dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "error: cannot write manifest: " << e.what() << '\n';
    return kValidationFailure;
  }

  if (code != kOk) {
    err << "validation failure: " << failure << '\n';
  }
  out << run.dir.string() << '\n';
  return code;
}

}  // namespace growgraph::cli
