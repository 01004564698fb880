#pragma once

// Command-line front end. Each subcommand reads declared input files,
// writes its output plus a run manifest, and returns 0 on success, 1 on a
// usage error and 2 on a data or model error.

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wayfind/discrete_choice.hpp"
#include "wayfind/features.hpp"
#include "wayfind/io.hpp"
#include "wayfind/modelsearch.hpp"
#include "wayfind/regression.hpp"
#include "wayfind/replica.hpp"
#include "wayfind/routeset.hpp"
#include "wayfind/stats.hpp"
#include "wayfind/synth.hpp"

namespace wayfind::cli {

inline constexpr std::string_view kArtifactVersion = "wayfind 0.1.0";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Logging

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel log_level() {
  const char* env = std::getenv("WAYFIND_LOG");
  if (!env) return LogLevel::warn;
  const std::string v = env;
  if (v == "error") return LogLevel::error;
  if (v == "info") return LogLevel::info;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::warn;
}

inline void log(std::ostream& err, LogLevel level, const std::string& msg) {
  static constexpr const char* names[] = {"error", "warn", "info", "debug"};
  if (static_cast<int>(level) <= static_cast<int>(log_level()))
    err << "wayfind " << names[static_cast<int>(level)] << ": " << msg << '\n';
}

// ---------------------------------------------------------------------------
// Digests and manifests

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return s.str();
}

struct Options {
  std::string network;
  std::string data;
  std::string spec;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out;
  std::string format;
  bool strict = false;

  // gen-routes
  std::string od;
  int depth = 2;
  std::size_t sample = 0;
  // derive-metrics
  double pause_speed = 0.1;
  double min_pause = 3.0;
  // estimate-choice / search-choice
  std::string method = "bfgs";
  std::string family = "psl";
  std::string phase = "infra";
  std::vector<std::string> candidates;
  std::vector<std::string> person_candidates;
  double alpha_t = 0.05;
  double alpha_chi2 = 0.05;
  int max_stage = 8;
  bool full_powerset = false;
  // estimate-mlr / correlate
  std::string metrics;
  std::string response = "all";
  double alpha = 0.05;
  std::string columns = "infra";
  double threshold = 0.4;
  // report
  std::vector<std::string> results;
};

/// Collects inputs and outputs of one run and writes the manifest.
class Run {
 public:
  Run(std::string subcommand, std::vector<std::string> argv, const Options& opt, std::ostream& err)
      : subcommand_(std::move(subcommand)), argv_(std::move(argv)), opt_(opt), err_(err) {}

  void log(LogLevel level, const std::string& msg) { cli::log(err_, level, msg); }

  void input(const std::string& path, std::string_view content) { inputs_.push_back({path, sha256_hex(content)}); }

  std::string read(const std::string& path) {
    auto text = io::read_text(path);
    input(path, text);
    return text;
  }

  void write(const std::filesystem::path& path, std::string_view content) {
    io::write_text(path, content);
    outputs_.push_back({path.generic_string(), sha256_hex(content)});
  }

  /// Writes to --out, or to the stream when no path was given.
  void emit(std::string_view content, std::ostream& out) {
    if (opt_.out.empty()) out << content;
    else write(opt_.out, content);
  }

  void finish(const std::filesystem::path& manifest_path) {
    io::ojson flags;
    flags["network"] = opt_.network;
    flags["data"] = opt_.data;
    flags["spec"] = opt_.spec;
    flags["seed"] = opt_.seed;
    flags["jobs"] = opt_.jobs;
    flags["out"] = opt_.out;
    flags["format"] = opt_.format;
    flags["strict"] = opt_.strict;
    auto files = [](const std::vector<std::pair<std::string, std::string>>& v) {
      io::ojson a = io::ojson::array();
      for (const auto& [p, d] : v) a.push_back({{"path", p}, {"sha256", d}});
      return a;
    };
    const io::ojson m{{"artifact_version", kArtifactVersion},
                      {"subcommand", subcommand_},
                      {"argv", argv_},
                      {"flags", std::move(flags)},
                      {"seed", opt_.seed},
                      {"inputs", files(inputs_)},
                      {"outputs", files(outputs_)}};
    io::write_text(manifest_path, m.dump(2) + "\n");
  }

  /// Manifest next to a file output, or inside an output directory.
  void finish_default() {
    if (opt_.out.empty()) return;
    const std::filesystem::path out(opt_.out);
    finish(out.string() + ".manifest.json");
  }

 private:
  std::string subcommand_;
  std::vector<std::string> argv_;
  const Options& opt_;
  std::ostream& err_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

// ---------------------------------------------------------------------------
// Shared helpers

inline Network load_network(Run& run, const Options& opt) {
  if (opt.network.empty()) throw UsageError("--network is required");
  if (opt.network == "builtin:replica" || opt.network == "builtin:desk") {
    auto net = opt.network == "builtin:replica" ? replica::building() : synth::desk_network();
    run.input(opt.network, io::to_json(net).dump());
    return net;
  }
  const io::Source src{opt.network, opt.strict};
  return io::network_from_json(io::parse_json(run.read(opt.network), src), src);
}

inline std::string require_format(const Options& opt, std::string_view fallback,
                                  std::initializer_list<std::string_view> allowed) {
  const std::string f = opt.format.empty() ? std::string(fallback) : opt.format;
  if (std::find(allowed.begin(), allowed.end(), f) == allowed.end())
    throw UsageError("--format " + f + " is not available for this subcommand");
  return f;
}

inline std::vector<std::string> default_route_candidates() {
  std::vector<std::string> out;
  for (const auto& n : FeatureVector::names())
    if (!n.starts_with("task_")) out.push_back(n);
  return out;
}

inline std::vector<std::string> default_person_candidates() {
  std::vector<std::string> out;
  for (const auto& n : ParticipantProfile::names())
    if (n != "age" && n != "height") out.push_back(n);
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

inline void cmd_gen_routes(Run& run, const Options& opt, std::ostream& out) {
  require_format(opt, "json", {"json"});
  const auto comma = opt.od.find(',');
  if (comma == std::string::npos) throw UsageError("--od expects ORIGIN,DESTINATION");
  const auto net = load_network(run, opt);
  auto set = bfs_le(net, opt.od.substr(0, comma), opt.od.substr(comma + 1), opt.depth);
  if (opt.sample > 0) set = sample_routes(set, opt.sample, opt.seed, "od=" + opt.od);
  run.emit(io::to_json(set, path_sizes(set)).dump(2) + "\n", out);
}

inline void cmd_features(Run& run, const Options& opt, std::ostream& out) {
  require_format(opt, "csv", {"csv"});
  if (opt.data.empty()) throw UsageError("--data is required");
  const io::Source src{opt.data, opt.strict};
  const auto obs = io::observations_from_json(io::parse_json(run.read(opt.data), src), src);
  std::optional<Network> net;
  if (!opt.network.empty()) net = load_network(run, opt);
  std::vector<io::FeatureRow> rows;
  for (const auto& o : obs) {
    const auto& chosen = o.alternatives[o.chosen_index];
    io::FeatureRow row{o.participant, o.task, chosen.features, o.profile};
    if (net && !chosen.link_ids.empty()) row.route = route_features(net->make_route(chosen.link_ids), *net, o.task);
    rows.push_back(std::move(row));
  }
  run.emit(io::features_csv(rows), out);
}

/// Trajectory files are named <participant>_task<k>.csv.
inline std::pair<std::string, int> trip_key(const std::filesystem::path& p) {
  const auto stem = p.stem().string();
  const auto pos = stem.rfind("_task");
  if (pos == std::string::npos) throw io::IoError(p.string() + ": file name must look like <participant>_task<k>.csv");
  const auto task = io::parse_number(stem.substr(pos + 5));
  if (!task) throw io::IoError(p.string() + ": task number missing from file name");
  return {stem.substr(0, pos), static_cast<int>(*task)};
}

inline void cmd_derive_metrics(Run& run, const Options& opt, std::ostream& out) {
  require_format(opt, "csv", {"csv"});
  if (opt.data.empty()) throw UsageError("--data is required");
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(opt.data)) {
    for (const auto& e : std::filesystem::directory_iterator(opt.data))
      if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  } else {
    files.emplace_back(opt.data);
  }
  if (files.empty()) throw io::IoError(opt.data + ": no trajectory files");
  std::vector<io::MetricsRow> rows(files.size());
  std::vector<std::string> texts(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) texts[i] = run.read(files[i].generic_string());
  const HesitationParams params{opt.pause_speed, opt.min_pause};
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto traj = io::trajectory_from_csv(texts[i], files[i].generic_string());
    const auto [participant, task] = trip_key(files[i]);
    const auto perf = wayfinding_performance(traj);
    rows[i] = {participant,
               task,
               perf.avg_speed_mps,
               static_cast<double>(detect_hesitations(traj, params)),
               head_rotation(traj),
               perf.total_time_s,
               perf.total_distance_m};
  }
  std::sort(rows.begin(), rows.end(), [](const io::MetricsRow& a, const io::MetricsRow& b) {
    return std::tie(a.participant, a.task) < std::tie(b.participant, b.task);
  });
  run.emit(io::metrics_csv(rows), out);
}

inline std::vector<choice::ChoiceObservation> read_observations(Run& run, const Options& opt) {
  if (opt.data.empty()) throw UsageError("--data is required");
  const io::Source src{opt.data, opt.strict};
  return io::observations_from_json(io::parse_json(run.read(opt.data), src), src);
}

inline choice::EstimationOptions estimation_options(const Options& opt) {
  choice::EstimationOptions e;
  if (opt.method == "newton") e.method = optim::Method::newton;
  else if (opt.method != "bfgs") throw UsageError("--method must be bfgs or newton");
  e.jobs = opt.jobs;
  return e;
}

inline void cmd_estimate_choice(Run& run, const Options& opt, std::ostream& out) {
  const auto format = require_format(opt, "json", {"json", "md"});
  if (opt.spec.empty()) throw UsageError("--spec is required");
  const io::Source spec_src{opt.spec, opt.strict};
  const auto spec = io::spec_from_json(io::parse_json(run.read(opt.spec), spec_src), spec_src);
  const auto obs = read_observations(run, opt);
  const auto r = choice::estimate(spec, obs, estimation_options(opt));
  if (!r.converged) run.log(LogLevel::warn, "estimation did not converge: " + r.message);
  const auto table = io::choice_table_markdown({{io::model_label(r), r}});
  if (format == "md") {
    run.emit(table, out);
    return;
  }
  auto j = io::to_json(r);
  j["table_markdown"] = table;
  run.emit(j.dump(2) + "\n", out);
}

inline void cmd_search_choice(Run& run, const Options& opt, std::ostream& out) {
  require_format(opt, "json", {"json"});
  const auto obs = read_observations(run, opt);
  search::SearchConfig cfg;
  cfg.candidates = opt.candidates.empty() ? default_route_candidates() : opt.candidates;
  const auto phase = search::parse_phase(opt.phase);
  if (phase == search::Phase::infra_then_personal)
    cfg.person_candidates = opt.person_candidates.empty() ? default_person_candidates() : opt.person_candidates;
  cfg.alpha_t = opt.alpha_t;
  cfg.alpha_chi2 = opt.alpha_chi2;
  cfg.max_stage = opt.max_stage;
  cfg.full_powerset = opt.full_powerset;
  cfg.jobs = opt.jobs;
  cfg.estimation = estimation_options(opt);
  const auto trace = search::stepwise_search(cfg, obs, choice::parse_family(opt.family), phase);
  if (!trace.diagnostic.empty()) run.log(LogLevel::warn, trace.diagnostic);
  run.emit(io::to_json(trace).dump(2) + "\n", out);
}

inline std::vector<io::FeatureRow> read_features(Run& run, const Options& opt) {
  if (opt.data.empty()) throw UsageError("--data is required");
  return io::features_from_csv(run.read(opt.data), opt.data);
}

inline void cmd_estimate_mlr(Run& run, const Options& opt, std::ostream& out) {
  const auto format = require_format(opt, "json", {"json", "md"});
  if (opt.metrics.empty()) throw UsageError("--metrics is required");
  const auto features = read_features(run, opt);
  const auto metrics = io::metrics_from_csv(run.read(opt.metrics), opt.metrics);
  const auto records = io::join_behavior(features, metrics);

  std::vector<std::string> responses;
  const auto& names = regression::behavior_names();
  if (opt.response == "all") responses.assign(names.begin(), names.end());
  else responses = {opt.response};
  std::vector<regression::BehaviorModels> models;
  for (const auto& resp : responses) {
    if (std::find(regression::behavior_names().begin(), regression::behavior_names().end(), resp) ==
        regression::behavior_names().end())
      throw UsageError("--response must be all, avg_speed, hesitation_count or head_rotation");
    regression::BehaviorModels m;
    m.response = resp;
    for (const auto v : {regression::Variant::infra, regression::Variant::personal, regression::Variant::combined})
      m.variants[static_cast<std::size_t>(v)] =
          regression::backward_stepwise(regression::behavior_design(records, resp, v), opt.alpha, true);
    models.push_back(std::move(m));
  }
  if (format == "md") {
    std::string s;
    for (const auto& m : models) s += regression::to_markdown(m) + "\n";
    run.emit(s, out);
    return;
  }
  io::ojson arr = io::ojson::array();
  for (const auto& m : models) {
    auto j = io::to_json(m);
    j["table_markdown"] = regression::to_markdown(m);
    arr.push_back(std::move(j));
  }
  run.emit(io::ojson{{"models", std::move(arr)}}.dump(2) + "\n", out);
}

inline void cmd_correlate(Run& run, const Options& opt, std::ostream& out) {
  const auto format = require_format(opt, "csv", {"csv", "md"});
  const auto rows = read_features(run, opt);
  std::vector<std::string> names;
  if (opt.columns == "infra") {
    names = default_route_candidates();
  } else if (opt.columns == "personal") {
    names = ParticipantProfile::names();
  } else {
    std::stringstream s(opt.columns);
    for (std::string n; std::getline(s, n, ',');) names.push_back(n);
  }
  std::vector<stats::NamedColumn> cols;
  for (const auto& n : names) {
    stats::NamedColumn c{n, {}};
    for (const auto& r : rows) {
      auto v = r.route.get(n);
      if (!v) v = r.profile.get(n);
      if (!v) throw UsageError("unknown column '" + n + "'");
      c.values.push_back(*v);
    }
    // Columns without variation have no rank correlation.
    if (std::all_of(c.values.begin(), c.values.end(), [&](double x) { return x == c.values.front(); })) {
      run.log(LogLevel::info, "skipping constant column '" + n + "'");
      continue;
    }
    cols.push_back(std::move(c));
  }
  const auto m = stats::correlation_matrix(cols, opt.threshold);
  if (format == "md") {
    run.emit(io::correlation_markdown(m), out);
    return;
  }
  run.emit(io::correlation_csv(m), out);
  if (!opt.out.empty()) run.write(std::filesystem::path(opt.out).replace_extension(".md"), io::correlation_markdown(m));
}

/// Simulation config: {"family", "terms", "interactions", "true_beta": {..},
/// "n_participants", "tasks": [{"task", "origin", "destination"}], "tree_depth",
/// "sample_size", "speed_mps", "speed_effects": {..}, "pause_rate",
/// "pause_min_s", "pause_max_s", "yaw_noise_deg", "trajectories"}.
inline void cmd_simulate(Run& run, const Options& opt, std::ostream&) {
  if (opt.spec.empty()) throw UsageError("--spec is required");
  if (opt.out.empty()) throw UsageError("--out (output directory) is required");
  require_format(opt, "json", {"json"});
  const io::Source src{opt.spec, opt.strict};
  const auto j = io::parse_json(run.read(opt.spec), src);
  io::expect_object(src, j, "");
  io::check_keys(src, j, "",
                 {"family", "terms", "interactions", "true_beta", "n_participants", "tasks", "tree_depth",
                  "sample_size", "speed_mps", "speed_effects", "pause_rate", "pause_min_s", "pause_max_s",
                  "yaw_noise_deg", "trajectories"});
  io::json model = io::json::object();
  for (const char* k : {"family", "terms", "interactions"})
    if (j.contains(k)) model[k] = j.at(k);
  const auto spec = io::spec_from_json(model, io::Source{opt.spec, false});

  const auto network_name = opt.network.empty() ? std::string("builtin:desk") : opt.network;
  Options with_net = opt;
  with_net.network = network_name;
  const auto net = load_network(run, with_net);

  synth::GenerativeConfig cfg;
  const auto& tb = io::required(src, j, "", "true_beta");
  io::expect_object(src, tb, "/true_beta");
  for (const auto& item : tb.items()) cfg.true_beta[item.key()] = io::get_number(src, tb, "/true_beta", item.key());
  cfg.n_participants = io::get_int_or(src, j, "", "n_participants", 100);
  if (j.contains("tasks")) {
    const auto& jt = j.at("tasks");
    io::expect_array(src, jt, "/tasks");
    for (std::size_t i = 0; i < jt.size(); ++i) {
      const auto p = io::child(std::string("/tasks"), i);
      io::expect_object(src, jt[i], p);
      io::check_keys(src, jt[i], p, {"task", "origin", "destination"});
      cfg.tasks.push_back({io::get_int(src, jt[i], p, "task"), io::get_string(src, jt[i], p, "origin"),
                           io::get_string(src, jt[i], p, "destination")});
    }
  } else if (network_name == "builtin:replica") {
    for (const auto& t : replica::tasks()) cfg.tasks.push_back({t.id, t.origin, t.destination});
  } else if (network_name == "builtin:desk") {
    cfg.tasks = synth::desk_tasks();
  } else {
    io::fail(src, "/tasks", "missing required field (no default tasks for this network)");
  }
  for (const auto& t : cfg.tasks)
    if (t.task < 1 || t.task > 4) io::fail(src, "/tasks", "task numbers must lie in 1..4");
  cfg.tree_depth = io::get_int_or(src, j, "", "tree_depth", 2);
  cfg.sample_size = static_cast<std::size_t>(io::get_int_or(src, j, "", "sample_size", 30));
  cfg.speed_mps = io::get_number_or(src, j, "", "speed_mps", 1.4);
  if (j.contains("speed_effects")) {
    const auto& se = j.at("speed_effects");
    io::expect_object(src, se, "/speed_effects");
    for (const auto& item : se.items())
      cfg.speed_effects[item.key()] = io::get_number(src, se, "/speed_effects", item.key());
  }
  cfg.pause_rate = io::get_number_or(src, j, "", "pause_rate", 0.0);
  cfg.pause_min_s = io::get_number_or(src, j, "", "pause_min_s", cfg.pause_min_s);
  cfg.pause_max_s = io::get_number_or(src, j, "", "pause_max_s", cfg.pause_max_s);
  cfg.yaw_noise_deg = io::get_number_or(src, j, "", "yaw_noise_deg", 0.0);
  const bool trajectories = io::get_bool_or(src, j, "", "trajectories", true);
  cfg.seed = opt.seed;
  cfg.jobs = opt.jobs;

  const auto sim = synth::simulate_choices_with_trips(net, spec, cfg);
  const std::filesystem::path dir(opt.out);
  run.write(dir / "observations.json", io::observations_to_json(sim.observations).dump(1) + "\n");
  if (trajectories) {
    std::vector<std::string> csv(sim.trips.size());
    parallel_for(sim.trips.size(), opt.jobs, [&](std::size_t i) {
      csv[i] = io::trajectory_csv(synth::simulate_trip_trajectory(sim.trips[i], net, cfg));
    });
    for (std::size_t i = 0; i < sim.trips.size(); ++i)
      run.write(dir / "trajectories" / (sim.trips[i].participant + "_task" + std::to_string(sim.trips[i].task) + ".csv"),
                csv[i]);
  }
  run.finish(dir / "manifest.json");
}

inline void cmd_report(Run& run, const Options& opt, std::ostream& out) {
  const auto format = require_format(opt, "json", {"json", "md"});
  std::vector<std::string> paths = opt.results;
  if (!opt.data.empty()) paths.insert(paths.begin(), opt.data);
  if (paths.empty()) throw UsageError("--data (estimation result JSON) is required");
  std::vector<std::pair<std::string, choice::EstimationResult>> models;
  for (const auto& p : paths) {
    const io::Source src{p, false};
    const auto r = io::result_from_json(io::parse_json(run.read(p), src), src);
    models.emplace_back(io::model_label(r), r);
  }
  const auto table = io::choice_table_markdown(models);
  if (format == "md") {
    run.emit(table, out);
    return;
  }
  bool all_converged = true;
  io::ojson arr = io::ojson::array();
  for (const auto& [label, r] : models) {
    all_converged = all_converged && r.converged;
    arr.push_back({{"label", label},
                   {"converged", r.converged},
                   {"log_likelihood", r.log_likelihood},
                   {"rho2", r.rho2},
                   {"rho2_adj", r.rho2_adj},
                   {"aic", r.aic},
                   {"bic", r.bic},
                   {"n_obs", r.n_obs},
                   {"k", r.k}});
  }
  const io::ojson j{{"converged", all_converged}, {"models", std::move(arr)}, {"table_markdown", table}};
  run.emit(j.dump(2) + "\n", out);
}

// ---------------------------------------------------------------------------
// Dispatch

inline void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--network", o.network, "network JSON file, or builtin:replica / builtin:desk");
  sub->add_option("--data", o.data, "input data file or directory");
  sub->add_option("--spec", o.spec, "model specification or simulation config JSON");
  sub->add_option("--seed", o.seed, "master seed for all stochastic stages");
  sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1u, 256u));
  sub->add_option("--out", o.out, "output path (stdout when omitted)");
  sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv", "md"}));
  sub->add_flag("--strict", o.strict, "reject unknown fields in input files");
}

inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Options opt;
  CLI::App app{"Pedestrian wayfinding analysis: route sets, route choice models, behavior regressions", "wayfind"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kArtifactVersion));

  auto* gen = app.add_subcommand("gen-routes", "BFS-LE route set for one origin-destination pair");
  gen->add_option("--od", opt.od, "ORIGIN,DESTINATION")->required();
  gen->add_option("--depth", opt.depth, "elimination tree depth")->check(CLI::NonNegativeNumber);
  gen->add_option("--sample", opt.sample, "draw this many routes (0 keeps all)");

  auto* feat = app.add_subcommand("features", "route and participant variables of the chosen routes");

  auto* metrics = app.add_subcommand("derive-metrics", "speed, hesitations and head rotation from trajectories");
  metrics->add_option("--pause-speed", opt.pause_speed, "speed below which a sample counts as paused (m/s)");
  metrics->add_option("--min-pause", opt.min_pause, "minimum hesitation duration (s)");

  auto* est = app.add_subcommand("estimate-choice", "estimate an MNL or PSL route choice model");
  est->add_option("--method", opt.method, "bfgs or newton");

  auto* srch = app.add_subcommand("search-choice", "stepwise combinatory specification search");
  srch->add_option("--family", opt.family, "mnl or psl");
  srch->add_option("--phase", opt.phase, "infra or both");
  srch->add_option("--candidates", opt.candidates, "route variables")->delimiter(',');
  srch->add_option("--person-candidates", opt.person_candidates, "participant variables")->delimiter(',');
  srch->add_option("--alpha-t", opt.alpha_t, "significance level of coefficients");
  srch->add_option("--alpha-chi2", opt.alpha_chi2, "significance level of likelihood ratio tests");
  srch->add_option("--max-stage", opt.max_stage, "largest number of terms");
  srch->add_flag("--full-powerset", opt.full_powerset, "test against every nested subset");
  srch->add_option("--method", opt.method, "bfgs or newton");

  auto* mlr = app.add_subcommand("estimate-mlr", "backward-stepwise regressions of behavior");
  mlr->add_option("--metrics", opt.metrics, "metrics CSV from derive-metrics");
  mlr->add_option("--response", opt.response, "all, avg_speed, hesitation_count or head_rotation");
  mlr->add_option("--alpha", opt.alpha, "removal significance level");

  auto* corr = app.add_subcommand("correlate", "Spearman rank correlation matrix");
  corr->add_option("--columns", opt.columns, "infra, personal or a comma-separated list");
  corr->add_option("--threshold", opt.threshold, "highlight |rho| above this value");

  auto* sim = app.add_subcommand("simulate", "synthetic choices and trajectories");
  auto* rep = app.add_subcommand("report", "route choice comparison table");
  rep->add_option("--results", opt.results, "further estimation result files")->delimiter(',');

  for (auto* sub : {gen, feat, metrics, est, srch, mlr, corr, sim, rep}) add_common(sub, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "wayfind: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  std::vector<std::string> args(argv + 1, argv + argc);
  Run run(sub->get_name(), args, opt, err);
  try {
    const auto& name = sub->get_name();
    log(err, LogLevel::info, "running " + name);
    if (name == "gen-routes") cmd_gen_routes(run, opt, out);
    else if (name == "features") cmd_features(run, opt, out);
    else if (name == "derive-metrics") cmd_derive_metrics(run, opt, out);
    else if (name == "estimate-choice") cmd_estimate_choice(run, opt, out);
    else if (name == "search-choice") cmd_search_choice(run, opt, out);
    else if (name == "estimate-mlr") cmd_estimate_mlr(run, opt, out);
    else if (name == "correlate") cmd_correlate(run, opt, out);
    else if (name == "simulate") cmd_simulate(run, opt, out);
    else cmd_report(run, opt, out);
    if (name != "simulate") run.finish_default();
  } catch (const UsageError& e) {
    err << "wayfind " << sub->get_name() << ": " << e.what() << "\n\n" << sub->help();
    return 1;
  } catch (const std::exception& e) {
    err << "wayfind " << sub->get_name() << ": " << e.what() << '\n';
    return 2;
  }
  return 0;
}

inline int dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"wayfind"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace wayfind::cli
