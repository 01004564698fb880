#pragma once

// File formats of the pipeline: network, route set, observation, model spec,
// estimation result and search trace documents in JSON; trajectories,
// features, metrics and correlation matrices in CSV; report tables in
// markdown. Parse errors carry the source name and a JSON pointer or line
// number.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wayfind/discrete_choice.hpp"
#include "wayfind/features.hpp"
#include "wayfind/modelsearch.hpp"
#include "wayfind/netgraph.hpp"
#include "wayfind/regression.hpp"
#include "wayfind/routeset.hpp"
#include "wayfind/stats.hpp"

namespace wayfind::io {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Files and numbers

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open file");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot write file");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

/// Shortest decimal text that reads back to the same double.
inline std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// JSON reading with locations

struct Source {
  std::string name;
  bool strict = false;
};

inline std::string pointer_token(std::string_view key) {
  std::string out;
  for (const char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

inline std::string child(const std::string& ptr, std::string_view key) { return ptr + "/" + pointer_token(key); }
inline std::string child(const std::string& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

[[noreturn]] inline void fail(const Source& src, const std::string& ptr, const std::string& msg) {
  throw IoError(src.name + ": " + (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
}

inline json parse_json(std::string_view text, const Source& src) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw IoError(src.name + ": line " + std::to_string(line) + " column " + std::to_string(col) +
                  ": malformed JSON");
  }
}

inline json load_json(const std::filesystem::path& path, const Source& src) { return parse_json(read_text(path), src); }

inline void expect_object(const Source& src, const json& j, const std::string& ptr) {
  if (!j.is_object()) fail(src, ptr, "expected an object");
}
inline void expect_array(const Source& src, const json& j, const std::string& ptr) {
  if (!j.is_array()) fail(src, ptr, "expected an array");
}

/// Under strict parsing, rejects keys outside the allowed set.
inline void check_keys(const Source& src, const json& obj, const std::string& ptr,
                       std::initializer_list<std::string_view> allowed) {
  if (!src.strict) return;
  for (const auto& item : obj.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      fail(src, child(ptr, item.key()), "unknown field");
}

inline const json& required(const Source& src, const json& obj, const std::string& ptr, std::string_view key) {
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) fail(src, child(ptr, key), "missing required field");
  return *it;
}

inline double get_number(const Source& src, const json& obj, const std::string& ptr, std::string_view key) {
  const auto& v = required(src, obj, ptr, key);
  if (!v.is_number()) fail(src, child(ptr, key), "expected a number");
  return v.get<double>();
}

inline double get_number_or(const Source& src, const json& obj, const std::string& ptr, std::string_view key,
                            double fallback) {
  return obj.contains(std::string(key)) ? get_number(src, obj, ptr, key) : fallback;
}

inline int get_int(const Source& src, const json& obj, const std::string& ptr, std::string_view key) {
  const auto& v = required(src, obj, ptr, key);
  if (!v.is_number_integer()) fail(src, child(ptr, key), "expected an integer");
  return v.get<int>();
}

inline int get_int_or(const Source& src, const json& obj, const std::string& ptr, std::string_view key, int fallback) {
  return obj.contains(std::string(key)) ? get_int(src, obj, ptr, key) : fallback;
}

inline bool get_bool_or(const Source& src, const json& obj, const std::string& ptr, std::string_view key,
                        bool fallback) {
  if (!obj.contains(std::string(key))) return fallback;
  const auto& v = obj.at(std::string(key));
  if (!v.is_boolean()) fail(src, child(ptr, key), "expected true or false");
  return v.get<bool>();
}

inline std::string get_string(const Source& src, const json& obj, const std::string& ptr, std::string_view key) {
  const auto& v = required(src, obj, ptr, key);
  if (!v.is_string()) fail(src, child(ptr, key), "expected a string");
  return v.get<std::string>();
}

inline std::vector<std::string> get_strings(const Source& src, const json& obj, const std::string& ptr,
                                            std::string_view key) {
  const auto& v = required(src, obj, ptr, key);
  const auto p = child(ptr, key);
  expect_array(src, v, p);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) fail(src, child(p, i), "expected a string");
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Network

inline ojson to_json(const Network& net) {
  ojson j;
  j["floors"] = {{"lowest", net.floor_range().lowest}, {"highest", net.floor_range().highest}};
  ojson nodes = ojson::array();
  for (const auto& n : net.nodes()) nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}, {"floor", n.floor}});
  ojson links = ojson::array();
  for (const auto& l : net.links())
    links.push_back({{"id", l.id},
                     {"from", l.from},
                     {"to", l.to},
                     {"length_cm", l.length_cm},
                     {"is_stair", l.is_stair},
                     {"is_wide", l.is_wide},
                     {"has_window", l.has_window},
                     {"firedoor_count", l.firedoor_count},
                     {"floorsign_count", l.floorsign_count}});
  j["nodes"] = std::move(nodes);
  j["links"] = std::move(links);
  return j;
}

inline Network network_from_json(const json& j, const Source& src) {
  expect_object(src, j, "");
  check_keys(src, j, "", {"floors", "nodes", "links"});
  std::optional<FloorRange> floors;
  if (j.contains("floors")) {
    const auto& f = j.at("floors");
    expect_object(src, f, "/floors");
    check_keys(src, f, "/floors", {"lowest", "highest"});
    floors = FloorRange{get_int(src, f, "/floors", "lowest"), get_int(src, f, "/floors", "highest")};
  }
  std::vector<Node> nodes;
  const auto& jn = required(src, j, "", "nodes");
  expect_array(src, jn, "/nodes");
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const auto p = child(std::string("/nodes"), i);
    expect_object(src, jn[i], p);
    check_keys(src, jn[i], p, {"id", "x", "y", "floor"});
    nodes.push_back({get_string(src, jn[i], p, "id"), get_number(src, jn[i], p, "x"), get_number(src, jn[i], p, "y"),
                     get_int(src, jn[i], p, "floor")});
  }
  std::vector<Link> links;
  const auto& jl = required(src, j, "", "links");
  expect_array(src, jl, "/links");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const auto p = child(std::string("/links"), i);
    const auto& o = jl[i];
    expect_object(src, o, p);
    check_keys(src, o, p,
               {"id", "from", "to", "length_cm", "is_stair", "is_wide", "has_window", "firedoor_count",
                "floorsign_count"});
    Link l;
    l.id = get_string(src, o, p, "id");
    l.from = get_string(src, o, p, "from");
    l.to = get_string(src, o, p, "to");
    l.length_cm = get_number(src, o, p, "length_cm");
    l.is_stair = get_bool_or(src, o, p, "is_stair", false);
    l.is_wide = get_bool_or(src, o, p, "is_wide", false);
    l.has_window = get_bool_or(src, o, p, "has_window", false);
    l.firedoor_count = get_int_or(src, o, p, "firedoor_count", 0);
    l.floorsign_count = get_int_or(src, o, p, "floorsign_count", 0);
    links.push_back(std::move(l));
  }
  try {
    return build_network(std::move(nodes), std::move(links), floors);
  } catch (const NetworkError& e) {
    fail(src, "", e.what());
  }
}

inline Network load_network(const std::filesystem::path& path, bool strict = false) {
  const Source src{path.string(), strict};
  return network_from_json(load_json(path, src), src);
}

// ---------------------------------------------------------------------------
// Route sets

inline ojson to_json(const RouteSet& set, const std::vector<double>& path_sizes) {
  ojson routes = ojson::array();
  for (std::size_t r = 0; r < set.size(); ++r)
    routes.push_back({{"link_ids", set[r].link_ids},
                      {"length_cm", set[r].total_length_cm},
                      {"path_size", path_sizes.at(r)}});
  return ojson{{"origin", set.origin()}, {"destination", set.destination()}, {"routes", std::move(routes)}};
}

struct RouteSetFile {
  RouteSet set;
  std::vector<double> path_sizes;
};

inline RouteSetFile routeset_from_json(const json& j, const Network& net, const Source& src) {
  expect_object(src, j, "");
  check_keys(src, j, "", {"origin", "destination", "routes"});
  const auto origin = get_string(src, j, "", "origin");
  const auto destination = get_string(src, j, "", "destination");
  const auto& jr = required(src, j, "", "routes");
  expect_array(src, jr, "/routes");
  std::vector<Route> routes;
  RouteSetFile out;
  for (std::size_t i = 0; i < jr.size(); ++i) {
    const auto p = child(std::string("/routes"), i);
    expect_object(src, jr[i], p);
    check_keys(src, jr[i], p, {"link_ids", "length_cm", "path_size"});
    try {
      routes.push_back(net.make_route(get_strings(src, jr[i], p, "link_ids")));
    } catch (const NetworkError& e) {
      fail(src, child(p, "link_ids"), e.what());
    }
    if (routes.back().origin != origin || routes.back().destination != destination)
      fail(src, p, "route does not join " + origin + " to " + destination);
    out.path_sizes.push_back(get_number(src, jr[i], p, "path_size"));
  }
  try {
    out.set = RouteSet(std::move(routes));
  } catch (const RouteSetError& e) {
    fail(src, "/routes", e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observations

template <class Named>
ojson named_values(const Named& v) {
  ojson o;
  const auto& names = Named::names();
  const auto values = v.values();
  for (std::size_t i = 0; i < names.size(); ++i) o[names[i]] = values[i];
  return o;
}

inline ojson to_json(const choice::ChoiceObservation& o) {
  ojson alts = ojson::array();
  for (const auto& a : o.alternatives) {
    ojson ja{{"link_ids", a.link_ids}, {"path_size", a.path_size}, {"features", named_values(a.features)}};
    if (!a.extra.empty()) {
      ojson extra;
      for (const auto& [k, v] : a.extra) extra[k] = v;
      ja["extra"] = std::move(extra);
    }
    alts.push_back(std::move(ja));
  }
  return ojson{{"participant", o.participant},
               {"task", o.task},
               {"chosen_index", o.chosen_index},
               {"profile", named_values(o.profile)},
               {"alternatives", std::move(alts)}};
}

inline ojson observations_to_json(std::span<const choice::ChoiceObservation> data) {
  ojson arr = ojson::array();
  for (const auto& o : data) arr.push_back(to_json(o));
  return ojson{{"observations", std::move(arr)}};
}

inline FeatureVector features_from_json(const json& j, const Source& src, const std::string& ptr) {
  expect_object(src, j, ptr);
  const auto& names = FeatureVector::names();
  for (const auto& item : j.items())
    if (src.strict && std::find(names.begin(), names.end(), item.key()) == names.end())
      fail(src, child(ptr, item.key()), "unknown route variable");
  FeatureVector f;
  double* fields[] = {&f.distot,    &f.dist_firstturn, &f.dist_avg_straight, &f.dist_longeststretch,
                      &f.turns_tot, &f.turns_left,     &f.turns_right,       &f.rot_abs,
                      &f.ratio_wide, &f.window,        &f.firedoor,          &f.floorsigns,
                      &f.level_no,  &f.stairs_no,      &f.task[0],           &f.task[1],
                      &f.task[2],   &f.task[3]};
  for (std::size_t i = 0; i < names.size(); ++i) *fields[i] = get_number(src, j, ptr, names[i]);
  return f;
}

inline ParticipantProfile profile_from_json(const json& j, const Source& src, const std::string& ptr) {
  expect_object(src, j, ptr);
  ParticipantProfile p;
  for (const auto& item : j.items()) {
    if (!ParticipantProfile{}.get(item.key())) {
      if (src.strict) fail(src, child(ptr, item.key()), "unknown participant variable");
      continue;
    }
    p.set(item.key(), get_number(src, j, ptr, item.key()));
  }
  try {
    p.validate();
  } catch (const FeatureError& e) {
    fail(src, ptr, e.what());
  }
  return p;
}

inline std::vector<choice::ChoiceObservation> observations_from_json(const json& j, const Source& src) {
  expect_object(src, j, "");
  check_keys(src, j, "", {"observations"});
  const auto& arr = required(src, j, "", "observations");
  expect_array(src, arr, "/observations");
  std::vector<choice::ChoiceObservation> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto p = child(std::string("/observations"), i);
    const auto& jo = arr[i];
    expect_object(src, jo, p);
    check_keys(src, jo, p, {"participant", "task", "chosen_index", "profile", "alternatives"});
    choice::ChoiceObservation o;
    o.participant = get_string(src, jo, p, "participant");
    o.task = get_int(src, jo, p, "task");
    const int chosen = get_int(src, jo, p, "chosen_index");
    if (chosen < 0) fail(src, child(p, "chosen_index"), "must be non-negative");
    o.chosen_index = static_cast<std::size_t>(chosen);
    if (jo.contains("profile")) o.profile = profile_from_json(jo.at("profile"), src, child(p, "profile"));
    const auto& ja = required(src, jo, p, "alternatives");
    const auto pa = child(p, "alternatives");
    expect_array(src, ja, pa);
    for (std::size_t r = 0; r < ja.size(); ++r) {
      const auto pr = child(pa, r);
      expect_object(src, ja[r], pr);
      check_keys(src, ja[r], pr, {"link_ids", "path_size", "features", "extra"});
      choice::Alternative a;
      if (ja[r].contains("link_ids")) a.link_ids = get_strings(src, ja[r], pr, "link_ids");
      a.path_size = get_number_or(src, ja[r], pr, "path_size", 1.0);
      a.features = features_from_json(required(src, ja[r], pr, "features"), src, child(pr, "features"));
      if (ja[r].contains("extra")) {
        const auto& je = ja[r].at("extra");
        expect_object(src, je, child(pr, "extra"));
        for (const auto& item : je.items()) a.extra[item.key()] = get_number(src, je, child(pr, "extra"), item.key());
      }
      o.alternatives.push_back(std::move(a));
    }
    try {
      o.validate();
    } catch (const choice::ModelError& e) {
      fail(src, p, e.what());
    }
    out.push_back(std::move(o));
  }
  if (out.empty()) fail(src, "/observations", "no observations");
  return out;
}

inline std::vector<choice::ChoiceObservation> load_observations(const std::filesystem::path& path,
                                                                bool strict = false) {
  const Source src{path.string(), strict};
  return observations_from_json(load_json(path, src), src);
}

// ---------------------------------------------------------------------------
// Model specifications and results

inline ojson to_json(const choice::ModelSpec& spec) {
  ojson terms = ojson::array();
  ojson interactions = ojson::array();
  for (const auto& t : spec.terms) {
    if (t.is_interaction()) interactions.push_back({{"route", t.route_var}, {"person", t.person_var}});
    else terms.push_back(t.route_var);
  }
  return ojson{{"family", spec.family == choice::Family::mnl ? "mnl" : "psl"},
               {"terms", std::move(terms)},
               {"interactions", std::move(interactions)}};
}

/// {"family": "psl", "terms": ["distot", ...], "interactions": [{"route": .., "person": ..}]}.
/// Terms may also be written "route x person".
inline choice::ModelSpec spec_from_json(const json& j, const Source& src) {
  expect_object(src, j, "");
  check_keys(src, j, "", {"family", "terms", "interactions"});
  choice::ModelSpec spec;
  try {
    spec.family = choice::parse_family(get_string(src, j, "", "family"));
  } catch (const choice::ModelError& e) {
    fail(src, "/family", e.what());
  }
  for (const auto& t : get_strings(src, j, "", "terms")) spec.terms.push_back(choice::parse_term(t));
  if (j.contains("interactions")) {
    const auto& ji = j.at("interactions");
    expect_array(src, ji, "/interactions");
    for (std::size_t i = 0; i < ji.size(); ++i) {
      const auto p = child(std::string("/interactions"), i);
      expect_object(src, ji[i], p);
      check_keys(src, ji[i], p, {"route", "person"});
      spec.terms.push_back({get_string(src, ji[i], p, "route"), get_string(src, ji[i], p, "person")});
    }
  }
  try {
    spec.validate();
  } catch (const choice::ModelError& e) {
    fail(src, "", e.what());
  }
  return spec;
}

inline ojson to_json(const choice::EstimationResult& r) {
  ojson params = ojson::array();
  for (std::size_t i = 0; i < r.names.size(); ++i)
    params.push_back({{"name", r.names[i]},
                      {"beta", r.beta[i]},
                      {"std_err", r.std_err[i]},
                      {"beta_raw", r.beta_raw[i]},
                      {"std_err_raw", r.std_err_raw[i]},
                      {"t_stat", r.t_stat[i]},
                      {"p_value", r.p_value[i]}});
  return ojson{{"family", r.family == choice::Family::mnl ? "mnl" : "psl"},
               {"parameters", std::move(params)},
               {"log_likelihood", r.log_likelihood},
               {"null_log_likelihood", r.null_log_likelihood},
               {"rho2", r.rho2},
               {"rho2_adj", r.rho2_adj},
               {"aic", r.aic},
               {"bic", r.bic},
               {"n_obs", r.n_obs},
               {"k", r.k},
               {"iterations", r.iterations},
               {"converged", r.converged},
               {"message", r.message}};
}

inline choice::EstimationResult result_from_json(const json& j, const Source& src) {
  expect_object(src, j, "");
  choice::EstimationResult r;
  try {
    r.family = choice::parse_family(get_string(src, j, "", "family"));
  } catch (const choice::ModelError& e) {
    fail(src, "/family", e.what());
  }
  const auto& params = required(src, j, "", "parameters");
  expect_array(src, params, "/parameters");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto p = child(std::string("/parameters"), i);
    expect_object(src, params[i], p);
    r.names.push_back(get_string(src, params[i], p, "name"));
    r.beta.push_back(get_number(src, params[i], p, "beta"));
    r.std_err.push_back(get_number(src, params[i], p, "std_err"));
    r.beta_raw.push_back(get_number(src, params[i], p, "beta_raw"));
    r.std_err_raw.push_back(get_number(src, params[i], p, "std_err_raw"));
    r.t_stat.push_back(get_number(src, params[i], p, "t_stat"));
    r.p_value.push_back(get_number(src, params[i], p, "p_value"));
  }
  r.log_likelihood = get_number(src, j, "", "log_likelihood");
  r.null_log_likelihood = get_number(src, j, "", "null_log_likelihood");
  r.rho2 = get_number(src, j, "", "rho2");
  r.rho2_adj = get_number(src, j, "", "rho2_adj");
  r.aic = get_number(src, j, "", "aic");
  r.bic = get_number(src, j, "", "bic");
  r.n_obs = get_int(src, j, "", "n_obs");
  r.k = get_int(src, j, "", "k");
  r.iterations = get_int_or(src, j, "", "iterations", 0);
  const auto& c = required(src, j, "", "converged");
  if (!c.is_boolean()) fail(src, "/converged", "expected true or false");
  r.converged = c.get<bool>();
  if (j.contains("message")) r.message = get_string(src, j, "", "message");
  return r;
}

/// Table label for a parameter: the path-size term reads as the overlap factor.
inline std::string parameter_label(const std::string& name) {
  return name == choice::kPathSizeTerm ? "Overlap factor" : name;
}

inline std::string choice_p(double p) {
  if (std::isnan(p)) return "n/a";
  return p < 0.01 ? "<0.01" : fixed(p, 2);
}

/// Route-choice comparison table: a Beta / p-value column pair per model and
/// the fit rows Log-likelihood, Rho2, Rho2 adj, AIC and BIC.
inline std::string choice_table_markdown(const std::vector<std::pair<std::string, choice::EstimationResult>>& models) {
  std::vector<std::string> rows;
  bool has_ps = false;
  for (const auto& [label, r] : models)
    for (const auto& n : r.names) {
      if (n == choice::kPathSizeTerm) has_ps = true;
      else if (std::find(rows.begin(), rows.end(), n) == rows.end()) rows.push_back(n);
    }
  if (has_ps) rows.emplace_back(choice::kPathSizeTerm);

  std::ostringstream s;
  s << "| |";
  for (const auto& m : models) s << ' ' << m.first << " | |";
  s << "\n|---|";
  for (std::size_t i = 0; i < models.size(); ++i) s << "---|---|";
  s << "\n| |";
  for (std::size_t i = 0; i < models.size(); ++i) s << " Beta | p-value |";
  s << '\n';
  for (const auto& name : rows) {
    s << "| " << parameter_label(name) << " |";
    for (const auto& [label, r] : models) {
      if (const auto i = r.index_of(name)) s << ' ' << fixed(r.beta[*i], 4) << " | " << choice_p(r.p_value[*i]) << " |";
      else s << " | |";
    }
    s << '\n';
  }
  auto fit_row = [&](const char* label, auto value) {
    s << "| " << label << " |";
    for (const auto& m : models) s << ' ' << value(m.second) << " | |";
    s << '\n';
  };
  fit_row("Log-likelihood", [](const choice::EstimationResult& r) { return fixed(r.log_likelihood, 2); });
  fit_row("Rho2", [](const choice::EstimationResult& r) { return fixed(r.rho2, 3); });
  fit_row("Rho2 adj", [](const choice::EstimationResult& r) { return fixed(r.rho2_adj, 3); });
  fit_row("AIC", [](const choice::EstimationResult& r) { return fixed(r.aic, 1); });
  fit_row("BIC", [](const choice::EstimationResult& r) { return fixed(r.bic, 1); });
  return s.str();
}

inline std::string model_label(const choice::EstimationResult& r) {
  bool personal = false;
  for (const auto& n : r.names) personal = personal || n.find(" x ") != std::string::npos;
  return std::string(choice::to_string(r.family)) + (personal ? " infra + personal char" : " infra");
}

// ---------------------------------------------------------------------------
// Search traces

inline ojson to_json(const search::SearchTrace& t) {
  ojson entries = ojson::array();
  for (const auto& e : t.entries) {
    ojson terms = ojson::array();
    for (const auto& term : e.spec.terms) terms.push_back(term.name());
    ojson je{{"phase", e.phase},
             {"stage", e.stage},
             {"terms", std::move(terms)},
             {"survived", e.survived},
             {"reason", std::string(search::to_string(e.reason))},
             {"detail", e.detail}};
    je["result"] = e.result ? to_json(*e.result) : ojson(nullptr);
    entries.push_back(std::move(je));
  }
  auto opt = [](const std::optional<std::size_t>& v) { return v ? ojson(*v) : ojson(nullptr); };
  return ojson{{"family", t.family == choice::Family::mnl ? "mnl" : "psl"},
               {"entries", std::move(entries)},
               {"survivors", t.survivors},
               {"ranking_aic", t.ranking_aic},
               {"ranking_bic", t.ranking_bic},
               {"best_infra", opt(t.best_infra)},
               {"best", opt(t.best)},
               {"diagnostic", t.diagnostic}};
}

// ---------------------------------------------------------------------------
// CSV

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> lines;  // source line of each row

  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    auto cell = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    out.emplace_back(cell);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline CsvTable parse_csv(std::string_view text, const std::string& source) {
  CsvTable t;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++line_no;
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw IoError(source + ": line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                    " fields, found " + std::to_string(cells.size()));
    t.rows.push_back(std::move(cells));
    t.lines.push_back(line_no);
  }
  if (t.header.empty()) throw IoError(source + ": empty CSV file");
  return t;
}

inline std::size_t require_column(const CsvTable& t, std::string_view name, const std::string& source) {
  const auto c = t.column(name);
  if (!c) throw IoError(source + ": line 1: missing column '" + std::string(name) + "'");
  return *c;
}

inline double cell_number(const CsvTable& t, std::size_t row, std::size_t col, const std::string& source) {
  const auto v = parse_number(t.rows[row][col]);
  if (!v)
    throw IoError(source + ": line " + std::to_string(t.lines[row]) + ": column '" + t.header[col] +
                  "' is not a number: '" + t.rows[row][col] + "'");
  return *v;
}

// Trajectories: t_s, x_m, y_m, floor, yaw_deg.

inline std::string trajectory_csv(const Trajectory& traj) {
  std::string s = "t_s,x_m,y_m,floor,yaw_deg\n";
  for (const auto& p : traj.samples)
    s += number(p.t) + ',' + number(p.x) + ',' + number(p.y) + ',' + std::to_string(p.floor) + ',' + number(p.yaw) +
         '\n';
  return s;
}

inline Trajectory trajectory_from_csv(std::string_view text, const std::string& source) {
  const auto t = parse_csv(text, source);
  const std::size_t cols[] = {require_column(t, "t_s", source), require_column(t, "x_m", source),
                              require_column(t, "y_m", source), require_column(t, "floor", source),
                              require_column(t, "yaw_deg", source)};
  Trajectory traj;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    TrajectorySample s;
    s.t = cell_number(t, r, cols[0], source);
    s.x = cell_number(t, r, cols[1], source);
    s.y = cell_number(t, r, cols[2], source);
    const double floor = cell_number(t, r, cols[3], source);
    if (floor != std::floor(floor))
      throw IoError(source + ": line " + std::to_string(t.lines[r]) + ": floor must be an integer");
    s.floor = static_cast<int>(floor);
    s.yaw = cell_number(t, r, cols[4], source);
    traj.samples.push_back(s);
  }
  try {
    traj.validate();
  } catch (const FeatureError& e) {
    throw IoError(source + ": " + e.what());
  }
  return traj;
}

// Features: one row per (participant, task) with route and participant variables.

struct FeatureRow {
  std::string participant;
  int task = 1;
  FeatureVector route;
  ParticipantProfile profile;
};

inline std::string features_csv(const std::vector<FeatureRow>& rows) {
  std::string s = "participant,task";
  for (const auto& n : FeatureVector::names()) s += ',' + n;
  for (const auto& n : ParticipantProfile::names()) s += ',' + n;
  s += '\n';
  for (const auto& r : rows) {
    s += r.participant + ',' + std::to_string(r.task);
    for (const auto v : r.route.values()) s += ',' + number(v);
    for (const auto v : r.profile.values()) s += ',' + number(v);
    s += '\n';
  }
  return s;
}

inline std::vector<FeatureRow> features_from_csv(std::string_view text, const std::string& source) {
  const auto t = parse_csv(text, source);
  const auto pc = require_column(t, "participant", source);
  const auto tc = require_column(t, "task", source);
  std::vector<std::size_t> route_cols, person_cols;
  for (const auto& n : FeatureVector::names()) route_cols.push_back(require_column(t, n, source));
  for (const auto& n : ParticipantProfile::names()) person_cols.push_back(require_column(t, n, source));
  std::vector<FeatureRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    FeatureRow row;
    row.participant = t.rows[r][pc];
    row.task = static_cast<int>(cell_number(t, r, tc, source));
    FeatureVector& f = row.route;
    double* fields[] = {&f.distot,    &f.dist_firstturn, &f.dist_avg_straight, &f.dist_longeststretch,
                        &f.turns_tot, &f.turns_left,     &f.turns_right,       &f.rot_abs,
                        &f.ratio_wide, &f.window,        &f.firedoor,          &f.floorsigns,
                        &f.level_no,  &f.stairs_no,      &f.task[0],           &f.task[1],
                        &f.task[2],   &f.task[3]};
    for (std::size_t i = 0; i < route_cols.size(); ++i) *fields[i] = cell_number(t, r, route_cols[i], source);
    for (std::size_t i = 0; i < person_cols.size(); ++i)
      row.profile.set(ParticipantProfile::names()[i], cell_number(t, r, person_cols[i], source));
    out.push_back(std::move(row));
  }
  return out;
}

// Metrics derived from trajectories.

struct MetricsRow {
  std::string participant;
  int task = 1;
  double avg_speed = 0.0;
  double hesitation_count = 0.0;
  double head_rotation = 0.0;
  double total_time_s = 0.0;
  double total_distance_m = 0.0;
};

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string s = "participant,task,avg_speed,hesitation_count,head_rotation,total_time_s,total_distance_m\n";
  for (const auto& r : rows)
    s += r.participant + ',' + std::to_string(r.task) + ',' + number(r.avg_speed) + ',' + number(r.hesitation_count) +
         ',' + number(r.head_rotation) + ',' + number(r.total_time_s) + ',' + number(r.total_distance_m) + '\n';
  return s;
}

inline std::vector<MetricsRow> metrics_from_csv(std::string_view text, const std::string& source) {
  const auto t = parse_csv(text, source);
  const auto pc = require_column(t, "participant", source);
  const auto tc = require_column(t, "task", source);
  const auto sc = require_column(t, "avg_speed", source);
  const auto hc = require_column(t, "hesitation_count", source);
  const auto rc = require_column(t, "head_rotation", source);
  std::vector<MetricsRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    MetricsRow m;
    m.participant = t.rows[r][pc];
    m.task = static_cast<int>(cell_number(t, r, tc, source));
    m.avg_speed = cell_number(t, r, sc, source);
    m.hesitation_count = cell_number(t, r, hc, source);
    m.head_rotation = cell_number(t, r, rc, source);
    if (const auto c = t.column("total_time_s")) m.total_time_s = cell_number(t, r, *c, source);
    if (const auto c = t.column("total_distance_m")) m.total_distance_m = cell_number(t, r, *c, source);
    out.push_back(std::move(m));
  }
  return out;
}

/// Joins features with metrics on (participant, task); rows without metrics are an error.
inline std::vector<regression::BehaviorRecord> join_behavior(const std::vector<FeatureRow>& features,
                                                             const std::vector<MetricsRow>& metrics) {
  std::map<std::pair<std::string, int>, const MetricsRow*> by_key;
  for (const auto& m : metrics) by_key[{m.participant, m.task}] = &m;
  std::vector<regression::BehaviorRecord> out;
  for (const auto& f : features) {
    const auto it = by_key.find({f.participant, f.task});
    if (it == by_key.end())
      throw IoError("no metrics for participant '" + f.participant + "' task " + std::to_string(f.task));
    regression::BehaviorRecord r;
    r.participant = f.participant;
    r.task = f.task;
    r.route = f.route;
    r.profile = f.profile;
    r.avg_speed = it->second->avg_speed;
    r.hesitation_count = it->second->hesitation_count;
    r.head_rotation = it->second->head_rotation;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regression results

inline ojson to_json(const regression::Coefficient& c) {
  return ojson{{"name", c.name}, {"beta", c.beta}, {"std_err", c.std_err}, {"t", c.t}, {"p", c.p}};
}

inline ojson to_json(const regression::StepwiseResult& s) {
  ojson coefs = ojson::array();
  for (const auto& c : s.model.coefficients) coefs.push_back(to_json(c));
  ojson removals = ojson::array();
  for (const auto& r : s.removals) removals.push_back({{"name", r.name}, {"f", r.f}, {"p", r.p}});
  return ojson{{"intercept", to_json(s.model.intercept)},
               {"coefficients", std::move(coefs)},
               {"r2", s.model.r2},
               {"r2_adj", s.model.r2_adj},
               {"f_stat", s.model.f_stat},
               {"f_p", s.model.f_p},
               {"sigma", s.model.sigma},
               {"n", s.model.n},
               {"k", s.model.k},
               {"removals", std::move(removals)},
               {"excluded", s.excluded}};
}

inline ojson to_json(const regression::BehaviorModels& m) {
  ojson variants = ojson::array();
  for (const auto v : {regression::Variant::infra, regression::Variant::personal, regression::Variant::combined}) {
    auto j = to_json(m.variants[static_cast<std::size_t>(v)]);
    ojson labeled{{"label", std::string(regression::variant_label(v))}};
    labeled.update(j);
    variants.push_back(std::move(labeled));
  }
  return ojson{{"response", m.response}, {"variants", std::move(variants)}};
}

// ---------------------------------------------------------------------------
// Correlation matrices

inline std::string correlation_csv(const stats::CorrelationMatrix& m) {
  std::string s = "variable";
  for (const auto& n : m.names) s += ',' + n;
  s += '\n';
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    s += m.names[i];
    for (std::size_t j = 0; j < m.names.size(); ++j) s += ',' + number(m.rho[i][j]);
    s += '\n';
  }
  return s;
}

/// Lower triangle, two decimals; cells above the threshold in bold.
inline std::string correlation_markdown(const stats::CorrelationMatrix& m) {
  std::ostringstream s;
  s << "| |";
  for (std::size_t j = 0; j + 1 < m.names.size(); ++j) s << ' ' << m.names[j] << " |";
  s << "\n|---|";
  for (std::size_t j = 0; j + 1 < m.names.size(); ++j) s << "---|";
  s << '\n';
  for (std::size_t i = 1; i < m.names.size(); ++i) {
    s << "| " << m.names[i] << " |";
    for (std::size_t j = 0; j + 1 < m.names.size(); ++j) {
      if (j >= i) {
        s << " |";
        continue;
      }
      const auto cell = fixed(m.rho[i][j], 2);
      s << ' ' << (m.highlighted(i, j) ? "**" + cell + "**" : cell) << " |";
    }
    s << '\n';
  }
  return s.str();
}

}  // namespace wayfind::io
