#pragma once

// Stepwise combinatory search over choice-model specifications. Stage 1 fits
// one variable at a time; each later stage extends every survivor by one
// unused candidate. An extension survives when all its terms are significant
// and it improves significantly (likelihood ratio) on every nested model
// that survived earlier. The personal phase starts from the best
// infrastructure model and adds route-by-person interaction terms.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "wayfind/discrete_choice.hpp"
#include "wayfind/parallel.hpp"

namespace wayfind::search {

using choice::EstimationResult;
using choice::Family;
using choice::ModelSpec;
using choice::Term;

enum class Phase { infra, infra_then_personal };

inline Phase parse_phase(std::string_view s) {
  if (s == "infra") return Phase::infra;
  if (s == "both" || s == "infra-then-personal") return Phase::infra_then_personal;
  throw choice::ModelError("unknown search phase '" + std::string(s) + "'");
}

struct SearchConfig {
  std::vector<std::string> candidates;         // route and infrastructure variables
  std::vector<std::string> person_candidates;  // participant variables for interactions
  double alpha_t = 0.05;
  double alpha_chi2 = 0.05;
  int max_stage = 8;
  bool full_powerset = false;  // test against every nested subset, not only prior survivors
  unsigned jobs = 1;
  choice::EstimationOptions estimation;
};

enum class Rejection { none, not_identified, non_convergence, insignificant_t, failed_lrt };

inline std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::none: return "";
    case Rejection::not_identified: return "not-identified";
    case Rejection::non_convergence: return "non-convergence";
    case Rejection::insignificant_t: return "insignificant-t";
    case Rejection::failed_lrt: return "failed-LRT";
  }
  return "";
}

struct SearchEntry {
  std::string phase;  // "infra" or "personal"
  int stage = 0;      // number of searched terms
  ModelSpec spec;
  std::optional<EstimationResult> result;
  bool survived = false;
  Rejection reason = Rejection::none;
  std::string detail;
};

struct SearchTrace {
  Family family = Family::mnl;
  std::vector<SearchEntry> entries;
  std::vector<std::size_t> survivors;    // entry indices, in discovery order
  std::vector<std::size_t> ranking_aic;  // survivors sorted by AIC
  std::vector<std::size_t> ranking_bic;  // survivors sorted by BIC
  std::optional<std::size_t> best_infra;
  std::optional<std::size_t> best;       // minimum BIC over all survivors
  std::string diagnostic;

  [[nodiscard]] std::vector<const SearchEntry*> stage_survivors(const std::string& phase, int stage) const {
    std::vector<const SearchEntry*> out;
    for (auto i : survivors)
      if (entries[i].phase == phase && entries[i].stage == stage) out.push_back(&entries[i]);
    return out;
  }
};

namespace detail {

using TermSet = std::vector<Term>;  // kept in canonical order

inline bool is_subset(const TermSet& small, const TermSet& big) {
  return std::all_of(small.begin(), small.end(),
                     [&](const Term& t) { return std::find(big.begin(), big.end(), t) != big.end(); });
}

inline std::string describe(const TermSet& terms) {
  std::string s = "{";
  for (std::size_t i = 0; i < terms.size(); ++i) s += (i ? ", " : "") + terms[i].name();
  return s + "}";
}

inline std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

class Searcher {
 public:
  Searcher(const SearchConfig& cfg, std::span<const choice::ChoiceObservation> data, Family family)
      : cfg_(cfg), data_(data), family_(family) {
    trace_.family = family;
  }

  SearchTrace run(Phase phase) {
    std::vector<Term> infra_terms;
    for (const auto& c : cfg_.candidates) infra_terms.push_back({c, {}});
    run_phase("infra", {}, infra_terms);
    if (trace_.survivors.empty()) {
      trace_.diagnostic = "no single-variable model has a significant term";
      return finish();
    }
    trace_.best_infra = best_of("infra");

    if (phase == Phase::infra_then_personal) {
      const TermSet base = trace_.entries[*trace_.best_infra].spec.terms;
      std::vector<Term> interactions;
      for (const auto& t : base)
        for (const auto& p : cfg_.person_candidates) interactions.push_back({t.route_var, p});
      run_phase("personal", base, interactions);
    }
    return finish();
  }

 private:
  // Runs stages from `base` adding one candidate at a time.
  void run_phase(const std::string& phase, const TermSet& base, const std::vector<Term>& pool) {
    std::vector<TermSet> frontier{base};
    const int first_stage = static_cast<int>(base.size()) + 1;
    for (int stage = first_stage; stage <= cfg_.max_stage && !frontier.empty(); ++stage) {
      // Unique extensions in deterministic order: parent order, then pool order.
      std::vector<TermSet> specs;
      std::set<TermSet> queued;
      for (const auto& parent : frontier)
        for (const auto& cand : pool) {
          if (std::find(parent.begin(), parent.end(), cand) != parent.end()) continue;
          TermSet terms = canonical(parent, cand, pool, base);
          if (known_.count(terms) || !queued.insert(terms).second) continue;
          specs.push_back(std::move(terms));
        }
      if (specs.empty()) break;

      std::vector<SearchEntry> batch(specs.size());
      parallel_for(specs.size(), cfg_.jobs, [&](std::size_t i) { batch[i] = fit(phase, stage, specs[i]); });

      std::vector<TermSet> next;
      for (auto& e : batch) {
        if (e.reason == Rejection::none && stage > 1) lrt_against_nested(e);
        e.survived = e.reason == Rejection::none;
        const auto idx = trace_.entries.size();
        known_[e.spec.terms] = idx;
        if (e.survived) {
          trace_.survivors.push_back(idx);
          next.push_back(e.spec.terms);
        }
        trace_.entries.push_back(std::move(e));
      }
      frontier = std::move(next);
    }
  }

  // Base terms first, then added terms in pool order.
  static TermSet canonical(const TermSet& parent, const Term& add, const std::vector<Term>& pool,
                           const TermSet& base) {
    TermSet added;
    for (const auto& t : parent)
      if (std::find(base.begin(), base.end(), t) == base.end()) added.push_back(t);
    added.push_back(add);
    auto rank = [&](const Term& t) { return std::find(pool.begin(), pool.end(), t) - pool.begin(); };
    std::sort(added.begin(), added.end(), [&](const Term& a, const Term& b) { return rank(a) < rank(b); });
    TermSet out = base;
    out.insert(out.end(), added.begin(), added.end());
    return out;
  }

  SearchEntry fit(const std::string& phase, int stage, const TermSet& terms) const {
    SearchEntry e;
    e.phase = phase;
    e.stage = stage;
    e.spec = ModelSpec{family_, terms};
    auto opt = cfg_.estimation;
    opt.jobs = 1;
    try {
      e.result = choice::estimate(e.spec, data_, opt);
    } catch (const choice::SingularHessianError& err) {
      e.reason = Rejection::not_identified;
      e.detail = err.what();
      return e;
    }
    const auto& r = *e.result;
    if (!r.converged) {
      e.reason = Rejection::non_convergence;
      e.detail = r.message;
      return e;
    }
    for (std::size_t i = 0; i < r.names.size(); ++i) {
      if (r.names[i] == choice::kPathSizeTerm) continue;
      if (!(r.p_value[i] < cfg_.alpha_t)) {
        e.reason = Rejection::insignificant_t;
        e.detail = r.names[i] + ": p=" + fixed(r.p_value[i], 4);
        return e;
      }
    }
    return e;
  }

  // Fits a nested model on demand (full-powerset mode only).
  const SearchEntry* nested_entry(const TermSet& terms) {
    if (const auto it = known_.find(terms); it != known_.end()) return &trace_.entries[it->second];
    auto it = extra_.find(terms);
    if (it == extra_.end()) it = extra_.emplace(terms, fit("nested", static_cast<int>(terms.size()), terms)).first;
    return &it->second;
  }

  void lrt_against_nested(SearchEntry& e) {
    const auto& terms = e.spec.terms;
    std::vector<const SearchEntry*> nested;
    if (cfg_.full_powerset) {
      const auto m = terms.size();
      for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << m); ++mask) {
        TermSet sub;
        for (std::size_t b = 0; b < m; ++b)
          if (mask & (std::size_t{1} << b)) sub.push_back(terms[b]);
        const auto* n = nested_entry(sub);
        if (n->result && n->result->converged) nested.push_back(n);
      }
    } else {
      for (auto i : trace_.survivors) {
        const auto& s = trace_.entries[i];
        if (s.spec.terms.size() < terms.size() && is_subset(s.spec.terms, terms)) nested.push_back(&s);
      }
    }
    for (const auto* n : nested) {
      const auto test = choice::lr_test(*n->result, *e.result);
      if (!(test.p_value < cfg_.alpha_chi2)) {
        e.reason = Rejection::failed_lrt;
        e.detail = "vs " + describe(n->spec.terms) + ": chi2=" + fixed(test.statistic, 3) +
                   " df=" + std::to_string(static_cast<int>(test.df1)) + " p=" + fixed(test.p_value, 4);
        return;
      }
    }
  }

  [[nodiscard]] std::optional<std::size_t> best_of(const std::string& phase) const {
    std::optional<std::size_t> best;
    for (auto i : trace_.survivors) {
      if (!phase.empty() && trace_.entries[i].phase != phase) continue;
      if (!best || trace_.entries[i].result->bic < trace_.entries[*best].result->bic) best = i;
    }
    return best;
  }

  SearchTrace finish() {
    auto by = [&](double EstimationResult::*field) {
      auto order = trace_.survivors;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return (*trace_.entries[a].result).*field < (*trace_.entries[b].result).*field;
      });
      return order;
    };
    trace_.ranking_aic = by(&EstimationResult::aic);
    trace_.ranking_bic = by(&EstimationResult::bic);
    if (!trace_.ranking_bic.empty()) trace_.best = trace_.ranking_bic.front();
    return std::move(trace_);
  }

  const SearchConfig& cfg_;
  std::span<const choice::ChoiceObservation> data_;
  Family family_;
  SearchTrace trace_;
  std::map<TermSet, std::size_t> known_;
  std::map<TermSet, SearchEntry> extra_;
};

}  // namespace detail

inline void validate(const SearchConfig& cfg, std::span<const choice::ChoiceObservation> data) {
  if (data.empty()) throw choice::ModelError("search requires data");
  if (cfg.candidates.empty()) throw choice::ModelError("search requires at least one candidate variable");
  if (!(cfg.alpha_t > 0.0 && cfg.alpha_t < 1.0) || !(cfg.alpha_chi2 > 0.0 && cfg.alpha_chi2 < 1.0))
    throw choice::ModelError("significance levels must lie in (0, 1)");
  if (cfg.max_stage < 1) throw choice::ModelError("max_stage must be at least 1");
  const auto& alt = data.front().alternatives.at(0);
  for (const auto& c : cfg.candidates)
    if (!alt.get(c)) throw choice::ModelError("unknown route variable '" + c + "'");
  for (const auto& p : cfg.person_candidates)
    if (!ParticipantProfile{}.get(p)) throw choice::ModelError("unknown participant variable '" + p + "'");
}

inline SearchTrace stepwise_search(const SearchConfig& cfg, std::span<const choice::ChoiceObservation> data,
                                   Family family, Phase phase = Phase::infra) {
  validate(cfg, data);
  return detail::Searcher(cfg, data, family).run(phase);
}

}  // namespace wayfind::search
