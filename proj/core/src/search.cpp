#include "cluesynth/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <type_traits>

#include "cluesynth/errors.hpp"
#include "cluesynth/interpreter.hpp"

namespace cluesynth {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundSlack = 1e-9;

// Non-owning callable reference; the referenced callable must outlive it.
template <class Sig>
class FnRef;

template <class R, class... A>
class FnRef<R(A...)> {
 public:
  template <class F, class = std::enable_if_t<!std::is_same_v<std::decay_t<F>, FnRef>>>
  FnRef(F& f)  // NOLINT(google-explicit-constructor)
      : obj_(&f), call_([](void* o, A... a) -> R { return (*static_cast<F*>(o))(std::forward<A>(a)...); }) {}

  R operator()(A... a) const { return call_(obj_, std::forward<A>(a)...); }

 private:
  void* obj_;
  R (*call_)(void*, A...);
};

using Sink = FnRef<void(const Value&, std::uint64_t)>;
using OnComplete = FnRef<void(const Derivation&, double, const Value&)>;

enum class Order { probability, size };

struct WalkSpec {
  Order order = Order::probability;
  const RuleProbabilities* rp = nullptr;
  const MaxCompletionTable* table = nullptr;
  const MinSizeTable* sizes = nullptr;
  double log_low = -kInf;
  double log_high = kInf;
  std::size_t size_cap = 0;  // probability: optional truncation; size: exact size
  std::optional<Clock::time_point> deadline;
};

// Leftmost depth-first walk over derivations in rule-index order. With Eval
// set, each completed subtree is evaluated once and its value reused across
// every alternative for the holes to its right.
template <bool Eval>
class Walker {
 public:
  Walker(const Grammar& g, const WalkSpec& spec, const Text& input, const ExecutionBudget& budget)
      : g_(g), spec_(spec), input_(Value(input)), budget_(budget), log_low_eff_(spec.log_low) {
    for (std::size_t s = 0; s < kSortCount; ++s) {
      for (RuleIndex r : g.rules_for(static_cast<Sort>(s))) {
        if (usable(r)) usable_[s].push_back(r);
      }
    }
    if constexpr (Eval) cache_.resize(g.size());
  }

  void run(OnComplete on_complete) {
    on_complete_ = &on_complete;
    Sort start = g_.start();
    open_holes_ = 1;
    if (spec_.order == Order::probability) pending_best_ = spec_.table->best[sort_index(start)];
    pending_min_ = spec_.sizes->min[sort_index(start)];
    auto root = [&](const Value& v, std::uint64_t) { (*on_complete_)(d_, complete_logp_, v); };
    expand(start, Sink(root));
  }

  void stop() { stop_ = true; }
  void raise_low(double log_low) { log_low_eff_ = std::max(log_low_eff_, log_low); }
  bool timed_out() const { return timed_out_; }
  bool pruned() const { return pruned_; }
  std::uint64_t generated() const { return generated_; }

 private:
  struct CacheEntry {
    bool done = false;
    bool ok = false;
    Value value;
    std::uint64_t steps = 0;
  };

  bool usable(RuleIndex r) const {
    if (spec_.sizes->child_min[r] == MinSizeTable::kNone) return false;
    if (spec_.order == Order::size) return true;
    return spec_.table->usable[r];
  }

  void tick() {
    if ((++ticks_ & 255u) == 0 && spec_.deadline && Clock::now() >= *spec_.deadline) {
      stop_ = true;
      timed_out_ = true;
    }
  }

  bool accept_complete() {
    if (spec_.order == Order::size) {
      if (d_.size() != spec_.size_cap) return false;
    } else {
      complete_logp_ = program_logprob(d_, *spec_.rp);
      if (complete_logp_ < spec_.log_low || !(complete_logp_ < spec_.log_high)) return false;
    }
    ++generated_;
    return true;
  }

  void expand(Sort s, Sink k) {
    const std::size_t si = sort_index(s);
    --open_holes_;
    const double saved_pb = pending_best_;
    const std::uint32_t saved_pm = pending_min_;
    const bool by_prob = spec_.order == Order::probability;
    if (by_prob) pending_best_ -= spec_.table->best[si];
    pending_min_ -= spec_.sizes->min[si];

    for (RuleIndex r : usable_[si]) {
      if (stop_) break;
      tick();
      const std::size_t nsize = d_.size() + 1;
      const std::uint32_t npm = pending_min_ + spec_.sizes->child_min[r];
      if (spec_.order == Order::size) {
        if (nsize + npm > spec_.size_cap) {
          pruned_ = true;
          continue;
        }
      } else if (spec_.size_cap != 0 && nsize + npm > spec_.size_cap) {
        continue;
      }
      double lp = 0.0;
      if (by_prob) {
        lp = run_logp_ + spec_.rp->logp[r];
        if (lp + pending_best_ + spec_.table->child_best[r] < log_low_eff_ - kBoundSlack) {
          pruned_ = true;
          continue;
        }
      }
      const Rule& rule = g_.rule(r);
      const double saved_lp = run_logp_;
      const double saved_pb2 = pending_best_;
      const std::uint32_t saved_pm2 = pending_min_;
      d_.push_back(r);
      run_logp_ = lp;
      if (by_prob) pending_best_ += spec_.table->child_best[r];
      pending_min_ = npm;
      open_holes_ += static_cast<std::uint32_t>(rule.children.size());

      if (open_holes_ != 0 || accept_complete()) produce(r, rule, k);

      open_holes_ -= static_cast<std::uint32_t>(rule.children.size());
      pending_min_ = saved_pm2;
      pending_best_ = saved_pb2;
      run_logp_ = saved_lp;
      d_.pop_back();
    }

    pending_min_ = saved_pm;
    pending_best_ = saved_pb;
    ++open_holes_;
  }

  void produce(RuleIndex r, const Rule& rule, Sink k) {
    switch (rule.kind) {
      case RuleKind::constant:
        k(rule.constant, 0);
        return;
      case RuleKind::input:
        k(input_, 0);
        return;
      case RuleKind::unit:
        expand(rule.children[0], k);
        return;
      case RuleKind::function:
        break;
    }
    if constexpr (Eval) {
      if (rule.children.empty()) {
        CacheEntry& c = cache_[r];
        if (!c.done) {
          c.done = true;
          std::vector<Value> args = fixed_args(rule);
          EvalError err;
          c.ok = invoke_function(*rule.fn, args, budget_, c.steps, c.value, err);
        }
        if (c.ok) k(c.value, c.steps);
        return;
      }
      std::vector<Value> args = fixed_args(rule);
      fill(rule, args.data(), 0, 0, k);
    } else {
      fill(rule, nullptr, 0, 0, k);
    }
  }

  std::vector<Value> fixed_args(const Rule& rule) const {
    std::vector<Value> args(rule.args.size());
    for (std::size_t i = 0; i < rule.args.size(); ++i) {
      if (rule.args[i].kind == RuleArg::Kind::bound) args[i] = rule.args[i].value;
      if (rule.args[i].kind == RuleArg::Kind::input) args[i] = input_;
    }
    return args;
  }

  void fill(const Rule& rule, Value* args, std::size_t j, std::uint64_t steps, Sink k) {
    const std::size_t n = rule.args.size();
    while (j < n && rule.args[j].kind != RuleArg::Kind::slot) ++j;
    if (j == n) {
      if constexpr (Eval) {
        Value out;
        std::uint64_t st = 0;
        EvalError err;
        if (!invoke_function(*rule.fn, std::span<const Value>(args, n), budget_, st, out, err)) return;
        if (steps + st > budget_.max_steps) return;
        k(out, steps + st);
      } else {
        k(input_, 0);
      }
      return;
    }
    auto cont = [&, j](const Value& v, std::uint64_t st) {
      if constexpr (Eval) args[j] = v;
      fill(rule, args, j + 1, steps + st, k);
    };
    expand(rule.args[j].sort, Sink(cont));
  }

  const Grammar& g_;
  const WalkSpec& spec_;
  Value input_;
  const ExecutionBudget& budget_;
  std::array<std::vector<RuleIndex>, kSortCount> usable_;
  std::vector<CacheEntry> cache_;
  OnComplete* on_complete_ = nullptr;

  Derivation d_;
  double run_logp_ = 0.0;
  double pending_best_ = 0.0;
  std::uint32_t pending_min_ = 0;
  std::uint32_t open_holes_ = 0;
  double complete_logp_ = 0.0;
  double log_low_eff_;

  bool stop_ = false;
  bool timed_out_ = false;
  bool pruned_ = false;
  std::uint64_t ticks_ = 0;
  std::uint64_t generated_ = 0;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::optional<Clock::time_point> deadline_for(Clock::time_point t0, double timeout_seconds) {
  if (!std::isfinite(timeout_seconds)) return std::nullopt;
  return t0 + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(timeout_seconds));
}

std::string trace_line(const std::string& label, const Grammar& g, const Derivation& d, double logp, bool ok) {
  char prob[32];
  std::snprintf(prob, sizeof prob, "%.6g", std::exp(logp));
  return label + '\t' + derivation_text(g, d) + '\t' + prob + '\t' + (ok ? "1" : "0");
}

bool consistent(const Grammar& g, const Derivation& d, const Value& out, const SystemInput& z,
                const SearchConfig& cfg) {
  if (!out.is_text() || out.text() != z.example_output) return false;
  if (cfg.data_output) return produces(g, d, z.data_input, *cfg.data_output, cfg.budget);
  return true;
}

}  // namespace

std::string_view status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::found: return "found";
    case SearchStatus::not_found: return "not_found";
    case SearchStatus::timeout: return "timeout";
  }
  return "unknown";
}

MaxCompletionTable max_completion(const Grammar& g, const RuleProbabilities& rp, bool require_finite_start) {
  if (rp.logp.size() != g.size()) throw Error(ErrorCode::unpriced_rule, "probabilities do not match grammar");
  MaxCompletionTable t;
  t.best.fill(-kInf);
  auto child_sum = [&](const Rule& r) {
    double s = 0.0;
    for (Sort c : r.children) s += t.best[sort_index(c)];
    return s;
  };
  const std::size_t rounds = 10 * kSortCount;
  for (std::size_t round = 0; round < rounds; ++round) {
    bool changed = false;
    for (RuleIndex i = 0; i < g.size(); ++i) {
      const Rule& r = g.rule(i);
      double v = rp.logp[i] + child_sum(r);
      double& b = t.best[sort_index(r.lhs)];
      if (v > b) {
        if (!std::isfinite(b) || v - b > 1e-12) changed = true;
        b = v;
      }
    }
    if (!changed) break;
  }
  t.child_best.resize(g.size());
  t.usable.resize(g.size());
  for (RuleIndex i = 0; i < g.size(); ++i) {
    t.child_best[i] = child_sum(g.rule(i));
    t.usable[i] = std::isfinite(t.child_best[i]) && std::isfinite(rp.logp[i]);
  }
  if (require_finite_start && !std::isfinite(t[g.start()])) {
    throw Error(ErrorCode::no_finite_start, "no complete derivation of " + std::string(sort_name(g.start())));
  }
  return t;
}

MinSizeTable min_sizes(const Grammar& g) {
  MinSizeTable t;
  t.min.fill(MinSizeTable::kNone);
  auto child_sum = [&](const Rule& r) -> std::uint32_t {
    std::uint64_t s = 0;
    for (Sort c : r.children) {
      if (t.min[sort_index(c)] == MinSizeTable::kNone) return MinSizeTable::kNone;
      s += t.min[sort_index(c)];
    }
    return s >= MinSizeTable::kNone ? MinSizeTable::kNone : static_cast<std::uint32_t>(s);
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (RuleIndex i = 0; i < g.size(); ++i) {
      const Rule& r = g.rule(i);
      std::uint32_t c = child_sum(r);
      if (c == MinSizeTable::kNone) continue;
      std::uint32_t& m = t.min[sort_index(r.lhs)];
      if (c + 1 < m) {
        m = c + 1;
        changed = true;
      }
    }
  }
  t.child_min.resize(g.size());
  for (RuleIndex i = 0; i < g.size(); ++i) t.child_min[i] = child_sum(g.rule(i));
  return t;
}

bool precedes(const ScoredDerivation& a, const ScoredDerivation& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  if (a.derivation.size() != b.derivation.size()) return a.derivation.size() < b.derivation.size();
  return a.derivation < b.derivation;
}

std::vector<ScoredDerivation> enumerate_band(const Grammar& g, const RuleProbabilities& rp,
                                             const MaxCompletionTable& table, double eta_low, double eta_high,
                                             std::size_t max_size) {
  if (!(eta_low >= 0.0) || !(eta_high > eta_low)) throw Error(ErrorCode::invalid_argument, "bad band");
  if (eta_low == 0.0 && max_size == 0) throw Error(ErrorCode::invalid_argument, "unbounded band needs a size cap");
  std::vector<ScoredDerivation> out;
  if (!std::isfinite(table[g.start()])) return out;
  MinSizeTable sizes = min_sizes(g);
  WalkSpec spec;
  spec.order = Order::probability;
  spec.rp = &rp;
  spec.table = &table;
  spec.sizes = &sizes;
  spec.log_low = eta_low > 0.0 ? std::log(eta_low) : -kInf;
  spec.log_high = eta_high >= 1.0 ? kInf : std::log(eta_high);
  spec.size_cap = max_size;
  Walker<false> w(g, spec, Text(), ExecutionBudget{});
  auto collect = [&](const Derivation& d, double lp, const Value&) { out.push_back({d, lp}); };
  w.run(OnComplete(collect));
  std::sort(out.begin(), out.end(), precedes);
  return out;
}

std::vector<Derivation> enumerate_by_size(const Grammar& g, std::size_t max_size, std::size_t limit) {
  std::vector<Derivation> out;
  MinSizeTable sizes = min_sizes(g);
  if (sizes[g.start()] == MinSizeTable::kNone) return out;
  for (std::size_t k = sizes[g.start()]; k <= max_size && out.size() < limit; ++k) {
    WalkSpec spec;
    spec.order = Order::size;
    spec.sizes = &sizes;
    spec.size_cap = k;
    Walker<false> w(g, spec, Text(), ExecutionBudget{});
    auto collect = [&](const Derivation& d, double, const Value&) {
      out.push_back(d);
      if (out.size() >= limit) w.stop();
    };
    w.run(OnComplete(collect));
    if (!w.pruned()) break;
  }
  return out;
}

SearchOutcome search_grammar(const std::shared_ptr<const Grammar>& gp, const RuleProbabilities& rp,
                             const SystemInput& z, const SearchConfig& cfg) {
  const auto t0 = Clock::now();
  SearchOutcome out;
  auto finish = [&](SearchStatus s) {
    out.status = s;
    out.stats.elapsed_seconds = seconds_since(t0);
    return out;
  };
  if (!(cfg.timeout_seconds > 0.0)) return finish(SearchStatus::timeout);
  if (!(cfg.eta_decay > 0.0 && cfg.eta_decay < 1.0) ||
      !(cfg.initial_eta_factor > 0.0 && cfg.initial_eta_factor <= 1.0) || !cfg.budget.valid()) {
    throw Error(ErrorCode::invalid_argument, "invalid search configuration");
  }
  const Grammar& g = *gp;
  if (z.example_input.size() > cfg.budget.max_output_bytes) return finish(SearchStatus::not_found);

  MaxCompletionTable table;
  try {
    table = max_completion(g, rp);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::no_finite_start) throw;
    return finish(SearchStatus::not_found);
  }
  MinSizeTable sizes = min_sizes(g);

  const std::size_t cap = std::max<std::size_t>(1, cfg.max_candidates_per_band);
  double log_eta = std::log(cfg.initial_eta_factor) + table[g.start()];
  double log_high = kInf;
  const double log_decay = std::log(cfg.eta_decay);
  std::vector<ScoredDerivation> kept;

  while (true) {
    ++out.stats.bands;
    out.stats.final_eta = std::exp(log_eta);
    WalkSpec spec;
    spec.order = Order::probability;
    spec.rp = &rp;
    spec.table = &table;
    spec.sizes = &sizes;
    spec.log_low = log_eta;
    spec.log_high = log_high;
    spec.deadline = deadline_for(t0, cfg.timeout_seconds);
    Walker<true> w(g, spec, z.example_input, cfg.budget);
    const std::string label = "band " + std::to_string(out.stats.bands);

    auto on_program = [&](const Derivation& d, double lp, const Value& v) {
      ++out.stats.programs_executed;
      bool ok = consistent(g, d, v, z, cfg);
      if (cfg.observer) cfg.observer(d, lp, ok);
      if (cfg.trace && out.trace.size() < cfg.trace_limit) out.trace.push_back(trace_line(label, g, d, lp, ok));
      if (!ok) return;
      ScoredDerivation sd{d, lp};
      kept.insert(std::upper_bound(kept.begin(), kept.end(), sd, precedes), std::move(sd));
      if (kept.size() > cap) kept.pop_back();
      if (kept.size() == cap) w.raise_low(kept.back().logprob);
    };
    w.run(OnComplete(on_program));
    out.stats.programs_generated += w.generated();

    if (!kept.empty()) {
      for (const auto& sd : kept) out.candidates.push_back({Program(gp, sd.derivation), sd.logprob});
      out.result = out.candidates.front().program;
      out.logprob = out.candidates.front().logprob;
      return finish(SearchStatus::found);
    }
    if (w.timed_out()) return finish(SearchStatus::timeout);
    if (!w.pruned()) return finish(SearchStatus::not_found);
    log_high = log_eta;
    log_eta += log_decay;
  }
}

SearchOutcome baseline_search_grammar(const std::shared_ptr<const Grammar>& gp, const SystemInput& z,
                                      const SearchConfig& cfg) {
  const auto t0 = Clock::now();
  SearchOutcome out;
  auto finish = [&](SearchStatus s) {
    out.status = s;
    out.stats.elapsed_seconds = seconds_since(t0);
    return out;
  };
  if (!(cfg.timeout_seconds > 0.0)) return finish(SearchStatus::timeout);
  if (!cfg.budget.valid()) throw Error(ErrorCode::invalid_argument, "invalid execution budget");
  const Grammar& g = *gp;
  if (z.example_input.size() > cfg.budget.max_output_bytes) return finish(SearchStatus::not_found);
  MinSizeTable sizes = min_sizes(g);
  if (sizes[g.start()] == MinSizeTable::kNone) return finish(SearchStatus::not_found);

  for (std::size_t k = sizes[g.start()];; ++k) {
    ++out.stats.bands;
    WalkSpec spec;
    spec.order = Order::size;
    spec.sizes = &sizes;
    spec.size_cap = k;
    spec.deadline = deadline_for(t0, cfg.timeout_seconds);
    Walker<true> w(g, spec, z.example_input, cfg.budget);
    const std::string label = "size " + std::to_string(k);
    std::optional<Derivation> hit;
    auto on_program = [&](const Derivation& d, double, const Value& v) {
      ++out.stats.programs_executed;
      bool ok = consistent(g, d, v, z, cfg);
      if (cfg.observer) cfg.observer(d, 0.0, ok);
      if (cfg.trace && out.trace.size() < cfg.trace_limit) out.trace.push_back(trace_line(label, g, d, 0.0, ok));
      if (ok) {
        hit = d;
        w.stop();
      }
    };
    w.run(OnComplete(on_program));
    out.stats.programs_generated += w.generated();
    if (hit) {
      auto uniform = assign_probabilities(g, WeightVector::zeros(g.suggester_ids()));
      out.logprob = program_logprob(*hit, uniform);
      out.result = Program(gp, *hit);
      out.candidates.push_back({*out.result, out.logprob});
      return finish(SearchStatus::found);
    }
    if (w.timed_out()) return finish(SearchStatus::timeout);
    if (!w.pruned()) return finish(SearchStatus::not_found);
  }
}

namespace {

std::shared_ptr<const Grammar> try_build(const SystemInput& z, const ClueCatalog& catalog) {
  try {
    return build_instance_grammar(z, catalog);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::vacuous_grammar) throw;
    return nullptr;
  }
}

SearchOutcome vacuous(const SearchConfig& cfg) {
  SearchOutcome out;
  out.status = cfg.timeout_seconds > 0.0 ? SearchStatus::not_found : SearchStatus::timeout;
  return out;
}

}  // namespace

SearchOutcome search(const SystemInput& z, const WeightVector& theta, const SearchConfig& cfg,
                     const ClueCatalog& catalog) {
  if (cfg.mode == SearchMode::baseline) return baseline_search(z, cfg, catalog);
  auto g = try_build(z, catalog);
  if (!g) return vacuous(cfg);
  return search_grammar(g, assign_probabilities(*g, theta), z, cfg);
}

SearchOutcome baseline_search(const SystemInput& z, const SearchConfig& cfg, const ClueCatalog& catalog) {
  auto g = try_build(z, catalog);
  if (!g) return vacuous(cfg);
  return baseline_search_grammar(g, z, cfg);
}

}  // namespace cluesynth
