#include "cluesynth/grammar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include "cluesynth/errors.hpp"

namespace cluesynth {

namespace {

std::string arg_text(const RuleArg& a) {
  switch (a.kind) {
    case RuleArg::Kind::slot: return std::string(sort_name(a.sort));
    case RuleArg::Kind::bound: return to_literal(a.value);
    case RuleArg::Kind::input: return "x";
  }
  return {};
}

std::string rule_id(const Rule& r) {
  std::string id(sort_name(r.lhs));
  id += "->";
  switch (r.kind) {
    case RuleKind::function:
      id += r.fn->desc.name;
      id += '(';
      for (std::size_t i = 0; i < r.args.size(); ++i) {
        if (i) id += ", ";
        id += arg_text(r.args[i]);
      }
      id += ')';
      break;
    case RuleKind::constant: id += to_literal(r.constant); break;
    case RuleKind::unit: id += sort_name(r.children.front()); break;
    case RuleKind::input: id += 'x'; break;
  }
  return id;
}

[[noreturn]] void sort_error(const std::string& what) { throw Error(ErrorCode::sort_error, what); }

}  // namespace

Rule make_function_rule(Sort lhs, const FunctionRegistry::Entry& fn, std::vector<RuleArg> args) {
  const auto& desc = fn.desc;
  if (args.size() != desc.arity()) sort_error(desc.name + ": expected " + std::to_string(desc.arity()) + " arguments");
  if (!sort_fits(desc.return_sort, lhs)) {
    sort_error(desc.name + " returns " + std::string(sort_name(desc.return_sort)) + ", not usable as " +
               std::string(sort_name(lhs)));
  }
  Rule r;
  r.lhs = lhs;
  r.kind = RuleKind::function;
  r.fn = &fn;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Sort param = desc.param_sorts[i];
    const auto& a = args[i];
    switch (a.kind) {
      case RuleArg::Kind::slot:
        if (!sort_fits(a.sort, param)) {
          sort_error(desc.name + ": argument " + std::to_string(i + 1) + " is " + std::string(sort_name(a.sort)) +
                     ", expected " + std::string(sort_name(param)));
        }
        r.children.push_back(a.sort);
        break;
      case RuleArg::Kind::bound:
        if (a.value.is_list() || !sort_accepts(param, a.value.kind())) {
          sort_error(desc.name + ": bound argument " + std::to_string(i + 1) + " does not fit " +
                     std::string(sort_name(param)));
        }
        break;
      case RuleArg::Kind::input:
        if (!sort_accepts(param, ValueKind::text)) {
          sort_error(desc.name + ": x is text but argument " + std::to_string(i + 1) + " expects " +
                     std::string(sort_name(param)));
        }
        break;
    }
  }
  r.args = std::move(args);
  r.id = rule_id(r);
  return r;
}

Rule make_function_rule(Sort lhs, const FunctionRegistry& registry, std::string_view name, std::vector<RuleArg> args) {
  const auto* fn = registry.find(name);
  if (!fn) throw Error(ErrorCode::unknown_function, std::string(name));
  return make_function_rule(lhs, *fn, std::move(args));
}

Rule make_constant_rule(Sort lhs, Value value) {
  if (value.is_list() || !sort_accepts(lhs, value.kind())) {
    sort_error(to_literal(value) + " is not a " + std::string(sort_name(lhs)));
  }
  Rule r;
  r.lhs = lhs;
  r.kind = RuleKind::constant;
  r.constant = std::move(value);
  r.id = rule_id(r);
  return r;
}

Rule make_unit_rule(Sort lhs, Sort child) {
  if (lhs == child || !sort_fits(child, lhs)) {
    sort_error(std::string(sort_name(child)) + " cannot stand for " + std::string(sort_name(lhs)));
  }
  Rule r;
  r.lhs = lhs;
  r.kind = RuleKind::unit;
  r.children = {child};
  r.id = rule_id(r);
  return r;
}

Rule make_input_rule(Sort lhs) {
  if (!sort_accepts(lhs, ValueKind::text)) sort_error("x cannot stand for " + std::string(sort_name(lhs)));
  Rule r;
  r.lhs = lhs;
  r.kind = RuleKind::input;
  r.id = rule_id(r);
  return r;
}

Rule parse_rule(std::string_view text, const FunctionRegistry& registry) {
  auto arrow = text.find("->");
  if (arrow == std::string_view::npos) throw Error(ErrorCode::syntax_error, "rule without '->': " + std::string(text));
  std::string_view left = text.substr(0, arrow);
  while (!left.empty() && left.back() == ' ') left.remove_suffix(1);
  while (!left.empty() && left.front() == ' ') left.remove_prefix(1);
  auto lhs = parse_sort(left);
  if (!lhs) throw Error(ErrorCode::syntax_error, "unknown nonterminal " + std::string(left));
  Expr rhs = parse_expr(text.substr(arrow + 2));

  auto literal = [](const Expr& e) -> std::optional<Value> {
    switch (e.kind) {
      case Expr::Kind::string: return Value(e.name);
      case Expr::Kind::integer: return Value(e.number);
      case Expr::Kind::ident:
        if (auto c = parse_comparator(e.name)) return Value(*c);
        return std::nullopt;
      case Expr::Kind::call: return std::nullopt;
    }
    return std::nullopt;
  };
  if (rhs.kind == Expr::Kind::call) {
    std::vector<RuleArg> args;
    for (const Expr& a : rhs.args) {
      if (a.kind == Expr::Kind::ident && a.name == "x") {
        args.push_back(RuleArg::input());
      } else if (auto s = a.kind == Expr::Kind::ident ? parse_sort(a.name) : std::nullopt) {
        args.push_back(RuleArg::slot(*s));
      } else if (auto v = literal(a)) {
        args.push_back(RuleArg::bound(*v));
      } else {
        throw Error(ErrorCode::syntax_error, "rule arguments are nonterminals, x or literals: " + std::string(text));
      }
    }
    return make_function_rule(*lhs, registry, rhs.name, std::move(args));
  }
  if (rhs.kind == Expr::Kind::ident && rhs.name == "x") return make_input_rule(*lhs);
  if (rhs.kind == Expr::Kind::ident) {
    if (auto s = parse_sort(rhs.name)) return make_unit_rule(*lhs, *s);
  }
  if (auto v = literal(rhs)) return make_constant_rule(*lhs, *v);
  throw Error(ErrorCode::syntax_error, "cannot read rule " + std::string(text));
}

// ---------------------------------------------------------------------------

Grammar::Grammar(std::vector<Rule> rules, Sort start) : start_(start), by_lhs_(kSortCount) {
  std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) { return a.id < b.id; });
  for (auto& r : rules) {
    if (!rules_.empty() && rules_.back().id == r.id) {
      auto& merged = rules_.back().suggesters;
      merged.insert(merged.end(), r.suggesters.begin(), r.suggesters.end());
    } else {
      rules_.push_back(std::move(r));
    }
  }
  for (RuleIndex i = 0; i < rules_.size(); ++i) {
    auto& s = rules_[i].suggesters;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    by_lhs_[sort_index(rules_[i].lhs)].push_back(i);
  }
}

std::optional<RuleIndex> Grammar::find(std::string_view id) const {
  auto it = std::lower_bound(rules_.begin(), rules_.end(), id, [](const Rule& r, std::string_view k) { return r.id < k; });
  if (it == rules_.end() || it->id != id) return std::nullopt;
  return static_cast<RuleIndex>(it - rules_.begin());
}

std::vector<std::string> Grammar::suggester_ids() const {
  std::set<std::string> ids;
  for (const auto& r : rules_) ids.insert(r.suggesters.begin(), r.suggesters.end());
  return {ids.begin(), ids.end()};
}

bool is_complete_derivation(const Grammar& g, std::span<const RuleIndex> d) {
  std::vector<Sort> pending{g.start()};
  for (RuleIndex idx : d) {
    if (pending.empty() || idx >= g.size()) return false;
    const Rule& r = g.rule(idx);
    if (r.lhs != pending.back()) return false;
    pending.pop_back();
    for (auto it = r.children.rbegin(); it != r.children.rend(); ++it) pending.push_back(*it);
  }
  return pending.empty();
}

std::size_t subtree_end(const Grammar& g, std::span<const RuleIndex> d, std::size_t pos) {
  std::size_t open = 1;
  while (open > 0 && pos < d.size()) {
    open += g.rule(d[pos]).children.size();
    --open;
    ++pos;
  }
  return pos;
}

// ---------------------------------------------------------------------------

Program::Program(std::shared_ptr<const Grammar> grammar, Derivation d)
    : grammar_(std::move(grammar)), derivation_(std::move(d)) {
  if (!grammar_ || !is_complete_derivation(*grammar_, derivation_)) {
    throw Error(ErrorCode::invalid_argument, "not a complete derivation of the start symbol");
  }
}

namespace {

Expr literal_expr(const Value& v) {
  Expr e;
  switch (v.kind()) {
    case ValueKind::text:
      e.kind = Expr::Kind::string;
      e.name = v.text();
      break;
    case ValueKind::integer:
      e.kind = Expr::Kind::integer;
      e.number = v.integer();
      break;
    case ValueKind::comparator:
      e.kind = Expr::Kind::ident;
      e.name = std::string(comparator_name(v.comparator()));
      break;
    case ValueKind::text_list:
      throw Error(ErrorCode::invalid_argument, "list literals have no program text form");
  }
  return e;
}

Expr input_expr() {
  Expr e;
  e.kind = Expr::Kind::ident;
  e.name = "x";
  return e;
}

Expr build_expr(const Grammar& g, std::span<const RuleIndex> d, std::size_t& pos) {
  const Rule& r = g.rule(d[pos++]);
  switch (r.kind) {
    case RuleKind::constant: return literal_expr(r.constant);
    case RuleKind::input: return input_expr();
    case RuleKind::unit: return build_expr(g, d, pos);
    case RuleKind::function: {
      Expr e;
      e.kind = Expr::Kind::call;
      e.name = r.fn->desc.name;
      for (const auto& a : r.args) {
        switch (a.kind) {
          case RuleArg::Kind::slot: e.args.push_back(build_expr(g, d, pos)); break;
          case RuleArg::Kind::bound: e.args.push_back(literal_expr(a.value)); break;
          case RuleArg::Kind::input: e.args.push_back(input_expr()); break;
        }
      }
      return e;
    }
  }
  return {};
}

}  // namespace

Expr derivation_to_expr(const Grammar& g, std::span<const RuleIndex> d) {
  std::size_t pos = 0;
  return build_expr(g, d, pos);
}

std::string derivation_text(const Grammar& g, std::span<const RuleIndex> d) {
  return print_expr(derivation_to_expr(g, d));
}

Expr Program::to_expr() const { return derivation_to_expr(*grammar_, derivation_); }
std::string Program::text() const { return print_expr(to_expr()); }
std::string print_program(const Program& p) { return p.text(); }

// ---------------------------------------------------------------------------
// Registry-only parsing

namespace {

class FreeBuilder {
 public:
  explicit FreeBuilder(const FunctionRegistry& registry) : registry_(registry) {}

  void build(const Expr& e, Sort sort) {
    switch (e.kind) {
      case Expr::Kind::call: build_call(e, sort); return;
      case Expr::Kind::string:
        if (sort == Sort::CAT) {
          emit(make_unit_rule(Sort::CAT, Sort::E));
          sort = Sort::E;
        }
        emit(make_constant_rule(sort, Value(e.name)));
        return;
      case Expr::Kind::integer:
        emit(make_constant_rule(sort, Value(e.number)));
        return;
      case Expr::Kind::ident:
        if (e.name == "x") {
          if (sort == Sort::CAT) {
            emit(make_unit_rule(Sort::CAT, Sort::E));
            sort = Sort::E;
          }
          emit(make_input_rule(sort));
          return;
        }
        if (auto c = parse_comparator(e.name)) {
          emit(make_constant_rule(sort, Value(*c)));
          return;
        }
        throw Error(ErrorCode::syntax_error, "unknown identifier '" + e.name + "'");
    }
  }

  std::vector<Rule> rules;
  std::vector<std::string> order;

 private:
  void emit(Rule r) {
    order.push_back(r.id);
    rules.push_back(std::move(r));
  }

  void build_call(const Expr& e, Sort sort) {
    const auto* fn = registry_.find(e.name);
    if (!fn) throw Error(ErrorCode::unknown_function, e.name);
    if (e.args.size() != fn->desc.arity()) {
      throw Error(ErrorCode::sort_error, e.name + ": expected " + std::to_string(fn->desc.arity()) + " arguments, got " +
                                             std::to_string(e.args.size()));
    }
    if (sort == Sort::CAT) {
      Sort via = fn->desc.return_sort == Sort::LIST ? Sort::LIST : Sort::E;
      emit(make_unit_rule(Sort::CAT, via));
      sort = via;
    }
    std::vector<RuleArg> args;
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      const Expr& a = e.args[i];
      Sort param = fn->desc.param_sorts[i];
      if (a.kind == Expr::Kind::ident && a.name == "x" && sort_accepts(param, ValueKind::text)) {
        args.push_back(RuleArg::input());
      } else {
        args.push_back(RuleArg::slot(param));
      }
    }
    emit(make_function_rule(sort, *fn, args));
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      if (args[i].kind == RuleArg::Kind::slot) build(e.args[i], args[i].sort);
    }
  }

  const FunctionRegistry& registry_;
};

}  // namespace

Program parse_program(std::string_view text, const FunctionRegistry& registry) {
  Expr e = parse_expr(text);
  FreeBuilder builder(registry);
  builder.build(e, Sort::P);
  auto order = std::move(builder.order);
  auto grammar = std::make_shared<const Grammar>(std::move(builder.rules));
  Derivation d;
  d.reserve(order.size());
  for (const auto& id : order) d.push_back(*grammar->find(id));
  return Program(std::move(grammar), std::move(d));
}

// ---------------------------------------------------------------------------
// Resolution against a given grammar

namespace {

bool literal_matches(const Expr& e, const Value& v) {
  switch (v.kind()) {
    case ValueKind::text: return e.kind == Expr::Kind::string && e.name == v.text();
    case ValueKind::integer: return e.kind == Expr::Kind::integer && e.number == v.integer();
    case ValueKind::comparator:
      return e.kind == Expr::Kind::ident && parse_comparator(e.name) == v.comparator();
    case ValueKind::text_list: return false;
  }
  return false;
}

bool is_input(const Expr& e) { return e.kind == Expr::Kind::ident && e.name == "x"; }

bool better(const Derivation& a, const Derivation& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

class Resolver {
 public:
  explicit Resolver(const Grammar& g) : g_(g) {}

  std::optional<Derivation> best(const Expr& e, Sort sort) {
    Key key{&e, sort};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!active_.insert(key).second) return std::nullopt;  // unit-rule cycle
    std::optional<Derivation> winner;
    for (RuleIndex idx : g_.rules_for(sort)) {
      auto candidate = try_rule(e, idx);
      if (candidate && (!winner || better(*candidate, *winner))) winner = std::move(candidate);
    }
    active_.erase(key);
    memo_.emplace(key, winner);
    return winner;
  }

 private:
  using Key = std::pair<const Expr*, Sort>;

  std::optional<Derivation> try_rule(const Expr& e, RuleIndex idx) {
    const Rule& r = g_.rule(idx);
    switch (r.kind) {
      case RuleKind::constant:
        if (literal_matches(e, r.constant)) return Derivation{idx};
        return std::nullopt;
      case RuleKind::input:
        if (is_input(e)) return Derivation{idx};
        return std::nullopt;
      case RuleKind::unit: {
        auto child = best(e, r.children.front());
        if (!child) return std::nullopt;
        Derivation d{idx};
        d.insert(d.end(), child->begin(), child->end());
        return d;
      }
      case RuleKind::function: {
        if (e.kind != Expr::Kind::call || e.name != r.fn->desc.name || e.args.size() != r.args.size()) {
          return std::nullopt;
        }
        Derivation d{idx};
        for (std::size_t i = 0; i < r.args.size(); ++i) {
          const auto& a = r.args[i];
          switch (a.kind) {
            case RuleArg::Kind::bound:
              if (!literal_matches(e.args[i], a.value)) return std::nullopt;
              break;
            case RuleArg::Kind::input:
              if (!is_input(e.args[i])) return std::nullopt;
              break;
            case RuleArg::Kind::slot: {
              auto child = best(e.args[i], a.sort);
              if (!child) return std::nullopt;
              d.insert(d.end(), child->begin(), child->end());
              break;
            }
          }
        }
        return d;
      }
    }
    return std::nullopt;
  }

  const Grammar& g_;
  std::map<Key, std::optional<Derivation>> memo_;
  std::set<Key> active_;
};

}  // namespace

std::optional<Derivation> resolve_derivation(const Grammar& g, const Expr& expr) {
  return Resolver(g).best(expr, g.start());
}

std::optional<Program> resolve_program(std::shared_ptr<const Grammar> g, std::string_view text) {
  Expr e = parse_expr(text);
  auto d = resolve_derivation(*g, e);
  if (!d) return std::nullopt;
  return Program(std::move(g), std::move(*d));
}

// ---------------------------------------------------------------------------
// Probabilities

WeightVector WeightVector::zeros(std::span<const std::string> ids) {
  WeightVector w;
  for (const auto& id : ids) w.set(id, 0.0);
  return w;
}

std::optional<double> WeightVector::get(std::string_view id) const {
  auto it = values_.find(id);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

RuleProbabilities assign_probabilities(const Grammar& g, const WeightVector& theta) {
  std::vector<double> score(g.size(), 0.0);
  for (RuleIndex i = 0; i < g.size(); ++i) {
    for (const auto& id : g.rule(i).suggesters) {
      auto w = theta.get(id);
      if (!w) throw Error(ErrorCode::missing_weight, "no weight for clue '" + id + "'");
      score[i] += *w;
    }
  }
  RuleProbabilities rp;
  rp.logp.assign(g.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < kSortCount; ++s) {
    auto rules = g.rules_for(static_cast<Sort>(s));
    if (rules.empty()) continue;
    double top = -std::numeric_limits<double>::infinity();
    for (auto i : rules) top = std::max(top, score[i]);
    double sum = 0.0;
    for (auto i : rules) sum += std::exp(score[i] - top);
    double log_z = top + std::log(sum);
    for (auto i : rules) rp.logp[i] = score[i] - log_z;
  }
  return rp;
}

RuleProbabilities probabilities_from(const Grammar& g, const std::map<std::string, double>& logp_by_id) {
  RuleProbabilities rp;
  rp.logp.reserve(g.size());
  for (const auto& r : g.rules()) {
    auto it = logp_by_id.find(r.id);
    if (it == logp_by_id.end()) throw Error(ErrorCode::unpriced_rule, r.id);
    rp.logp.push_back(it->second);
  }
  return rp;
}

double program_logprob(std::span<const RuleIndex> d, const RuleProbabilities& rp) {
  // Summed in rule-index order so equal rule multisets give bit-identical sums.
  std::array<RuleIndex, 64> small;
  std::vector<RuleIndex> large;
  std::span<RuleIndex> sorted;
  if (d.size() <= small.size()) {
    sorted = std::span<RuleIndex>(small.data(), d.size());
  } else {
    large.resize(d.size());
    sorted = large;
  }
  std::copy(d.begin(), d.end(), sorted.begin());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (auto idx : sorted) {
    if (idx >= rp.logp.size() || std::isnan(rp.logp[idx])) {
      throw Error(ErrorCode::unpriced_rule, "rule index " + std::to_string(idx));
    }
    total += rp.logp[idx];
  }
  return total;
}

double program_logprob(const Program& p, const RuleProbabilities& rp) {
  return program_logprob(std::span<const RuleIndex>(p.derivation()), rp);
}

}  // namespace cluesynth
