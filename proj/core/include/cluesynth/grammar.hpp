#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cluesynth/dsl.hpp"
#include "cluesynth/program_text.hpp"
#include "cluesynth/value.hpp"

namespace cluesynth {

using RuleIndex = std::uint32_t;

/// Leftmost derivation: rule indices in preorder.
using Derivation = std::vector<RuleIndex>;

/// One right-hand-side position of a function rule.
struct RuleArg {
  enum class Kind : std::uint8_t { slot, bound, input };

  Kind kind = Kind::slot;
  Sort sort = Sort::E;  // slot only
  Value value;          // bound only

  static RuleArg slot(Sort s) { return {Kind::slot, s, {}}; }
  static RuleArg bound(Value v) { return {Kind::bound, Sort::E, std::move(v)}; }
  static RuleArg input() { return {Kind::input, Sort::E, {}}; }
};

enum class RuleKind : std::uint8_t {
  function,  // LHS -> f(args...)
  constant,  // LHS -> literal
  unit,      // LHS -> NONTERMINAL (value passes through)
  input,     // LHS -> x
};

struct Rule {
  std::string id;  // canonical text, e.g. `LIST->split(x, DELIM)`; defines identity and order
  Sort lhs = Sort::P;
  RuleKind kind = RuleKind::constant;
  const FunctionRegistry::Entry* fn = nullptr;
  std::vector<RuleArg> args;
  Value constant;
  std::vector<Sort> children;           // nonterminals of the rhs, left to right
  std::vector<std::string> suggesters;  // clue ids, sorted and unique
};

/// Builders validate sorts and throw Error(sort_error).
Rule make_function_rule(Sort lhs, const FunctionRegistry::Entry& fn, std::vector<RuleArg> args);
Rule make_function_rule(Sort lhs, const FunctionRegistry& registry, std::string_view name, std::vector<RuleArg> args);
Rule make_constant_rule(Sort lhs, Value value);
Rule make_unit_rule(Sort lhs, Sort child);
Rule make_input_rule(Sort lhs);
/// Inverse of the rule id: `LIST->split(x, DELIM)`, `DELIM->"\n"`, `CAT->LIST`.
/// Throws Error(syntax_error), Error(unknown_function) or Error(sort_error).
Rule parse_rule(std::string_view text, const FunctionRegistry& registry = standard_registry());

/// A finite rule set with a start symbol. Rules are ordered by id and rules
/// with equal ids are merged (suggester sets unioned).
class Grammar {
 public:
  explicit Grammar(std::vector<Rule> rules, Sort start = Sort::P);

  Sort start() const { return start_; }
  std::size_t size() const { return rules_.size(); }
  const std::vector<Rule>& rules() const { return rules_; }
  const Rule& rule(RuleIndex i) const { return rules_[i]; }
  std::span<const RuleIndex> rules_for(Sort lhs) const { return by_lhs_[sort_index(lhs)]; }
  std::optional<RuleIndex> find(std::string_view id) const;

  /// Sorted, unique clue ids over all rules.
  std::vector<std::string> suggester_ids() const;

 private:
  Sort start_;
  std::vector<Rule> rules_;
  std::vector<std::vector<RuleIndex>> by_lhs_;
};

/// Checks that `d` is a complete leftmost derivation of the start symbol.
bool is_complete_derivation(const Grammar& g, std::span<const RuleIndex> d);

/// One past the last preorder position of the subtree rooted at `pos`.
std::size_t subtree_end(const Grammar& g, std::span<const RuleIndex> d, std::size_t pos);

/// A derivation bound to the grammar whose rules it indexes.
class Program {
 public:
  /// Throws Error(invalid_argument) if `d` is not a complete derivation.
  Program(std::shared_ptr<const Grammar> grammar, Derivation d);

  const Grammar& grammar() const { return *grammar_; }
  const std::shared_ptr<const Grammar>& grammar_ptr() const { return grammar_; }
  const Derivation& derivation() const { return derivation_; }
  const Rule& rule_at(std::size_t pos) const { return grammar_->rule(derivation_[pos]); }

  /// Number of constituent rule applications.
  std::size_t size() const { return derivation_.size(); }

  Expr to_expr() const;
  std::string text() const;

 private:
  std::shared_ptr<const Grammar> grammar_;
  Derivation derivation_;
};

Expr derivation_to_expr(const Grammar& g, std::span<const RuleIndex> d);
std::string derivation_text(const Grammar& g, std::span<const RuleIndex> d);
std::string print_program(const Program& p);

/// Parses the program text form against the registry alone. Each call,
/// literal and `x` becomes a rule of a private grammar: `x` in a text
/// parameter position is a bound input, literals are constant rules, and CAT
/// positions go through CAT->LIST / CAT->E. Throws Error(syntax_error),
/// Error(unknown_function) or Error(sort_error).
Program parse_program(std::string_view text, const FunctionRegistry& registry = standard_registry());

/// Finds a derivation in `g` that prints as `expr`, preferring the fewest
/// rules and then the lexicographically smallest rule-index sequence.
std::optional<Derivation> resolve_derivation(const Grammar& g, const Expr& expr);
std::optional<Program> resolve_program(std::shared_ptr<const Grammar> g, std::string_view text);

/// Clue weights keyed by clue id.
class WeightVector {
 public:
  WeightVector() = default;
  static WeightVector zeros(std::span<const std::string> ids);

  void set(const std::string& id, double value) { values_[id] = value; }
  std::optional<double> get(std::string_view id) const;
  bool contains(std::string_view id) const { return values_.find(id) != values_.end(); }
  std::size_t size() const { return values_.size(); }
  const std::map<std::string, double, std::less<>>& values() const { return values_; }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::map<std::string, double, std::less<>> values_;
};

/// Log-probability per rule index of a grammar.
struct RuleProbabilities {
  std::vector<double> logp;
};

/// Log-linear rule probabilities: score(r) = sum of weights of r's suggesters,
/// normalized per left-hand side with a max-shifted log-sum-exp. Throws
/// Error(missing_weight) when a suggester has no weight.
RuleProbabilities assign_probabilities(const Grammar& g, const WeightVector& theta);

/// Probabilities from explicit per-rule log-probabilities (fixtures, tests).
RuleProbabilities probabilities_from(const Grammar& g, const std::map<std::string, double>& logp_by_id);

/// Sum of rule log-probabilities with multiplicity, accumulated in rule-index
/// order. Throws Error(unpriced_rule).
double program_logprob(std::span<const RuleIndex> d, const RuleProbabilities& rp);
double program_logprob(const Program& p, const RuleProbabilities& rp);

}  // namespace cluesynth
