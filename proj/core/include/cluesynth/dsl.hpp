#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cluesynth/value.hpp"

namespace cluesynth {

/// Typed signature of one library function.
struct FunctionDescriptor {
  std::string name;
  std::vector<Sort> param_sorts;
  Sort return_sort = Sort::E;
  std::uint32_t cost_hint = 1;
  std::string doc;

  std::size_t arity() const { return param_sorts.size(); }
};

/// Resource bounds applied to one program evaluation. All bounds must be > 0.
struct ExecutionBudget {
  std::uint64_t max_steps = 1'000'000;
  std::uint64_t max_output_bytes = 1u << 20;
  std::uint64_t max_list_len = 100'000;

  bool valid() const { return max_steps > 0 && max_output_bytes > 0 && max_list_len > 0; }

  /// Default budget with `CLUESYNTH_BUDGET_STEPS` applied when set.
  static ExecutionBudget from_environment();
};

enum class EvalErrorKind : std::uint8_t { budget_exceeded, sort_error, arithmetic_error, domain_error };

std::string_view eval_error_name(EvalErrorKind kind);

struct EvalError {
  EvalErrorKind kind = EvalErrorKind::domain_error;
  std::string message;
};

/// Per-call view handed to a function's semantics.
class CallContext {
 public:
  explicit CallContext(const ExecutionBudget& budget) : budget_(budget) {}

  const ExecutionBudget& budget() const { return budget_; }

  /// Adds abstract work units on top of the descriptor's cost hint.
  void charge(std::uint64_t units) { work_ += units; }
  std::uint64_t work() const { return work_; }

  bool fail(EvalErrorKind kind, std::string message) {
    error_ = EvalError{kind, std::move(message)};
    return false;
  }
  const EvalError& error() const { return error_; }

 private:
  const ExecutionBudget& budget_;
  std::uint64_t work_ = 0;
  EvalError error_;
};

/// Semantics of a library function. Arguments have already been checked
/// against the descriptor's parameter sorts. Returns false after calling
/// `ctx.fail(...)` on error.
using Semantics = std::function<bool(std::span<const Value> args, Value& out, CallContext& ctx)>;

class FunctionRegistry {
 public:
  struct Entry {
    FunctionDescriptor desc;
    Semantics semantics;
  };

  FunctionRegistry() = default;
  FunctionRegistry(const FunctionRegistry&) = delete;
  FunctionRegistry& operator=(const FunctionRegistry&) = delete;

  /// Throws Error(duplicate_name) or Error(registry_frozen).
  const Entry& register_function(FunctionDescriptor desc, Semantics semantics);

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  const Entry* find(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }

  /// Entries ordered by name.
  std::vector<const Entry*> entries() const;

 private:
  std::deque<Entry> entries_;
  std::map<std::string, const Entry*, std::less<>> by_name_;
  bool frozen_ = false;
};

/// Adds the built-in text-processing library to `registry`.
void register_standard_library(FunctionRegistry& registry);

/// Process-wide frozen registry holding the built-in library.
const FunctionRegistry& standard_registry();

/// Applies one function, enforcing sorts and budget. `steps` accumulates the
/// call's cost (cost hint + reported work + output size) and must stay within
/// budget.max_steps.
bool invoke_function(const FunctionRegistry::Entry& fn, std::span<const Value> args,
                     const ExecutionBudget& budget, std::uint64_t& steps, Value& out, EvalError& error);

/// Checks the size limits of a produced value.
bool within_output_limits(const Value& value, const ExecutionBudget& budget, EvalError& error);

// Text helpers shared by the library and the feature extractor.

/// Splits on a non-empty delimiter; interior empty fields are kept and a
/// single trailing delimiter does not produce a trailing empty field.
TextList split_text(std::string_view text, std::string_view delim);
std::string join_text(const TextList& items, std::string_view delim);
/// `split_text(text, "\n")`.
TextList split_lines(std::string_view text);

}  // namespace cluesynth
