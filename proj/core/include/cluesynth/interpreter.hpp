#pragma once

#include <span>
#include <string_view>
#include <variant>

#include "cluesynth/dsl.hpp"
#include "cluesynth/grammar.hpp"

namespace cluesynth {

class EvalResult {
 public:
  EvalResult(Value v) : data_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  EvalResult(EvalError e) : data_(std::move(e)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const { return data_.index() == 0; }
  explicit operator bool() const { return ok(); }
  const Value& value() const { return std::get<Value>(data_); }
  const EvalError& error() const { return std::get<EvalError>(data_); }

 private:
  std::variant<Value, EvalError> data_;
};

/// Evaluates a complete derivation with `x` bound to `input`. Deterministic
/// and side-effect free.
EvalResult evaluate(const Grammar& g, std::span<const RuleIndex> d, std::string_view input,
                    const ExecutionBudget& budget = {});
EvalResult evaluate(const Program& program, std::string_view input, const ExecutionBudget& budget = {});

/// True iff the program evaluates to exactly `expected` (text, byte for byte).
bool produces(const Grammar& g, std::span<const RuleIndex> d, std::string_view input, std::string_view expected,
              const ExecutionBudget& budget = {});

}  // namespace cluesynth
