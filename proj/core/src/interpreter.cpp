#include "cluesynth/interpreter.hpp"

#include <array>

namespace cluesynth {
namespace {

class Interpreter {
 public:
  Interpreter(const Grammar& g, std::span<const RuleIndex> d, std::string_view input, const ExecutionBudget& budget)
      : g_(g), d_(d), input_(input), budget_(budget) {}

  bool run(Value& out) { return eval(out) && pos_ == d_.size(); }
  const EvalError& error() const { return error_; }

 private:
  bool eval(Value& out) {
    const Rule& r = g_.rule(d_[pos_++]);
    switch (r.kind) {
      case RuleKind::constant:
        out = r.constant;
        return true;
      case RuleKind::input:
        out = Value(Text(input_));
        return within_output_limits(out, budget_, error_);
      case RuleKind::unit:
        return eval(out);
      case RuleKind::function: {
        std::array<Value, 4> small;
        std::vector<Value> large;
        std::span<Value> args;
        if (r.args.size() <= small.size()) {
          args = std::span<Value>(small.data(), r.args.size());
        } else {
          large.resize(r.args.size());
          args = large;
        }
        for (std::size_t i = 0; i < r.args.size(); ++i) {
          const auto& a = r.args[i];
          switch (a.kind) {
            case RuleArg::Kind::slot:
              if (!eval(args[i])) return false;
              break;
            case RuleArg::Kind::bound: args[i] = a.value; break;
            case RuleArg::Kind::input: args[i] = Value(Text(input_)); break;
          }
        }
        return invoke_function(*r.fn, args, budget_, steps_, out, error_);
      }
    }
    return false;
  }

  const Grammar& g_;
  std::span<const RuleIndex> d_;
  std::string_view input_;
  const ExecutionBudget& budget_;
  std::size_t pos_ = 0;
  std::uint64_t steps_ = 0;
  EvalError error_;
};

}  // namespace

EvalResult evaluate(const Grammar& g, std::span<const RuleIndex> d, std::string_view input,
                    const ExecutionBudget& budget) {
  if (!is_complete_derivation(g, d)) return EvalError{EvalErrorKind::sort_error, "incomplete derivation"};
  if (input.size() > budget.max_output_bytes) {
    return EvalError{EvalErrorKind::budget_exceeded, "input exceeds output byte limit"};
  }
  Interpreter interp(g, d, input, budget);
  Value out;
  if (!interp.run(out)) return interp.error();
  if (!sort_accepts(g.start(), out.kind())) {
    return EvalError{EvalErrorKind::sort_error, "program produced " + std::string(kind_name(out.kind()))};
  }
  return out;
}

EvalResult evaluate(const Program& program, std::string_view input, const ExecutionBudget& budget) {
  return evaluate(program.grammar(), program.derivation(), input, budget);
}

bool produces(const Grammar& g, std::span<const RuleIndex> d, std::string_view input, std::string_view expected,
              const ExecutionBudget& budget) {
  auto r = evaluate(g, d, input, budget);
  return r.ok() && r.value().is_text() && r.value().text() == expected;
}

}  // namespace cluesynth
