#include "doctest.h"

#include "cluesynth/dsl.hpp"
#include "cluesynth/errors.hpp"
#include "cluesynth/grammar.hpp"
#include "cluesynth/interpreter.hpp"

using namespace cluesynth;

namespace {

Value call(std::string_view name, std::vector<Value> args, ExecutionBudget budget = {}) {
  const auto* fn = standard_registry().find(name);
  REQUIRE(fn != nullptr);
  std::uint64_t steps = 0;
  Value out;
  EvalError err;
  bool ok = invoke_function(*fn, args, budget, steps, out, err);
  if (!ok) throw std::runtime_error(std::string(eval_error_name(err.kind)));
  return out;
}

std::string run(std::string_view program, std::string_view input) {
  auto r = evaluate(parse_program(program), input);
  if (!r.ok()) return "!" + std::string(eval_error_name(r.error().kind));
  return r.value().text();
}

const char* kOscars = "Anthony Hopkins\nAl Pacino\nTom Hanks\nTom Hanks\nNicolas Cage";
const char* kOscarsOut = "Anthony Hopkins (1)\nAl Pacino (1)\nTom Hanks (2)\nNicolas Cage (1)";
const char* kCounts =
    "join(dedup(concatLists(lines(x), \" \", concatLists(\"(\", count(lines(x), lines(x)), \")\"))), \"\\n\")";

}  // namespace

TEST_CASE("dedup keeps first occurrences") {
  CHECK(call("dedup", {TextList{"a", "a", "b"}}) == Value(TextList{"a", "b"}));
  CHECK(call("dedup", {TextList{"b", "a", "b", "a"}}) == Value(TextList{"b", "a"}));
}

TEST_CASE("count pairs each element with its occurrences") {
  TextList xs = split_lines(kOscars);
  CHECK(call("count", {xs, xs}) == Value(TextList{"1", "1", "2", "2", "1"}));
}

TEST_CASE("counts program reproduces the example output") {
  CHECK(run(kCounts, kOscars) == kOscarsOut);
}

TEST_CASE("split keeps interior empties and drops one trailing delimiter") {
  CHECK(split_text("a,,b,", ",") == TextList{"a", "", "b"});
  CHECK(split_text("a,b,,", ",") == TextList{"a", "b", ""});
  CHECK(split_text("", ",").empty());
  CHECK(join_text(split_text("a\nb\nc", "\n"), "\n") == "a\nb\nc");
}

TEST_CASE("concatLists broadcasts singletons") {
  CHECK(call("concatLists", {Text("a"), TextList{"b"}, Text("c")}) == Value(TextList{"abc"}));
  CHECK(call("concatLists2", {TextList{"x", "y"}, Text("!")}) == Value(TextList{"x!", "y!"}));
  CHECK_THROWS_WITH(call("concatLists2", {TextList{"x", "y"}, TextList{"1", "2", "3"}}), "DomainError");
}

TEST_CASE("sorting comparators") {
  TextList xs{"10", "9", "100"};
  CHECK(call("sort", {xs, Comparator::alpha}) == Value(TextList{"10", "100", "9"}));
  CHECK(call("sort", {xs, Comparator::numeric}) == Value(TextList{"9", "10", "100"}));
  CHECK(call("reverseSort", {xs, Comparator::length}) == Value(TextList{"100", "10", "9"}));
}

TEST_CASE("field selection is 1-based") {
  CHECK(call("select_field", {Text("a,b,c"), Text(","), std::int64_t{2}}) == Value(Text("b")));
  CHECK_THROWS_WITH(call("select_field", {Text("a,b"), Text(","), std::int64_t{3}}), "DomainError");
  CHECK_THROWS_WITH(call("select_field", {Text("a,b"), Text(","), std::int64_t{0}}), "DomainError");
  CHECK(call("selectFieldOnLines", {TextList{"a b", "c d"}, Text(" "), std::int64_t{2}}) == Value(TextList{"b", "d"}));
}

TEST_CASE("dates and numbers") {
  CHECK(call("monthName", {std::int64_t{6}}) == Value(Text("June")));
  CHECK_THROWS_WITH(call("monthName", {std::int64_t{13}}), "DomainError");
  CHECK(call("ordinal", {std::int64_t{28}}) == Value(Text("28th")));
  CHECK(call("ordinal", {std::int64_t{11}}) == Value(Text("11th")));
  CHECK(call("ordinal", {std::int64_t{22}}) == Value(Text("22nd")));
  CHECK(call("toInt", {Text("0042")}) == Value(std::int64_t{42}));
  CHECK_THROWS_WITH(call("toInt", {Text("4x")}), "ArithmeticError");
  CHECK_THROWS_WITH(call("toInt", {Text("99999999999999999999")}), "ArithmeticError");
  CHECK_THROWS_WITH(call("toInt", {Text("+-5")}), "ArithmeticError");
}

TEST_CASE("text functions") {
  CHECK(call("toUpper", {Text("abC")}) == Value(Text("ABC")));
  CHECK(call("capitalize", {Text("hELLO")}) == Value(Text("Hello")));
  CHECK(call("trim", {Text("  a b \t")}) == Value(Text("a b")));
  CHECK(call("replaceAll", {Text("a-b-c"), Text("-"), Text("+")}) == Value(Text("a+b+c")));
  CHECK(call("removeEmpty", {TextList{"a", "", "b"}}) == Value(TextList{"a", "b"}));
  CHECK(call("filterContains", {TextList{"ERROR x", "ok"}, Text("ERROR")}) == Value(TextList{"ERROR x"}));
  CHECK(call("filterNotContains", {TextList{"#c", "v"}, Text("#")}) == Value(TextList{"v"}));
}

TEST_CASE("budget is enforced and monotone") {
  ExecutionBudget tiny;
  tiny.max_steps = 3;
  auto p = parse_program(kCounts);
  auto small = evaluate(p, kOscars, tiny);
  REQUIRE_FALSE(small.ok());
  CHECK(small.error().kind == EvalErrorKind::budget_exceeded);
  auto full = evaluate(p, kOscars);
  REQUIRE(full.ok());
  ExecutionBudget big;
  big.max_steps *= 10;
  CHECK(evaluate(p, kOscars, big).value() == full.value());
}

TEST_CASE("registry rejects duplicates and frozen registration") {
  FunctionRegistry reg;
  FunctionDescriptor d{"dedup", {Sort::LIST}, Sort::LIST, 1, ""};
  auto sem = [](std::span<const Value> a, Value& out, CallContext&) {
    out = a[0];
    return true;
  };
  reg.register_function(d, sem);
  try {
    reg.register_function(d, sem);
    FAIL("expected DuplicateName");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::duplicate_name);
  }
  reg.freeze();
  try {
    reg.register_function({"other", {Sort::E}, Sort::E, 1, ""}, sem);
    FAIL("expected RegistryFrozen");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::registry_frozen);
  }
}

TEST_CASE("library properties") {
  TextList xs{"b", "a", "b", "c", "a"};
  auto once = call("dedup", {xs});
  CHECK(call("dedup", {once}) == once);
  auto sorted = call("sort", {xs, Comparator::alpha}).list();
  auto a = xs, b = sorted;
  std::sort(a.begin(), a.end());
  CHECK(a == b);
  CHECK(standard_registry().size() >= 30);
}
