#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cluesynth/grammar.hpp"

namespace fixtures {

using namespace cluesynth;

inline const char* kOscars = "Anthony Hopkins\nAl Pacino\nTom Hanks\nTom Hanks\nNicolas Cage";
inline const char* kOscarsOut = "Anthony Hopkins (1)\nAl Pacino (1)\nTom Hanks (2)\nNicolas Cage (1)";
inline const char* kCountsProgram =
    "join(dedup(concatLists(lines(x), \" \", concatLists(\"(\", count(lines(x), lines(x)), \")\"))), \"\\n\")";

struct Condensed {
  std::shared_ptr<const Grammar> grammar;
  WeightVector theta;
};

// The condensed example grammar with its illustrative probabilities. Each rule
// has its own clue with weight ln p, so every normalizer is 1.
inline Condensed condensed_grammar() {
  const auto& reg = standard_registry();
  auto S = [](Sort s) { return RuleArg::slot(s); };
  std::vector<std::pair<Rule, double>> rules = {
      {make_function_rule(Sort::P, reg, "join", {S(Sort::LIST), S(Sort::DELIM)}), 1.0},
      {make_function_rule(Sort::LIST, reg, "split", {RuleArg::input(), S(Sort::DELIM)}), 0.3},
      {make_function_rule(Sort::LIST, reg, "concatLists", {S(Sort::CAT), S(Sort::CAT), S(Sort::CAT)}), 0.1},
      {make_function_rule(Sort::LIST, reg, "concatLists",
                          {RuleArg::bound(Value("(")), S(Sort::CAT), RuleArg::bound(Value(")"))}),
       0.2},
      {make_function_rule(Sort::LIST, reg, "dedup", {S(Sort::LIST)}), 0.2},
      {make_function_rule(Sort::LIST, reg, "count", {S(Sort::LIST), S(Sort::LIST)}), 0.2},
      {make_unit_rule(Sort::CAT, Sort::LIST), 0.7},
      {make_unit_rule(Sort::CAT, Sort::DELIM), 0.3},
      {make_constant_rule(Sort::DELIM, Value("\n")), 0.5},
      {make_constant_rule(Sort::DELIM, Value(" ")), 0.3},
      {make_constant_rule(Sort::DELIM, Value("(")), 0.1},
      {make_constant_rule(Sort::DELIM, Value(")")), 0.1},
  };
  Condensed t;
  std::vector<Rule> rs;
  int i = 0;
  for (auto& [r, p] : rules) {
    std::string id = "t" + std::to_string(10 + i++);
    r.suggesters = {id};
    t.theta.set(id, std::log(p));
    rs.push_back(std::move(r));
  }
  t.grammar = std::make_shared<const Grammar>(std::move(rs));
  return t;
}

}  // namespace fixtures
