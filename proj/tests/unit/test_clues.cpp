#include "doctest.h"

#include <algorithm>

#include "cluesynth/clues.hpp"
#include "cluesynth/errors.hpp"
#include "cluesynth/interpreter.hpp"
#include "fixtures.hpp"

using namespace cluesynth;

namespace {

SystemInput oscars() { return {fixtures::kOscars, fixtures::kOscars, fixtures::kOscarsOut}; }

bool has(const std::vector<std::string>& v, std::string_view s) { return std::find(v.begin(), v.end(), s) != v.end(); }

Clue fixed_clue(std::string id, std::vector<Rule> rules) {
  return {id, id, [rules](const FeatureContext&, const FunctionRegistry&) { return rules; }};
}

}  // namespace

TEST_CASE("oscar counts features") {
  auto f = extract_features(oscars());
  CHECK(f.in_has_duplicate_lines);
  CHECK_FALSE(f.out_has_duplicate_lines);
  CHECK(has(f.novelty, "("));
  CHECK(f.novelty == std::vector<std::string>{" (1)", " (2)", "(", ")", "1", "2"});
  CHECK(std::all_of(f.out_line_has_digit.begin(), f.out_line_has_digit.end(), [](bool b) { return b; }));
  CHECK_FALSE(f.input_has_digit);
  CHECK(f.new_bracket_pairs.size() == 1);
  CHECK(f.out_spaces > f.in_spaces);
}

TEST_CASE("identity pair has no novelty") {
  auto f = extract_features({"a", "a", "a"});
  CHECK(f.novelty.empty());
  CHECK_FALSE(f.in_has_duplicate_lines);
  auto rules = evaluate_clues(SystemInput{"a", "a", "a"}, standard_catalog());
  for (const auto& [id, r] : rules) {
    for (const auto& s : r.suggesters) {
      bool base = s.rfind("base.", 0) == 0 || s.rfind("delim.", 0) == 0;
      CHECK_MESSAGE(base, id << " suggested by " << s);
    }
    CHECK_FALSE((r.lhs == Sort::E && r.kind == RuleKind::constant));
  }
}

TEST_CASE("line permutation") {
  auto f = extract_features({"", "b\na", "a\nb"});
  CHECK(f.line_permutation);
  auto g = extract_features({"", "a\nb", "a\nb"});
  CHECK_FALSE(g.line_permutation);
}

TEST_CASE("oscar counts grammar contains the condensed productions") {
  auto rules = evaluate_clues(oscars(), standard_catalog());
  REQUIRE(rules.count("LIST->dedup(LIST)"));
  CHECK(has(rules.at("LIST->dedup(LIST)").suggesters, "dedup"));
  for (const char* id : {"P->join(LIST, DELIM)", "LIST->split(x, DELIM)", "LIST->concatLists(CAT, CAT, CAT)",
                         "LIST->concatLists(\"(\", CAT, \")\")", "LIST->count(LIST, LIST)", "CAT->LIST",
                         "CAT->DELIM", "DELIM->\"\\n\"", "DELIM->\" \"", "DELIM->\"(\"", "DELIM->\")\""}) {
    CHECK_MESSAGE(rules.count(id) == 1, id);
  }
  // " " is suggested by the space delimiter clue and by the whitespace clue.
  CHECK(rules.at("DELIM->\" \"").suggesters == std::vector<std::string>{"delim.space", "whitespace-delta"});
  for (const auto& [id, r] : rules) CHECK_FALSE(r.suggesters.empty());
}

TEST_CASE("counts program lives in the instance grammar") {
  auto g = build_instance_grammar(oscars(), standard_catalog());
  auto p = resolve_program(g, fixtures::kCountsProgram);
  REQUIRE(p.has_value());
  CHECK(p->size() == 14);
  auto out = evaluate(*p, fixtures::kOscars);
  REQUIRE(out.ok());
  CHECK(out.value().text() == fixtures::kOscarsOut);
}

TEST_CASE("overlapping clues merge suggesters") {
  Rule space = make_constant_rule(Sort::DELIM, Value(" "));
  Rule nl = make_constant_rule(Sort::DELIM, Value("\n"));
  ClueCatalog cat({fixed_clue("k2", {space}), fixed_clue("k1", {space, nl})});
  auto rules = evaluate_clues(SystemInput{"", "a", "b"}, cat);
  REQUIRE(rules.size() == 2);
  CHECK(rules.at(space.id).suggesters == std::vector<std::string>{"k1", "k2"});
  CHECK(rules.at(nl.id).suggesters == std::vector<std::string>{"k1"});

  ClueCatalog reversed({fixed_clue("k1", {space, nl}), fixed_clue("k2", {space})});
  auto again = evaluate_clues(SystemInput{"", "a", "b"}, reversed);
  CHECK(again.at(space.id).suggesters == rules.at(space.id).suggesters);
  CHECK(cat.fingerprint() == reversed.fingerprint());
}

TEST_CASE("empty catalog and vacuous grammar") {
  ClueCatalog empty({});
  CHECK(evaluate_clues(SystemInput{"", "a", "b"}, empty).empty());
  try {
    build_instance_grammar(SystemInput{"", "a", "b"}, empty);
    FAIL("expected VacuousGrammar");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::vacuous_grammar);
  }
}

TEST_CASE("catalog ids are sorted and fingerprinted") {
  const auto& cat = standard_catalog();
  auto ids = cat.ids();
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(ids.size() >= 20);
  CHECK(cat.fingerprint() == fingerprint_of(ids));
  CHECK(cat.fingerprint().size() == 16);
  CHECK(cat.manifest().find(cat.fingerprint()) != std::string::npos);
}

TEST_CASE("clues ignore the data input") {
  auto a = evaluate_clues(SystemInput{"zzz", "b\na", "a\nb"}, standard_catalog());
  auto b = evaluate_clues(SystemInput{"q,r;s", "b\na", "a\nb"}, standard_catalog());
  REQUIRE(a.size() == b.size());
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    CHECK(ia->first == ib->first);
    CHECK(ia->second.suggesters == ib->second.suggesters);
  }
}

TEST_CASE("feature families") {
  SUBCASE("substitution") {
    auto f = extract_features({"", "a, b, c", "a; b; c"});
    REQUIRE(f.substitution.has_value());
    CHECK(f.substitution->first == ", ");
    CHECK(f.substitution->second == "; ");
  }
  SUBCASE("line filter tokens") {
    auto f = extract_features({"", "ERROR one\nok two\nERROR three", "ERROR one\nERROR three"});
    CHECK(f.line_subsequence);
    CHECK(has(f.keep_tokens, "ERROR"));
  }
  SUBCASE("field indices") {
    auto f = extract_features({"", "a,b,c\nd,e,f", "b\ne"});
    CHECK(f.out_lines_are_substrings);
    CHECK(std::find(f.field_indices.begin(), f.field_indices.end(), std::make_pair(std::string(","), 2)) !=
          f.field_indices.end());
  }
  SUBCASE("dates") {
    auto f = extract_features({"", "28/06/2010", "June the 28th 2010"});
    CHECK(f.date_separator == '/');
    CHECK(f.output_has_month_name);
    CHECK(f.output_has_ordinal);
  }
  SUBCASE("affix") {
    auto f = extract_features({"", "apple\nbanana", "- apple\n- banana"});
    CHECK(f.novel_prefix == "- ");
  }
  SUBCASE("casing and trim") {
    CHECK(extract_features({"", "abc\ndef", "ABC\nDEF"}).casing_differs);
    CHECK(extract_features({"", "  a\nb  ", "a\nb"}).lines_trimmed);
  }
}
