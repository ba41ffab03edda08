#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cluesynth/dsl.hpp"
#include "cluesynth/grammar.hpp"

namespace cluesynth {

/// z = (x, x̄, ȳ): the data to process plus one example pair.
struct SystemInput {
  Text data_input;
  Text example_input;
  Text example_output;
};

struct DelimiterStat {
  std::string delim;
  std::size_t in_count = 0;
  std::size_t out_count = 0;
};

/// Textual features of an example pair. Derived from (x̄, ȳ) only.
struct FeatureContext {
  bool identical = false;
  TextList in_lines;
  TextList out_lines;
  std::map<std::string, int> in_line_counts;
  std::map<std::string, int> out_line_counts;
  std::set<std::string> in_tokens;
  std::set<std::string> out_tokens;

  /// Maximal runs of ȳ not covered by substrings of x̄, plus their
  /// character-class pieces; all absent from x̄. At most 20, each at most
  /// 30 bytes, longest first.
  std::vector<std::string> novelty;

  bool in_has_duplicate_lines = false;
  bool out_has_duplicate_lines = false;
  // Some delimiter (newline included) splits the input into fields with
  // repeats while the output split the same way has none.
  bool duplicates_removed = false;
  std::vector<bool> in_line_has_digit;
  std::vector<bool> out_line_has_digit;
  bool input_has_digit = false;

  std::vector<DelimiterStat> delimiters;  // candidates present in x̄ or ȳ
  std::size_t in_spaces = 0;
  std::size_t out_spaces = 0;

  bool casing_differs = false;
  std::optional<char> date_separator;  // d/m/y or m-d-y pattern in x̄
  bool output_has_month_name = false;
  bool output_has_ordinal = false;
  std::vector<std::pair<std::string, std::string>> new_bracket_pairs;

  bool line_permutation = false;      // same multiset of lines, different order
  bool line_set_permutation = false;  // same set of lines, ȳ unique, not first-occurrence order
  bool reversed_lines = false;
  bool line_subsequence = false;      // ȳ has 2+ lines, a proper subsequence of x̄ lines
  bool output_is_one_input_line = false;
  bool out_lines_are_substrings = false;
  std::vector<std::pair<std::string, int>> field_indices;  // (delimiter, 1-based index) observations
  // Fields of an input line found inside an output line that is not a copy
  // of the whole input line: (delimiter, 1-based index).
  std::vector<std::pair<std::string, int>> reused_fields;
  bool blank_lines_removed = false;
  std::optional<std::pair<std::string, std::string>> substitution;
  bool lines_trimmed = false;
  bool equal_line_counts = false;
  std::vector<std::string> keep_tokens;  // in every kept line, in no dropped line
  std::vector<std::string> drop_tokens;  // in every dropped line, in no kept line
  std::string novel_prefix;              // shared novel prefix of every ȳ line
  std::string novel_suffix;              // shared novel suffix of every ȳ line
};

FeatureContext extract_features(const SystemInput& z);

/// Maps features to suggested rules. Returning no rules means the clue does
/// not fire.
using ClueGenerator = std::function<std::vector<Rule>(const FeatureContext&, const FunctionRegistry&)>;

struct Clue {
  std::string id;
  std::string name;
  ClueGenerator generator;
};

/// Immutable clue set ordered by id; the order fixes weight indexing.
class ClueCatalog {
 public:
  explicit ClueCatalog(std::vector<Clue> clues, const FunctionRegistry& registry = standard_registry());

  const std::vector<Clue>& clues() const { return clues_; }
  std::size_t size() const { return clues_.size(); }
  bool empty() const { return clues_.empty(); }
  const FunctionRegistry& registry() const { return *registry_; }
  std::vector<std::string> ids() const;

  /// Hex FNV-1a digest of the id list; weight files carry it.
  std::string fingerprint() const;

  /// Text manifest: header with fingerprint, then `id<TAB>name` per clue.
  std::string manifest() const;

 private:
  std::vector<Clue> clues_;
  const FunctionRegistry* registry_;
};

std::string fingerprint_of(const std::vector<std::string>& sorted_ids);

/// The built-in catalog over the standard registry.
const ClueCatalog& standard_catalog();

/// Rule id -> rule carrying the ids of every clue that suggested it.
std::map<std::string, Rule> evaluate_clues(const FeatureContext& features, const ClueCatalog& catalog);
std::map<std::string, Rule> evaluate_clues(const SystemInput& z, const ClueCatalog& catalog);

/// R_z as a grammar. Throws Error(vacuous_grammar) when no rule has lhs P.
std::shared_ptr<const Grammar> build_instance_grammar(const SystemInput& z, const ClueCatalog& catalog);

}  // namespace cluesynth
