#include "cluesynth/clues.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <sstream>

#include "cluesynth/errors.hpp"

namespace cluesynth {
namespace {

constexpr std::size_t kNoveltyCap = 20;
constexpr std::size_t kNoveltyMaxBytes = 30;
constexpr std::size_t kMinCoverLength = 2;
constexpr std::size_t kFilterTokenCap = 4;
constexpr std::size_t kFieldIndexCap = 6;

const std::array<const char*, 11> kDelimiterCandidates = {"\n", "\t", " ", ",", ";", ":", "|", "/", "-", ".", "@"};

const std::array<const char*, 12> kMonthNames = {"January", "February", "March",     "April",   "May",      "June",
                                                 "July",    "August",   "September", "October", "November", "December"};

bool contains(std::string_view hay, std::string_view needle) { return hay.find(needle) != std::string_view::npos; }

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim_copy(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

bool has_digit(std::string_view s) { return std::any_of(s.begin(), s.end(), is_digit); }

std::set<std::string> whitespace_tokens(std::string_view s) {
  std::set<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.emplace(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Splits on every occurrence, keeping a trailing empty piece.
std::vector<std::string> split_all(std::string_view s, std::string_view delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t pos = s.find(delim); pos != std::string_view::npos; pos = s.find(delim, start)) {
    out.emplace_back(s.substr(start, pos - start));
    start = pos + delim.size();
  }
  out.emplace_back(s.substr(start));
  return out;
}

// Marks the bytes of `line` covered by a substring of `source` of length at
// least kMinCoverLength, scanning greedily with the longest match and
// ignoring letter case. A lone letter or digit is covered when it occurs in
// the source.
std::vector<bool> coverage(std::string_view line_in, std::string_view source_in) {
  const std::string line = lower(line_in), source = lower(source_in);
  std::vector<bool> covered(line.size(), false);
  std::size_t i = 0;
  while (i < line.size()) {
    std::size_t best = 0;
    for (std::size_t len = 1; i + len <= line.size(); ++len) {
      if (!contains(source, line.substr(i, len))) break;
      best = len;
    }
    if (best >= kMinCoverLength) {
      std::fill(covered.begin() + static_cast<std::ptrdiff_t>(i), covered.begin() + static_cast<std::ptrdiff_t>(i + best),
                true);
      i += best;
    } else {
      ++i;
    }
  }
  auto alnum = [&](std::size_t k) { return k < line.size() && (is_alpha(line[k]) || is_digit(line[k])); };
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (alnum(k) && !(k > 0 && alnum(k - 1)) && !alnum(k + 1) && source.find(line[k]) != std::string::npos) {
      covered[k] = true;
    }
  }
  return covered;
}

int char_class(char c) {
  if (is_alpha(c)) return 0;
  if (is_digit(c)) return 1;
  if (is_space(c)) return 2;
  return 3 + static_cast<unsigned char>(c);  // each punctuation byte is its own class
}

std::vector<std::string> class_pieces(std::string_view run) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < run.size()) {
    std::size_t j = i + 1;
    while (j < run.size() && char_class(run[j]) == char_class(run[i])) ++j;
    out.emplace_back(run.substr(i, j - i));
    i = j;
  }
  return out;
}

struct LineCoverage {
  std::string line;
  std::vector<bool> covered;
};

std::vector<std::string> novelty_set(const std::vector<LineCoverage>& lines, std::string_view source) {
  std::set<std::string> found;
  auto consider = [&](const std::string& s) {
    if (!s.empty() && s.size() <= kNoveltyMaxBytes && !contains(source, s)) found.insert(s);
  };
  for (const auto& lc : lines) {
    std::size_t i = 0;
    while (i < lc.line.size()) {
      if (lc.covered[i]) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < lc.line.size() && !lc.covered[j]) ++j;
      std::string run = lc.line.substr(i, j - i);
      consider(run);
      for (const auto& piece : class_pieces(run)) consider(piece);
      i = j;
    }
  }
  std::vector<std::string> out(found.begin(), found.end());
  std::stable_sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
  });
  if (out.size() > kNoveltyCap) out.resize(kNoveltyCap);
  return out;
}

std::string common_prefix(const TextList& items) {
  if (items.empty()) return {};
  std::string p = items.front();
  for (const auto& s : items) {
    std::size_t n = 0;
    while (n < p.size() && n < s.size() && p[n] == s[n]) ++n;
    p.resize(n);
  }
  return p;
}

std::string common_suffix(const TextList& items) {
  if (items.empty()) return {};
  std::string p = items.front();
  for (const auto& s : items) {
    std::size_t n = 0;
    while (n < p.size() && n < s.size() && p[p.size() - 1 - n] == s[s.size() - 1 - n]) ++n;
    p = p.substr(p.size() - n);
  }
  return p;
}

std::optional<char> find_date_separator(std::string_view s) {
  // d{1,2} sep d{1,2} sep d{2,4}, sep in {'/', '-'}, same separator twice.
  auto digits_at = [&](std::size_t pos, std::size_t lo, std::size_t hi) -> std::size_t {
    std::size_t n = 0;
    while (pos + n < s.size() && is_digit(s[pos + n])) ++n;
    return (n >= lo && n <= hi) ? n : 0;
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_digit(s[i]) || (i > 0 && is_digit(s[i - 1]))) continue;
    std::size_t a = digits_at(i, 1, 2);
    if (a == 0 || i + a >= s.size()) continue;
    char sep = s[i + a];
    if (sep != '/' && sep != '-') continue;
    std::size_t b = digits_at(i + a + 1, 1, 2);
    if (b == 0) continue;
    std::size_t k = i + a + 1 + b;
    if (k >= s.size() || s[k] != sep) continue;
    if (digits_at(k + 1, 2, 4) == 0) continue;
    return sep;
  }
  return std::nullopt;
}

bool has_ordinal(std::string_view s) {
  static const std::array<const char*, 4> suffixes = {"st", "nd", "rd", "th"};
  for (std::size_t i = 0; i + 2 < s.size(); ++i) {
    if (!is_digit(s[i])) continue;
    for (const char* suf : suffixes) {
      if (s.compare(i + 1, 2, suf) == 0 && (i + 3 >= s.size() || !is_alpha(s[i + 3]))) return true;
    }
  }
  return false;
}

bool is_subsequence(const TextList& small, const TextList& big) {
  std::size_t j = 0;
  for (const auto& s : big) {
    if (j < small.size() && small[j] == s) ++j;
  }
  return j == small.size();
}

std::optional<std::pair<std::string, std::string>> find_substitution(std::string_view in, std::string_view out) {
  std::vector<std::string> candidates;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < in.size(); ++i) {
    char c = in[i];
    if (is_alpha(c) || is_digit(c)) continue;
    std::string one(1, c);
    if (seen.insert(one).second) candidates.push_back(one);
    if (i + 1 < in.size() && !is_alpha(in[i + 1]) && !is_digit(in[i + 1])) {
      std::string two(in.substr(i, 2));
      if (seen.insert(two).second) candidates.push_back(two);
    }
  }
  // Longer patterns first so ", " wins over "," when both explain the pair.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
  for (const auto& s : candidates) {
    auto parts = split_all(in, s);
    if (parts.size() < 2) continue;
    std::size_t kept = 0;
    for (const auto& p : parts) kept += p.size();
    if (out.size() < kept || (out.size() - kept) % (parts.size() - 1) != 0) continue;
    std::size_t tlen = (out.size() - kept) / (parts.size() - 1);
    if (out.size() < parts[0].size() + tlen) continue;
    std::string t(out.substr(parts[0].size(), tlen));
    if (t == s) continue;
    if (join_text(parts, t) == out) return std::make_pair(s, t);
  }
  return std::nullopt;
}

}  // namespace

FeatureContext extract_features(const SystemInput& z) {
  const std::string& xi = z.example_input;
  const std::string& yo = z.example_output;
  FeatureContext f;
  f.identical = xi == yo;
  f.in_lines = split_lines(xi);
  f.out_lines = split_lines(yo);
  for (const auto& l : f.in_lines) ++f.in_line_counts[l];
  for (const auto& l : f.out_lines) ++f.out_line_counts[l];
  f.in_tokens = whitespace_tokens(xi);
  f.out_tokens = whitespace_tokens(yo);

  for (const auto& [line, n] : f.in_line_counts) f.in_has_duplicate_lines |= n > 1;
  for (const auto& [line, n] : f.out_line_counts) f.out_has_duplicate_lines |= n > 1;
  auto has_repeat = [](const TextList& items) {
    std::set<std::string> seen;
    for (const auto& s : items) {
      if (!seen.insert(s).second) return true;
    }
    return false;
  };
  for (const char* d : kDelimiterCandidates) {
    if (contains(xi, d) && has_repeat(split_text(xi, d)) && !has_repeat(split_text(yo, d))) f.duplicates_removed = true;
  }
  for (const auto& l : f.in_lines) f.in_line_has_digit.push_back(has_digit(l));
  for (const auto& l : f.out_lines) f.out_line_has_digit.push_back(has_digit(l));
  f.input_has_digit = has_digit(xi);

  for (const char* d : kDelimiterCandidates) {
    DelimiterStat st{d, count_occurrences(xi, d), count_occurrences(yo, d)};
    if (st.in_count + st.out_count > 0) f.delimiters.push_back(std::move(st));
  }
  f.in_spaces = count_occurrences(xi, " ");
  f.out_spaces = count_occurrences(yo, " ");

  std::vector<LineCoverage> cov;
  for (const auto& l : f.out_lines) cov.push_back({l, coverage(l, xi)});
  if (!f.identical) f.novelty = novelty_set(cov, xi);

  if (f.identical) return f;

  {
    std::set<std::string> in_lower;
    for (const auto& l : f.in_lines) in_lower.insert(lower(l));
    bool all_match = !f.out_lines.empty();
    bool some_differs = false;
    for (const auto& l : f.out_lines) {
      if (!in_lower.count(lower(l))) all_match = false;
      if (!f.in_line_counts.count(l)) some_differs = true;
    }
    f.casing_differs = all_match && some_differs;
  }

  f.date_separator = find_date_separator(xi);
  for (const char* m : kMonthNames) {
    if (contains(yo, m) && !contains(xi, m)) f.output_has_month_name = true;
  }
  f.output_has_ordinal = has_ordinal(yo) && !has_ordinal(xi);

  static const std::array<std::pair<const char*, const char*>, 6> brackets = {
      {{"(", ")"}, {"[", "]"}, {"{", "}"}, {"<", ">"}, {"\"", "\""}, {"'", "'"}}};
  for (const auto& [open, close] : brackets) {
    if (contains(yo, open) && contains(yo, close) && !contains(xi, open) && !contains(xi, close)) {
      f.new_bracket_pairs.emplace_back(open, close);
    }
  }

  const TextList& in = f.in_lines;
  const TextList& out = f.out_lines;
  {
    TextList a = in, b = out;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    f.line_permutation = a == b && in != out;
    TextList dedup_in;
    std::set<std::string> seen;
    for (const auto& l : in) {
      if (seen.insert(l).second) dedup_in.push_back(l);
    }
    std::set<std::string> out_set(out.begin(), out.end());
    f.line_set_permutation = !f.out_has_duplicate_lines && out_set == seen && out != dedup_in;
    TextList rev(in.rbegin(), in.rend());
    f.reversed_lines = in.size() >= 2 && rev == out;
  }

  f.line_subsequence = out.size() >= 2 && out.size() < in.size() && is_subsequence(out, in);
  f.output_is_one_input_line = out.size() == 1 && in.size() >= 2 && f.in_line_counts.count(out[0]) > 0;
  f.out_lines_are_substrings =
      !out.empty() && std::all_of(out.begin(), out.end(), [&](const std::string& l) {
        return !l.empty() && contains(xi, l);
      });

  if (f.out_lines_are_substrings) {
    std::set<std::pair<std::string, int>> obs;
    auto record = [&](const std::string& delim, const TextList& fields) {
      for (const auto& o : out) {
        for (std::size_t k = 0; k < fields.size(); ++k) {
          if (fields[k] == o) obs.emplace(delim, static_cast<int>(k + 1));
        }
      }
    };
    for (const auto& st : f.delimiters) {
      if (st.in_count == 0) continue;
      if (st.delim == "\n") {
        record(st.delim, in);
        continue;
      }
      for (const auto& line : in) record(st.delim, split_text(line, st.delim));
    }
    for (const auto& o : obs) {
      if (f.field_indices.size() >= kFieldIndexCap) break;
      f.field_indices.push_back(o);
    }
  }

  {
    std::set<std::pair<std::string, int>> reused;
    for (std::size_t i = 0; i < std::min(in.size(), out.size()); ++i) {
      if (contains(out[i], in[i])) continue;
      for (const auto& st : f.delimiters) {
        if (st.in_count == 0 || st.delim == "\n") continue;
        TextList fields = split_text(in[i], st.delim);
        if (fields.size() < 2) continue;
        for (std::size_t k = 0; k < fields.size(); ++k) {
          if (!fields[k].empty() && contains(out[i], fields[k])) reused.emplace(st.delim, static_cast<int>(k + 1));
        }
      }
    }
    if (reused.size() >= 2) {
      for (const auto& r : reused) {
        if (f.reused_fields.size() >= kFieldIndexCap) break;
        f.reused_fields.push_back(r);
      }
    }
  }

  f.blank_lines_removed = f.in_line_counts.count("") > 0 && f.out_line_counts.count("") == 0;
  f.substitution = find_substitution(xi, yo);

  f.equal_line_counts = !in.empty() && in.size() == out.size();
  if (f.equal_line_counts) {
    bool all = true, some = false;
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (out[i] != trim_copy(in[i])) all = false;
      if (out[i] != in[i]) some = true;
    }
    f.lines_trimmed = all && some;
  }

  if (f.line_subsequence) {
    TextList dropped;
    std::size_t j = 0;
    for (const auto& l : in) {
      if (j < out.size() && out[j] == l) {
        ++j;
      } else {
        dropped.push_back(l);
      }
    }
    std::set<std::string> candidates;
    for (const auto& l : in) {
      for (const auto& t : whitespace_tokens(l)) candidates.insert(t);
      for (char c : l) {
        if (!is_alpha(c) && !is_digit(c) && !is_space(c)) candidates.insert(std::string(1, c));
      }
    }
    auto in_all = [](const TextList& ls, const std::string& t) {
      return std::all_of(ls.begin(), ls.end(), [&](const std::string& l) { return contains(l, t); });
    };
    auto in_none = [](const TextList& ls, const std::string& t) {
      return std::none_of(ls.begin(), ls.end(), [&](const std::string& l) { return contains(l, t); });
    };
    std::vector<std::string> keep, drop;
    for (const auto& t : candidates) {
      if (in_all(out, t) && in_none(dropped, t)) keep.push_back(t);
      if (!dropped.empty() && in_all(dropped, t) && in_none(out, t)) drop.push_back(t);
    }
    auto rank = [](std::vector<std::string>& v) {
      std::stable_sort(v.begin(), v.end(), [](const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
      });
      if (v.size() > kFilterTokenCap) v.resize(kFilterTokenCap);
    };
    rank(keep);
    rank(drop);
    f.keep_tokens = std::move(keep);
    f.drop_tokens = std::move(drop);
  }

  if (!out.empty()) {
    // Shared prefix/suffix restricted to the uncovered edge of every line.
    std::string p = common_prefix(out);
    std::string s = common_suffix(out);
    for (const auto& lc : cov) {
      std::size_t lead = 0;
      while (lead < lc.line.size() && !lc.covered[lead]) ++lead;
      std::size_t trail = 0;
      while (trail < lc.line.size() && !lc.covered[lc.line.size() - 1 - trail]) ++trail;
      if (p.size() > lead) p.resize(lead);
      if (s.size() > trail) s = s.substr(s.size() - trail);
    }
    if (!p.empty() && p.size() <= kNoveltyMaxBytes && !contains(xi, p)) f.novel_prefix = p;
    if (!s.empty() && s.size() <= kNoveltyMaxBytes && !contains(xi, s)) f.novel_suffix = s;
    if (!f.novel_prefix.empty() && f.novel_prefix.size() == out.front().size()) f.novel_prefix.clear();
  }
  return f;
}

// ---------------------------------------------------------------------------
// Catalog

ClueCatalog::ClueCatalog(std::vector<Clue> clues, const FunctionRegistry& registry)
    : clues_(std::move(clues)), registry_(&registry) {
  std::sort(clues_.begin(), clues_.end(), [](const Clue& a, const Clue& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < clues_.size(); ++i) {
    if (clues_[i].id == clues_[i - 1].id) throw Error(ErrorCode::duplicate_name, "duplicate clue id " + clues_[i].id);
  }
}

std::vector<std::string> ClueCatalog::ids() const {
  std::vector<std::string> out;
  out.reserve(clues_.size());
  for (const auto& c : clues_) out.push_back(c.id);
  return out;
}

std::string fingerprint_of(const std::vector<std::string>& sorted_ids) {
  std::uint64_t h = 14695981039346656037ull;
  bool first = true;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (const auto& id : sorted_ids) {
    if (!first) mix('\n');
    first = false;
    for (char c : id) mix(static_cast<unsigned char>(c));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ClueCatalog::fingerprint() const { return fingerprint_of(ids()); }

std::string ClueCatalog::manifest() const {
  std::ostringstream os;
  os << "# cluesynth clue catalog\n# fingerprint: " << fingerprint() << "\n# clues: " << clues_.size() << "\n";
  for (const auto& c : clues_) os << c.id << '\t' << c.name << '\n';
  return os.str();
}

namespace {

class RuleSet {
 public:
  explicit RuleSet(const FunctionRegistry& reg) : reg_(reg) {}

  RuleSet& fn(Sort lhs, std::string_view name, std::vector<RuleArg> args) {
    out_.push_back(make_function_rule(lhs, reg_, name, std::move(args)));
    return *this;
  }
  RuleSet& constant(Sort lhs, Value v) {
    out_.push_back(make_constant_rule(lhs, std::move(v)));
    return *this;
  }
  RuleSet& unit(Sort lhs, Sort child) {
    out_.push_back(make_unit_rule(lhs, child));
    return *this;
  }
  RuleSet& input(Sort lhs) {
    out_.push_back(make_input_rule(lhs));
    return *this;
  }
  std::vector<Rule> take() { return std::move(out_); }

 private:
  const FunctionRegistry& reg_;
  std::vector<Rule> out_;
};

RuleArg S(Sort s) { return RuleArg::slot(s); }
RuleArg B(Value v) { return RuleArg::bound(std::move(v)); }
RuleArg X() { return RuleArg::input(); }

using Gen = std::vector<Rule> (*)(const FeatureContext&, const FunctionRegistry&);

std::vector<Rule> delimiter_rules(const FeatureContext& f, const FunctionRegistry& reg,
                                  std::initializer_list<const char*> which) {
  RuleSet rs(reg);
  for (const auto& st : f.delimiters) {
    for (const char* d : which) {
      if (st.delim == d) rs.constant(Sort::DELIM, Value(st.delim));
    }
  }
  return rs.take();
}

std::vector<Clue> standard_clues() {
  using F = const FeatureContext&;
  using R = const FunctionRegistry&;
  std::vector<Clue> c;
  auto add = [&](std::string id, std::string name, Gen gen) { c.push_back({std::move(id), std::move(name), gen}); };

  add("base.cat-delim", "delimiters may be concatenated", [](F, R r) {
    return RuleSet(r).unit(Sort::CAT, Sort::DELIM).take();
  });
  add("base.cat-list", "lists may be concatenated", [](F, R r) { return RuleSet(r).unit(Sort::CAT, Sort::LIST).take(); });
  add("base.cat-text", "texts may be concatenated", [](F, R r) { return RuleSet(r).unit(Sort::CAT, Sort::E).take(); });
  add("base.input", "the input as a text", [](F, R r) { return RuleSet(r).input(Sort::E).take(); });
  add("base.join", "output is a joined list", [](F, R r) {
    return RuleSet(r).fn(Sort::P, "join", {S(Sort::LIST), S(Sort::DELIM)}).take();
  });
  add("base.lines", "input read as lines", [](F, R r) { return RuleSet(r).fn(Sort::LIST, "lines", {X()}).take(); });
  add("base.root-text", "output is a single text", [](F, R r) { return RuleSet(r).unit(Sort::P, Sort::E).take(); });
  add("base.split", "input split on a delimiter", [](F, R r) {
    return RuleSet(r).fn(Sort::LIST, "split", {X(), S(Sort::DELIM)}).take();
  });

  // Common functions offered for every input; learning decides how much they
  // are worth.
  add("base.case", "letter case is often changed", [](F, R r) {
    return RuleSet(r)
        .fn(Sort::E, "toUpper", {S(Sort::E)})
        .fn(Sort::E, "toLower", {S(Sort::E)})
        .fn(Sort::LIST, "mapUpper", {S(Sort::LIST)})
        .fn(Sort::LIST, "mapLower", {S(Sort::LIST)})
        .take();
  });
  add("base.clean", "whitespace and blank lines are often cleaned", [](F, R r) {
    return RuleSet(r)
        .fn(Sort::E, "trim", {S(Sort::E)})
        .fn(Sort::LIST, "mapTrim", {S(Sort::LIST)})
        .fn(Sort::LIST, "removeEmpty", {S(Sort::LIST)})
        .take();
  });
  add("base.concat", "pieces are often glued together", [](F, R r) {
    return RuleSet(r)
        .fn(Sort::E, "concat", {S(Sort::E), S(Sort::E)})
        .fn(Sort::LIST, "concatLists2", {S(Sort::CAT), S(Sort::CAT)})
        .take();
  });
  add("base.dedup", "repeats are often removed", [](F, R r) {
    return RuleSet(r).fn(Sort::LIST, "dedup", {S(Sort::LIST)}).take();
  });
  add("base.order", "lists are often reordered", [](F, R r) {
    return RuleSet(r)
        .fn(Sort::LIST, "sort", {S(Sort::LIST), S(Sort::COMP)})
        .fn(Sort::LIST, "reverse", {S(Sort::LIST)})
        .constant(Sort::COMP, Value(Comparator::alpha))
        .constant(Sort::COMP, Value(Comparator::numeric))
        .take();
  });
  add("base.pick", "single elements are often picked", [](F, R r) {
    return RuleSet(r).fn(Sort::E, "first", {S(Sort::LIST)}).fn(Sort::E, "last", {S(Sort::LIST)}).take();
  });

  add("delim.comma", "comma present", [](F f, R r) { return delimiter_rules(f, r, {","}); });
  add("delim.newline", "newline present", [](F f, R r) { return delimiter_rules(f, r, {"\n"}); });
  add("delim.punct", "punctuation delimiter present",
      [](F f, R r) { return delimiter_rules(f, r, {";", ":", "|", "/", "-", ".", "@"}); });
  add("delim.space", "space present", [](F f, R r) { return delimiter_rules(f, r, {" "}); });
  add("delim.tab", "tab present", [](F f, R r) { return delimiter_rules(f, r, {"\t"}); });

  add("affix", "every output line shares a new prefix or suffix", [](F f, R r) {
    RuleSet rs(r);
    const auto& p = f.novel_prefix;
    const auto& s = f.novel_suffix;
    if (!p.empty()) rs.fn(Sort::LIST, "concatLists2", {B(p), S(Sort::CAT)});
    if (!s.empty()) rs.fn(Sort::LIST, "concatLists2", {S(Sort::CAT), B(s)});
    if (!p.empty() && !s.empty()) rs.fn(Sort::LIST, "concatLists", {B(p), S(Sort::CAT), B(s)});
    return rs.take();
  });
  add("blank-removal", "blank lines removed", [](F f, R r) {
    RuleSet rs(r);
    if (f.blank_lines_removed) rs.fn(Sort::LIST, "removeEmpty", {S(Sort::LIST)});
    return rs.take();
  });
  add("bracket", "brackets appear only in the output", [](F f, R r) {
    RuleSet rs(r);
    for (const auto& [open, close] : f.new_bracket_pairs) {
      rs.fn(Sort::LIST, "concatLists", {B(open), S(Sort::CAT), B(close)});
    }
    return rs.take();
  });
  add("casing", "output differs from input in letter case", [](F f, R r) {
    RuleSet rs(r);
    if (!f.casing_differs) return rs.take();
    for (const char* n : {"toUpper", "toLower", "capitalize", "titleCase"}) rs.fn(Sort::E, n, {S(Sort::E)});
    for (const char* n : {"mapUpper", "mapLower", "mapCapitalize"}) rs.fn(Sort::LIST, n, {S(Sort::LIST)});
    return rs.take();
  });
  add("concat-novel", "output contains new text", [](F f, R r) {
    RuleSet rs(r);
    if (f.novelty.empty()) return rs.take();
    rs.fn(Sort::LIST, "concatLists", {S(Sort::CAT), S(Sort::CAT), S(Sort::CAT)});
    rs.fn(Sort::LIST, "concatLists2", {S(Sort::CAT), S(Sort::CAT)});
    rs.fn(Sort::E, "concat", {S(Sort::E), S(Sort::E)});
    return rs.take();
  });
  add("count", "numbers in every output line but not in the input", [](F f, R r) {
    RuleSet rs(r);
    bool every = !f.out_line_has_digit.empty() &&
                 std::all_of(f.out_line_has_digit.begin(), f.out_line_has_digit.end(), [](bool b) { return b; });
    if (every && !f.input_has_digit) rs.fn(Sort::LIST, "count", {S(Sort::LIST), S(Sort::LIST)});
    return rs.take();
  });
  add("date", "dates in the input or date words in the output", [](F f, R r) {
    RuleSet rs(r);
    if (!f.date_separator && !f.output_has_month_name && !f.output_has_ordinal) return rs.take();
    rs.fn(Sort::E, "monthName", {S(Sort::INT)});
    rs.fn(Sort::E, "ordinal", {S(Sort::INT)});
    rs.fn(Sort::INT, "toInt", {S(Sort::E)});
    rs.fn(Sort::LIST, "mapMonthName", {S(Sort::LIST)});
    rs.fn(Sort::LIST, "mapOrdinal", {S(Sort::LIST)});
    if (f.date_separator) {
      std::string sep(1, *f.date_separator);
      rs.constant(Sort::DELIM, Value(sep));
      for (std::int64_t k = 1; k <= 3; ++k) rs.fn(Sort::E, "select_field", {X(), B(sep), B(k)});
    }
    return rs.take();
  });
  add("dedup", "repeated fields in the input but not the output", [](F f, R r) {
    RuleSet rs(r);
    if (f.duplicates_removed) rs.fn(Sort::LIST, "dedup", {S(Sort::LIST)});
    return rs.take();
  });
  add("elementwise", "input and output have equally many lines", [](F f, R r) {
    RuleSet rs(r);
    if (!f.equal_line_counts) return rs.take();
    rs.fn(Sort::LIST, "concatLists", {S(Sort::CAT), S(Sort::CAT), S(Sort::CAT)});
    rs.fn(Sort::LIST, "concatLists2", {S(Sort::CAT), S(Sort::CAT)});
    return rs.take();
  });
  add("field-reuse", "input fields rearranged inside the output", [](F f, R r) {
    RuleSet rs(r);
    if (f.reused_fields.empty()) return rs.take();
    rs.fn(Sort::E, "select_field", {S(Sort::E), S(Sort::DELIM), S(Sort::INT)});
    rs.fn(Sort::LIST, "selectFieldOnLines", {S(Sort::LIST), S(Sort::DELIM), S(Sort::INT)});
    for (const auto& [d, k] : f.reused_fields) rs.constant(Sort::INT, Value(static_cast<std::int64_t>(k)));
    return rs.take();
  });
  add("line-filter", "output lines are a subsequence of input lines", [](F f, R r) {
    RuleSet rs(r);
    if (!f.line_subsequence) return rs.take();
    rs.fn(Sort::LIST, "filterContains", {S(Sort::LIST), S(Sort::E)});
    rs.fn(Sort::LIST, "filterNotContains", {S(Sort::LIST), S(Sort::E)});
    std::set<std::string> tokens(f.keep_tokens.begin(), f.keep_tokens.end());
    tokens.insert(f.drop_tokens.begin(), f.drop_tokens.end());
    for (const auto& t : tokens) rs.constant(Sort::E, Value(t));
    return rs.take();
  });
  add("line-pick", "output is one of the input lines", [](F f, R r) {
    RuleSet rs(r);
    if (!f.output_is_one_input_line) return rs.take();
    rs.fn(Sort::E, "first", {S(Sort::LIST)});
    rs.fn(Sort::E, "last", {S(Sort::LIST)});
    return rs.take();
  });
  add("line-substring", "every output line is a substring of the input", [](F f, R r) {
    RuleSet rs(r);
    if (!f.out_lines_are_substrings) return rs.take();
    rs.fn(Sort::E, "select_field", {S(Sort::E), S(Sort::DELIM), S(Sort::INT)});
    rs.fn(Sort::LIST, "selectFieldOnLines", {S(Sort::LIST), S(Sort::DELIM), S(Sort::INT)});
    std::set<int> ks;
    for (const auto& [d, k] : f.field_indices) ks.insert(k);
    if (ks.empty()) ks.insert(1);
    for (int k : ks) rs.constant(Sort::INT, Value(static_cast<std::int64_t>(k)));
    return rs.take();
  });
  add("novelty", "text appearing only in the output", [](F f, R r) {
    RuleSet rs(r);
    for (const auto& s : f.novelty) {
      rs.constant(Sort::E, Value(s));
      if (s.size() <= 3) rs.constant(Sort::DELIM, Value(s));
    }
    return rs.take();
  });
  add("permutation", "output lines reorder the input lines", [](F f, R r) {
    RuleSet rs(r);
    if (!f.line_permutation && !f.line_set_permutation && !f.reversed_lines) return rs.take();
    rs.fn(Sort::LIST, "sort", {S(Sort::LIST), S(Sort::COMP)});
    rs.fn(Sort::LIST, "reverseSort", {S(Sort::LIST), S(Sort::COMP)});
    rs.fn(Sort::LIST, "reverse", {S(Sort::LIST)});
    for (Comparator c : {Comparator::alpha, Comparator::numeric, Comparator::length}) rs.constant(Sort::COMP, Value(c));
    return rs.take();
  });
  add("substitution", "output is the input with one string rewritten", [](F f, R r) {
    RuleSet rs(r);
    if (!f.substitution) return rs.take();
    const auto& [s, t] = *f.substitution;
    rs.fn(Sort::E, "replaceAll", {S(Sort::E), B(s), B(t)});
    rs.fn(Sort::LIST, "mapReplaceAll", {S(Sort::LIST), B(s), B(t)});
    return rs.take();
  });
  add("trim", "output lines are trimmed input lines", [](F f, R r) {
    RuleSet rs(r);
    if (!f.lines_trimmed) return rs.take();
    rs.fn(Sort::E, "trim", {S(Sort::E)});
    rs.fn(Sort::LIST, "mapTrim", {S(Sort::LIST)});
    return rs.take();
  });
  add("whitespace-delta", "output has more spaces than the input", [](F f, R r) {
    RuleSet rs(r);
    if (f.identical || f.out_spaces <= f.in_spaces) return rs.take();
    rs.constant(Sort::DELIM, Value(" "));
    rs.constant(Sort::E, Value(" "));
    return rs.take();
  });
  return c;
}

}  // namespace

const ClueCatalog& standard_catalog() {
  static const ClueCatalog catalog(standard_clues(), standard_registry());
  return catalog;
}

std::map<std::string, Rule> evaluate_clues(const FeatureContext& features, const ClueCatalog& catalog) {
  std::map<std::string, Rule> out;
  for (const auto& clue : catalog.clues()) {
    for (auto& rule : clue.generator(features, catalog.registry())) {
      auto [it, inserted] = out.try_emplace(rule.id, std::move(rule));
      auto& sugg = it->second.suggesters;
      if (inserted) sugg.clear();
      if (std::find(sugg.begin(), sugg.end(), clue.id) == sugg.end()) sugg.push_back(clue.id);
    }
  }
  for (auto& [id, rule] : out) std::sort(rule.suggesters.begin(), rule.suggesters.end());
  return out;
}

std::map<std::string, Rule> evaluate_clues(const SystemInput& z, const ClueCatalog& catalog) {
  return evaluate_clues(extract_features(z), catalog);
}

std::shared_ptr<const Grammar> build_instance_grammar(const SystemInput& z, const ClueCatalog& catalog) {
  auto by_id = evaluate_clues(z, catalog);
  std::vector<Rule> rules;
  rules.reserve(by_id.size());
  bool has_start = false;
  for (auto& [id, rule] : by_id) {
    has_start |= rule.lhs == Sort::P;
    rules.push_back(std::move(rule));
  }
  if (!has_start) throw Error(ErrorCode::vacuous_grammar, "no clue suggested a rule for P");
  return std::make_shared<const Grammar>(std::move(rules), Sort::P);
}

}  // namespace cluesynth
