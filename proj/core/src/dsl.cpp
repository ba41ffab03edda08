#include "cluesynth/dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "cluesynth/errors.hpp"

namespace cluesynth {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::duplicate_name: return "DuplicateName";
    case ErrorCode::registry_frozen: return "RegistryFrozen";
    case ErrorCode::unknown_function: return "UnknownFunction";
    case ErrorCode::syntax_error: return "SyntaxError";
    case ErrorCode::sort_error: return "SortError";
    case ErrorCode::vacuous_grammar: return "VacuousGrammar";
    case ErrorCode::missing_weight: return "MissingWeight";
    case ErrorCode::unpriced_rule: return "UnpricedRule";
    case ErrorCode::no_finite_start: return "NoFiniteStart";
    case ErrorCode::annotation_outside_grammar: return "AnnotationOutsideGrammar";
    case ErrorCode::non_finite_objective: return "NonFiniteObjective";
    case ErrorCode::no_annotations_found: return "NoAnnotationsFound";
    case ErrorCode::fingerprint_mismatch: return "FingerprintMismatch";
    case ErrorCode::malformed_input: return "MalformedInput";
    case ErrorCode::io_error: return "IOError";
    case ErrorCode::invalid_argument: return "InvalidArgument";
  }
  return "Error";
}

std::string_view eval_error_name(EvalErrorKind kind) {
  switch (kind) {
    case EvalErrorKind::budget_exceeded: return "BudgetExceeded";
    case EvalErrorKind::sort_error: return "SortError";
    case EvalErrorKind::arithmetic_error: return "ArithmeticError";
    case EvalErrorKind::domain_error: return "DomainError";
  }
  return "EvalError";
}

ExecutionBudget ExecutionBudget::from_environment() {
  ExecutionBudget budget;
  if (const char* env = std::getenv("CLUESYNTH_BUDGET_STEPS")) {
    std::uint64_t steps = 0;
    std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), steps);
    if (ec == std::errc() && ptr == text.data() + text.size() && steps > 0) budget.max_steps = steps;
  }
  return budget;
}

// ---------------------------------------------------------------------------
// Registry

const FunctionRegistry::Entry& FunctionRegistry::register_function(FunctionDescriptor desc,
                                                                   Semantics semantics) {
  if (frozen_) throw Error(ErrorCode::registry_frozen, "cannot register '" + desc.name + "'");
  if (by_name_.count(desc.name)) throw Error(ErrorCode::duplicate_name, desc.name);
  if (desc.cost_hint == 0) throw Error(ErrorCode::invalid_argument, "cost_hint must be positive");
  entries_.push_back(Entry{std::move(desc), std::move(semantics)});
  const Entry& entry = entries_.back();
  by_name_.emplace(entry.desc.name, &entry);
  return entry;
}

const FunctionRegistry::Entry* FunctionRegistry::find(std::string_view name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : it->second;
}

std::vector<const FunctionRegistry::Entry*> FunctionRegistry::entries() const {
  std::vector<const Entry*> out;
  out.reserve(by_name_.size());
  for (const auto& [name, entry] : by_name_) out.push_back(entry);
  return out;
}

bool within_output_limits(const Value& value, const ExecutionBudget& budget, EvalError& error) {
  if (value.is_list() && value.list().size() > budget.max_list_len) {
    error = {EvalErrorKind::budget_exceeded, "list length limit exceeded"};
    return false;
  }
  if ((value.is_text() || value.is_list()) && value.byte_size() > budget.max_output_bytes) {
    error = {EvalErrorKind::budget_exceeded, "output byte limit exceeded"};
    return false;
  }
  return true;
}

bool invoke_function(const FunctionRegistry::Entry& fn, std::span<const Value> args,
                     const ExecutionBudget& budget, std::uint64_t& steps, Value& out, EvalError& error) {
  const auto& params = fn.desc.param_sorts;
  if (args.size() != params.size()) {
    error = {EvalErrorKind::sort_error, fn.desc.name + ": wrong argument count"};
    return false;
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!sort_accepts(params[i], args[i].kind())) {
      error = {EvalErrorKind::sort_error, fn.desc.name + ": argument " + std::to_string(i + 1) + " is " +
                                              std::string(kind_name(args[i].kind())) + ", expected " +
                                              std::string(sort_name(params[i]))};
      return false;
    }
  }
  CallContext ctx(budget);
  if (!fn.semantics(args, out, ctx)) {
    error = ctx.error();
    return false;
  }
  if (!sort_accepts(fn.desc.return_sort, out.kind())) {
    error = {EvalErrorKind::sort_error, fn.desc.name + ": produced " + std::string(kind_name(out.kind()))};
    return false;
  }
  std::uint64_t units = fn.desc.cost_hint + ctx.work();
  if (out.is_text()) units += out.text().size();
  if (out.is_list()) units += out.list().size() + out.byte_size();
  steps += units;
  if (steps > budget.max_steps) {
    error = {EvalErrorKind::budget_exceeded, "step limit exceeded"};
    return false;
  }
  return within_output_limits(out, budget, error);
}

// ---------------------------------------------------------------------------
// Text helpers

TextList split_text(std::string_view text, std::string_view delim) {
  TextList out;
  if (text.empty() || delim.empty()) {
    if (!text.empty()) out.emplace_back(text);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(text.substr(start));
      break;
    }
    out.emplace_back(text.substr(start, pos - start));
    start = pos + delim.size();
    if (start == text.size()) break;  // single trailing delimiter
  }
  return out;
}

std::string join_text(const TextList& items, std::string_view delim) {
  std::string out;
  std::size_t total = items.empty() ? 0 : delim.size() * (items.size() - 1);
  for (const auto& s : items) total += s.size();
  out.reserve(total);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.append(delim);
    out.append(items[i]);
  }
  return out;
}

TextList split_lines(std::string_view text) { return split_text(text, "\n"); }

namespace {

using Args = std::span<const Value>;

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string trim_text(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string capitalize_text(std::string s) {
  s = lower(std::move(s));
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string title_case(std::string s) {
  bool start = true;
  for (auto& c : s) {
    auto u = static_cast<unsigned char>(c);
    if (is_space(u)) {
      start = true;
    } else {
      c = static_cast<char>(start ? std::toupper(u) : std::tolower(u));
      start = false;
    }
  }
  return s;
}

/// Strict decimal parse: optional sign then one or more digits.
bool parse_int(std::string_view s, std::int64_t& out, CallContext& ctx) {
  std::string_view digits = s;
  if (!digits.empty() && digits.front() == '+') {
    digits.remove_prefix(1);
    if (!digits.empty() && digits.front() == '-') digits = {};
  }
  if (digits.empty() || (digits.front() == '-' && digits.size() == 1)) {
    return ctx.fail(EvalErrorKind::arithmetic_error, "not an integer: '" + std::string(s) + "'");
  }
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
  if (ec == std::errc::result_out_of_range) {
    return ctx.fail(EvalErrorKind::arithmetic_error, "integer overflow: '" + std::string(s) + "'");
  }
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    return ctx.fail(EvalErrorKind::arithmetic_error, "not an integer: '" + std::string(s) + "'");
  }
  return true;
}

constexpr std::array<std::string_view, 12> kMonths = {"January", "February", "March",     "April",
                                                      "May",     "June",     "July",      "August",
                                                      "September", "October", "November", "December"};

bool month_name(std::int64_t n, std::string& out, CallContext& ctx) {
  if (n < 1 || n > 12) return ctx.fail(EvalErrorKind::domain_error, "month out of range: " + std::to_string(n));
  out = std::string(kMonths[static_cast<std::size_t>(n - 1)]);
  return true;
}

bool ordinal_text(std::int64_t n, std::string& out, CallContext& ctx) {
  if (n < 0) return ctx.fail(EvalErrorKind::domain_error, "ordinal of negative number");
  std::string_view suffix = "th";
  auto mod100 = n % 100;
  if (mod100 < 11 || mod100 > 13) {
    switch (n % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  out = std::to_string(n);
  out.append(suffix);
  return true;
}

bool select_field_of(std::string_view text, std::string_view delim, std::int64_t index, std::string& out,
                     CallContext& ctx) {
  if (delim.empty()) return ctx.fail(EvalErrorKind::domain_error, "empty delimiter");
  if (index < 1) return ctx.fail(EvalErrorKind::domain_error, "field index must be >= 1");
  TextList fields = split_text(text, delim);
  ctx.charge(text.size());
  if (static_cast<std::uint64_t>(index) > fields.size()) {
    return ctx.fail(EvalErrorKind::domain_error, "field index out of range");
  }
  out = std::move(fields[static_cast<std::size_t>(index - 1)]);
  return true;
}

bool replace_all(std::string_view text, std::string_view pattern, std::string_view replacement,
                 std::string& out, CallContext& ctx) {
  if (pattern.empty()) return ctx.fail(EvalErrorKind::domain_error, "empty pattern");
  std::size_t hits = 0;
  for (std::size_t pos = text.find(pattern); pos != std::string_view::npos;
       pos = text.find(pattern, pos + pattern.size())) {
    ++hits;
  }
  std::uint64_t size = text.size() - hits * pattern.size() + hits * replacement.size();
  if (size > ctx.budget().max_output_bytes) {
    return ctx.fail(EvalErrorKind::budget_exceeded, "output byte limit exceeded");
  }
  out.clear();
  out.reserve(size);
  std::size_t start = 0;
  for (std::size_t pos = text.find(pattern); pos != std::string_view::npos;
       pos = text.find(pattern, start)) {
    out.append(text.substr(start, pos - start));
    out.append(replacement);
    start = pos + pattern.size();
  }
  out.append(text.substr(start));
  ctx.charge(text.size());
  return true;
}

template <class F>
bool map_list(const TextList& in, Value& out, CallContext& ctx, F&& f) {
  TextList result;
  result.reserve(in.size());
  for (const auto& item : in) {
    std::string s;
    if (!f(item, s)) return false;
    result.push_back(std::move(s));
  }
  ctx.charge(in.size());
  out = Value(std::move(result));
  return true;
}

bool concat_lists(Args args, Value& out, CallContext& ctx) {
  std::size_t rows = 1;
  bool have_rows = false;
  std::uint64_t bytes = 0;
  for (const auto& a : args) {
    if (a.is_list() && a.list().size() != 1) {
      if (have_rows && a.list().size() != rows) {
        return ctx.fail(EvalErrorKind::domain_error, "concatLists: list length mismatch");
      }
      rows = a.list().size();
      have_rows = true;
    }
  }
  for (const auto& a : args) {
    bytes += a.is_text() ? a.text().size() * rows : (a.list().size() == 1 ? a.list()[0].size() * rows : a.byte_size());
  }
  if (bytes > ctx.budget().max_output_bytes) {
    return ctx.fail(EvalErrorKind::budget_exceeded, "output byte limit exceeded");
  }
  TextList result(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (const auto& a : args) {
      if (a.is_text()) {
        result[r] += a.text();
      } else {
        const auto& l = a.list();
        result[r] += l.size() == 1 ? l[0] : l[r];
      }
    }
  }
  out = Value(std::move(result));
  return true;
}

bool sort_list(const TextList& in, Comparator comp, bool descending, Value& out, CallContext& ctx) {
  std::vector<std::size_t> order(in.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto n = static_cast<std::uint64_t>(in.size());
  std::uint64_t log2n = 1;
  while ((1ull << log2n) < n) ++log2n;
  ctx.charge(n * log2n);
  switch (comp) {
    case Comparator::alpha:
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return descending ? in[b] < in[a] : in[a] < in[b];
      });
      break;
    case Comparator::length:
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return descending ? in[b].size() < in[a].size() : in[a].size() < in[b].size();
      });
      break;
    case Comparator::numeric: {
      std::vector<std::int64_t> keys(in.size());
      for (std::size_t i = 0; i < in.size(); ++i) {
        if (!parse_int(trim_text(in[i]), keys[i], ctx)) return false;
      }
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return descending ? keys[b] < keys[a] : keys[a] < keys[b];
      });
      break;
    }
  }
  TextList result;
  result.reserve(in.size());
  for (auto i : order) result.push_back(in[i]);
  out = Value(std::move(result));
  return true;
}

void add(FunctionRegistry& r, std::string name, std::vector<Sort> params, Sort ret, std::uint32_t cost,
         std::string doc, Semantics sem) {
  r.register_function(FunctionDescriptor{std::move(name), std::move(params), ret, cost, std::move(doc)},
                      std::move(sem));
}

}  // namespace

void register_standard_library(FunctionRegistry& r) {
  using S = Sort;

  add(r, "split", {S::E, S::DELIM}, S::LIST, 2,
      "Fields of the text between occurrences of the delimiter. Interior empty fields are kept; a single "
      "trailing delimiter yields no trailing empty field; empty text yields [].",
      [](Args a, Value& out, CallContext& ctx) {
        if (a[1].text().empty()) return ctx.fail(EvalErrorKind::domain_error, "empty delimiter");
        ctx.charge(a[0].text().size());
        out = Value(split_text(a[0].text(), a[1].text()));
        return true;
      });
  add(r, "lines", {S::E}, S::LIST, 1, "split(text, \"\\n\").", [](Args a, Value& out, CallContext& ctx) {
    ctx.charge(a[0].text().size());
    out = Value(split_lines(a[0].text()));
    return true;
  });
  add(r, "join", {S::LIST, S::DELIM}, S::E, 2, "Elements joined by the delimiter.",
      [](Args a, Value& out, CallContext&) {
        out = Value(join_text(a[0].list(), a[1].text()));
        return true;
      });
  add(r, "dedup", {S::LIST}, S::LIST, 2, "Removes repeated elements, keeping first occurrences in order.",
      [](Args a, Value& out, CallContext& ctx) {
        std::unordered_set<std::string_view> seen;
        TextList result;
        for (const auto& s : a[0].list()) {
          if (seen.insert(s).second) result.push_back(s);
        }
        ctx.charge(a[0].list().size());
        out = Value(std::move(result));
        return true;
      });
  add(r, "count", {S::LIST, S::LIST}, S::LIST, 2,
      "Element i is the decimal number of occurrences of element i of the first list within the second.",
      [](Args a, Value& out, CallContext& ctx) {
        std::unordered_map<std::string_view, std::int64_t> counts;
        for (const auto& s : a[1].list()) ++counts[s];
        TextList result;
        result.reserve(a[0].list().size());
        for (const auto& s : a[0].list()) {
          auto it = counts.find(s);
          result.push_back(std::to_string(it == counts.end() ? 0 : it->second));
        }
        ctx.charge(a[0].list().size() + a[1].list().size());
        out = Value(std::move(result));
        return true;
      });
  add(r, "concatLists", {S::CAT, S::CAT, S::CAT}, S::LIST, 2,
      "Elementwise concatenation. Text arguments and one-element lists are repeated for every row; other "
      "lists must share one length.",
      concat_lists);
  add(r, "concatLists2", {S::CAT, S::CAT}, S::LIST, 2, "Two-argument concatLists.", concat_lists);
  add(r, "sort", {S::LIST, S::COMP}, S::LIST, 3,
      "Stable ascending sort. alpha: bytewise; numeric: integer value of each trimmed element (non-integers "
      "are an ArithmeticError); length: byte length.",
      [](Args a, Value& out, CallContext& ctx) {
        return sort_list(a[0].list(), a[1].comparator(), false, out, ctx);
      });
  add(r, "reverseSort", {S::LIST, S::COMP}, S::LIST, 3,
      "Stable descending sort with the same keys as sort; equal keys keep their input order.",
      [](Args a, Value& out, CallContext& ctx) {
        return sort_list(a[0].list(), a[1].comparator(), true, out, ctx);
      });
  add(r, "reverse", {S::LIST}, S::LIST, 1, "Elements in reverse order.", [](Args a, Value& out, CallContext&) {
    TextList result(a[0].list().rbegin(), a[0].list().rend());
    out = Value(std::move(result));
    return true;
  });
  add(r, "select_field", {S::E, S::DELIM, S::INT}, S::E, 2,
      "The k-th (1-based) field of split(text, delimiter). Out-of-range k is a DomainError.",
      [](Args a, Value& out, CallContext& ctx) {
        std::string s;
        if (!select_field_of(a[0].text(), a[1].text(), a[2].integer(), s, ctx)) return false;
        out = Value(std::move(s));
        return true;
      });
  add(r, "selectFieldOnLines", {S::LIST, S::DELIM, S::INT}, S::LIST, 2, "select_field applied to every element.",
      [](Args a, Value& out, CallContext& ctx) {
        return map_list(a[0].list(), out, ctx, [&](const std::string& item, std::string& s) {
          return select_field_of(item, a[1].text(), a[2].integer(), s, ctx);
        });
      });
  add(r, "replaceAll", {S::E, S::E, S::E}, S::E, 2,
      "Replaces every non-overlapping occurrence (scanning left to right) of the second argument by the third. "
      "An empty pattern is a DomainError.",
      [](Args a, Value& out, CallContext& ctx) {
        std::string s;
        if (!replace_all(a[0].text(), a[1].text(), a[2].text(), s, ctx)) return false;
        out = Value(std::move(s));
        return true;
      });
  add(r, "mapReplaceAll", {S::LIST, S::E, S::E}, S::LIST, 2, "replaceAll applied to every element.",
      [](Args a, Value& out, CallContext& ctx) {
        return map_list(a[0].list(), out, ctx, [&](const std::string& item, std::string& s) {
          return replace_all(item, a[1].text(), a[2].text(), s, ctx);
        });
      });
  add(r, "toUpper", {S::E}, S::E, 1, "ASCII upper case.", [](Args a, Value& out, CallContext&) {
    out = Value(upper(a[0].text()));
    return true;
  });
  add(r, "toLower", {S::E}, S::E, 1, "ASCII lower case.", [](Args a, Value& out, CallContext&) {
    out = Value(lower(a[0].text()));
    return true;
  });
  add(r, "capitalize", {S::E}, S::E, 1, "First byte upper case, the rest lower case (ASCII).",
      [](Args a, Value& out, CallContext&) {
        out = Value(capitalize_text(a[0].text()));
        return true;
      });
  add(r, "titleCase", {S::E}, S::E, 1, "Every whitespace-separated word capitalized.",
      [](Args a, Value& out, CallContext&) {
        out = Value(title_case(a[0].text()));
        return true;
      });
  add(r, "trim", {S::E}, S::E, 1, "Strips leading and trailing ASCII whitespace.",
      [](Args a, Value& out, CallContext&) {
        out = Value(trim_text(a[0].text()));
        return true;
      });
  add(r, "mapUpper", {S::LIST}, S::LIST, 1, "toUpper on every element.", [](Args a, Value& out, CallContext& ctx) {
    return map_list(a[0].list(), out, ctx, [](const std::string& item, std::string& s) {
      s = upper(item);
      return true;
    });
  });
  add(r, "mapLower", {S::LIST}, S::LIST, 1, "toLower on every element.", [](Args a, Value& out, CallContext& ctx) {
    return map_list(a[0].list(), out, ctx, [](const std::string& item, std::string& s) {
      s = lower(item);
      return true;
    });
  });
  add(r, "mapCapitalize", {S::LIST}, S::LIST, 1, "capitalize on every element.",
      [](Args a, Value& out, CallContext& ctx) {
        return map_list(a[0].list(), out, ctx, [](const std::string& item, std::string& s) {
          s = capitalize_text(item);
          return true;
        });
      });
  add(r, "mapTrim", {S::LIST}, S::LIST, 1, "trim on every element.", [](Args a, Value& out, CallContext& ctx) {
    return map_list(a[0].list(), out, ctx, [](const std::string& item, std::string& s) {
      s = trim_text(item);
      return true;
    });
  });
  add(r, "removeEmpty", {S::LIST}, S::LIST, 1, "Drops zero-length elements.", [](Args a, Value& out, CallContext& ctx) {
    TextList result;
    for (const auto& s : a[0].list()) {
      if (!s.empty()) result.push_back(s);
    }
    ctx.charge(a[0].list().size());
    out = Value(std::move(result));
    return true;
  });
  add(r, "filterContains", {S::LIST, S::E}, S::LIST, 2, "Keeps elements containing the text.",
      [](Args a, Value& out, CallContext& ctx) {
        TextList result;
        for (const auto& s : a[0].list()) {
          if (s.find(a[1].text()) != std::string::npos) result.push_back(s);
        }
        ctx.charge(a[0].byte_size());
        out = Value(std::move(result));
        return true;
      });
  add(r, "filterNotContains", {S::LIST, S::E}, S::LIST, 2, "Keeps elements not containing the text.",
      [](Args a, Value& out, CallContext& ctx) {
        TextList result;
        for (const auto& s : a[0].list()) {
          if (s.find(a[1].text()) == std::string::npos) result.push_back(s);
        }
        ctx.charge(a[0].byte_size());
        out = Value(std::move(result));
        return true;
      });
  add(r, "first", {S::LIST}, S::E, 1, "First element; DomainError on an empty list.",
      [](Args a, Value& out, CallContext& ctx) {
        if (a[0].list().empty()) return ctx.fail(EvalErrorKind::domain_error, "first of empty list");
        out = Value(a[0].list().front());
        return true;
      });
  add(r, "last", {S::LIST}, S::E, 1, "Last element; DomainError on an empty list.",
      [](Args a, Value& out, CallContext& ctx) {
        if (a[0].list().empty()) return ctx.fail(EvalErrorKind::domain_error, "last of empty list");
        out = Value(a[0].list().back());
        return true;
      });
  add(r, "singleton", {S::E}, S::LIST, 1, "One-element list.", [](Args a, Value& out, CallContext&) {
    out = Value(TextList{a[0].text()});
    return true;
  });
  add(r, "itemCount", {S::LIST}, S::INT, 1, "Number of elements.", [](Args a, Value& out, CallContext&) {
    out = Value(static_cast<std::int64_t>(a[0].list().size()));
    return true;
  });
  add(r, "concat", {S::E, S::E}, S::E, 1, "Text concatenation.", [](Args a, Value& out, CallContext& ctx) {
    if (a[0].text().size() + a[1].text().size() > ctx.budget().max_output_bytes) {
      return ctx.fail(EvalErrorKind::budget_exceeded, "output byte limit exceeded");
    }
    out = Value(a[0].text() + a[1].text());
    return true;
  });
  add(r, "toInt", {S::E}, S::INT, 1,
      "Decimal integer with optional sign; anything else (or overflow) is an ArithmeticError.",
      [](Args a, Value& out, CallContext& ctx) {
        std::int64_t n = 0;
        if (!parse_int(a[0].text(), n, ctx)) return false;
        out = Value(n);
        return true;
      });
  add(r, "toText", {S::INT}, S::E, 1, "Decimal rendering, no leading zeros.", [](Args a, Value& out, CallContext&) {
    out = Value(std::to_string(a[0].integer()));
    return true;
  });
  add(r, "monthName", {S::INT}, S::E, 1, "English month name for 1..12; DomainError otherwise.",
      [](Args a, Value& out, CallContext& ctx) {
        std::string s;
        if (!month_name(a[0].integer(), s, ctx)) return false;
        out = Value(std::move(s));
        return true;
      });
  add(r, "ordinal", {S::INT}, S::E, 1, "Number with English ordinal suffix: 1st, 2nd, 3rd, 11th, 28th.",
      [](Args a, Value& out, CallContext& ctx) {
        std::string s;
        if (!ordinal_text(a[0].integer(), s, ctx)) return false;
        out = Value(std::move(s));
        return true;
      });
  add(r, "mapMonthName", {S::LIST}, S::LIST, 1, "monthName(toInt(e)) for every element.",
      [](Args a, Value& out, CallContext& ctx) {
        return map_list(a[0].list(), out, ctx, [&](const std::string& item, std::string& s) {
          std::int64_t n = 0;
          return parse_int(item, n, ctx) && month_name(n, s, ctx);
        });
      });
  add(r, "mapOrdinal", {S::LIST}, S::LIST, 1, "ordinal(toInt(e)) for every element.",
      [](Args a, Value& out, CallContext& ctx) {
        return map_list(a[0].list(), out, ctx, [&](const std::string& item, std::string& s) {
          std::int64_t n = 0;
          return parse_int(item, n, ctx) && ordinal_text(n, s, ctx);
        });
      });
}

const FunctionRegistry& standard_registry() {
  static const FunctionRegistry* registry = [] {
    auto* r = new FunctionRegistry();
    register_standard_library(*r);
    r->freeze();
    return r;
  }();
  return *registry;
}

}  // namespace cluesynth
