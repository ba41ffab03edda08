#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cluesynth {

using Text = std::string;
using TextList = std::vector<std::string>;

enum class Comparator : std::uint8_t { alpha, numeric, length };

enum class ValueKind : std::uint8_t { text, text_list, integer, comparator };

/// Runtime datum of the DSL.
class Value {
 public:
  Value() : data_(Text{}) {}
  Value(Text text) : data_(std::move(text)) {}  // NOLINT(google-explicit-constructor)
  Value(const char* text) : data_(Text(text)) {}  // NOLINT(google-explicit-constructor)
  Value(TextList list) : data_(std::move(list)) {}  // NOLINT(google-explicit-constructor)
  Value(std::int64_t n) : data_(n) {}  // NOLINT(google-explicit-constructor)
  Value(Comparator c) : data_(c) {}  // NOLINT(google-explicit-constructor)

  ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }
  bool is_text() const { return kind() == ValueKind::text; }
  bool is_list() const { return kind() == ValueKind::text_list; }
  bool is_int() const { return kind() == ValueKind::integer; }
  bool is_comparator() const { return kind() == ValueKind::comparator; }

  const Text& text() const { return std::get<Text>(data_); }
  Text& text() { return std::get<Text>(data_); }
  const TextList& list() const { return std::get<TextList>(data_); }
  TextList& list() { return std::get<TextList>(data_); }
  std::int64_t integer() const { return std::get<std::int64_t>(data_); }
  Comparator comparator() const { return std::get<Comparator>(data_); }

  /// Bytes held by the value (text bytes, summed over list elements).
  std::size_t byte_size() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  std::variant<Text, TextList, std::int64_t, Comparator> data_;
};

std::string_view kind_name(ValueKind kind);
std::string_view comparator_name(Comparator c);
std::optional<Comparator> parse_comparator(std::string_view name);

/// Double-quoted, backslash-escaped literal as used by the program text form.
std::string quote_text(std::string_view text);

/// Literal form of a scalar value: quoted text, decimal integer or comparator
/// name. Lists render as `["a", "b"]` (display only; not program syntax).
std::string to_literal(const Value& value);

/// Nonterminal sorts of the program grammar.
enum class Sort : std::uint8_t { P, E, LIST, DELIM, INT, CAT, COMP };
inline constexpr std::size_t kSortCount = 7;

inline constexpr std::size_t sort_index(Sort s) { return static_cast<std::size_t>(s); }

std::string_view sort_name(Sort s);
std::optional<Sort> parse_sort(std::string_view name);

/// Whether a value of `kind` may inhabit `sort`. CAT accepts text and lists.
bool sort_accepts(Sort sort, ValueKind kind);

/// Whether every value admitted by `inner` is admitted by `outer`.
bool sort_fits(Sort inner, Sort outer);

}  // namespace cluesynth
