#include "cluesynth/value.hpp"

#include <array>
#include <cstdio>

namespace cluesynth {

std::size_t Value::byte_size() const {
  switch (kind()) {
    case ValueKind::text:
      return text().size();
    case ValueKind::text_list: {
      std::size_t total = 0;
      for (const auto& s : list()) total += s.size();
      return total;
    }
    case ValueKind::integer:
    case ValueKind::comparator:
      return sizeof(std::int64_t);
  }
  return 0;
}

std::string_view kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::text: return "Text";
    case ValueKind::text_list: return "TextList";
    case ValueKind::integer: return "IntVal";
    case ValueKind::comparator: return "Comparator";
  }
  return "?";
}

std::string_view comparator_name(Comparator c) {
  switch (c) {
    case Comparator::alpha: return "alpha";
    case Comparator::numeric: return "numeric";
    case Comparator::length: return "length";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(std::string_view name) {
  if (name == "alpha") return Comparator::alpha;
  if (name == "numeric") return Comparator::numeric;
  if (name == "length") return Comparator::length;
  return std::nullopt;
}

std::string quote_text(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  out.push_back('"');
  for (unsigned char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          std::array<char, 8> buf{};
          std::snprintf(buf.data(), buf.size(), "\\x%02x", c);
          out += buf.data();
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string to_literal(const Value& value) {
  switch (value.kind()) {
    case ValueKind::text:
      return quote_text(value.text());
    case ValueKind::integer:
      return std::to_string(value.integer());
    case ValueKind::comparator:
      return std::string(comparator_name(value.comparator()));
    case ValueKind::text_list: {
      std::string out = "[";
      for (std::size_t i = 0; i < value.list().size(); ++i) {
        if (i) out += ", ";
        out += quote_text(value.list()[i]);
      }
      out += "]";
      return out;
    }
  }
  return {};
}

namespace {
constexpr std::array<std::string_view, kSortCount> kSortNames = {"P",   "E",   "LIST", "DELIM",
                                                                 "INT", "CAT", "COMP"};
}

std::string_view sort_name(Sort s) { return kSortNames[sort_index(s)]; }

std::optional<Sort> parse_sort(std::string_view name) {
  for (std::size_t i = 0; i < kSortCount; ++i) {
    if (kSortNames[i] == name) return static_cast<Sort>(i);
  }
  return std::nullopt;
}

bool sort_accepts(Sort sort, ValueKind kind) {
  switch (sort) {
    case Sort::P:
    case Sort::E:
    case Sort::DELIM:
      return kind == ValueKind::text;
    case Sort::LIST:
      return kind == ValueKind::text_list;
    case Sort::INT:
      return kind == ValueKind::integer;
    case Sort::COMP:
      return kind == ValueKind::comparator;
    case Sort::CAT:
      return kind == ValueKind::text || kind == ValueKind::text_list;
  }
  return false;
}

bool sort_fits(Sort inner, Sort outer) {
  for (auto kind : {ValueKind::text, ValueKind::text_list, ValueKind::integer, ValueKind::comparator}) {
    if (sort_accepts(inner, kind) && !sort_accepts(outer, kind)) return false;
  }
  return true;
}

}  // namespace cluesynth
