#include "cluesynth/program_text.hpp"

#include <cctype>
#include <charconv>

#include "cluesynth/errors.hpp"
#include "cluesynth/value.hpp"

namespace cluesynth {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::syntax_error, what + " at column " + std::to_string(pos_ + 1));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  Expr parse_expr() {
    if (++depth_ > kMaxDepth) fail("nesting too deep");
    skip_ws();
    if (at_end()) fail("expected expression");
    Expr e;
    char c = peek();
    if (c == '"') {
      e.kind = Expr::Kind::string;
      e.name = parse_string();
    } else if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      e.kind = Expr::Kind::integer;
      e.number = parse_integer();
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      e.name = parse_ident();
      skip_ws();
      if (peek() == '(') {
        ++pos_;
        e.kind = Expr::Kind::call;
        skip_ws();
        if (peek() == ')') {
          ++pos_;
        } else {
          while (true) {
            e.args.push_back(parse_expr());
            skip_ws();
            if (peek() == ',') {
              ++pos_;
              continue;
            }
            if (peek() == ')') {
              ++pos_;
              break;
            }
            fail("expected ',' or ')'");
          }
        }
      } else {
        e.kind = Expr::Kind::ident;
      }
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    --depth_;
    return e;
  }

  std::string parse_ident() {
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::int64_t parse_integer() {
    std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected digits");
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc()) fail("integer literal out of range");
    return value;
  }

  static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  std::string parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (at_end()) fail("unterminated escape");
      char esc = text_[pos_++];
      switch (esc) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '\\': out.push_back('\\'); break;
        case '"': out.push_back('"'); break;
        case 'x': {
          if (pos_ + 2 > text_.size()) fail("truncated \\x escape");
          int hi = hex_digit(text_[pos_]);
          int lo = hex_digit(text_[pos_ + 1]);
          if (hi < 0 || lo < 0) fail("bad \\x escape");
          out.push_back(static_cast<char>(hi * 16 + lo));
          pos_ += 2;
          break;
        }
        default:
          --pos_;
          fail(std::string("unknown escape '\\") + esc + "'");
      }
    }
    return out;
  }

  static constexpr int kMaxDepth = 256;
  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

void print_into(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::string:
      out += quote_text(e.name);
      return;
    case Expr::Kind::integer:
      out += std::to_string(e.number);
      return;
    case Expr::Kind::ident:
      out += e.name;
      return;
    case Expr::Kind::call:
      out += e.name;
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print_into(e.args[i], out);
      }
      out += ')';
      return;
  }
}

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

std::string print_expr(const Expr& expr) {
  std::string out;
  print_into(expr, out);
  return out;
}

}  // namespace cluesynth
