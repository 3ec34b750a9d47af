#include "superproj/expression.hpp"

#include <cctype>

namespace superproj {

namespace {

class Parser {
 public:
  Parser(std::string_view text, Dimension dim) : text_(text), dim_(dim) {}

  SuperFunction parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty expression");
    SuperFunction value = expr();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return value;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorKind::ParseError, "column " + std::to_string(pos_ + 1) + ": " + message);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  SuperFunction expr() {
    SuperFunction value = term();
    for (;;) {
      if (accept('+')) {
        value += term();
      } else if (accept('-')) {
        value -= term();
      } else {
        return value;
      }
    }
  }

  SuperFunction term() {
    SuperFunction value = unary();
    for (;;) {
      if (accept('*')) {
        value = value * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        SuperFunction divisor = unary();
        value = value * invert(divisor, at);
      } else {
        return value;
      }
    }
  }

  SuperFunction invert(const SuperFunction& f, std::size_t at) {
    if (f.is_zero()) {
      pos_ = at;
      fail("division by zero");
    }
    for (const auto& [mask, c] : f.terms()) {
      if (mask != 0) {
        pos_ = at;
        fail("division by an expression containing odd generators");
      }
    }
    return SuperFunction(dim_, f.body().inverse());
  }

  SuperFunction unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  SuperFunction power() {
    SuperFunction base = primary();
    if (!accept('^')) return base;
    std::size_t at = pos_;
    bool negative = accept('-');
    skip_space();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("exponent must be an integer literal");
    unsigned long k = integer();
    if (k > 4096) fail("exponent too large");
    if (negative) base = invert(base, at);
    SuperFunction result(dim_, 1);
    for (unsigned long i = 0; i < k; ++i) result = result * base;
    return result;
  }

  unsigned long integer() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::stoul(std::string(text_.substr(start, pos_ - start)));
  }

  SuperFunction primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      SuperFunction inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return SuperFunction(dim_, mpq_class(std::string(text_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      std::size_t digits = name.find_first_of("0123456789");
      std::string prefix = name.substr(0, digits);
      if (digits != std::string::npos && (prefix == "x" || prefix == "th") && name[digits] != '0' &&
          name.find_first_not_of("0123456789", digits) == std::string::npos) {
        unsigned long k = std::stoul(name.substr(digits));
        if (prefix == "x" && k <= dim_.n) return SuperFunction::coordinate(dim_, static_cast<unsigned>(k - 1));
        if (prefix == "th" && k <= dim_.m) return SuperFunction::coordinate(dim_, dim_.n + static_cast<unsigned>(k - 1));
      }
      pos_ = start;
      fail("unknown coordinate '" + name + "' in dimension " + dim_.to_string());
    }
    fail(std::string("unexpected '") + c + "'");
  }

  std::string_view text_;
  Dimension dim_;
  std::size_t pos_ = 0;
};

}  // namespace

SuperFunction parse_expression(std::string_view text, Dimension dim) { return Parser(text, dim).parse(); }

std::string expression_grammar() {
  return "expr    := term (('+' | '-') term)*\n"
         "term    := unary (('*' | '/') unary)*\n"
         "unary   := ('-' | '+') unary | power\n"
         "power   := primary ('^' '-'? integer)?\n"
         "primary := integer | x<k> | th<k> | '(' expr ')'\n"
         "\n"
         "x1..xn are the even coordinates, th1..thm the odd ones.\n"
         "Rational literals are written p/q. Division and negative powers\n"
         "need a divisor without odd generators.\n";
}

}  // namespace superproj
