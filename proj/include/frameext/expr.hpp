#pragma once

// Minimal arithmetic expressions for CLI-supplied target functions:
// operators + - * / ^, functions sin cos exp abs, variables x y.

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace frameext::expr {

using Fn = std::function<double(double, double)>;

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Fn parse() {
    Fn e = sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  Fn sum() {
    Fn left = product();
    while (true) {
      skip_ws();
      if (consume('+')) {
        Fn right = product();
        left = [l = std::move(left), r = std::move(right)](double x, double y) {
          return l(x, y) + r(x, y);
        };
      } else if (consume('-')) {
        Fn right = product();
        left = [l = std::move(left), r = std::move(right)](double x, double y) {
          return l(x, y) - r(x, y);
        };
      } else {
        return left;
      }
    }
  }

  Fn product() {
    Fn left = unary();
    while (true) {
      skip_ws();
      if (consume('*')) {
        Fn right = unary();
        left = [l = std::move(left), r = std::move(right)](double x, double y) {
          return l(x, y) * r(x, y);
        };
      } else if (consume('/')) {
        Fn right = unary();
        left = [l = std::move(left), r = std::move(right)](double x, double y) {
          return l(x, y) / r(x, y);
        };
      } else {
        return left;
      }
    }
  }

  Fn unary() {
    skip_ws();
    if (consume('-')) {
      Fn operand = unary();
      return [f = std::move(operand)](double x, double y) { return -f(x, y); };
    }
    return power();
  }

  Fn power() {
    Fn base = atom();
    skip_ws();
    if (consume('^')) {
      Fn exponent = unary();  // right-associative
      return [b = std::move(base), e = std::move(exponent)](double x, double y) {
        return std::pow(b(x, y), e(x, y));
      };
    }
    return base;
  }

  Fn atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (consume('(')) {
      Fn inner = sum();
      expect(')');
      return inner;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Fn number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
            text_[pos_] == 'e' || text_[pos_] == 'E' ||
            ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
             (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
      ++pos_;
    const std::string token(text_.substr(start, pos_ - start));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      fail("invalid number '" + token + "'");
    }
    if (used != token.size()) fail("invalid number '" + token + "'");
    return [value](double, double) { return value; };
  }

  Fn identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "x") return [](double x, double) { return x; };
    if (name == "y") return [](double, double y) { return y; };
    expect('(');
    Fn arg = sum();
    expect(')');
    if (name == "sin")
      return [f = std::move(arg)](double x, double y) { return std::sin(f(x, y)); };
    if (name == "cos")
      return [f = std::move(arg)](double x, double y) { return std::cos(f(x, y)); };
    if (name == "exp")
      return [f = std::move(arg)](double x, double y) { return std::exp(f(x, y)); };
    if (name == "abs")
      return [f = std::move(arg)](double x, double y) { return std::abs(f(x, y)); };
    fail("unknown function '" + name + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression error at position " + std::to_string(pos_) +
                                ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Compile an expression over variables x, y. Throws std::invalid_argument on
/// malformed input.
inline Fn compile(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace frameext::expr
