#pragma once

#include <cctype>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "folab/polyalg/poly2.hpp"

namespace folab {

namespace detail {

// Recursive-descent parser over any ring-like value type.
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := ('+'|'-') factor | atom ('^' nat)?
//   atom   := number | number 'i' | 'i' | identifier | '(' expr ')'
//   number := int ('/' nat)? | int '.' digits
template <class Value>
class ExpressionParser {
 public:
  using Resolver = std::function<std::optional<Value>(std::string_view)>;

  ExpressionParser(std::string_view text, Resolver resolve)
      : text_(text), resolve_(std::move(resolve)) {}

  Value parse() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Value v = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      if (starts_atom()) throw ParseError("implicit multiplication is not allowed", pos_);
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  bool starts_atom() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '_' || c == '.';
  }

  Value expr() {
    Value v = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        v = v + term();
      } else if (peek('-')) {
        ++pos_;
        v = v - term();
      } else {
        return v;
      }
    }
  }

  Value term() {
    Value v = factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        v = v * factor();
      } else if (starts_atom()) {
        throw ParseError("implicit multiplication is not allowed", pos_);
      } else {
        return v;
      }
    }
  }

  Value factor() {
    if (peek('-')) {
      ++pos_;
      return -factor();
    }
    if (peek('+')) {
      ++pos_;
      return factor();
    }
    Value base = atom();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("exponent must be a natural number", pos_);
      std::string digits = read_digits();
      if (digits.size() > 6) throw ParseError("exponent too large", start);
      return pow_value(base, std::stoi(digits), start);
    }
    return base;
  }

  Value atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Value v = expr();
      if (!peek(')')) throw ParseError("expected ')'", pos_);
      ++pos_;
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      ExactComplex num = number();
      std::size_t save = pos_;
      skip_ws();
      if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
        std::size_t id_pos = pos_;
        std::string id = read_identifier();
        if (id == "i") return Value(num * ExactComplex::i());
        throw ParseError("implicit multiplication is not allowed", id_pos);
      }
      pos_ = save;
      return Value(num);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t id_pos = pos_;
      std::string id = read_identifier();
      if (id == "i") return Value(ExactComplex::i());
      auto v = resolve_(id);
      if (!v) throw ParseError("unknown identifier '" + id + "'", id_pos);
      return *v;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  ExactComplex number() {
    std::size_t start = pos_;
    std::string int_part = read_digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      std::string frac = read_digits();
      if (int_part.empty() && frac.empty()) throw ParseError("malformed number", start);
      mpz_class num((int_part.empty() ? std::string("0") : int_part) + frac, 10);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
      Rational q(num, den);
      q.canonicalize();
      return ExactComplex(q);
    }
    if (int_part.empty()) throw ParseError("malformed number", start);
    mpz_class num(int_part, 10);
    std::size_t save = pos_;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '/') {
      ++pos_;
      skip_ws();
      std::size_t den_pos = pos_;
      std::string den_digits = read_digits();
      if (den_digits.empty()) throw ParseError("expected natural denominator", den_pos);
      mpz_class den(den_digits, 10);
      if (den == 0) throw ParseError("zero denominator", den_pos);
      Rational q(num, den);
      q.canonicalize();
      return ExactComplex(q);
    }
    pos_ = save;
    return ExactComplex(Rational(num));
  }

  std::string read_digits() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  std::string read_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Value pow_value(const Value& base, int e, std::size_t where) {
    if constexpr (requires(const Value& v) { v.pow(e); }) {
      try {
        return base.pow(e);
      } catch (const DomainError& err) {
        throw ParseError(err.what(), where);
      }
    } else {
      Value r = Value(ExactComplex(1));
      for (int k = 0; k < e; ++k) r = r * base;
      return r;
    }
  }

  std::string_view text_;
  Resolver resolve_;
  std::size_t pos_ = 0;
};

// Value type used to read 1-forms: scalar part plus dx and dy coefficients.
struct FormValue {
  Poly2 scalar, dx, dy;

  explicit FormValue(const ExactComplex& c) : scalar(c) {}
  FormValue(Poly2 s, Poly2 a, Poly2 b) : scalar(std::move(s)), dx(std::move(a)), dy(std::move(b)) {}

  bool has_differential() const { return !dx.is_zero() || !dy.is_zero(); }

  friend FormValue operator+(const FormValue& a, const FormValue& b) {
    return {a.scalar + b.scalar, a.dx + b.dx, a.dy + b.dy};
  }
  friend FormValue operator-(const FormValue& a, const FormValue& b) {
    return {a.scalar - b.scalar, a.dx - b.dx, a.dy - b.dy};
  }
  FormValue operator-() const { return {-scalar, -dx, -dy}; }
  friend FormValue operator*(const FormValue& a, const FormValue& b) {
    if (a.has_differential() && b.has_differential())
      throw DomainError("product of two differentials");
    return {a.scalar * b.scalar, a.scalar * b.dx + b.scalar * a.dx,
            a.scalar * b.dy + b.scalar * a.dy};
  }
  FormValue pow(int e) const {
    if (has_differential() && e != 1) throw DomainError("power of a differential");
    if (has_differential()) return *this;
    return {scalar.pow(e), {}, {}};
  }
};

}  // namespace detail

/// Parses a polynomial in the given variable names (at most two; the first maps to x).
inline Poly2 parse_poly(std::string_view text, const std::vector<std::string>& names = {"x", "y"}) {
  if (names.size() > 2) throw DomainError("at most two variables");
  detail::ExpressionParser<Poly2> parser(text, [&](std::string_view id) -> std::optional<Poly2> {
    for (std::size_t k = 0; k < names.size(); ++k)
      if (id == names[k]) return k == 0 ? Poly2::x() : Poly2::y();
    return std::nullopt;
  });
  return parser.parse();
}

/// Parses a constant expression such as "1/2 - 3i" or "0.25".
inline ExactComplex parse_scalar(std::string_view text) {
  Poly2 p = parse_poly(text, {});
  return p.constant_term();
}

/// Parses "P*dy - Q*dx" and returns (P, Q) under the convention omega = P dy - Q dx.
inline std::pair<Poly2, Poly2> parse_form(std::string_view text) {
  using detail::FormValue;
  detail::ExpressionParser<FormValue> parser(
      text, [](std::string_view id) -> std::optional<FormValue> {
        if (id == "x") return FormValue(Poly2::x(), {}, {});
        if (id == "y") return FormValue(Poly2::y(), {}, {});
        if (id == "dx") return FormValue({}, Poly2(ExactComplex(1)), {});
        if (id == "dy") return FormValue({}, {}, Poly2(ExactComplex(1)));
        return std::nullopt;
      });
  FormValue v = [&] {
    try {
      return parser.parse();
    } catch (const ParseError&) {
      throw;
    } catch (const DomainError& e) {
      throw ParseError(e.what(), 0);
    }
  }();
  if (!v.scalar.is_zero()) throw ParseError("1-form has a term without dx or dy", 0);
  return {v.dy, -v.dx};
}

}  // namespace folab
