#pragma once

// Expression reader for series literals.
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { '*' unary }
//   unary   := ('-' | '+') unary | power
//   power   := atom [ '^' integer ]
//   atom    := integer [ '/' integer ] | identifier | '(' expr ')'
//
// Whitespace is ignored. Identifiers resolve against the variable list, then
// against the alias table (alias -> canonical variable name). There is no
// implicit multiplication: write 2*x, not 2x.

#include <cctype>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ntheta/errors.hpp"
#include "ntheta/power_series.hpp"

namespace ntheta {

using AliasMap = std::map<std::string, std::string>;

namespace detail {

class ExpressionParser {
public:
  ExpressionParser(std::string_view text, const std::vector<std::string>& variables, int truncation,
                   const AliasMap& aliases)
      : text_(text), variables_(variables), truncation_(truncation), aliases_(aliases) {}

  PowerSeries parse() {
    PowerSeries result = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return result;
  }

private:
  [[noreturn]] void fail(const std::string& what) const {
    throw PreconditionError("expression-syntax", what + " at offset " + std::to_string(pos_) +
                                                     " in '" + std::string(text_) + "'");
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

  PowerSeries expr() {
    PowerSeries acc = term();
    for (;;) {
      if (accept('+')) {
        acc = acc + term();
      } else if (accept('-')) {
        acc = acc - term();
      } else {
        return acc;
      }
    }
  }

  PowerSeries term() {
    PowerSeries acc = unary();
    while (accept('*')) acc = acc * unary();
    return acc;
  }

  PowerSeries unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  PowerSeries power() {
    PowerSeries base = atom();
    if (accept('^')) {
      skip_space();
      const std::string digits = read_digits();
      if (digits.empty()) fail("exponent must be a nonnegative integer");
      if (digits.size() > 4) fail("exponent too large");
      base = base.pow(static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  std::string read_digits() {
    std::string out;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      out.push_back(text_[pos_++]);
    return out;
  }

  PowerSeries atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      PowerSeries inner = expr();
      if (!accept(')')) fail("missing ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Integer num(read_digits(), 10);
      Integer den(1);
      // '/' only ever joins two integer literals.
      const std::size_t save = pos_;
      if (accept('/')) {
        skip_space();
        const std::string d = read_digits();
        if (d.empty()) {
          pos_ = save;
          fail("'/' must be followed by an integer denominator");
        }
        den = Integer(d, 10);
        if (den == 0) fail("zero denominator");
      }
      Rational q(num, den);
      q.canonicalize();
      return PowerSeries::constant(variables_, truncation_, q);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        name.push_back(text_[pos_++]);
      return resolve(name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  PowerSeries resolve(const std::string& name) {
    for (std::size_t i = 0; i < variables_.size(); ++i)
      if (variables_[i] == name) return PowerSeries::variable(variables_, truncation_, i);
    if (auto it = aliases_.find(name); it != aliases_.end())
      for (std::size_t i = 0; i < variables_.size(); ++i)
        if (variables_[i] == it->second) return PowerSeries::variable(variables_, truncation_, i);
    fail("unknown variable '" + name + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& variables_;
  int truncation_;
  const AliasMap& aliases_;
  std::size_t pos_ = 0;
};

} // namespace detail

inline PowerSeries parse_series(std::string_view text, const std::vector<std::string>& variables,
                                int truncation, const AliasMap& aliases = {}) {
  // Validate the variable list before parsing.
  (void)PowerSeries(variables, truncation);
  return detail::ExpressionParser(text, variables, truncation, aliases).parse();
}

} // namespace ntheta
