// Copyright 2026 The mmgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmgate/hamiltonian_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <utility>
#include <vector>

namespace mmgate {

HamiltonianSyntaxError::HamiltonianSyntaxError(const std::string& message, std::size_t position)
    : std::invalid_argument(message + " at position " + std::to_string(position)), position_(position) {}

namespace {

struct Term {
  double coefficient = 1.0;
  std::map<std::size_t, int> powers;  // 0-based mode -> exponent
};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  std::vector<Term> parse() {
    std::vector<Term> terms;
    skip();
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = next() == '-' ? -1.0 : 1.0;
    }
    for (;;) {
      Term t = term();
      t.coefficient *= sign;
      terms.push_back(std::move(t));
      skip();
      if (at_end()) break;
      const char c = peek();
      if (c != '+' && c != '-') fail(std::string("expected '+', '-' or '*', found '") + c + "'");
      sign = next() == '-' ? -1.0 : 1.0;
    }
    return terms;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw HamiltonianSyntaxError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }
  char next() {
    const char c = s_[pos_++];
    skip();
    return c;
  }

  Term term() {
    skip();
    Term t;
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      t.coefficient = number();
    } else {
      factor(t);
    }
    skip();
    while (peek() == '*') {
      next();
      factor(t);
      skip();
    }
    return t;
  }

  double number() {
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc() || end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  long integer(const char* what) {
    skip();
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail(std::string("expected ") + what);
    long v = 0;
    const char* begin = s_.data() + pos_;
    const auto [end, ec] = std::from_chars(begin, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail(std::string(what) + " out of range");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  void factor(Term& t) {
    skip();
    const char c = peek();
    if (c == 'p' || c == 'P') {
      fail("momentum quadrature '" + std::string(1, c) +
           "' is not allowed: only Hamiltonians built from position quadratures x1, x2, ... are supported");
    }
    if (c != 'x') fail(at_end() ? "unexpected end of input" : std::string("expected a coefficient or 'x', found '") + c + "'");
    next();
    const std::size_t where = pos_;
    const long mode = integer("mode index");
    if (mode < 1 || mode > 64) throw HamiltonianSyntaxError("mode index must be between 1 and 64", where);
    long power = 1;
    skip();
    if (peek() == '^') {
      next();
      const std::size_t at = pos_;
      power = integer("exponent");
      if (power > 64) throw HamiltonianSyntaxError("exponent too large", at);
    }
    t.powers[static_cast<std::size_t>(mode - 1)] += static_cast<int>(power);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

HamiltonianExpr parse_hamiltonian(const std::string& text, std::size_t min_modes) {
  const auto terms = Parser(text).parse();
  std::size_t modes = std::max<std::size_t>(min_modes, 1);
  for (const auto& t : terms)
    for (const auto& [m, k] : t.powers) modes = std::max(modes, m + 1);
  Polynomial poly(modes);
  for (const auto& t : terms) {
    Exponents e(2 * modes, 0);
    for (const auto& [m, k] : t.powers) e[2 * m] = k;
    poly.add_term(e, t.coefficient);
  }
  return {text, poly};
}

}  // namespace mmgate
