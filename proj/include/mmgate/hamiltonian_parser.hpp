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

#ifndef MMGATE_HAMILTONIAN_PARSER_HPP
#define MMGATE_HAMILTONIAN_PARSER_HPP

// Text form of position-only Hamiltonians:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := coeff ('*' factor)* | factor ('*' factor)*
//   factor := 'x' INT ('^' INT)?
//   coeff  := decimal, optionally with an exponent (1e-3)
// Whitespace is ignored. Modes are numbered from 1.

#include <cstddef>
#include <stdexcept>
#include <string>

#include "mmgate/quadpoly.hpp"

namespace mmgate {

class HamiltonianSyntaxError : public std::invalid_argument {
 public:
  HamiltonianSyntaxError(const std::string& message, std::size_t position);
  /// 0-based offset into the source text.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct HamiltonianExpr {
  std::string source;
  Polynomial polynomial;
};

/// The polynomial has max(min_modes, highest mode index) modes.
HamiltonianExpr parse_hamiltonian(const std::string& text, std::size_t min_modes = 1);

}  // namespace mmgate

#endif  // MMGATE_HAMILTONIAN_PARSER_HPP
