// Copyright 2026 The qoctk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qoc {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compiled single-variable expression.
using TimeFunction = std::function<double(double)>;

/// Compiles the configuration-file function syntax, e.g.
/// `lambda t: 1.0 + 0.0*t` or `lambda t: np.sin(np.pi*t)**2`.
///
/// Supported: + - * / ** and unary signs, parentheses, numeric literals,
/// the bound variable, constants pi and e, and the functions sin cos tan
/// arcsin arccos arctan sinh cosh tanh exp log sqrt abs. A `np.`, `numpy.`
/// or `math.` prefix on a name is accepted and ignored. A bare expression
/// without the `lambda <var>:` head is read with variable `t`.
TimeFunction compile_time_function(std::string_view text);

}  // namespace qoc
