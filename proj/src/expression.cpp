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

#include "qoc/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <vector>

namespace qoc {

namespace {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { number, variable, unary_minus, add, sub, mul, div, pow, call } kind;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  NodePtr lhs, rhs;

  double eval(double t) const {
    switch (kind) {
      case Kind::number: return value;
      case Kind::variable: return t;
      case Kind::unary_minus: return -lhs->eval(t);
      case Kind::add: return lhs->eval(t) + rhs->eval(t);
      case Kind::sub: return lhs->eval(t) - rhs->eval(t);
      case Kind::mul: return lhs->eval(t) * rhs->eval(t);
      case Kind::div: return lhs->eval(t) / rhs->eval(t);
      case Kind::pow: return std::pow(lhs->eval(t), rhs->eval(t));
      case Kind::call: return fn(lhs->eval(t));
    }
    return 0.0;
  }
};

NodePtr make(Node::Kind kind, NodePtr lhs = {}, NodePtr rhs = {}) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::number;
  n->value = v;
  return n;
}

const std::map<std::string, double (*)(double), std::less<>>& functions() {
  static const std::map<std::string, double (*)(double), std::less<>> table = {
      {"sin", [](double x) { return std::sin(x); }},
      {"cos", [](double x) { return std::cos(x); }},
      {"tan", [](double x) { return std::tan(x); }},
      {"arcsin", [](double x) { return std::asin(x); }},
      {"asin", [](double x) { return std::asin(x); }},
      {"arccos", [](double x) { return std::acos(x); }},
      {"acos", [](double x) { return std::acos(x); }},
      {"arctan", [](double x) { return std::atan(x); }},
      {"atan", [](double x) { return std::atan(x); }},
      {"sinh", [](double x) { return std::sinh(x); }},
      {"cosh", [](double x) { return std::cosh(x); }},
      {"tanh", [](double x) { return std::tanh(x); }},
      {"exp", [](double x) { return std::exp(x); }},
      {"log", [](double x) { return std::log(x); }},
      {"sqrt", [](double x) { return std::sqrt(x); }},
      {"abs", [](double x) { return std::fabs(x); }},
      {"fabs", [](double x) { return std::fabs(x); }},
  };
  return table;
}

class Parser {
 public:
  Parser(std::string_view text, std::string variable) : text_(text), var_(std::move(variable)) {}

  NodePtr parse_all() {
    NodePtr n = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError("expression '" + std::string(text_) + "': " + what + " at offset " +
                          std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  NodePtr parse_sum() {
    NodePtr n = parse_product();
    for (;;) {
      if (accept("+")) n = make(Node::Kind::add, n, parse_product());
      else if (accept("-")) n = make(Node::Kind::sub, n, parse_product());
      else return n;
    }
  }

  NodePtr parse_product() {
    NodePtr n = parse_unary();
    for (;;) {
      skip_ws();
      if (text_.substr(pos_, 2) == "**") return n;
      if (accept("*")) n = make(Node::Kind::mul, n, parse_unary());
      else if (accept("/")) n = make(Node::Kind::div, n, parse_unary());
      else return n;
    }
  }

  // Python precedence: -x**2 == -(x**2), and the exponent may carry a sign.
  NodePtr parse_unary() {
    if (accept("-")) return make(Node::Kind::unary_minus, parse_unary());
    if (accept("+")) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept("**")) return make(Node::Kind::pow, base, parse_unary());
    return base;
  }

  std::string read_name() {
    std::string name;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            text_[pos_] == '.'))
      name.push_back(text_[pos_++]);
    for (std::string_view prefix : {"numpy.", "np.", "math."})
      if (name.starts_with(prefix)) name.erase(0, prefix.size());
    return name;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = parse_sum();
      if (!accept(")")) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
              text_[end] == 'e' || text_[end] == 'E' ||
              ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
               (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
        ++end;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + end, v);
      if (ec != std::errc() || ptr != text_.data() + end) fail("bad numeric literal");
      pos_ = end;
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::string name = read_name();
      if (name == var_) return make(Node::Kind::variable);
      if (name == "pi") return number(std::numbers::pi);
      if (name == "e") return number(std::numbers::e);
      auto it = functions().find(name);
      if (it == functions().end()) fail("unknown name '" + name + "'");
      if (!accept("(")) fail("expected '(' after " + name);
      NodePtr arg = parse_sum();
      if (!accept(")")) fail("expected ')'");
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::call;
      n->fn = it->second;
      n->lhs = std::move(arg);
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  std::string var_;
  std::size_t pos_ = 0;
};

}  // namespace

TimeFunction compile_time_function(std::string_view text) {
  std::string variable = "t";
  std::string_view body = text;
  auto first = body.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos) body.remove_prefix(first);
  if (body.starts_with("lambda")) {
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) throw ExpressionError("lambda without ':'");
    std::string_view head = body.substr(6, colon - 6);
    const auto b = head.find_first_not_of(" \t");
    const auto e = head.find_last_not_of(" \t");
    if (b == std::string_view::npos) throw ExpressionError("lambda without a variable name");
    variable = std::string(head.substr(b, e - b + 1));
    body = body.substr(colon + 1);
  }
  NodePtr root = Parser(body, variable).parse_all();
  return [root](double t) { return root->eval(t); };
}

}  // namespace qoc
