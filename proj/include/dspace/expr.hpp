#pragma once

// Arithmetic expressions for computed dimensions: sibling DIs, + - * /,
// parentheses and decimal literals. Evaluated only at ingest.

#include <cctype>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dspace/error.hpp"
#include "dspace/text.hpp"

namespace dspace {

class Expression {
 public:
  using Lookup = std::function<std::optional<double>(const std::string&)>;

  static Expression parse(std::string_view src) {
    Parser p{src, 0};
    Expression e;
    e.root_ = p.parse_sum();
    p.skip_ws();
    if (p.pos != src.size()) p.error("unexpected character");
    e.source_ = std::string(src);
    return e;
  }

  /// nullopt when an operand is undefined or a division by zero occurs.
  [[nodiscard]] std::optional<double> evaluate(const Lookup& lookup) const { return eval(*root_, lookup); }

  [[nodiscard]] std::vector<std::string> identifiers() const {
    std::vector<std::string> out;
    collect(*root_, out);
    return out;
  }

  [[nodiscard]] const std::string& source() const noexcept { return source_; }

 private:
  struct Node {
    char op = 0;  // 0: literal, 'i': identifier, '+', '-', '*', '/', 'n': negate
    double value = 0.0;
    std::string name;
    std::unique_ptr<Node> lhs, rhs;
  };

  struct Parser {
    std::string_view src;
    std::size_t pos;

    [[noreturn]] void error(const std::string& what) const {
      throw ParseError("expression: " + what, 1, pos + 1);
    }
    void skip_ws() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool eat(char c) {
      skip_ws();
      if (pos < src.size() && src[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    std::unique_ptr<Node> parse_sum() {
      auto lhs = parse_product();
      for (;;) {
        char op = 0;
        if (eat('+')) op = '+';
        else if (eat('-')) op = '-';
        else return lhs;
        auto n = std::make_unique<Node>();
        n->op = op;
        n->lhs = std::move(lhs);
        n->rhs = parse_product();
        lhs = std::move(n);
      }
    }
    std::unique_ptr<Node> parse_product() {
      auto lhs = parse_unary();
      for (;;) {
        char op = 0;
        if (eat('*')) op = '*';
        else if (eat('/')) op = '/';
        else return lhs;
        auto n = std::make_unique<Node>();
        n->op = op;
        n->lhs = std::move(lhs);
        n->rhs = parse_unary();
        lhs = std::move(n);
      }
    }
    std::unique_ptr<Node> parse_unary() {
      if (eat('-')) {
        auto n = std::make_unique<Node>();
        n->op = 'n';
        n->lhs = parse_unary();
        return n;
      }
      return parse_atom();
    }
    std::unique_ptr<Node> parse_atom() {
      skip_ws();
      if (eat('(')) {
        auto inner = parse_sum();
        if (!eat(')')) error("expected ')'");
        return inner;
      }
      if (pos >= src.size()) error("unexpected end");
      const char c = src[pos];
      auto n = std::make_unique<Node>();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const std::size_t start = pos;
        while (pos < src.size() && (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '.')) ++pos;
        auto v = text::parse_double(src.substr(start, pos - start));
        if (!v) error("malformed number");
        n->op = 0;
        n->value = *v;
        return n;
      }
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_' || src[pos] == '-')) {
          ++pos;
        }
        n->op = 'i';
        n->name = std::string(src.substr(start, pos - start));
        return n;
      }
      error(std::string("unexpected character '") + c + "'");
    }
  };

  static std::optional<double> eval(const Node& n, const Lookup& lookup) {
    switch (n.op) {
      case 0: return n.value;
      case 'i': return lookup(n.name);
      case 'n': {
        auto v = eval(*n.lhs, lookup);
        if (!v) return std::nullopt;
        return -*v;
      }
      default: break;
    }
    auto a = eval(*n.lhs, lookup);
    auto b = eval(*n.rhs, lookup);
    if (!a || !b) return std::nullopt;
    switch (n.op) {
      case '+': return *a + *b;
      case '-': return *a - *b;
      case '*': return *a * *b;
      case '/':
        if (*b == 0.0) return std::nullopt;
        return *a / *b;
      default: return std::nullopt;
    }
  }

  static void collect(const Node& n, std::vector<std::string>& out) {
    if (n.op == 'i') out.push_back(n.name);
    if (n.lhs) collect(*n.lhs, out);
    if (n.rhs) collect(*n.rhs, out);
  }

  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace dspace
