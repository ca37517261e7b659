#pragma once

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddw/model.hpp"

namespace ddw {

/// Syntax or semantic error in a model, solution or equation source.
struct ParseError : Error {
  int line;
  int column;
  ParseError(const std::string& what, int l, int c)
      : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + what), line(l), column(c) {}
};

namespace dsl {

enum class Tok { Ident, Int, Float, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    int l0 = line;
    int c0 = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isalnum(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), l0, c0});
      adv(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool is_float = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        is_float = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_float = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      out.push_back({is_float ? Tok::Float : Tok::Int, src.substr(i, j - i), l0, c0});
      adv(j - i);
      continue;
    }
    if (std::string(";[](){},+-*/^_=\\").find(c) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, c), l0, c0});
      adv(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", l0, c0);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

/// An index slot as written: a concrete value or a summation name.
struct IndexRef {
  std::optional<int> value;
  std::string name;
  bool upper = false;
  int line = 0;
  int col = 0;
};

struct Node {
  enum Kind { Number, Symbol, Call, Add, Sub, Mul, Div, Neg, Pow } kind = Number;
  Rational exact;
  double real = 0;
  bool is_float = false;
  std::string name;
  std::vector<IndexRef> idx;
  std::vector<Node> args;
  int exponent = 1;
  int line = 0;
  int col = 0;
  // filled by analysis: free indices (name, upper) and contracted names
  std::vector<std::pair<std::string, bool>> free;
  std::vector<std::pair<std::string, bool>> contracted;  // (name, needs metric factor)
};

struct MacroDef {
  std::string name;
  std::vector<IndexRef> formals;
  Node body;
};

/// Names that identify declared multiplets and macros while parsing.
struct Scope {
  const FieldModel* model = nullptr;
  const std::map<std::string, MacroDef>* macros = nullptr;
  bool numeric = false;

  std::size_t rank_of(const std::string& name) const {
    if (model)
      if (const auto* m = model->find(name)) return m->rank();
    if (macros)
      if (auto it = macros->find(name); it != macros->end()) return it->second.formals.size();
    return 0;
  }
};

inline bool reserved(const std::string& s) {
  static const std::set<std::string> words{"d", "p", "dS", "dSx", "S", "sin", "cos", "exp", "dim", "signature",
                                           "field", "lagrangian", "define", "up", "down", "antisymmetric",
                                           "symmetric", "none"};
  if (words.count(s)) return true;
  if (s.size() > 1 && s[0] == 'x') {
    for (std::size_t i = 1; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  }
  return false;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, Scope scope) : t_(std::move(toks)), scope_(scope) {}

  const Token& peek(std::size_t k = 0) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }
  bool at(const std::string& p) const { return peek().kind != Tok::End && peek().text == p && peek().kind != Tok::Int; }
  bool at_end() const { return peek().kind == Tok::End; }
  const Token& next() { return t_[pos_ < t_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }
  [[noreturn]] static void fail_at(const std::string& msg, int l, int c) { throw ParseError(msg, l, c); }

  void expect(const std::string& p) {
    if (!at(p)) fail("expected '" + p + "'" + (at_end() ? " before end of input" : " near '" + peek().text + "'"));
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier");
    return next().text;
  }
  int integer() {
    if (peek().kind != Tok::Int) fail("expected integer");
    return std::stoi(next().text);
  }

  Scope& scope() { return scope_; }

  Node expr() {
    Node lhs = term();
    while (at("+") || at("-")) {
      const Token& op = next();
      Node n;
      n.kind = op.text == "+" ? Node::Add : Node::Sub;
      n.line = op.line;
      n.col = op.col;
      n.args.push_back(std::move(lhs));
      n.args.push_back(term());
      lhs = std::move(n);
    }
    return lhs;
  }

  Node term() {
    Node lhs = unary();
    while (at("*") || at("/")) {
      const Token& op = next();
      Node n;
      n.kind = op.text == "*" ? Node::Mul : Node::Div;
      n.line = op.line;
      n.col = op.col;
      n.args.push_back(std::move(lhs));
      n.args.push_back(unary());
      lhs = std::move(n);
    }
    return lhs;
  }

  Node unary() {
    if (at("-")) {
      const Token& op = next();
      Node n;
      n.kind = Node::Neg;
      n.line = op.line;
      n.col = op.col;
      n.args.push_back(unary());
      return n;
    }
    if (at("+")) {
      next();
      return unary();
    }
    return power();
  }

  Node power() {
    Node base = primary();
    if (at("^")) {
      const Token& op = next();
      bool neg = false;
      if (at("-")) {
        next();
        neg = true;
      }
      Node n;
      n.kind = Node::Pow;
      n.line = op.line;
      n.col = op.col;
      n.exponent = integer() * (neg ? -1 : 1);
      if (n.exponent < 0 && !scope_.numeric) fail_at("negative exponent", op.line, op.col);
      n.args.push_back(std::move(base));
      return n;
    }
    return base;
  }

  IndexRef index_item(bool upper) {
    IndexRef r;
    r.upper = upper;
    r.line = peek().line;
    r.col = peek().col;
    if (at("\\")) next();
    if (peek().kind == Tok::Int) {
      r.value = std::stoi(next().text);
    } else if (peek().kind == Tok::Ident) {
      r.name = next().text;
    } else {
      fail("expected index");
    }
    return r;
  }

  /// Index groups after a symbol: _x, ^x, _{x y}, ^{x y}, consumed while slots remain.
  std::vector<IndexRef> index_groups(std::size_t rank) {
    std::vector<IndexRef> out;
    while (out.size() < rank && (at("_") || at("^"))) {
      bool upper = next().text == "^";
      if (at("{")) {
        next();
        while (!at("}")) {
          if (at_end()) fail("unterminated index group");
          out.push_back(index_item(upper));
          if (at(",")) next();
        }
        next();
      } else {
        out.push_back(index_item(upper));
      }
    }
    return out;
  }

  Node symbol_ref() {
    const Token& tk = peek();
    Node n;
    n.kind = Node::Symbol;
    n.line = tk.line;
    n.col = tk.col;
    n.name = ident();
    n.idx = index_groups(scope_.rank_of(n.name));
    return n;
  }

  Node primary() {
    const Token& tk = peek();
    if (tk.kind == Tok::Int || tk.kind == Tok::Float) {
      next();
      Node n;
      n.line = tk.line;
      n.col = tk.col;
      if (tk.kind == Tok::Float) {
        if (!scope_.numeric) fail_at("floating-point literal outside a solution file", tk.line, tk.col);
        n.is_float = true;
        n.real = std::stod(tk.text);
      } else {
        n.exact = Rational(std::stoll(tk.text));
        n.real = std::stod(tk.text);
      }
      return n;
    }
    if (at("(")) {
      next();
      Node e = expr();
      expect(")");
      return e;
    }
    if (tk.kind != Tok::Ident) fail(at_end() ? "unexpected end of input" : "unexpected '" + tk.text + "'");
    const std::string& w = tk.text;
    if ((w == "d" || w == "p" || w == "dS" || w == "dSx" || w == "sin" || w == "cos" || w == "exp") && peek(1).text == "(") {
      Node n;
      n.kind = Node::Call;
      n.name = w;
      n.line = tk.line;
      n.col = tk.col;
      next();
      next();
      if (w == "d") {
        n.args.push_back(expr());
        expect(",");
        n.idx.push_back(index_item(false));
      } else if (w == "p") {
        n.args.push_back(symbol_ref());
        expect(",");
        n.idx.push_back(index_item(true));
      } else if (w == "dS") {
        n.idx.push_back(index_item(true));
        expect(",");
        n.args.push_back(symbol_ref());
      } else if (w == "dSx") {
        n.idx.push_back(index_item(true));
        expect(",");
        n.idx.push_back(index_item(false));
      } else {
        if (!scope_.numeric) fail_at("function '" + w + "' is only available in solution files", tk.line, tk.col);
        n.args.push_back(expr());
      }
      expect(")");
      return n;
    }
    return symbol_ref();
  }

 private:
  std::vector<Token> t_;
  std::size_t pos_ = 0;
  Scope scope_;
};

/// Index bookkeeping: fills free/contracted on every node. A name may occur
/// at most twice within one product; two occurrences contract, with a metric
/// factor when both sit in the same position.
inline void analyze(Node& n, bool in_product = false);

// Leaves of a chain of products form one summation scope.
inline void product_factors(const Node& n, std::vector<const Node*>& out) {
  if (n.kind == Node::Mul) {
    for (const auto& a : n.args) product_factors(a, out);
  } else {
    out.push_back(&n);
  }
}

inline void analyze(Node& n, bool in_product) {
  for (auto& a : n.args) analyze(a, n.kind == Node::Mul);
  if (n.kind == Node::Mul && in_product) return;
  std::vector<std::pair<std::string, bool>> occ;
  std::vector<std::pair<int, int>> where;
  auto add = [&](const std::string& name, bool up, int l, int c) {
    occ.emplace_back(name, up);
    where.emplace_back(l, c);
  };
  auto child_free = [&](const Node& c) {
    for (const auto& [nm, up] : c.free) add(nm, up, c.line, c.col);
  };
  switch (n.kind) {
    case Node::Number:
      break;
    case Node::Symbol:
    case Node::Call:
      for (const auto& a : n.args) child_free(a);
      for (const auto& r : n.idx)
        if (!r.value) add(r.name, r.upper, r.line, r.col);
      if (n.kind == Node::Call && (n.name == "sin" || n.name == "cos" || n.name == "exp") && !n.args[0].free.empty())
        Parser::fail_at("free index inside " + n.name, n.line, n.col);
      break;
    case Node::Add:
    case Node::Sub: {
      auto a = n.args[0].free;
      auto b = n.args[1].free;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) Parser::fail_at("terms of a sum carry different free indices", n.line, n.col);
      n.free = a;
      return;
    }
    case Node::Neg:
      n.free = n.args[0].free;
      return;
    case Node::Mul: {
      std::vector<const Node*> fs;
      product_factors(n, fs);
      for (const auto* f : fs) child_free(*f);
      break;
    }
    case Node::Div:
      if (!n.args[1].free.empty()) Parser::fail_at("free index in a denominator", n.line, n.col);
      n.free = n.args[0].free;
      return;
    case Node::Pow:
      if (!n.args[0].free.empty()) Parser::fail_at("power of an indexed quantity", n.line, n.col);
      return;
  }
  std::map<std::string, std::vector<std::size_t>> by_name;
  for (std::size_t i = 0; i < occ.size(); ++i) by_name[occ[i].first].push_back(i);
  for (const auto& [nm, is] : by_name) {
    if (is.size() > 2)
      Parser::fail_at("index '" + nm + "' repeated more than twice", where[is[2]].first, where[is[2]].second);
    if (is.size() == 2)
      n.contracted.emplace_back(nm, occ[is[0]].second == occ[is[1]].second);
    else
      n.free.push_back(occ[is[0]]);
  }
}

/// Symbolic value algebra: exact Expressions.
struct Exact {
  using Value = Expression;
  static Value number(const Node& n) { return Expression(n.exact); }
  static Value variable(const Variable& v) { return Expression(v); }
  static Value scale(const Value& v, int s) { return v.scaled(Rational(s)); }
  static Value add(const Value& a, const Value& b) { return a + b; }
  static Value sub(const Value& a, const Value& b) { return a - b; }
  static Value mul(const Value& a, const Value& b) { return a * b; }
  static Value div(const Value& a, const Value& b, const Node& at) {
    if (!b.is_constant() || b.is_zero()) Parser::fail_at("division by a non-constant or zero expression", at.line, at.col);
    return a.scaled(Rational(1) / b.constant_value());
  }
  static Value pow(const Value& a, int k) { return a.pow(k); }
  static Value func(const std::string&, const Value&, const Node& at) {
    Parser::fail_at("function outside a solution file", at.line, at.col);
  }
  static Value zero() { return Expression(); }
  static bool is_zero(const Value& v) { return v.is_zero(); }
  static Value total_derivative(const Value& e, int mu, const Node&) { return ddw::total_derivative(e, mu); }
};

/// Evaluator of an analyzed tree for a given value algebra.
template <class Alg>
class Evaluator {
 public:
  using Value = typename Alg::Value;
  Evaluator(const FieldModel& model, const std::map<std::string, MacroDef>& macros) : model_(model), macros_(macros) {}

  Value eval(const Node& n, std::map<std::string, int>& env) const {
    if (n.contracted.empty()) return local(n, env);
    Value acc = Alg::zero();
    const int dim = model_.spacetime.n;
    std::vector<int> vals(n.contracted.size(), 0);
    std::vector<std::optional<int>> saved;
    for (const auto& [nm, m] : n.contracted) {
      auto it = env.find(nm);
      saved.push_back(it == env.end() ? std::nullopt : std::optional<int>(it->second));
    }
    while (true) {
      int sign = 1;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        env[n.contracted[i].first] = vals[i];
        if (n.contracted[i].second) sign *= model_.spacetime.eta(vals[i]);
      }
      acc = Alg::add(acc, Alg::scale(local(n, env), sign));
      std::size_t k = vals.size();
      bool done = true;
      while (k > 0) {
        --k;
        if (++vals[k] < dim) {
          done = false;
          break;
        }
        vals[k] = 0;
      }
      if (done) break;
    }
    for (std::size_t i = 0; i < saved.size(); ++i) {
      if (saved[i])
        env[n.contracted[i].first] = *saved[i];
      else
        env.erase(n.contracted[i].first);
    }
    return acc;
  }

  int index_value(const IndexRef& r, const std::map<std::string, int>& env) const {
    int v;
    if (r.value) {
      v = *r.value;
    } else {
      auto it = env.find(r.name);
      if (it == env.end()) Parser::fail_at("free index '" + r.name + "'", r.line, r.col);
      v = it->second;
    }
    if (v < 0 || v >= model_.spacetime.n) Parser::fail_at("index value out of range", r.line, r.col);
    return v;
  }

  /// Signed field component for a symbol node, or nullopt-equivalent sign 0.
  std::pair<int, Variable> component(const Node& s, std::map<std::string, int>& env) const {
    const Multiplet* m = model_.find(s.name);
    if (!m) Parser::fail_at("undeclared identifier '" + s.name + "'", s.line, s.col);
    if (s.idx.size() != m->rank())
      Parser::fail_at("'" + s.name + "' expects " + std::to_string(m->rank()) + " indices, got " + std::to_string(s.idx.size()),
                      s.line, s.col);
    std::vector<int> vals;
    int sign = 1;
    for (std::size_t i = 0; i < s.idx.size(); ++i) {
      int v = index_value(s.idx[i], env);
      vals.push_back(v);
      bool declared_up = m->positions[i] == IndexPosition::Upper;
      if (declared_up != s.idx[i].upper) sign *= model_.spacetime.eta(v);
    }
    auto [cs, canon] = m->canonical(vals);
    return {sign * cs, Variable::field(m->name, canon)};
  }

  Value local(const Node& n, std::map<std::string, int>& env) const {
    switch (n.kind) {
      case Node::Number:
        return Alg::number(n);
      case Node::Add:
        return Alg::add(eval(n.args[0], env), eval(n.args[1], env));
      case Node::Sub:
        return Alg::sub(eval(n.args[0], env), eval(n.args[1], env));
      case Node::Mul: {
        Value a = eval(n.args[0], env);
        if (Alg::is_zero(a)) return a;
        return Alg::mul(a, eval(n.args[1], env));
      }
      case Node::Div:
        return Alg::div(eval(n.args[0], env), eval(n.args[1], env), n);
      case Node::Neg:
        return Alg::scale(eval(n.args[0], env), -1);
      case Node::Pow:
        return Alg::pow(eval(n.args[0], env), n.exponent);
      case Node::Symbol:
        return symbol(n, env);
      case Node::Call:
        return call(n, env);
    }
    return Alg::zero();
  }

 private:
  Value symbol(const Node& n, std::map<std::string, int>& env) const {
    if (auto it = macros_.find(n.name); it != macros_.end()) {
      const MacroDef& md = it->second;
      if (n.idx.size() != md.formals.size())
        Parser::fail_at("'" + n.name + "' expects " + std::to_string(md.formals.size()) + " indices", n.line, n.col);
      std::map<std::string, int> inner;
      int sign = 1;
      for (std::size_t i = 0; i < n.idx.size(); ++i) {
        int v = index_value(n.idx[i], env);
        inner[md.formals[i].name] = v;
        if (md.formals[i].upper != n.idx[i].upper) sign *= model_.spacetime.eta(v);
      }
      return Alg::scale(eval(md.body, inner), sign);
    }
    if (!model_.find(n.name)) {
      if (reserved(n.name) && n.name[0] == 'x' && n.idx.empty()) {
        int mu = std::stoi(n.name.substr(1));
        if (mu >= model_.spacetime.n) Parser::fail_at("coordinate index out of range", n.line, n.col);
        return Alg::variable(Variable::coordinate(mu));
      }
      Parser::fail_at("undeclared identifier '" + n.name + "'", n.line, n.col);
    }
    auto [sign, v] = component(n, env);
    if (sign == 0) return Alg::zero();
    return Alg::scale(Alg::variable(v), sign);
  }

  Value call(const Node& n, std::map<std::string, int>& env) const {
    if (n.name == "d") {
      const Node& x = n.args[0];
      int mu = index_value(n.idx[0], env);
      // jets of components and polymomenta stay atomic
      if (x.kind == Node::Symbol && x.contracted.empty() && model_.find(x.name)) {
        auto [sign, v] = component(x, env);
        if (sign == 0) return Alg::zero();
        return Alg::scale(Alg::variable(Variable::jet(v, mu)), sign);
      }
      if (x.kind == Node::Call && x.name == "p" && x.contracted.empty()) {
        auto [sign, v] = component(x.args[0], env);
        if (sign == 0) return Alg::zero();
        return Alg::scale(Alg::variable(Variable::jet(Variable::momentum(v, index_value(x.idx[0], env)), mu)), sign);
      }
      return Alg::total_derivative(eval(x, env), mu, n);
    }
    if (n.name == "p" || n.name == "dS") {
      const Node& s = n.args[0];
      if (s.kind != Node::Symbol) Parser::fail_at("expected a field component", s.line, s.col);
      auto [sign, v] = component(s, env);
      if (sign == 0) return Alg::zero();
      int a = index_value(n.idx[0], env);
      return Alg::scale(Alg::variable(n.name == "p" ? Variable::momentum(v, a) : Variable::s_grad_field(v, a)), sign);
    }
    if (n.name == "dSx") return Alg::variable(Variable::s_grad_x(index_value(n.idx[0], env), index_value(n.idx[1], env)));
    return Alg::func(n.name, eval(n.args[0], env), n);
  }

  const FieldModel& model_;
  const std::map<std::string, MacroDef>& macros_;
};

inline void parse_field_decl(Parser& ps, FieldModel& m) {
  const Token& tk = ps.peek();
  Multiplet mp;
  mp.name = ps.ident();
  if (reserved(mp.name)) Parser::fail_at("'" + mp.name + "' is a reserved name", tk.line, tk.col);
  if (m.find(mp.name)) Parser::fail_at("field '" + mp.name + "' declared twice", tk.line, tk.col);
  if (ps.at("[")) {
    ps.next();
    while (true) {
      std::string w = ps.ident();
      if (w == "up")
        mp.positions.push_back(IndexPosition::Upper);
      else if (w == "down")
        mp.positions.push_back(IndexPosition::Lower);
      else
        ps.fail("expected 'up' or 'down'");
      if (ps.at(",")) {
        ps.next();
        continue;
      }
      ps.expect("]");
      break;
    }
  }
  if (ps.peek().kind == Tok::Ident) {
    const Token& sy = ps.peek();
    std::string w = ps.ident();
    if (w == "antisymmetric")
      mp.symmetry = Symmetry::Antisymmetric;
    else if (w == "symmetric")
      mp.symmetry = Symmetry::Symmetric;
    else if (w != "none")
      Parser::fail_at("expected 'antisymmetric', 'symmetric' or 'none'", sy.line, sy.col);
    if (mp.symmetry != Symmetry::None) {
      if (mp.rank() < 2) Parser::fail_at("symmetry needs at least two indices", sy.line, sy.col);
      for (auto p : mp.positions)
        if (p != mp.positions.front()) Parser::fail_at("symmetric slots must share one position", sy.line, sy.col);
    }
  }
  ps.expect(";");
  m.multiplets.push_back(std::move(mp));
}

}  // namespace dsl

/// Parses a model source. Statements: dim, signature, field, define, lagrangian.
inline FieldModel parse_model(const std::string& src) {
  using namespace dsl;
  FieldModel m;
  m.spacetime = Spacetime::minkowski(4);
  std::map<std::string, MacroDef> macros;
  Parser ps(lex(src), Scope{&m, &macros, false});
  bool have_lag = false;
  Node lag;
  while (!ps.at_end()) {
    const Token& kw = ps.peek();
    std::string w = ps.ident();
    if (w == "dim") {
      if (have_lag || !m.multiplets.empty()) Parser::fail_at("dim must precede fields", kw.line, kw.col);
      const Token& v = ps.peek();
      int n = ps.integer();
      if (n < 1 || n > 16) Parser::fail_at("dimension must lie in 1..16", v.line, v.col);
      m.spacetime = Spacetime::minkowski(n);
      ps.expect(";");
    } else if (w == "signature") {
      std::vector<int> sig;
      while (ps.at("+") || ps.at("-")) sig.push_back(ps.next().text == "+" ? 1 : -1);
      if (static_cast<int>(sig.size()) != m.spacetime.n)
        ps.fail("signature needs " + std::to_string(m.spacetime.n) + " entries");
      m.spacetime.signature = sig;
      ps.expect(";");
    } else if (w == "field") {
      parse_field_decl(ps, m);
    } else if (w == "define") {
      MacroDef md;
      const Token& nt = ps.peek();
      md.name = ps.ident();
      if (reserved(md.name) || m.find(md.name) || macros.count(md.name))
        Parser::fail_at("cannot define '" + md.name + "'", nt.line, nt.col);
      md.formals = ps.index_groups(64);
      for (const auto& f : md.formals)
        if (f.value) Parser::fail_at("macro parameters must be names", f.line, f.col);
      ps.expect("=");
      md.body = ps.expr();
      ps.expect(";");
      analyze(md.body);
      auto fr = md.body.free;
      std::vector<std::pair<std::string, bool>> want;
      for (const auto& f : md.formals) want.emplace_back(f.name, f.upper);
      std::sort(fr.begin(), fr.end());
      std::sort(want.begin(), want.end());
      if (fr != want) Parser::fail_at("free indices of the body do not match the parameters", nt.line, nt.col);
      macros.emplace(md.name, std::move(md));
    } else if (w == "lagrangian") {
      if (have_lag) Parser::fail_at("second lagrangian statement", kw.line, kw.col);
      lag = ps.expr();
      ps.expect(";");
      analyze(lag);
      if (!lag.free.empty()) Parser::fail_at("free index '" + lag.free.front().first + "' in the Lagrangian", lag.line, lag.col);
      have_lag = true;
    } else {
      Parser::fail_at("unknown statement '" + w + "'", kw.line, kw.col);
    }
  }
  if (!have_lag) ps.fail("missing lagrangian statement");
  Evaluator<Exact> ev(m, macros);
  std::map<std::string, int> env;
  try {
    m.lagrangian = ev.eval(lag, env);
    m.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), lag.line, lag.col);
  }
  return m;
}

/// Parses `lhs = rhs;` statements over the variables of a model.
inline std::vector<std::pair<Expression, Expression>> parse_equations(const std::string& src, const FieldModel& m) {
  using namespace dsl;
  std::map<std::string, MacroDef> none;
  Parser ps(lex(src), Scope{&m, &none, false});
  Evaluator<Exact> ev(m, none);
  std::vector<std::pair<Expression, Expression>> out;
  while (!ps.at_end()) {
    Node l = ps.expr();
    ps.expect("=");
    Node r = ps.expr();
    ps.expect(";");
    analyze(l);
    analyze(r);
    if (!l.free.empty() || !r.free.empty()) Parser::fail_at("free index in an equation", l.line, l.col);
    std::map<std::string, int> env;
    out.emplace_back(ev.eval(l, env), ev.eval(r, env));
  }
  return out;
}

/// Parses a single expression over the variables of a model.
inline Expression parse_expression(const std::string& src, const FieldModel& m) {
  using namespace dsl;
  std::map<std::string, MacroDef> none;
  Parser ps(lex(src), Scope{&m, &none, false});
  Node e = ps.expr();
  if (!ps.at_end()) ps.fail("unexpected '" + ps.peek().text + "'");
  analyze(e);
  if (!e.free.empty()) Parser::fail_at("free index '" + e.free.front().first + "'", e.line, e.col);
  std::map<std::string, int> env;
  return Evaluator<Exact>(m, none).eval(e, env);
}

}  // namespace ddw
