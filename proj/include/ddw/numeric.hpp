#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ddw/parser.hpp"
#include "ddw/pipeline.hpp"

namespace ddw {

struct VerificationError : Error {
  using Error::Error;
};

/// Real-valued expression tree over Variables with sin, cos and exp.
class NumExpr {
 public:
  enum class Op { Const, Var, Add, Mul, Div, Pow, Sin, Cos, Exp };

  NumExpr() : NumExpr(0.0) {}
  NumExpr(double c) : node_(std::make_shared<Node>(Node{Op::Const, c, {}, 0, {}})) {}
  static NumExpr var(const Variable& v) { return NumExpr(std::make_shared<Node>(Node{Op::Var, 0, v, 0, {}})); }

  bool is_const() const { return node_->op == Op::Const; }
  bool is_const(double c) const { return is_const() && node_->value == c; }
  double value() const { return node_->value; }

  friend NumExpr operator+(const NumExpr& a, const NumExpr& b) {
    if (a.is_const(0)) return b;
    if (b.is_const(0)) return a;
    if (a.is_const() && b.is_const()) return a.value() + b.value();
    return make(Op::Add, {a, b});
  }
  friend NumExpr operator*(const NumExpr& a, const NumExpr& b) {
    if (a.is_const(0) || b.is_const(0)) return 0.0;
    if (a.is_const(1)) return b;
    if (b.is_const(1)) return a;
    if (a.is_const() && b.is_const()) return a.value() * b.value();
    return make(Op::Mul, {a, b});
  }
  friend NumExpr operator-(const NumExpr& a, const NumExpr& b) { return a + NumExpr(-1.0) * b; }
  friend NumExpr operator/(const NumExpr& a, const NumExpr& b) {
    if (a.is_const(0)) return 0.0;
    if (b.is_const(1)) return a;
    return make(Op::Div, {a, b});
  }
  NumExpr pow(int k) const {
    if (k == 0) return 1.0;
    if (k == 1) return *this;
    NumExpr r = make(Op::Pow, {*this});
    std::const_pointer_cast<Node>(r.node_)->exponent = k;
    return r;
  }
  static NumExpr func(const std::string& f, const NumExpr& a) {
    return make(f == "sin" ? Op::Sin : f == "cos" ? Op::Cos : Op::Exp, {a});
  }

  double eval(const std::function<double(const Variable&)>& env) const {
    const Node& n = *node_;
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Var: return env(n.var);
      case Op::Add: return n.args[0].eval(env) + n.args[1].eval(env);
      case Op::Mul: return n.args[0].eval(env) * n.args[1].eval(env);
      case Op::Div: return n.args[0].eval(env) / n.args[1].eval(env);
      case Op::Pow: return std::pow(n.args[0].eval(env), n.exponent);
      case Op::Sin: return std::sin(n.args[0].eval(env));
      case Op::Cos: return std::cos(n.args[0].eval(env));
      case Op::Exp: return std::exp(n.args[0].eval(env));
    }
    return 0;
  }

  /// Exact symbolic partial derivative.
  NumExpr derivative(const Variable& v) const {
    const Node& n = *node_;
    switch (n.op) {
      case Op::Const: return 0.0;
      case Op::Var: return n.var == v ? 1.0 : 0.0;
      case Op::Add: return n.args[0].derivative(v) + n.args[1].derivative(v);
      case Op::Mul: return n.args[0].derivative(v) * n.args[1] + n.args[0] * n.args[1].derivative(v);
      case Op::Div: {
        const auto& a = n.args[0];
        const auto& b = n.args[1];
        return (a.derivative(v) * b - a * b.derivative(v)) / b.pow(2);
      }
      case Op::Pow: return NumExpr(static_cast<double>(n.exponent)) * n.args[0].pow(n.exponent - 1) * n.args[0].derivative(v);
      case Op::Sin: return func("cos", n.args[0]) * n.args[0].derivative(v);
      case Op::Cos: return NumExpr(-1.0) * func("sin", n.args[0]) * n.args[0].derivative(v);
      case Op::Exp: return *this * n.args[0].derivative(v);
    }
    return 0.0;
  }

  bool depends_on(const std::function<bool(const Variable&)>& pred) const {
    const Node& n = *node_;
    if (n.op == Op::Var) return pred(n.var);
    for (const auto& a : n.args)
      if (a.depends_on(pred)) return true;
    return false;
  }

 private:
  struct Node {
    Op op;
    double value;
    Variable var;
    int exponent;
    std::vector<NumExpr> args;
  };
  explicit NumExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static NumExpr make(Op op, std::vector<NumExpr> args) {
    return NumExpr(std::make_shared<Node>(Node{op, 0, {}, 0, std::move(args)}));
  }
  std::shared_ptr<const Node> node_;
};

namespace dsl {

struct Real {
  using Value = NumExpr;
  static Value number(const Node& n) { return n.is_float ? n.real : n.exact.to_double(); }
  static Value variable(const Variable& v) {
    if (v.kind == VarKind::Jet) throw Error("derivatives are not allowed in solution files");
    return NumExpr::var(v);
  }
  static Value scale(const Value& v, int s) { return s == 1 ? v : NumExpr(static_cast<double>(s)) * v; }
  static Value add(const Value& a, const Value& b) { return a + b; }
  static Value sub(const Value& a, const Value& b) { return a - b; }
  static Value mul(const Value& a, const Value& b) { return a * b; }
  static Value div(const Value& a, const Value& b, const Node&) { return a / b; }
  static Value pow(const Value& a, int k) { return k >= 0 ? a.pow(k) : NumExpr(1.0) / a.pow(-k); }
  static Value func(const std::string& f, const Value& a, const Node&) { return NumExpr::func(f, a); }
  static Value zero() { return 0.0; }
  static bool is_zero(const Value& v) { return v.is_const(0); }
  static Value total_derivative(const Value&, int, const Node& at) {
    Parser::fail_at("derivatives are not allowed in solution files", at.line, at.col);
  }
};

}  // namespace dsl

/// Closed-form candidate solution: field components and optional polymomenta
/// as functions of x, and S^mu as functions of x and the fields.
struct Solution {
  std::map<Variable, NumExpr> fields;
  std::map<Variable, NumExpr> momenta;
  std::map<int, NumExpr> s;
};

/// Statements `A_{2} = ...;`, `p(A_{2},0) = ...;` and `S(0) = ...;`.
inline Solution parse_solution(const std::string& src, const FieldModel& m) {
  using namespace dsl;
  std::map<std::string, MacroDef> none;
  Parser ps(lex(src), Scope{&m, &none, true});
  Evaluator<Real> ev(m, none);
  Solution sol;
  while (!ps.at_end()) {
    const Token head = ps.peek();
    enum { FieldTarget, MomentumTarget, STarget } target;
    Variable var;
    int s_index = -1;
    std::map<std::string, int> env;
    if (head.kind == Tok::Ident && head.text == "S" && ps.peek(1).text == "(") {
      ps.next();
      ps.next();
      s_index = ps.integer();
      if (s_index < 0 || s_index >= m.spacetime.n) Parser::fail_at("S index out of range", head.line, head.col);
      ps.expect(")");
      target = STarget;
    } else {
      Node lhs = ps.primary();
      analyze(lhs);
      if (!lhs.free.empty() || !lhs.contracted.empty()) Parser::fail_at("assignment target needs concrete indices", head.line, head.col);
      bool is_p = lhs.kind == Node::Call && lhs.name == "p";
      if (!(lhs.kind == Node::Symbol || is_p)) Parser::fail_at("expected a field component, p(...) or S(...)", head.line, head.col);
      const Node& sym = is_p ? lhs.args[0] : lhs;
      auto [sign, comp] = ev.component(sym, env);
      if (sign != 1) Parser::fail_at("assign the canonical component", head.line, head.col);
      var = is_p ? Variable::momentum(comp, ev.index_value(lhs.idx[0], env)) : comp;
      target = is_p ? MomentumTarget : FieldTarget;
    }
    ps.expect("=");
    Node rhs = ps.expr();
    ps.expect(";");
    analyze(rhs);
    if (!rhs.free.empty()) Parser::fail_at("free index in a solution expression", rhs.line, rhs.col);
    NumExpr value;
    try {
      value = ev.eval(rhs, env);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), rhs.line, rhs.col);
    }
    auto uses = [&](auto pred) { return value.depends_on(pred); };
    if (target != STarget && uses([](const Variable& v) { return v.kind != VarKind::Coordinate; }))
      Parser::fail_at("field and momentum solutions may depend on coordinates only", rhs.line, rhs.col);
    if (target == STarget && uses([](const Variable& v) { return v.kind != VarKind::Coordinate && v.kind != VarKind::Field; }))
      Parser::fail_at("S may depend on coordinates and fields only", rhs.line, rhs.col);
    bool dup = false;
    if (target == FieldTarget) dup = !sol.fields.emplace(var, value).second;
    if (target == MomentumTarget) dup = !sol.momenta.emplace(var, value).second;
    if (target == STarget) dup = !sol.s.emplace(s_index, value).second;
    if (dup) Parser::fail_at("assigned twice", head.line, head.col);
  }
  return sol;
}

struct VerifyOptions {
  double step = 1e-4;
  double tolerance = 1e-6;
  int samples = 100;
  unsigned seed = 42;
  double coordinate_range = 3.0;  // x^mu uniform in [-range, range]
  double field_range = 1.0;       // sampled field values for the HJ check
};

struct Residual {
  std::string group;  // "field" or "hamilton-jacobi"
  std::string label;
  double max_abs = 0;
};

struct ResidualReport {
  std::vector<Residual> entries;
  double tolerance = 0;

  double max_residual() const {
    double m = 0;
    for (const auto& e : entries) m = std::max(m, e.max_abs);
    return m;
  }
  bool ok() const { return max_residual() <= tolerance; }
};

namespace detail {

class SampleEnv {
 public:
  SampleEnv(const DerivedSystem& ds, const Solution& sol, const VerifyOptions& o,
            const std::map<Variable, Expression>& derived_p)
      : ds_(ds), sol_(sol), o_(o), derived_p_(derived_p) {}

  std::vector<double> x;
  std::map<Variable, double> y;  // field values for S evaluations

  double field(const Variable& a, const std::vector<double>& at) const {
    auto it = sol_.fields.find(a);
    if (it == sol_.fields.end()) throw VerificationError("missing solution function for " + describe(a));
    return it->second.eval([&](const Variable& v) { return coord(v, at); });
  }

  double momentum(const Variable& p, const std::vector<double>& at) const {
    if (auto it = sol_.momenta.find(p); it != sol_.momenta.end())
      return it->second.eval([&](const Variable& v) { return coord(v, at); });
    auto jt = derived_p_.find(p);
    if (jt == derived_p_.end()) return 0.0;  // eliminated or constrained away
    return jt->second.evaluate([&](const Variable& v) { return on_solution(v, at); });
  }

  /// Value of a variable on the field solution at a spacetime point.
  double on_solution(const Variable& v, const std::vector<double>& at) const {
    switch (v.kind) {
      case VarKind::Coordinate: return at[static_cast<std::size_t>(v.deriv)];
      case VarKind::Field: return field(v, at);
      case VarKind::Momentum: return momentum(v, at);
      case VarKind::Jet:
        return central(at, v.deriv, [&](const std::vector<double>& z) {
          return v.slot >= 0 ? momentum(v.jet_base(), z) : field(v.base_field(), z);
        });
      case VarKind::SGradField: return s_grad(v, at, on_solution_fields(at));
      case VarKind::SGradX: return s_grad_x(v, at, on_solution_fields(at));
      case VarKind::Jet2:
        return central(at, v.deriv, [&](const std::vector<double>& z) {
          return central(z, v.slot, [&](const std::vector<double>& w) { return field(v.base_field(), w); });
        });
    }
    return 0;
  }

  /// Value of a variable in the HJ setting: S-symbols at (x, sampled y).
  double on_sample(const Variable& v) const {
    switch (v.kind) {
      case VarKind::Coordinate: return x[static_cast<std::size_t>(v.deriv)];
      case VarKind::Field: return y.at(v);
      case VarKind::SGradField: return s_grad(v, x, y);
      case VarKind::SGradX: return s_grad_x(v, x, y);
      default: throw VerificationError("unexpected variable in a Hamilton-Jacobi equation");
    }
  }

 private:
  static double coord(const Variable& v, const std::vector<double>& at) {
    if (v.kind != VarKind::Coordinate) throw VerificationError("solution function depends on a non-coordinate");
    return at[static_cast<std::size_t>(v.deriv)];
  }

  std::map<Variable, double> on_solution_fields(const std::vector<double>& at) const {
    std::map<Variable, double> f;
    for (const auto& a : ds_.model.field_components())
      if (sol_.fields.count(a)) f[a] = field(a, at);
    return f;
  }

  const NumExpr& s_of(int alpha) const {
    auto it = sol_.s.find(alpha);
    if (it == sol_.s.end()) throw VerificationError("missing solution function for S(" + std::to_string(alpha) + ")");
    return it->second;
  }

  static double s_eval(const NumExpr& e, const std::vector<double>& at, const std::map<Variable, double>& f) {
    return e.eval([&](const Variable& v) {
      if (v.kind == VarKind::Coordinate) return at[static_cast<std::size_t>(v.deriv)];
      auto it = f.find(v);
      if (it == f.end()) throw VerificationError("S depends on a field without a value: " + describe(v));
      return it->second;
    });
  }

  double s_grad(const Variable& v, const std::vector<double>& at, const std::map<Variable, double>& f) const {
    return s_eval(s_of(v.slot).derivative(v.base_field()), at, f);
  }

  double s_grad_x(const Variable& v, const std::vector<double>& at, const std::map<Variable, double>& f) const {
    const NumExpr& s = s_of(v.slot);
    return central(at, v.deriv, [&](const std::vector<double>& z) { return s_eval(s, z, f); });
  }

  template <class F>
  double central(const std::vector<double>& at, int mu, F&& f) const {
    auto plus = at;
    auto minus = at;
    plus[static_cast<std::size_t>(mu)] += o_.step;
    minus[static_cast<std::size_t>(mu)] -= o_.step;
    return (f(plus) - f(minus)) / (2 * o_.step);
  }

  const DerivedSystem& ds_;
  const Solution& sol_;
  const VerifyOptions& o_;
  const std::map<Variable, Expression>& derived_p_;
};

}  // namespace detail

/// Max absolute residual of every emitted equation over random sample points.
/// Field equations are checked when the solution gives every surviving field;
/// the Hamilton-Jacobi system when it gives every S^mu. Embedding conditions
/// need both.
inline ResidualReport verify_numeric(const DerivedSystem& ds, const Solution& sol, const VerifyOptions& o = {}) {
  ResidualReport rep;
  rep.tolerance = o.tolerance;
  const int n = ds.model.spacetime.n;
  const auto& r = ds.reduced;
  bool have_fields = !r.surviving_fields.empty();
  for (const auto& a : r.surviving_fields) have_fields = have_fields && sol.fields.count(a);
  bool have_s = true;
  for (int mu = 0; mu < n; ++mu) have_s = have_s && sol.s.count(mu);
  if (!have_fields && sol.s.empty())
    throw VerificationError("missing solution function: give every surviving field or every S component");
  if (!have_s && !sol.s.empty()) throw VerificationError("missing solution function: S needs all components");
  if (!have_fields && !sol.fields.empty()) throw VerificationError("missing solution function: incomplete field solution");

  std::map<Variable, Expression> derived_p;
  if (have_fields) derived_p = physical_momenta(r);
  detail::SampleEnv env(ds, sol, o, derived_p);

  struct Check {
    std::string group;
    const Equation* eq;
    bool on_solution;
  };
  std::vector<Check> checks;
  if (have_fields) {
    const auto& f = ds.field_equations;
    for (const auto* set : {&f.momentum_equations, &f.velocity_equations, &f.divergence, &f.embedding})
      for (const auto& e : *set) checks.push_back({"field", &e, true});
  }
  if (have_s) {
    checks.push_back({"hamilton-jacobi", &ds.hj.hj_equation, false});
    for (const auto& e : ds.hj.constraint_conditions) checks.push_back({"hamilton-jacobi", &e, false});
    if (have_fields)
      for (const auto& e : ds.hj.embedding_conditions) checks.push_back({"hamilton-jacobi", &e, true});
  }
  for (const auto& c : checks) rep.entries.push_back({c.group, c.eq->label, 0});

  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> ux(-o.coordinate_range, o.coordinate_range);
  std::uniform_real_distribution<double> uy(-o.field_range, o.field_range);
  const auto comps = ds.model.field_components();
  for (int s = 0; s < o.samples; ++s) {
    env.x.assign(static_cast<std::size_t>(n), 0);
    for (auto& xi : env.x) xi = ux(rng);
    env.y.clear();
    for (const auto& a : comps) env.y[a] = uy(rng);
    for (std::size_t i = 0; i < checks.size(); ++i) {
      Expression res = checks[i].eq->residual();
      double v = checks[i].on_solution ? res.evaluate([&](const Variable& var) { return env.on_solution(var, env.x); })
                                       : res.evaluate([&](const Variable& var) { return env.on_sample(var); });
      if (!std::isfinite(v)) throw VerificationError("non-finite residual in " + checks[i].eq->label);
      rep.entries[i].max_abs = std::max(rep.entries[i].max_abs, std::abs(v));
    }
  }
  return rep;
}

}  // namespace ddw
