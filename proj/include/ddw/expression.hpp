#pragma once

#include <functional>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ddw/rational.hpp"
#include "ddw/variable.hpp"

namespace ddw {

/// Product of variables with positive exponents, sorted by Variable order.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(const Variable& v, int power = 1) {
    if (power > 0) factors_.emplace_back(v, power);
  }

  const std::vector<std::pair<Variable, int>>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }
  int degree() const {
    int d = 0;
    for (const auto& [v, p] : factors_) d += p;
    return d;
  }
  int power_of(const Variable& v) const {
    for (const auto& [w, p] : factors_)
      if (w == v) return p;
    return 0;
  }

  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial r;
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() || j != b.factors_.end()) {
      if (j == b.factors_.end() || (i != a.factors_.end() && i->first < j->first)) {
        r.factors_.push_back(*i++);
      } else if (i == a.factors_.end() || j->first < i->first) {
        r.factors_.push_back(*j++);
      } else {
        r.factors_.emplace_back(i->first, i->second + j->second);
        ++i;
        ++j;
      }
    }
    return r;
  }

  /// This monomial with one power of `v` removed; `v` must divide it.
  Monomial without_one(const Variable& v) const {
    Monomial r;
    for (const auto& [w, p] : factors_) {
      if (w == v) {
        if (p > 1) r.factors_.emplace_back(w, p - 1);
      } else {
        r.factors_.emplace_back(w, p);
      }
    }
    return r;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend auto operator<=>(const Monomial& a, const Monomial& b) {
    // graded: lower degree first, then lexicographic on factors
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    return a.factors_ <=> b.factors_;
  }

 private:
  std::vector<std::pair<Variable, int>> factors_;
};

/// Multivariate polynomial with exact rational coefficients. Zero
/// coefficients are never stored, so structural equality is mathematical
/// equality.
class Expression {
 public:
  using Terms = std::map<Monomial, Rational>;

  Expression() = default;
  Expression(Rational c) {  // NOLINT(implicit)
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
  }
  Expression(std::int64_t c) : Expression(Rational(c)) {}  // NOLINT(implicit)
  Expression(int c) : Expression(Rational(c)) {}           // NOLINT(implicit)
  Expression(const Variable& v) { terms_.emplace(Monomial(v), Rational(1)); }  // NOLINT(implicit)

  static Expression term(const Monomial& m, Rational c) {
    Expression e;
    if (!c.is_zero()) e.terms_.emplace(m, c);
    return e;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }
  Rational constant_value() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
  }
  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  Expression& operator+=(const Expression& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Expression& operator-=(const Expression& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Expression operator+(Expression a, const Expression& b) { return a += b; }
  friend Expression operator-(Expression a, const Expression& b) { return a -= b; }
  Expression operator-() const {
    Expression r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }
  friend Expression operator*(const Expression& a, const Expression& b) {
    Expression r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  Expression& operator*=(const Expression& o) { return *this = *this * o; }
  Expression scaled(const Rational& s) const {
    Expression r;
    if (s.is_zero()) return r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, s * c);
    return r;
  }

  Expression pow(int k) const {
    if (k < 0) throw Error("negative power of a polynomial");
    Expression r(1);
    for (int i = 0; i < k; ++i) r *= *this;
    return r;
  }

  friend bool operator==(const Expression&, const Expression&) = default;
  friend bool operator<(const Expression& a, const Expression& b) { return a.terms_ < b.terms_; }

  std::set<Variable> variables() const {
    std::set<Variable> vs;
    for (const auto& [m, c] : terms_)
      for (const auto& [v, p] : m.factors()) vs.insert(v);
    return vs;
  }
  bool depends_on(const Variable& v) const {
    for (const auto& [m, c] : terms_)
      if (m.power_of(v) > 0) return true;
    return false;
  }
  bool depends_on_any(const std::function<bool(const Variable&)>& pred) const {
    for (const auto& [m, c] : terms_)
      for (const auto& [v, p] : m.factors())
        if (pred(v)) return true;
    return false;
  }

  /// Total degree counted only over variables matching `pred`.
  int degree_in(const std::function<bool(const Variable&)>& pred) const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
      int k = 0;
      for (const auto& [v, p] : m.factors())
        if (pred(v)) k += p;
      d = std::max(d, k);
    }
    return d;
  }

  /// Exact partial derivative.
  Expression derivative(const Variable& v) const {
    Expression r;
    for (const auto& [m, c] : terms_) {
      int p = m.power_of(v);
      if (p > 0) r.add_term(m.without_one(v), c * Rational(p));
    }
    return r;
  }

  /// Simultaneous substitution of variables by expressions.
  Expression substitute(const std::map<Variable, Expression>& rules) const {
    if (rules.empty()) return *this;
    Expression r;
    for (const auto& [m, c] : terms_) {
      Expression t(c);
      Monomial kept;
      for (const auto& [v, p] : m.factors()) {
        auto it = rules.find(v);
        if (it == rules.end()) {
          kept = kept * Monomial(v, p);
        } else {
          for (int i = 0; i < p; ++i) t *= it->second;
        }
      }
      r += t * Expression::term(kept, Rational(1));
    }
    return r;
  }
  Expression substitute(const Variable& v, const Expression& by) const { return substitute({{v, by}}); }

  /// Apply a map to every variable, each occurrence replaced by map(v).
  Expression map_variables(const std::function<Expression(const Variable&)>& f) const {
    std::map<Variable, Expression> rules;
    for (const auto& v : variables()) rules.emplace(v, f(v));
    return substitute(rules);
  }

  /// Split into coefficient expressions of monomials in the `pred` variables.
  /// E.g. with pred = is-velocity: L = sum_m coeff_m(fields) * m(velocities).
  std::map<Monomial, Expression> collect(const std::function<bool(const Variable&)>& pred) const {
    std::map<Monomial, Expression> out;
    for (const auto& [m, c] : terms_) {
      Monomial sel;
      Monomial rest;
      for (const auto& [v, p] : m.factors()) {
        if (pred(v))
          sel = sel * Monomial(v, p);
        else
          rest = rest * Monomial(v, p);
      }
      out[sel] += Expression::term(rest, c);
    }
    for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
  }

  double evaluate(const std::function<double(const Variable&)>& value) const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) {
      double t = c.to_double();
      for (const auto& [v, p] : m.factors()) {
        double x = value(v);
        for (int i = 0; i < p; ++i) t *= x;
      }
      s += t;
    }
    return s;
  }

 private:
  void add_term(const Monomial& m, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Terms terms_;
};

/// Total spacetime derivative d_mu e. Fields and their first jets,
/// polymomenta and coordinates are differentiated; anything else throws.
inline Expression total_derivative(const Expression& e, int mu) {
  Expression out;
  for (const auto& v : e.variables()) {
    Variable dv;
    switch (v.kind) {
      case VarKind::Coordinate:
        if (v.deriv == mu) out += e.derivative(v);
        continue;
      case VarKind::Field:
      case VarKind::Momentum:
        dv = Variable::jet(v, mu);
        break;
      case VarKind::Jet:
        if (v.slot >= 0) throw Error("second derivative of a polymomentum");
        dv = Variable::jet2(v.base_field(), v.deriv, mu);
        break;
      default:
        throw Error("spacetime derivative of " + v.name + " is not supported");
    }
    out += e.derivative(v) * Expression(dv);
  }
  return out;
}

}  // namespace ddw
