#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ddw/expression.hpp"

namespace ddw {

/// Vertical vector field sum_Y X^Y d/dY over field and polymomentum
/// directions only.
struct VerticalVector {
  std::map<Variable, Expression> components;

  Expression operator[](const Variable& v) const {
    auto it = components.find(v);
    return it == components.end() ? Expression{} : it->second;
  }
  void add(const Variable& v, const Expression& e) {
    if (!v.is_vertical()) throw Error("vertical vector component along a non-vertical direction");
    auto& c = components[v];
    c += e;
    if (c.is_zero()) components.erase(v);
  }
  friend bool operator==(const VerticalVector&, const VerticalVector&) = default;
};

/// Exterior form on the polymomentum phase space over spacetime. Every term
/// is coeff * dY_1 ^ ... ^ dY_k ^ dx^I: vertical factors first, in strictly
/// increasing Variable order, then a horizontal basis element dx^I stored as
/// a bit mask (ascending indices).
class Form {
 public:
  using Vertical = std::vector<Variable>;
  using Mask = std::uint32_t;
  using Key = std::pair<Vertical, Mask>;

  Form() = default;
  explicit Form(Spacetime st) : st_(std::move(st)) {}

  static Form scalar(const Spacetime& st, const Expression& c) {
    Form f(st);
    f.add_term({}, 0, c);
    return f;
  }
  static Form dx(const Spacetime& st, int mu) {
    Form f(st);
    f.add_term({}, bit(mu), 1);
    return f;
  }
  /// dx^{i1} ^ ... ^ dx^{ik} in the given order.
  static Form dx(const Spacetime& st, const std::vector<int>& idx) {
    Form f = scalar(st, 1);
    for (int i : idx) f = wedge(f, dx(st, i));
    return f;
  }
  static Form vol(const Spacetime& st) {
    Form f(st);
    f.add_term({}, full(st.n), 1);
    return f;
  }
  /// upsilon_alpha = d/dx^alpha -| vol = (-1)^alpha dx^0 ^ .. (no dx^alpha) .. ^ dx^{n-1}
  static Form upsilon(const Spacetime& st, int alpha) {
    Form f(st);
    f.add_term({}, full(st.n) & ~bit(alpha), (alpha % 2 == 0) ? 1 : -1);
    return f;
  }
  /// Horizontal (n-1)-form sum_alpha comps[alpha] upsilon_alpha.
  static Form from_upsilon(const Spacetime& st, const std::vector<Expression>& comps) {
    Form f(st);
    for (int a = 0; a < st.n; ++a) f += upsilon(st, a).times(comps.at(static_cast<std::size_t>(a)));
    return f;
  }
  /// The vertical 1-form dY.
  static Form differential(const Spacetime& st, const Variable& y) {
    if (!y.is_vertical()) throw Error("vertical differential of a non-vertical symbol");
    Form f(st);
    f.add_term({y}, 0, 1);
    return f;
  }

  const Spacetime& spacetime() const { return st_; }
  const std::map<Key, Expression>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_horizontal() const {
    for (const auto& [k, c] : terms_)
      if (!k.first.empty()) return false;
    return true;
  }

  /// Total degree; -1 for the zero form. Throws on mixed degree.
  int degree() const {
    int d = -1;
    for (const auto& [k, c] : terms_) {
      int t = static_cast<int>(k.first.size()) + std::popcount(k.second);
      if (d >= 0 && t != d) throw Error("form of mixed degree");
      d = t;
    }
    return d;
  }

  Form times(const Expression& e) const {
    Form r(st_);
    for (const auto& [k, c] : terms_) r.add_term(k.first, k.second, c * e);
    return r;
  }
  Form map_coefficients(const std::function<Expression(const Expression&)>& f) const {
    Form r(st_);
    for (const auto& [k, c] : terms_) r.add_term(k.first, k.second, f(c));
    return r;
  }

  Form& operator+=(const Form& o) {
    adopt(o);
    for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, c);
    return *this;
  }
  Form& operator-=(const Form& o) {
    adopt(o);
    for (const auto& [k, c] : o.terms_) add_term(k.first, k.second, -c);
    return *this;
  }
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  Form operator-() const { return times(-1); }
  friend bool operator==(const Form& a, const Form& b) { return a.terms_ == b.terms_; }

  /// Coefficients F^alpha of a horizontal (n-1)-form F = F^alpha upsilon_alpha.
  std::vector<Expression> upsilon_components() const {
    std::vector<Expression> out(static_cast<std::size_t>(st_.n));
    for (const auto& [k, c] : terms_) {
      if (!k.first.empty() || std::popcount(k.second) != st_.n - 1)
        throw Error("expected a horizontal (n-1)-form");
      int alpha = std::countr_zero(~k.second & full(st_.n));
      out[static_cast<std::size_t>(alpha)] += (alpha % 2 == 0) ? c : -c;
    }
    return out;
  }

  /// Coefficient N_alpha of a horizontal 1-form N = N_alpha dx^alpha.
  std::vector<Expression> dx_components() const {
    std::vector<Expression> out(static_cast<std::size_t>(st_.n));
    for (const auto& [k, c] : terms_) {
      if (!k.first.empty() || std::popcount(k.second) != 1) throw Error("expected a horizontal 1-form");
      out[static_cast<std::size_t>(std::countr_zero(k.second))] += c;
    }
    return out;
  }

  friend Form wedge(const Form& a, const Form& b);
  friend Form interior_product(const VerticalVector& x, const Form& f);
  friend Form vertical_differential(const Form& f);
  friend Form hodge_with(const Form& a, const std::vector<int>& signature);

  // sign of dx^I ^ dx^J relative to the sorted union; 0 if they overlap
  static int mask_sign(Mask a, Mask b) {
    if (a & b) return 0;
    int swaps = 0;
    for (Mask m = b; m; m &= m - 1) {
      int j = std::countr_zero(m);
      swaps += std::popcount(a >> (j + 1));
    }
    return swaps % 2 == 0 ? 1 : -1;
  }
  static Mask bit(int mu) { return Mask{1} << mu; }
  static Mask full(int n) { return n >= 32 ? ~Mask{0} : (Mask{1} << n) - 1; }

  void add_term(Vertical v, Mask h, const Expression& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(Key{std::move(v), h}, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

 private:
  void adopt(const Form& o) {
    if (st_.n == 0 && st_.signature.empty()) st_ = o.st_;
  }

  Spacetime st_;
  std::map<Key, Expression> terms_;
};

namespace detail {
// merge two strictly sorted vertical lists; returns sign, or 0 on repetition
inline int merge_vertical(const Form::Vertical& a, const Form::Vertical& b, Form::Vertical& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  int swaps = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i] < b[j])) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j] < a[i]) {
      swaps += static_cast<int>(a.size() - i);  // b[j] jumps over the rest of a
      out.push_back(b[j++]);
    } else {
      return 0;
    }
  }
  return swaps % 2 == 0 ? 1 : -1;
}
}  // namespace detail

/// Graded-commutative exterior product.
inline Form wedge(const Form& a, const Form& b) {
  Form r(a.st_.n ? a.st_ : b.st_);
  Form::Vertical v;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) {
      int hs = Form::mask_sign(ka.second, kb.second);
      if (hs == 0) continue;
      int vs = detail::merge_vertical(ka.first, kb.first, v);
      if (vs == 0) continue;
      // move the horizontal part of a past the vertical part of b
      int cross = (std::popcount(ka.second) * static_cast<int>(kb.first.size())) % 2 == 0 ? 1 : -1;
      r.add_term(v, ka.second | kb.second, (ca * cb).scaled(Rational(hs * vs * cross)));
    }
  return r;
}

/// Interior product with a vertical vector: a graded derivation that
/// contracts each vertical factor with its alternating sign.
inline Form interior_product(const VerticalVector& x, const Form& f) {
  Form r(f.st_);
  for (const auto& [k, c] : f.terms_) {
    const auto& v = k.first;
    for (std::size_t i = 0; i < v.size(); ++i) {
      Expression xi = x[v[i]];
      if (xi.is_zero()) continue;
      Form::Vertical rest;
      for (std::size_t j = 0; j < v.size(); ++j)
        if (j != i) rest.push_back(v[j]);
      r.add_term(rest, k.second, (c * xi).scaled(Rational(i % 2 == 0 ? 1 : -1)));
    }
  }
  return r;
}

/// Exterior differential along field and polymomentum directions:
/// d(c V) = sum_Y dc/dY dY ^ V.
inline Form vertical_differential(const Form& f) {
  Form r(f.st_);
  Form::Vertical v;
  for (const auto& [k, c] : f.terms_) {
    for (const auto& y : c.variables()) {
      if (!y.is_vertical()) continue;
      int s = detail::merge_vertical({y}, k.first, v);
      if (s == 0) continue;
      r.add_term(v, k.second, c.derivative(y).scaled(Rational(s)));
    }
  }
  return r;
}

/// Hodge star of a horizontal form for a diagonal metric with the given
/// signature: *dx^I = (prod_{i in I} eta^{ii}) eps(I, J) dx^J, J the
/// complement of I. Gives *1 = vol and alpha ^ *beta = <alpha, beta> vol.
inline Form hodge_with(const Form& a, const std::vector<int>& signature) {
  const int n = static_cast<int>(signature.size());
  Form r(a.st_);
  for (const auto& [k, c] : a.terms_) {
    if (!k.first.empty()) throw Error("Hodge star of a form with vertical factors");
    Form::Mask comp = Form::full(n) & ~k.second;
    int s = Form::mask_sign(k.second, comp);
    for (Form::Mask m = k.second; m; m &= m - 1) s *= signature[static_cast<std::size_t>(std::countr_zero(m))];
    r.add_term({}, comp, c.scaled(Rational(s)));
  }
  return r;
}

inline Form hodge(const Form& a) { return hodge_with(a, a.spacetime().signature); }

/// Inverse of hodge_with: on m-forms, *^{-1} = (-1)^{m(n-m)} sgn(det) *.
inline Form hodge_inverse_with(const Form& a, const std::vector<int>& signature) {
  const int n = static_cast<int>(signature.size());
  int det = 1;
  for (int e : signature) det *= e;
  Form r = hodge_with(a, signature);
  Form out(a.spacetime());
  for (const auto& [k, c] : r.terms()) {
    int m = n - std::popcount(k.second);  // degree of the input term
    int s = ((m * (n - m)) % 2 == 0 ? 1 : -1) * det;
    out.add_term(k.first, k.second, c.scaled(Rational(s)));
  }
  return out;
}

inline Form hodge_inverse(const Form& a) { return hodge_inverse_with(a, a.spacetime().signature); }

/// A . B = *^{-1}(*A ^ *B), with the star induced by the orientation alone,
/// so that dx^alpha . upsilon_mu = delta^alpha_mu and upsilon_alpha . vol =
/// upsilon_alpha in every signature.
inline Form bullet(const Form& a, const Form& b) {
  if (!a.is_horizontal() || !b.is_horizontal()) throw Error("bullet product of a form with vertical factors");
  const int n = a.spacetime().n ? a.spacetime().n : b.spacetime().n;
  std::vector<int> plain(static_cast<std::size_t>(n), 1);
  return hodge_inverse_with(wedge(hodge_with(a, plain), hodge_with(b, plain)), plain);
}

}  // namespace ddw
