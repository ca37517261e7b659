#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ddw/reduction.hpp"

namespace ddw {

/// lhs = rhs; jets d(v, mu) stand for spacetime derivatives.
struct Equation {
  std::string label;
  Expression lhs;
  Expression rhs;

  Expression residual() const { return lhs - rhs; }
  bool trivial() const { return lhs == rhs; }
};

/// Rescaling that takes a projected equation to its simplified form.
struct FactorStep {
  std::string label;
  Rational projected_coefficient;  // leading lhs coefficient before rescaling
  Rational scale;
  bool closed = true;  // every lhs coefficient is +-1 after rescaling
};

struct FieldEquationSet {
  std::vector<Equation> momentum_equations;  // d.(Pi p)_a = -dH*/dy^a
  std::vector<Equation> velocity_equations;  // Pi(d y) = Pi(dH*/dp)
  std::vector<Equation> divergence;          // d_alpha p^alpha_a = -dH*/dy^a
  std::vector<Equation> embedding;           // rescaled velocity equations
  std::vector<FactorStep> factor_trail;

  bool trail_closes() const {
    for (const auto& f : factor_trail)
      if (!f.closed) return false;
    return true;
  }
};

struct HJSystem {
  Equation hj_equation;                         // d_mu S^mu + H*(p -> dS/dy) = 0
  Expression hamiltonian_term;                  // H* after the substitution
  std::vector<Equation> constraint_conditions;  // residual relations on dS/dy
  std::vector<Equation> embedding_conditions;   // Pi dS/dy = physical polymomenta
};

namespace detail {

inline std::string index_label(const Variable& y, int alpha) { return describe(y) + "," + std::to_string(alpha); }

/// Pi applied to a family indexed by polymomenta: out_i = sum_j Pi_ij in_j.
inline Expression project_family(const ReducedSystem& r, const Variable& p,
                                 const std::function<Expression(const Variable&)>& entry) {
  auto it = r.projector.find(p);
  if (it == r.projector.end()) return entry(p);
  Expression out;
  for (const auto& [m, c] : it->second.terms()) out += entry(m.factors().front().first).scaled(c);
  return out;
}

inline Expression to_sgrad(const Expression& e) {
  return e.map_variables([](const Variable& v) {
    return v.is_momentum() ? Expression(Variable::s_grad_field(v.base_field(), v.slot)) : Expression(v);
  });
}

// Drops 0 = 0 and equations that repeat an earlier one up to a sign.
inline void push_unique(std::vector<Equation>& out, Equation e) {
  if (e.trivial()) return;
  for (const auto& o : out) {
    Expression a = o.residual();
    Expression b = e.residual();
    if (a == b || a == b.scaled(Rational(-1))) return;
  }
  out.push_back(std::move(e));
}

}  // namespace detail

inline FieldEquationSet field_equations(const ReducedSystem& r) {
  FieldEquationSet fs;
  const int n = r.spacetime.n;
  const auto& h = r.h_star;
  for (const auto& y : r.surviving_fields) {
    Expression rhs = h.derivative(y).scaled(Rational(-1));
    Expression proj;
    Expression plain;
    for (int a = 0; a < n; ++a) {
      auto p = Variable::momentum(y, a);
      proj += detail::project_family(r, p, [a](const Variable& q) { return Expression(Variable::jet(q, a)); });
      plain += Expression(Variable::jet(p, a));
    }
    fs.momentum_equations.push_back({"momentum " + detail::describe(y), proj, rhs});
    fs.divergence.push_back({"divergence " + detail::describe(y), plain, rhs});
  }
  for (const auto& p : r.surviving_momenta) {
    Expression lhs = detail::project_family(r, p, [](const Variable& q) {
      return Expression(Variable::jet(q.base_field(), q.slot));
    });
    Expression rhs = detail::project_family(r, p, [&](const Variable& q) { return h.derivative(q); });
    detail::push_unique(fs.velocity_equations, {"velocity " + detail::index_label(p.base_field(), p.slot), lhs, rhs});
  }
  for (const auto& e : fs.velocity_equations) {
    const Rational lead = e.lhs.terms().begin()->second;
    const std::string label = "simplified" + e.label.substr(e.label.find(' '));
    FactorStep step{label, lead, Rational(1) / lead, true};
    Equation s{label, e.lhs.scaled(step.scale), e.rhs.scaled(step.scale)};
    for (const auto& [m, c] : s.lhs.terms())
      if (!(c == Rational(1) || c == Rational(-1))) step.closed = false;
    fs.factor_trail.push_back(step);
    fs.embedding.push_back(std::move(s));
  }
  return fs;
}

/// Physical polymomenta from the velocity equations: Pi p = (Pi K Pi)^+ Pi (d y - k0)
/// where dH*/dp = K p + k0(y). Throws if H* is not quadratic in p with constant K.
inline std::map<Variable, Expression> physical_momenta(const ReducedSystem& r) {
  const auto& ps = r.surviving_momenta;
  const std::size_t m = ps.size();
  linalg::Matrix k(m, m);
  std::vector<Expression> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    Expression g = r.h_star.derivative(ps[i]);
    Expression rest = g;
    for (std::size_t j = 0; j < m; ++j) {
      Expression kij = g.derivative(ps[j]);
      if (kij.is_zero()) continue;
      if (!kij.is_constant()) throw Error("Hamiltonian is not quadratic in the polymomenta");
      k(i, j) = kij.constant_value();
      rest -= Expression(ps[j]).scaled(k(i, j));
    }
    if (rest.depends_on_any([](const Variable& v) { return v.is_momentum(); }))
      throw Error("Hamiltonian is not quadratic in the polymomenta");
    rhs[i] = Expression(Variable::jet(ps[i].base_field(), ps[i].slot)) - rest;
  }
  // apply Pi to both sides
  std::map<Variable, std::size_t> at;
  for (std::size_t i = 0; i < m; ++i) at.emplace(ps[i], i);
  linalg::Matrix pi = linalg::Matrix::identity(m);
  for (const auto& [p, e] : r.projector) {
    auto it = at.find(p);
    if (it == at.end()) continue;
    pi(it->second, it->second) = Rational(0);
    for (const auto& [mono, c] : e.terms()) pi(it->second, at.at(mono.factors().front().first)) = c;
  }
  linalg::Matrix kk = linalg::pseudo_inverse(pi * k * pi) * pi;
  std::map<Variable, Expression> out;
  for (std::size_t i = 0; i < m; ++i) {
    Expression e;
    for (std::size_t j = 0; j < m; ++j)
      if (!kk(i, j).is_zero()) e += rhs[j].scaled(kk(i, j));
    out.emplace(ps[i], e);
  }
  return out;
}

inline HJSystem hj_system(const ReducedSystem& r) {
  HJSystem hj;
  const int n = r.spacetime.n;
  Expression div;
  for (int mu = 0; mu < n; ++mu) div += Expression(Variable::s_grad_x(mu, mu));
  hj.hamiltonian_term = detail::to_sgrad(r.h_star);
  hj.hj_equation = {"hamilton-jacobi", div + hj.hamiltonian_term, Expression()};
  for (std::size_t i = 0; i < r.residual_constraints.size(); ++i)
    detail::push_unique(hj.constraint_conditions,
                        {"constraint " + std::to_string(i), detail::to_sgrad(r.residual_constraints[i]), Expression()});
  auto phys = physical_momenta(r);
  for (const auto& p : r.surviving_momenta) {
    Expression lhs = detail::project_family(r, p, [](const Variable& q) {
      return Expression(Variable::s_grad_field(q.base_field(), q.slot));
    });
    detail::push_unique(hj.embedding_conditions,
                        {"embedding " + detail::index_label(p.base_field(), p.slot), lhs, phys.at(p)});
  }
  return hj;
}

/// Residuals of the divergence equations with every polymomentum replaced by
/// its embedding value; jets of polymomenta become second field derivatives.
inline std::vector<Expression> divergence_on_embedding(const FieldEquationSet& fs, const ReducedSystem& r) {
  auto phys = physical_momenta(r);
  std::vector<Expression> out;
  for (const auto& e : fs.divergence) {
    Expression res = e.residual();
    std::map<Variable, Expression> sub;
    for (const auto& v : res.variables()) {
      if (v.is_momentum()) {
        auto it = phys.find(v);
        sub.emplace(v, it == phys.end() ? Expression() : it->second);
      } else if (v.kind == VarKind::Jet && v.slot >= 0) {
        auto it = phys.find(v.jet_base());
        sub.emplace(v, it == phys.end() ? Expression() : total_derivative(it->second, v.deriv));
      }
    }
    out.push_back(res.substitute(sub));
  }
  return out;
}

}  // namespace ddw
