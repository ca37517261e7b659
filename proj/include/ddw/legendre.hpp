#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ddw/form.hpp"
#include "ddw/linalg.hpp"
#include "ddw/model.hpp"

namespace ddw {

struct ModelError : Error {
  using Error::Error;
};

/// p^mu_a -> dL/d(d_mu y^a), one entry per field component and spacetime index.
struct PolymomentumMap {
  std::map<Variable, Expression> entries;
};

enum class ConstraintClass { Unclassified, FirstClass, SecondClass };

/// C_a = C^alpha_a upsilon_alpha for a field component whose polymomenta
/// are all fixed by the Legendre map.
struct PrimaryConstraint {
  Variable field;
  Form form;
  ConstraintClass cls = ConstraintClass::Unclassified;
};

/// Primary constraints plus the constraint surface, represented as
/// triangular elimination rules and an orthogonal projector on the
/// polymomenta left constrained only by homogeneous linear relations.
struct ConstraintSet {
  Spacetime spacetime;
  std::vector<PrimaryConstraint> primaries;
  /// Relations among surviving polymomenta that follow from the primaries
  /// (or, for a regular-up-to-gauge model, the only constraints).
  std::vector<Expression> derived;
  /// Eliminated variable -> expression in surviving variables.
  std::map<Variable, Expression> rules;
  /// Polymomentum -> its projection onto the kernel of `derived`.
  std::map<Variable, Expression> projector;

  bool empty() const { return primaries.empty() && derived.empty() && rules.empty(); }
  std::set<Variable> eliminated() const {
    std::set<Variable> s;
    for (const auto& [v, e] : rules) s.insert(v);
    return s;
  }
};

namespace detail {

/// Affine Legendre map p = W v + g(y).
struct LegendreData {
  std::vector<Variable> velocities;  // canonical order, aligned with momenta
  std::vector<Variable> momenta;
  linalg::Matrix hessian;            // W
  std::vector<Expression> offset;    // g
};

inline LegendreData legendre_data(const FieldModel& model) {
  model.validate();
  if (model.lagrangian.degree_in(is_velocity) > 2)
    throw ModelError("Lagrangian of velocity degree > 2 is not supported");
  LegendreData d;
  for (const auto& y : model.field_components())
    for (int mu = 0; mu < model.spacetime.n; ++mu) {
      d.velocities.push_back(Variable::jet(y, mu));
      d.momenta.push_back(Variable::momentum(y, mu));
    }
  const std::size_t m = d.velocities.size();
  d.hessian = linalg::Matrix(m, m);
  d.offset.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    Expression di = model.lagrangian.derivative(d.velocities[i]);
    Expression rest = di;
    for (std::size_t j = 0; j < m; ++j) {
      Expression w = di.derivative(d.velocities[j]);
      if (w.is_zero()) continue;
      if (!w.is_constant())
        throw ModelError("velocity Hessian depends on fields; only constant Hessians are supported");
      d.hessian(i, j) = w.constant_value();
      rest -= w * Expression(d.velocities[j]);
    }
    d.offset[i] = rest;
  }
  return d;
}

// Pivot priority classes for the constraint elimination.
enum class Column : int { AuxMomentum = 0, AuxField = 1, Momentum = 2, Field = 3, Other = 4 };

}  // namespace detail

inline PolymomentumMap polymomenta(const FieldModel& model) {
  model.validate();
  PolymomentumMap pm;
  for (const auto& y : model.field_components())
    for (int mu = 0; mu < model.spacetime.n; ++mu)
      pm.entries.emplace(Variable::momentum(y, mu), model.lagrangian.derivative(Variable::jet(y, mu)));
  return pm;
}

/// Weak reduction: elimination rules, then the polymomentum projector.
/// Jets and dS/dy symbols are reduced through the same linear maps.
inline Expression weak_reduce(const Expression& e, const ConstraintSet& cs) {
  if (cs.rules.empty() && cs.projector.empty()) return e;
  auto jet_of = [](const Expression& x, int mu) {
    return x.map_variables([mu](const Variable& v) {
      return (v.is_field() || v.is_momentum()) ? Expression(Variable::jet(v, mu)) : Expression(v);
    });
  };
  auto linear = [](const Expression& x) { return x.degree() <= 1; };

  std::map<Variable, Expression> step1;
  for (const auto& v : e.variables()) {
    if (auto it = cs.rules.find(v); it != cs.rules.end()) {
      step1.emplace(v, it->second);
    } else if (v.kind == VarKind::Jet) {
      auto jt = cs.rules.find(v.jet_base());
      if (jt != cs.rules.end() && linear(jt->second)) step1.emplace(v, jet_of(jt->second - Expression(jt->second.constant_value()), v.deriv));
    }
  }
  Expression r = e.substitute(step1);
  if (cs.projector.empty()) return r;

  std::map<Variable, Expression> step2;
  for (const auto& v : r.variables()) {
    if (v.is_momentum()) {
      if (auto it = cs.projector.find(v); it != cs.projector.end()) step2.emplace(v, it->second);
    } else if (v.kind == VarKind::Jet && v.slot >= 0) {
      if (auto it = cs.projector.find(v.jet_base()); it != cs.projector.end())
        step2.emplace(v, jet_of(it->second, v.deriv));
    } else if (v.kind == VarKind::SGradField) {
      auto p = Variable::momentum(v.base_field(), v.slot);
      if (auto it = cs.projector.find(p); it != cs.projector.end())
        step2.emplace(v, it->second.map_variables([](const Variable& w) {
          return Expression(Variable::s_grad_field(w.base_field(), w.slot));
        }));
    }
  }
  return r.substitute(step2);
}

inline Form weak_reduce(const Form& f, const ConstraintSet& cs) {
  return f.map_coefficients([&](const Expression& c) { return weak_reduce(c, cs); });
}

/// Solve the affine Legendre map for the velocities and collect every
/// relation between polymomenta and fields that survives as a constraint.
inline ConstraintSet primary_constraints(const FieldModel& model) {
  using detail::Column;
  const auto d = detail::legendre_data(model);
  const int n = model.spacetime.n;
  ConstraintSet cs;
  cs.spacetime = model.spacetime;

  // constraint functions p - g along the left null space of W
  auto null = linalg::nullspace(d.hessian.transpose());
  if (null.empty()) return cs;
  std::vector<Expression> phis;
  for (const auto& lam : null) {
    Expression phi;
    for (std::size_t i = 0; i < lam.size(); ++i)
      if (!lam[i].is_zero()) phi += (Expression(d.momenta[i]) - d.offset[i]).scaled(lam[i]);
    phis.push_back(phi);
  }

  // fully constrained components give primary (n-1)-forms
  auto comps = model.field_components();
  std::set<Variable> auxiliary;  // no velocity of the field enters L
  for (std::size_t c = 0; c < comps.size(); ++c) {
    bool all_zero = true;
    bool no_velocity = true;
    for (int mu = 0; mu < n; ++mu) {
      std::size_t i = c * static_cast<std::size_t>(n) + static_cast<std::size_t>(mu);
      for (std::size_t j = 0; j < d.velocities.size(); ++j)
        if (!d.hessian(i, j).is_zero()) all_zero = false;
      if (model.lagrangian.depends_on(d.velocities[i])) no_velocity = false;
    }
    if (no_velocity) auxiliary.insert(comps[c]);
    if (!all_zero) continue;
    std::vector<Expression> cf;
    for (int mu = 0; mu < n; ++mu) {
      std::size_t i = c * static_cast<std::size_t>(n) + static_cast<std::size_t>(mu);
      cf.push_back(Expression(d.momenta[i]) - d.offset[i]);
    }
    cs.primaries.push_back({comps[c], Form::from_upsilon(model.spacetime, cf), ConstraintClass::Unclassified});
  }

  // order linear atoms by elimination priority
  std::map<Monomial, std::pair<Column, Variable>> atom_class;
  std::set<Monomial> atoms;
  for (const auto& phi : phis)
    for (const auto& [mono, c] : phi.terms())
      if (!mono.is_one()) atoms.insert(mono);
  std::vector<std::pair<std::tuple<int, int, Variable>, Monomial>> order;
  for (const auto& mono : atoms) {
    Column col = Column::Other;
    Variable v;
    if (mono.degree() == 1) {
      v = mono.factors().front().first;
      bool aux = auxiliary.count(v.base_field()) > 0;
      if (v.is_momentum()) col = aux ? Column::AuxMomentum : Column::Momentum;
      else if (v.is_field()) col = aux ? Column::AuxField : Column::Field;
    }
    // surviving momenta are pivoted in reverse canonical order
    int tiebreak = (col == Column::Momentum) ? -1 : 1;
    order.push_back({{static_cast<int>(col), tiebreak, v}, mono});
    atom_class[mono] = {col, v};
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    const auto& [ca, ta, va] = a.first;
    const auto& [cb, tb, vb] = b.first;
    if (ca != cb) return ca < cb;
    if (ca == static_cast<int>(Column::Other)) return a.second < b.second;
    return ta < 0 ? vb < va : va < vb;
  });

  const std::size_t ncols = order.size() + 1;  // last column: constant term
  linalg::Matrix sys(phis.size(), ncols);
  std::map<Monomial, std::size_t> col_of;
  for (std::size_t j = 0; j < order.size(); ++j) col_of[order[j].second] = j;
  for (std::size_t i = 0; i < phis.size(); ++i)
    for (const auto& [mono, c] : phis[i].terms()) sys(i, mono.is_one() ? ncols - 1 : col_of.at(mono)) = c;
  auto pivots = linalg::rref(sys);

  std::vector<Expression> residual_rows;
  for (std::size_t r = 0; r < pivots.size(); ++r) {
    if (pivots[r] == ncols - 1) throw ModelError("inconsistent constraints");
    const auto& [col, var] = atom_class.at(order[pivots[r]].second);
    Expression rest;
    for (std::size_t j = pivots[r] + 1; j < ncols; ++j) {
      if (sys(r, j).is_zero()) continue;
      Expression atom = (j == ncols - 1) ? Expression(1) : Expression::term(order[j].second, Rational(1));
      rest += atom.scaled(sys(r, j));
    }
    switch (col) {
      case Column::AuxMomentum:
      case Column::AuxField:
        cs.rules.emplace(var, -rest);
        break;
      case Column::Momentum: {
        bool homogeneous = !rest.depends_on_any([](const Variable& v) { return !v.is_momentum(); }) &&
                           rest.degree() <= 1 && rest.constant_value().is_zero();
        if (homogeneous)
          residual_rows.push_back(Expression(var) + rest);
        else
          cs.rules.emplace(var, -rest);
        break;
      }
      case Column::Field:
      case Column::Other:
        throw ModelError("constraint relating fields alone is not supported");
    }
  }

  // projector onto the kernel of the residual relations
  if (!residual_rows.empty()) {
    std::set<Variable> span;
    for (const auto& row : residual_rows)
      for (const auto& v : row.variables()) span.insert(v);
    std::vector<Variable> ps(span.begin(), span.end());
    linalg::Matrix rm(residual_rows.size(), ps.size());
    for (std::size_t i = 0; i < residual_rows.size(); ++i)
      for (std::size_t j = 0; j < ps.size(); ++j) rm(i, j) = residual_rows[i].derivative(ps[j]).constant_value();
    linalg::Matrix proj = linalg::Matrix::identity(ps.size()) - linalg::pseudo_inverse(rm) * rm;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Expression e;
      for (std::size_t j = 0; j < ps.size(); ++j)
        if (!proj(i, j).is_zero()) e += Expression(ps[j]).scaled(proj(i, j));
      cs.projector.emplace(ps[i], e);
    }
    for (auto& row : residual_rows) cs.derived.push_back(row);
    // rule right-hand sides live on the projected subspace as well
    for (auto& [v, rhs] : cs.rules) rhs = weak_reduce(rhs, ConstraintSet{cs.spacetime, {}, {}, {}, cs.projector});
  }
  return cs;
}

/// The DDW Hamiltonian before and after restriction to the constraint surface.
struct Hamiltonian {
  Expression raw;      // p.v - L with invertible velocities eliminated
  Expression on_surface;  // weak normal form of raw
};

inline Hamiltonian ddw_hamiltonian(const FieldModel& model, const ConstraintSet& cs) {
  const auto d = detail::legendre_data(model);
  const std::size_t m = d.velocities.size();
  // v* = W^+ (p - g): any particular solution gives the same H on the surface
  linalg::Matrix winv = linalg::pseudo_inverse(d.hessian);
  std::map<Variable, Expression> vstar;
  for (std::size_t i = 0; i < m; ++i) {
    Expression vi;
    for (std::size_t j = 0; j < m; ++j)
      if (!winv(i, j).is_zero()) vi += (Expression(d.momenta[j]) - d.offset[j]).scaled(winv(i, j));
    vstar.emplace(d.velocities[i], vi);
  }
  Expression h;
  for (std::size_t i = 0; i < m; ++i) h += Expression(d.momenta[i]) * vstar.at(d.velocities[i]);
  h -= model.lagrangian.substitute(vstar);
  if (h.depends_on_any(is_velocity)) throw ModelError("residual velocity in the DDW Hamiltonian");
  return {h, weak_reduce(h, cs)};
}

}  // namespace ddw
