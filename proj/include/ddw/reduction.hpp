#pragma once

#include <vector>

#include "ddw/brackets.hpp"

namespace ddw {

struct FirstClassPresent : Error {
  using Error::Error;
};

/// C~1_{UV} = N_{alpha,UV} dx^alpha, same labels as the bracket matrix.
struct PseudoinverseMatrix {
  std::vector<Variable> labels;
  std::vector<std::vector<Form>> entries;

  std::size_t size() const { return labels.size(); }
  const Form& operator()(std::size_t u, std::size_t v) const { return entries[u][v]; }
};

/// (A . B ^ C)_{UX} = sum_{V,W} A_UV . (B_VW ^ C_WX); the wedge binds first.
inline std::vector<std::vector<Form>> compose(const std::vector<std::vector<Form>>& a,
                                              const std::vector<std::vector<Form>>& b,
                                              const std::vector<std::vector<Form>>& c, const Spacetime& st) {
  const std::size_t k = a.size();
  std::vector<std::vector<Form>> out(k, std::vector<Form>(k, Form(st)));
  for (std::size_t w = 0; w < k; ++w)
    for (std::size_t x = 0; x < k; ++x) {
      if (c[w][x].is_zero()) continue;
      for (std::size_t v = 0; v < k; ++v) {
        if (b[v][w].is_zero()) continue;
        Form bc = wedge(b[v][w], c[w][x]);
        if (bc.is_zero()) continue;
        for (std::size_t u = 0; u < k; ++u)
          if (!a[u][v].is_zero()) out[u][x] += bullet(a[u][v], bc);
      }
    }
  return out;
}

namespace detail {

inline std::vector<std::vector<std::vector<Rational>>> constant_upsilon_components(const BracketMatrix& m, int n) {
  const std::size_t k = m.size();
  std::vector<std::vector<std::vector<Rational>>> c(
      static_cast<std::size_t>(n), std::vector<std::vector<Rational>>(k, std::vector<Rational>(k)));
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) {
      auto comps = m(u, v).upsilon_components();
      for (int a = 0; a < n; ++a) {
        const auto& e = comps[static_cast<std::size_t>(a)];
        if (!e.is_constant()) throw NoSolution("constraint matrix entry with non-constant coefficient");
        c[static_cast<std::size_t>(a)][u][v] = e.constant_value();
      }
    }
  return c;
}

}  // namespace detail

/// Minimal-norm solution of C . C~1 ^ C = C for a constant form-valued
/// constraint matrix. The relation reads sum_alpha C^alpha (N C) = C^alpha
/// with (N C)_{VX} = sum_{W,beta} N_{beta,VW} c^beta_{WX}.
inline PseudoinverseMatrix pseudoinverse(const BracketMatrix& m, const Spacetime& st) {
  const int n = st.n;
  const std::size_t k = m.size();
  PseudoinverseMatrix p;
  p.labels = m.labels;
  p.entries.assign(k, std::vector<Form>(k, Form(st)));
  if (k == 0) return p;
  auto c = detail::constant_upsilon_components(m, n);
  auto unknown = [&](int beta, std::size_t v, std::size_t w) {
    return (static_cast<std::size_t>(beta) * k + v) * k + w;
  };
  std::vector<linalg::SparseRow> rows;
  std::vector<Rational> rhs;
  for (int a = 0; a < n; ++a)
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t x = 0; x < k; ++x) {
        linalg::SparseRow row;
        for (std::size_t v = 0; v < k; ++v) {
          const Rational& cuv = c[static_cast<std::size_t>(a)][u][v];
          if (cuv.is_zero()) continue;
          for (std::size_t w = 0; w < k; ++w)
            for (int b = 0; b < n; ++b) {
              const Rational& cwx = c[static_cast<std::size_t>(b)][w][x];
              if (cwx.is_zero()) continue;
              auto& slot = row[unknown(b, v, w)];
              slot += cuv * cwx;
              if (slot.is_zero()) row.erase(unknown(b, v, w));
            }
        }
        const Rational& target = c[static_cast<std::size_t>(a)][u][x];
        if (row.empty() && target.is_zero()) continue;
        rows.push_back(std::move(row));
        rhs.push_back(target);
      }
  auto sol = linalg::min_norm_solution(std::move(rows), std::move(rhs), static_cast<std::size_t>(n) * k * k);
  for (std::size_t v = 0; v < k; ++v)
    for (std::size_t w = 0; w < k; ++w) {
      Form f(st);
      for (int b = 0; b < n; ++b) {
        const Rational& x = sol[unknown(b, v, w)];
        if (!x.is_zero()) f += Form::dx(st, b).times(Expression(x));
      }
      p.entries[v][w] = f;
    }
  // the defining relation must hold exactly
  auto back = compose(m.entries, p.entries, m.entries, st);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t x = 0; x < k; ++x)
      if (!(back[u][x] == m(u, x))) throw NoSolution("pseudoinverse does not reproduce the constraint matrix");
  return p;
}

/// Scalar matrix sum_V sum_mu C^mu_{UV} N_{mu,VW} (constraint matrix on the left).
inline linalg::Matrix left_contraction(const BracketMatrix& c, const PseudoinverseMatrix& p) {
  const std::size_t k = c.size();
  linalg::Matrix out(k, k);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) {
      if (c(u, v).is_zero()) continue;
      auto cu = c(u, v).upsilon_components();
      for (std::size_t w = 0; w < k; ++w) {
        if (p(v, w).is_zero()) continue;
        auto nw = p(v, w).dx_components();
        for (std::size_t mu = 0; mu < cu.size(); ++mu) out(u, w) += (cu[mu] * nw[mu]).constant_value();
      }
    }
  return out;
}

/// Scalar matrix sum_W sum_mu N_{mu,VW} C^mu_{WX} (constraint matrix on the right).
inline linalg::Matrix right_contraction(const PseudoinverseMatrix& p, const BracketMatrix& c) {
  const std::size_t k = c.size();
  linalg::Matrix out(k, k);
  for (std::size_t v = 0; v < k; ++v)
    for (std::size_t w = 0; w < k; ++w) {
      if (p(v, w).is_zero()) continue;
      auto nw = p(v, w).dx_components();
      for (std::size_t x = 0; x < k; ++x) {
        if (c(w, x).is_zero()) continue;
        auto cx = c(w, x).upsilon_components();
        for (std::size_t mu = 0; mu < cx.size(); ++mu) out(v, x) += (nw[mu] * cx[mu]).constant_value();
      }
    }
  return out;
}

/// {F, G}* = {F, G} - sum_{U,V} {F, C_U} . C~1_UV ^ {C_V, G}, weakly reduced.
inline Form dirac_bracket(const Form& f, const Form& g, const ConstraintSet& cs, const PseudoinverseMatrix& p) {
  Form r = bracket(f, g);
  const std::size_t k = cs.primaries.size();
  std::vector<Form> left;
  std::vector<Form> right;
  for (std::size_t u = 0; u < k; ++u) {
    left.push_back(bracket(f, cs.primaries[u].form));
    right.push_back(bracket(cs.primaries[u].form, g));
  }
  for (std::size_t v = 0; v < k; ++v) {
    if (right[v].is_zero()) continue;
    for (std::size_t u = 0; u < k; ++u) {
      if (left[u].is_zero() || p(u, v).is_zero()) continue;
      r -= bullet(left[u], wedge(p(u, v), right[v]));
    }
  }
  return weak_reduce(r, cs);
}

/// Generating (n-1)-forms of the phase space: p_a = p^alpha_a upsilon_alpha
/// and y^a upsilon_alpha.
struct GeneratingForm {
  std::string label;
  Variable field;
  int upsilon = -1;  // -1 for the momentum form p_a
  Form form;
};

inline std::vector<GeneratingForm> generating_forms(const std::vector<Variable>& fields, const Spacetime& st) {
  std::vector<GeneratingForm> out;
  for (const auto& y : fields) {
    std::vector<Expression> pc;
    for (int a = 0; a < st.n; ++a) pc.emplace_back(Variable::momentum(y, a));
    out.push_back({"p_" + detail::describe(y), y, -1, Form::from_upsilon(st, pc)});
    for (int a = 0; a < st.n; ++a)
      out.push_back({detail::describe(y) + " v" + std::to_string(a), y, a, Form::upsilon(st, a).times(Expression(y))});
  }
  return out;
}

/// Every Hamiltonian (n-1)-form m(z) upsilon_beta with m a monomial of degree
/// <= max_degree in the phase-space variables, plus the momentum forms
/// q(y) p_a for field monomials q of degree <= max_degree - 1.
inline std::vector<Form> hamiltonian_test_forms(const FieldModel& model, int max_degree = 2) {
  const auto& st = model.spacetime;
  auto vars = model.phase_space();
  std::vector<Expression> monos{Expression(1)};
  // monomials by degree, built with non-decreasing variable index
  std::vector<std::pair<Expression, std::size_t>> level{{Expression(1), 0}};
  for (int d = 1; d <= max_degree; ++d) {
    std::vector<std::pair<Expression, std::size_t>> next;
    for (const auto& [e, from] : level)
      for (std::size_t i = from; i < vars.size(); ++i) next.emplace_back(e * Expression(vars[i]), i);
    for (const auto& [e, i] : next) monos.push_back(e);
    level = std::move(next);
  }
  std::vector<Form> out;
  for (const auto& m : monos)
    for (int b = 0; b < st.n; ++b) {
      Form f = Form::upsilon(st, b).times(m);
      try {
        hamiltonian_vector_field(f);
        out.push_back(f);
      } catch (const NotHamiltonianForm&) {
      }
    }
  for (const auto& q : monos) {
    if (q.degree() > max_degree - 1) continue;
    if (q.depends_on_any([](const Variable& v) { return !v.is_field(); })) continue;
    for (const auto& y : model.field_components()) {
      std::vector<Expression> pc;
      for (int a = 0; a < st.n; ++a) pc.push_back(q * Expression(Variable::momentum(y, a)));
      Form f = Form::from_upsilon(st, pc);
      bool dup = false;
      for (const auto& o : out) dup = dup || o == f;
      if (!dup) out.push_back(f);
    }
  }
  return out;
}

/// The unconstrained system left after eliminating the constrained variables.
struct ReducedSystem {
  Spacetime spacetime;
  std::vector<Variable> surviving_fields;
  std::vector<Variable> surviving_momenta;
  std::vector<Variable> eliminated;
  Form omega_r;
  Expression h_star;
  std::map<Variable, Expression> projector;  // polymomentum -> projected combination
  std::vector<Expression> residual_constraints;
};

inline ReducedSystem reduce(const FieldModel& model, const ConstraintSet& cs, const PseudoinverseMatrix& p,
                            const Expression& hamiltonian) {
  for (const auto& c : cs.primaries)
    if (c.cls == ConstraintClass::FirstClass)
      throw FirstClassPresent("first-class constraint on " + detail::describe(c.field));
  const auto& st = model.spacetime;
  ReducedSystem r;
  r.spacetime = st;
  r.projector = cs.projector;
  r.residual_constraints = cs.derived;
  auto elim = cs.eliminated();
  r.eliminated.assign(elim.begin(), elim.end());
  for (const auto& y : model.field_components()) {
    if (elim.count(y)) continue;
    r.surviving_fields.push_back(y);
    for (int a = 0; a < st.n; ++a) {
      auto pm = Variable::momentum(y, a);
      if (!elim.count(pm)) r.surviving_momenta.push_back(pm);
    }
  }

  // momenta of eliminated fields must be Dirac-central on the surviving forms
  if (!cs.primaries.empty()) {
    auto surviving = generating_forms(r.surviving_fields, st);
    for (const auto& y : model.field_components()) {
      if (!elim.count(y)) continue;
      std::vector<Expression> pc;
      for (int a = 0; a < st.n; ++a) pc.emplace_back(Variable::momentum(y, a));
      Form pe = Form::from_upsilon(st, pc);
      for (const auto& g : surviving)
        if (!dirac_bracket(pe, g.form, cs, p).is_zero())
          throw Error("momentum of eliminated field " + detail::describe(y) + " is not Dirac-central");
    }
  }

  Form omega(st);
  for (const auto& y : r.surviving_fields)
    for (int a = 0; a < st.n; ++a) {
      auto pm = Variable::momentum(y, a);
      if (elim.count(pm)) continue;
      auto it = cs.projector.find(pm);
      Form dp = it == cs.projector.end() ? Form::differential(st, pm)
                                         : vertical_differential(Form::scalar(st, it->second));
      omega += wedge(wedge(Form::differential(st, y), dp), Form::upsilon(st, a));
    }
  r.omega_r = omega;
  r.h_star = weak_reduce(hamiltonian, cs);
  for (const auto& v : r.h_star.variables())
    if (elim.count(v)) throw Error("reduced Hamiltonian still depends on an eliminated variable");
  return r;
}

}  // namespace ddw
