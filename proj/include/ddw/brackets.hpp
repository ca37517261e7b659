#pragma once

#include <sstream>
#include <vector>

#include "ddw/legendre.hpp"

namespace ddw {

struct NotHamiltonianForm : Error {
  using Error::Error;
};

/// Omega = sum_a dy^a ^ dp^alpha_a ^ upsilon_alpha.
struct PolysymplecticStructure {
  Form omega;
};

inline PolysymplecticStructure polysymplectic_structure(const FieldModel& model) {
  const auto& st = model.spacetime;
  Form omega(st);
  for (const auto& y : model.field_components())
    for (int a = 0; a < st.n; ++a)
      omega += wedge(wedge(Form::differential(st, y), Form::differential(st, Variable::momentum(y, a))),
                     Form::upsilon(st, a));
  return {omega};
}

namespace detail {

inline std::string describe(const Variable& v) {
  std::ostringstream os;
  os << v.name;
  for (int i : v.indices) os << i;
  if (v.slot >= 0) os << "^" << v.slot;
  return os.str();
}

/// X^a of a Hamiltonian form: dF^mu/dp^nu_a = X^a delta^mu_nu.
inline std::map<Variable, Expression> field_components_of_chi(const std::vector<Expression>& f, int n) {
  std::map<Variable, Expression> x;
  std::set<Variable> fields;
  for (const auto& c : f)
    for (const auto& v : c.variables())
      if (v.is_momentum()) fields.insert(v.base_field());
  for (const auto& y : fields) {
    Expression xa = f[0].derivative(Variable::momentum(y, 0));
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu) {
        Expression d = f[static_cast<std::size_t>(mu)].derivative(Variable::momentum(y, nu));
        Expression expect = (mu == nu) ? xa : Expression{};
        if (d != expect) {
          std::ostringstream os;
          os << "not a Hamiltonian form: dF^" << mu << "/dp^" << nu << "_" << describe(y)
             << " is not proportional to delta";
          throw NotHamiltonianForm(os.str());
        }
      }
    if (!xa.is_zero()) x.emplace(y, xa);
  }
  return x;
}

}  // namespace detail

/// chi_F with chi_F -| Omega = dF, for F = F^alpha upsilon_alpha.
inline VerticalVector hamiltonian_vector_field(const Form& f) {
  const int n = f.spacetime().n;
  auto comps = f.upsilon_components();
  VerticalVector chi;
  for (const auto& [y, xa] : detail::field_components_of_chi(comps, n)) chi.add(y, xa);
  for (int a = 0; a < n; ++a)
    for (const auto& v : comps[static_cast<std::size_t>(a)].variables())
      if (v.is_field()) chi.add(Variable::momentum(v, a), -comps[static_cast<std::size_t>(a)].derivative(v));
  return chi;
}

/// {F, G} = chi_F -| dG via the closed form
/// (X^a dG^nu/dy^a - dF^mu/dy^a dG^nu/dp^mu_a) upsilon_nu.
inline Form bracket(const Form& f, const Form& g) {
  const auto& st = f.spacetime().n ? f.spacetime() : g.spacetime();
  const int n = st.n;
  auto fc = f.upsilon_components();
  auto gc = g.upsilon_components();
  detail::field_components_of_chi(gc, n);  // G must be Hamiltonian as well
  auto x = detail::field_components_of_chi(fc, n);
  std::set<Variable> fields;
  for (const auto& c : fc)
    for (const auto& v : c.variables())
      if (v.is_field()) fields.insert(v);
  std::vector<Expression> out(static_cast<std::size_t>(n));
  for (int nu = 0; nu < n; ++nu) {
    const auto& gnu = gc[static_cast<std::size_t>(nu)];
    if (gnu.is_zero()) continue;
    Expression s;
    for (const auto& [y, xa] : x) s += xa * gnu.derivative(y);
    for (int mu = 0; mu < n; ++mu)
      for (const auto& y : fields) {
        Expression dfy = fc[static_cast<std::size_t>(mu)].derivative(y);
        if (!dfy.is_zero()) s -= dfy * gnu.derivative(Variable::momentum(y, mu));
      }
    out[static_cast<std::size_t>(nu)] = s;
  }
  return Form::from_upsilon(st, out);
}

/// Same bracket by explicit contraction chi_F -| dG.
inline Form bracket_by_contraction(const Form& f, const Form& g) {
  hamiltonian_vector_field(g);
  return interior_product(hamiltonian_vector_field(f), vertical_differential(g));
}

/// Pairwise brackets of the primary constraint forms, weakly reduced.
struct BracketMatrix {
  std::vector<Variable> labels;
  std::vector<std::vector<Form>> entries;

  std::size_t size() const { return labels.size(); }
  const Form& operator()(std::size_t u, std::size_t v) const { return entries[u][v]; }
};

inline BracketMatrix constraint_matrix(const ConstraintSet& cs) {
  BracketMatrix m;
  const std::size_t k = cs.primaries.size();
  for (const auto& c : cs.primaries) m.labels.push_back(c.field);
  m.entries.assign(k, std::vector<Form>(k, Form(cs.spacetime)));
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      m.entries[u][v] = weak_reduce(bracket(cs.primaries[u].form, cs.primaries[v].form), cs);
  return m;
}

/// Second-class when the constraint's row does not vanish on the surface.
inline ConstraintSet classify(const BracketMatrix& m, ConstraintSet cs) {
  for (std::size_t u = 0; u < cs.primaries.size(); ++u) {
    bool zero_row = true;
    for (std::size_t v = 0; v < m.size(); ++v)
      if (!m(u, v).is_zero()) zero_row = false;
    cs.primaries[u].cls = zero_row ? ConstraintClass::FirstClass : ConstraintClass::SecondClass;
  }
  return cs;
}

}  // namespace ddw
