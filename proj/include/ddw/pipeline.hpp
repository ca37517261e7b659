#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddw/emitter.hpp"

namespace ddw {

/// A failure inside run_pipeline, tagged with the stage that raised it.
struct PipelineError : Error {
  std::string stage;
  PipelineError(std::string s, const std::string& what) : Error(s + ": " + what), stage(std::move(s)) {}
};

/// Nonzero Dirac bracket of two generating forms.
struct DiracEntry {
  std::string left;
  std::string right;
  Form value;
};

/// Every intermediate of the derivation, in stage order.
struct DerivedSystem {
  FieldModel model;
  PolymomentumMap polymomenta;
  ConstraintSet constraints;
  Hamiltonian hamiltonian;
  BracketMatrix bracket_matrix;
  PseudoinverseMatrix pseudoinverse;
  std::vector<DiracEntry> dirac;
  ReducedSystem reduced;
  FieldEquationSet field_equations;
  HJSystem hj;
};

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"model",         "polymomenta", "constraints", "hamiltonian",
                                              "brackets",      "pseudoinverse", "dirac",     "reduce",
                                              "field-equations", "hamilton-jacobi"};
  return names;
}

namespace detail {

template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

}  // namespace detail

inline DerivedSystem run_pipeline(const FieldModel& model) {
  DerivedSystem ds;
  ds.model = model;
  const auto& st = model.spacetime;
  detail::stage("model", [&] {
    model.validate();
    return 0;
  });
  ds.polymomenta = detail::stage("polymomenta", [&] { return polymomenta(model); });
  ds.constraints = detail::stage("constraints", [&] { return primary_constraints(model); });
  ds.hamiltonian = detail::stage("hamiltonian", [&] { return ddw_hamiltonian(model, ds.constraints); });
  detail::stage("brackets", [&] {
    ds.bracket_matrix = constraint_matrix(ds.constraints);
    ds.constraints = classify(ds.bracket_matrix, ds.constraints);
    return 0;
  });
  ds.pseudoinverse = detail::stage("pseudoinverse", [&] { return pseudoinverse(ds.bracket_matrix, st); });
  detail::stage("dirac", [&] {
    if (ds.constraints.primaries.empty()) return 0;
    auto gens = generating_forms(model.field_components(), st);
    for (const auto& f : gens)
      for (const auto& g : gens) {
        Form v = dirac_bracket(f.form, g.form, ds.constraints, ds.pseudoinverse);
        if (!v.is_zero()) ds.dirac.push_back({f.label, g.label, v});
      }
    return 0;
  });
  ds.reduced = detail::stage("reduce",
                             [&] { return reduce(model, ds.constraints, ds.pseudoinverse, ds.hamiltonian.raw); });
  ds.field_equations = detail::stage("field-equations", [&] { return field_equations(ds.reduced); });
  ds.hj = detail::stage("hamilton-jacobi", [&] { return hj_system(ds.reduced); });
  return ds;
}

}  // namespace ddw
