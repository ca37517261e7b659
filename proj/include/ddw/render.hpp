#pragma once

#include <bit>
#include <sstream>
#include <string>

#include "ddw/pipeline.hpp"
#include "json.hpp"

namespace ddw {

enum class Format { Text, Latex, Json };

inline constexpr const char* kSchemaVersion = "1.0";

namespace render {

// Index groups of a component in its declared positions, e.g. ^{0 1}_{2}.
inline std::string index_groups(const FieldModel& m, const Variable& v, bool latex) {
  const Multiplet* mp = m.find(v.name);
  std::string out;
  std::size_t i = 0;
  while (i < v.indices.size()) {
    bool up = mp ? mp->positions[i] == IndexPosition::Upper : false;
    out += up ? "^{" : "_{";
    bool first = true;
    while (i < v.indices.size() && (mp ? mp->positions[i] == IndexPosition::Upper : false) == up) {
      if (!first) out += latex ? "" : " ";
      out += std::to_string(v.indices[i++]);
      first = false;
    }
    out += "}";
  }
  return out;
}

inline std::string component_text(const FieldModel& m, const Variable& v) { return v.name + index_groups(m, v, false); }

inline std::string variable_text(const FieldModel& m, const Variable& v) {
  switch (v.kind) {
    case VarKind::Coordinate:
      return "x" + std::to_string(v.deriv);
    case VarKind::Field:
      return component_text(m, v);
    case VarKind::Momentum:
      return "p(" + component_text(m, v.base_field()) + "," + std::to_string(v.slot) + ")";
    case VarKind::Jet:
      if (v.slot >= 0)
        return "d(p(" + component_text(m, v.base_field()) + "," + std::to_string(v.slot) + ")," + std::to_string(v.deriv) + ")";
      return "d(" + component_text(m, v.base_field()) + "," + std::to_string(v.deriv) + ")";
    case VarKind::SGradField:
      return "dS(" + std::to_string(v.slot) + "," + component_text(m, v.base_field()) + ")";
    case VarKind::SGradX:
      return "dSx(" + std::to_string(v.slot) + "," + std::to_string(v.deriv) + ")";
    case VarKind::Jet2:
      return "d(d(" + component_text(m, v.base_field()) + "," + std::to_string(v.slot) + ")," + std::to_string(v.deriv) + ")";
  }
  return "?";
}

inline std::string component_latex(const FieldModel& m, const Variable& v) { return v.name + index_groups(m, v, true); }

inline std::string variable_latex(const FieldModel& m, const Variable& v) {
  const std::string c = component_latex(m, v.base_field());
  switch (v.kind) {
    case VarKind::Coordinate:
      return "x^{" + std::to_string(v.deriv) + "}";
    case VarKind::Field:
      return "{" + c + "}";
    case VarKind::Momentum:
      return "p^{" + std::to_string(v.slot) + "}_{" + c + "}";
    case VarKind::Jet:
      if (v.slot >= 0) return "\\partial_{" + std::to_string(v.deriv) + "} p^{" + std::to_string(v.slot) + "}_{" + c + "}";
      return "\\partial_{" + std::to_string(v.deriv) + "} {" + c + "}";
    case VarKind::SGradField:
      return "\\frac{\\partial S^{" + std::to_string(v.slot) + "}}{\\partial " + c + "}";
    case VarKind::SGradX:
      return "\\partial_{" + std::to_string(v.deriv) + "} S^{" + std::to_string(v.slot) + "}";
    case VarKind::Jet2:
      return "\\partial_{" + std::to_string(v.slot) + "} \\partial_{" + std::to_string(v.deriv) + "} {" + c + "}";
  }
  return "?";
}

template <class VarFn, class CoefFn>
std::string expression_with(const Expression& e, VarFn var, CoefFn coef, const std::string& times) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [mono, c] : e.terms()) {
    bool neg = c < Rational(0);
    Rational a = neg ? -c : c;
    out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
    first = false;
    std::string body;
    for (const auto& [v, p] : mono.factors()) {
      if (!body.empty()) body += times;
      body += var(v);
      if (p > 1) body += "^" + (times == "*" ? std::to_string(p) : "{" + std::to_string(p) + "}");
    }
    if (body.empty())
      out += coef(a);
    else if (a == Rational(1))
      out += body;
    else
      out += coef(a) + times + body;
  }
  return out;
}

inline std::string expression_text(const FieldModel& m, const Expression& e) {
  return expression_with(
      e, [&](const Variable& v) { return variable_text(m, v); }, [](const Rational& r) { return r.str(); }, "*");
}

inline std::string rational_latex(const Rational& r) {
  if (r.den() == 1) return std::to_string(r.num());
  return "\\frac{" + std::to_string(r.num()) + "}{" + std::to_string(r.den()) + "}";
}

inline std::string expression_latex(const FieldModel& m, const Expression& e) {
  return expression_with(e, [&](const Variable& v) { return variable_latex(m, v); }, rational_latex, " ");
}

inline std::string equation_text(const FieldModel& m, const Equation& e) {
  return expression_text(m, e.lhs) + " = " + expression_text(m, e.rhs) + ";";
}

inline std::string upsilon_text(const FieldModel& m, const Form& f) {
  if (f.is_zero()) return "0";
  std::string out;
  auto comps = f.upsilon_components();
  for (std::size_t a = 0; a < comps.size(); ++a) {
    if (comps[a].is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + expression_text(m, comps[a]) + ") v" + std::to_string(a);
  }
  return out;
}

inline std::string dx_text(const FieldModel& m, const Form& f) {
  if (f.is_zero()) return "0";
  std::string out;
  auto comps = f.dx_components();
  for (std::size_t a = 0; a < comps.size(); ++a) {
    if (comps[a].is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + expression_text(m, comps[a]) + ") dx" + std::to_string(a);
  }
  return out;
}

// General form: coefficient, vertical differentials, then dx^I, vol or v_a.
inline std::string form_text(const FieldModel& m, const Form& f) {
  if (f.is_zero()) return "0";
  const int n = f.spacetime().n;
  std::string out;
  for (const auto& [key, c] : f.terms()) {
    Expression coeff = c;
    std::string block;
    if (key.second == Form::full(n)) {
      block = "vol";
    } else if (n > 1 && std::popcount(key.second) == n - 1) {
      int a = std::countr_zero(~key.second & Form::full(n));
      if (a % 2) coeff = coeff.scaled(Rational(-1));
      block = "v" + std::to_string(a);
    } else {
      for (int a = 0; a < n; ++a)
        if (key.second & Form::bit(a)) block += (block.empty() ? "" : "^") + std::string("dx") + std::to_string(a);
    }
    std::string vert;
    for (const auto& v : key.first) vert += (vert.empty() ? "" : "^") + std::string("d") + variable_text(m, v);
    std::string body = vert;
    if (!block.empty()) body += (body.empty() ? "" : "^") + block;
    out += (out.empty() ? "" : " + ") + std::string("(") + expression_text(m, coeff) + ")" + (body.empty() ? "" : " " + body);
  }
  return out;
}

// ---- JSON trees -------------------------------------------------------------

inline const char* kind_name(VarKind k) {
  switch (k) {
    case VarKind::Coordinate: return "coordinate";
    case VarKind::Field: return "field";
    case VarKind::Momentum: return "momentum";
    case VarKind::Jet: return "jet";
    case VarKind::SGradField: return "dS_dfield";
    case VarKind::SGradX: return "dS_dx";
    case VarKind::Jet2: return "jet2";
  }
  return "?";
}

inline nlohmann::ordered_json variable_json(const Variable& v) {
  nlohmann::ordered_json j;
  j["op"] = "var";
  j["kind"] = kind_name(v.kind);
  j["name"] = v.name;
  j["indices"] = v.indices;
  if (v.slot >= 0) j["slot"] = v.slot;
  if (v.deriv >= 0) j["deriv"] = v.deriv;
  return j;
}

inline nlohmann::ordered_json number_json(const Rational& r) { return {{"op", "num"}, {"value", r.str()}}; }

inline nlohmann::ordered_json expression_json(const Expression& e) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [mono, c] : e.terms()) {
    nlohmann::ordered_json factors = nlohmann::ordered_json::array();
    factors.push_back(number_json(c));
    for (const auto& [v, p] : mono.factors()) {
      if (p == 1)
        factors.push_back(variable_json(v));
      else
        factors.push_back({{"op", "pow"}, {"args", {variable_json(v), number_json(Rational(p))}}});
    }
    terms.push_back({{"op", "mul"}, {"args", factors}});
  }
  return {{"op", "add"}, {"args", terms}};
}

inline nlohmann::ordered_json equation_json(const Equation& e) {
  return {{"label", e.label}, {"lhs", expression_json(e.lhs)}, {"rhs", expression_json(e.rhs)}};
}

inline nlohmann::ordered_json equations_json(const std::vector<Equation>& es) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (const auto& e : es) a.push_back(equation_json(e));
  return a;
}

inline nlohmann::ordered_json form_json(const Form& f) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [key, c] : f.terms()) {
    nlohmann::ordered_json vert = nlohmann::ordered_json::array();
    for (const auto& v : key.first) vert.push_back(variable_json(v));
    std::vector<int> dx;
    for (int a = 0; a < f.spacetime().n; ++a)
      if (key.second & Form::bit(a)) dx.push_back(a);
    terms.push_back({{"vertical", vert}, {"dx", dx}, {"coefficient", expression_json(c)}});
  }
  return {{"op", "form"}, {"terms", terms}};
}

inline const char* class_name(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::FirstClass: return "first";
    case ConstraintClass::SecondClass: return "second";
    case ConstraintClass::Unclassified: return "unclassified";
  }
  return "?";
}

inline nlohmann::ordered_json stage_json(const DerivedSystem& ds, const std::string& stage) {
  using J = nlohmann::ordered_json;
  const auto& m = ds.model;
  if (stage == "model") {
    J fields = J::array();
    for (const auto& mp : m.multiplets) {
      std::vector<std::string> pos;
      for (auto p : mp.positions) pos.push_back(p == IndexPosition::Upper ? "up" : "down");
      fields.push_back({{"name", mp.name},
                        {"positions", pos},
                        {"symmetry", mp.symmetry == Symmetry::Antisymmetric ? "antisymmetric"
                                     : mp.symmetry == Symmetry::Symmetric   ? "symmetric"
                                                                            : "none"}});
    }
    return {{"dim", m.spacetime.n}, {"signature", m.spacetime.signature}, {"fields", fields},
            {"lagrangian", expression_json(m.lagrangian)}};
  }
  if (stage == "polymomenta") {
    J a = J::array();
    for (const auto& [p, e] : ds.polymomenta.entries) a.push_back({{"momentum", variable_json(p)}, {"value", expression_json(e)}});
    return a;
  }
  if (stage == "constraints") {
    J prim = J::array();
    for (const auto& c : ds.constraints.primaries)
      prim.push_back({{"field", variable_json(c.field)}, {"form", form_json(c.form)}, {"class", class_name(c.cls)}});
    J derived = J::array();
    for (const auto& e : ds.constraints.derived) derived.push_back(expression_json(e));
    J rules = J::array();
    for (const auto& [v, e] : ds.constraints.rules) rules.push_back({{"variable", variable_json(v)}, {"value", expression_json(e)}});
    J proj = J::array();
    for (const auto& [v, e] : ds.constraints.projector) proj.push_back({{"variable", variable_json(v)}, {"value", expression_json(e)}});
    return {{"primary", prim}, {"derived", derived}, {"rules", rules}, {"projector", proj}};
  }
  if (stage == "hamiltonian")
    return {{"raw", expression_json(ds.hamiltonian.raw)}, {"on_surface", expression_json(ds.hamiltonian.on_surface)}};
  if (stage == "brackets" || stage == "pseudoinverse") {
    const auto& labels = ds.bracket_matrix.labels;
    J lab = J::array();
    for (const auto& l : labels) lab.push_back(variable_json(l));
    J rows = J::array();
    for (std::size_t u = 0; u < labels.size(); ++u) {
      J row = J::array();
      for (std::size_t v = 0; v < labels.size(); ++v)
        row.push_back(form_json(stage == "brackets" ? ds.bracket_matrix(u, v) : ds.pseudoinverse(u, v)));
      rows.push_back(row);
    }
    return {{"labels", lab}, {"entries", rows}};
  }
  if (stage == "dirac") {
    J a = J::array();
    for (const auto& d : ds.dirac) a.push_back({{"left", d.left}, {"right", d.right}, {"value", form_json(d.value)}});
    return a;
  }
  if (stage == "reduce") {
    const auto& r = ds.reduced;
    J sf = J::array();
    for (const auto& v : r.surviving_fields) sf.push_back(variable_json(v));
    J sm = J::array();
    for (const auto& v : r.surviving_momenta) sm.push_back(variable_json(v));
    J el = J::array();
    for (const auto& v : r.eliminated) el.push_back(variable_json(v));
    return {{"surviving_fields", sf}, {"surviving_momenta", sm}, {"eliminated", el},
            {"omega", form_json(r.omega_r)}, {"h_star", expression_json(r.h_star)}};
  }
  if (stage == "field-equations") {
    const auto& f = ds.field_equations;
    J trail = J::array();
    for (const auto& s : f.factor_trail)
      trail.push_back({{"label", s.label}, {"projected_coefficient", s.projected_coefficient.str()},
                       {"scale", s.scale.str()}, {"closed", s.closed}});
    return {{"momentum_equations", equations_json(f.momentum_equations)},
            {"velocity_equations", equations_json(f.velocity_equations)},
            {"divergence", equations_json(f.divergence)},
            {"embedding", equations_json(f.embedding)},
            {"factor_trail", trail},
            {"trail_closes", f.trail_closes()}};
  }
  if (stage == "hamilton-jacobi") {
    return {{"equation", equation_json(ds.hj.hj_equation)},
            {"hamiltonian_term", expression_json(ds.hj.hamiltonian_term)},
            {"constraint_conditions", equations_json(ds.hj.constraint_conditions)},
            {"embedding_conditions", equations_json(ds.hj.embedding_conditions)}};
  }
  throw Error("unknown stage '" + stage + "'");
}

inline std::string json_document(const DerivedSystem& ds, const std::string& stage) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kSchemaVersion;
  nlohmann::ordered_json stages;
  for (const auto& s : stage_names())
    if (stage.empty() || s == stage) stages[s] = stage_json(ds, s);
  if (stages.empty()) throw Error("unknown stage '" + stage + "'");
  doc["stages"] = stages;
  return doc.dump(2) + "\n";
}

// ---- text -------------------------------------------------------------------

inline std::string model_text(const FieldModel& m) {
  std::ostringstream os;
  os << "dim " << m.spacetime.n << ";\nsignature";
  for (int s : m.spacetime.signature) os << (s > 0 ? " +" : " -");
  os << ";\n";
  for (const auto& mp : m.multiplets) {
    os << "field " << mp.name;
    if (mp.rank()) {
      os << "[";
      for (std::size_t i = 0; i < mp.rank(); ++i) os << (i ? "," : "") << (mp.positions[i] == IndexPosition::Upper ? "up" : "down");
      os << "]";
    }
    if (mp.symmetry == Symmetry::Antisymmetric) os << " antisymmetric";
    if (mp.symmetry == Symmetry::Symmetric) os << " symmetric";
    os << ";\n";
  }
  os << "lagrangian " << expression_text(m, m.lagrangian) << ";\n";
  return os.str();
}

inline void stage_text(std::ostream& os, const DerivedSystem& ds, const std::string& stage) {
  const auto& m = ds.model;
  auto eqs = [&](const char* title, const std::vector<Equation>& es) {
    os << "# " << title << "\n";
    for (const auto& e : es) os << equation_text(m, e) << "\n";
  };
  if (stage == "model") {
    os << model_text(m);
  } else if (stage == "polymomenta") {
    for (const auto& [p, e] : ds.polymomenta.entries) os << variable_text(m, p) << " = " << expression_text(m, e) << ";\n";
  } else if (stage == "constraints") {
    for (const auto& c : ds.constraints.primaries)
      os << "C[" << component_text(m, c.field) << "] = " << upsilon_text(m, c.form) << "  (" << class_name(c.cls) << ")\n";
    for (const auto& e : ds.constraints.derived) os << expression_text(m, e) << " = 0;\n";
  } else if (stage == "hamiltonian") {
    os << "H = " << expression_text(m, ds.hamiltonian.raw) << ";\n";
    os << "H* = " << expression_text(m, ds.hamiltonian.on_surface) << ";\n";
  } else if (stage == "brackets" || stage == "pseudoinverse") {
    const auto& l = ds.bracket_matrix.labels;
    for (std::size_t u = 0; u < l.size(); ++u)
      for (std::size_t v = 0; v < l.size(); ++v) {
        const Form& f = stage == "brackets" ? ds.bracket_matrix(u, v) : ds.pseudoinverse(u, v);
        if (f.is_zero()) continue;
        os << "[" << component_text(m, l[u]) << ", " << component_text(m, l[v]) << "] = "
           << (stage == "brackets" ? upsilon_text(m, f) : dx_text(m, f)) << "\n";
      }
  } else if (stage == "dirac") {
    for (const auto& d : ds.dirac) os << "{" << d.left << ", " << d.right << "}* = " << upsilon_text(m, d.value) << "\n";
  } else if (stage == "reduce") {
    os << "omega = " << form_text(m, ds.reduced.omega_r) << "\n";
    os << "H* = " << expression_text(m, ds.reduced.h_star) << ";\n";
  } else if (stage == "field-equations") {
    const auto& f = ds.field_equations;
    eqs("momentum equations", f.momentum_equations);
    eqs("velocity equations", f.velocity_equations);
    eqs("divergence form", f.divergence);
    eqs("embedding form", f.embedding);
    os << "# factor trail " << (f.trail_closes() ? "closes" : "DOES NOT CLOSE") << "\n";
    for (const auto& s : f.factor_trail)
      os << "#   " << s.label << ": coefficient " << s.projected_coefficient.str() << ", scale " << s.scale.str() << "\n";
  } else if (stage == "hamilton-jacobi") {
    eqs("hamilton-jacobi equation", {ds.hj.hj_equation});
    eqs("constraint conditions", ds.hj.constraint_conditions);
    eqs("embedding conditions", ds.hj.embedding_conditions);
  } else {
    throw Error("unknown stage '" + stage + "'");
  }
}

inline std::string text_document(const DerivedSystem& ds, const std::string& stage) {
  std::ostringstream os;
  if (!stage.empty()) {
    stage_text(os, ds, stage);
    return os.str();
  }
  for (const auto& s : stage_names()) {
    os << "## " << s << "\n";
    stage_text(os, ds, s);
    os << "\n";
  }
  return os.str();
}

// ---- LaTeX ------------------------------------------------------------------

inline std::string latex_document(const DerivedSystem& ds, const std::string& stage) {
  const auto& m = ds.model;
  std::ostringstream os;
  auto eq = [&](const Equation& e) {
    os << "\\[ " << expression_latex(m, e.lhs) << " = " << expression_latex(m, e.rhs) << " \\]\n";
  };
  auto want = [&](const char* s) { return stage.empty() || stage == s; };
  os << "\\documentclass{article}\n\\usepackage{amsmath}\n\\begin{document}\n";
  if (want("hamiltonian")) {
    os << "\\section*{Hamiltonian}\n";
    eq({"", Expression(Variable{VarKind::Field, "H^*", {}, -1, -1}), ds.hamiltonian.on_surface});
  }
  if (want("field-equations")) {
    os << "\\section*{Field equations}\n";
    for (const auto& e : ds.field_equations.divergence) eq(e);
    for (const auto& e : ds.field_equations.embedding) eq(e);
  }
  if (want("hamilton-jacobi")) {
    os << "\\section*{Hamilton--Jacobi system}\n";
    os << "\\[ \\partial_\\mu S^\\mu + H^*\\!\\left(p^\\alpha_a = \\frac{\\partial S^\\alpha}{\\partial y^a}\\right) = 0 \\]\n";
    eq(ds.hj.hj_equation);
    for (const auto& e : ds.hj.constraint_conditions) eq(e);
    for (const auto& e : ds.hj.embedding_conditions) eq(e);
  }
  os << "\\end{document}\n";
  return os.str();
}

}  // namespace render

/// Renders a derived system; an empty stage name renders every stage.
inline std::string render_system(const DerivedSystem& ds, Format f, const std::string& stage = "") {
  switch (f) {
    case Format::Text: return render::text_document(ds, stage);
    case Format::Latex: return render::latex_document(ds, stage);
    case Format::Json: return render::json_document(ds, stage);
  }
  return {};
}

}  // namespace ddw
