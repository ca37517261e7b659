#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "ddw/ddw.hpp"

namespace testing_support {

inline std::string slurp(const std::string& name) {
  std::ifstream in(std::string(DDW_MODELS) + "/" + name);
  if (!in) throw std::runtime_error("missing model file " + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline ddw::FieldModel model(const std::string& name) { return ddw::parse_model(slurp(name)); }

inline const ddw::DerivedSystem& maxwell() {
  static const ddw::DerivedSystem ds = ddw::run_pipeline(model("maxwell_palatini.lag"));
  return ds;
}

inline ddw::Variable A(int mu) { return ddw::Variable::field("A", {mu}); }
inline ddw::Variable P(int mu, int nu) { return ddw::Variable::field("P", {mu, nu}); }
inline ddw::Variable p(const ddw::Variable& y, int alpha) { return ddw::Variable::momentum(y, alpha); }
inline ddw::Expression E(const ddw::Variable& v) { return ddw::Expression(v); }

}  // namespace testing_support

namespace ddw {

inline const FieldModel& print_model() {
  static const FieldModel m = parse_model(
      "dim 4; signature + - - -; field A[down]; field P[up,up] antisymmetric; field phi; field q; lagrangian 0;");
  return m;
}
inline void PrintTo(const Expression& e, std::ostream* os) { *os << render::expression_text(print_model(), e); }
inline void PrintTo(const Form& f, std::ostream* os) { *os << render::form_text(print_model(), f); }
inline void PrintTo(const Variable& v, std::ostream* os) { *os << render::variable_text(print_model(), v); }
inline void PrintTo(const Rational& r, std::ostream* os) { *os << r.str(); }

}  // namespace ddw
