#include <gtest/gtest.h>

#include "support.hpp"

using namespace ddw;
using namespace testing_support;

namespace {
int error_column(const std::string& src) {
  try {
    parse_model(src);
  } catch (const ParseError& e) {
    return e.column;
  }
  return -1;
}

std::string error_text(const std::string& src) {
  try {
    parse_model(src);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST(Parser, MaxwellModelShape) {
  auto m = model("maxwell_palatini.lag");
  EXPECT_EQ(m.spacetime, Spacetime::minkowski(4));
  ASSERT_EQ(m.multiplets.size(), 2u);
  EXPECT_EQ(m.multiplets[0].name, "A");
  EXPECT_EQ(m.multiplets[0].positions, std::vector<IndexPosition>{IndexPosition::Lower});
  EXPECT_EQ(m.multiplets[1].symmetry, Symmetry::Antisymmetric);
  EXPECT_EQ(m.field_components().size(), 10u);
}

TEST(Parser, MaxwellLagrangianExpanded) {
  // 1/4 P^{mu nu} (P_{mu nu} - 2 F_{mu nu}) with F_{mu nu} = d_mu A_nu - d_nu A_mu
  auto m = model("maxwell_palatini.lag");
  const auto& st = m.spacetime;
  Expression want;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      Expression f = E(Variable::jet(A(b), a)) - E(Variable::jet(A(a), b));
      want += E(P(a, b)).pow(2).scaled(Rational(st.eta(a) * st.eta(b), 2)) - E(P(a, b)) * f;
    }
  EXPECT_EQ(m.lagrangian, want);
}

TEST(Parser, MechanicsOneLiner) {
  auto m = parse_model("dim 1; signature +; field q; lagrangian 1/2 * d(q,0)^2;");
  EXPECT_EQ(m.spacetime.n, 1);
  EXPECT_EQ(m.lagrangian, E(Variable::jet(Variable::field("q", {}), 0)).pow(2).scaled(Rational(1, 2)));
}

TEST(Parser, SyntaxErrorColumn) {
  EXPECT_EQ(error_column("field A[;"), 9);
  EXPECT_EQ(error_column("dim 4;\nfield A[down]\nlagrangian 0;"), 1);
}

TEST(Parser, UndeclaredIdentifier) {
  EXPECT_NE(error_text("dim 2; signature + -; lagrangian B;").find("undeclared identifier 'B'"), std::string::npos);
}

TEST(Parser, ArityMismatch) {
  EXPECT_NE(error_text("dim 2; signature + -; field A[down]; lagrangian A_{0 1};").find("expects 1 indices"),
            std::string::npos);
}

TEST(Parser, IndexRepeatedThreeTimes) {
  EXPECT_NE(error_text("dim 2; signature + -; field A[down]; lagrangian A_{mu} * A_{mu} * A^{mu};")
                .find("repeated more than twice"),
            std::string::npos);
}

TEST(Parser, FreeIndexInLagrangian) {
  EXPECT_NE(error_text("dim 2; signature + -; field A[down]; lagrangian A_{mu};").find("free index"), std::string::npos);
}

TEST(Parser, FloatRejectedInModels) {
  EXPECT_NE(error_text("dim 1; signature +; field q; lagrangian 0.5 * q^2;").find("floating-point"), std::string::npos);
}

TEST(Parser, ContractionInsertsMetric) {
  auto m = parse_model("dim 2; signature + -; field A[down]; lagrangian A_{mu} * A_{mu};");
  EXPECT_EQ(m.lagrangian, E(A(0)).pow(2) - E(A(1)).pow(2));
  auto mixed = parse_model("dim 2; signature + -; field A[down]; lagrangian A_{mu} * A^{mu};");
  EXPECT_EQ(mixed.lagrangian, m.lagrangian);
}

TEST(Parser, AntisymmetricComponentsCanonicalized) {
  auto m = parse_model("dim 2; signature + -; field P[up,up] antisymmetric; lagrangian P^{1 0} + P^{0 0} + P^{0 1};");
  EXPECT_TRUE(m.lagrangian.is_zero());
}

TEST(Parser, MacroWithRaisedIndices) {
  auto m = parse_model(
      "dim 2; signature + -; field A[down];\n"
      "define F_{a b} = d(A_{b}, a) - d(A_{a}, b);\n"
      "lagrangian F_{mu nu} * F^{mu nu};");
  Expression f01 = E(Variable::jet(A(1), 0)) - E(Variable::jet(A(0), 1));
  EXPECT_EQ(m.lagrangian, f01.pow(2).scaled(-2));
}

TEST(Parser, PowerAfterIndexedField) {
  auto m = parse_model("dim 2; signature + -; field A[down]; lagrangian A_{0}^2 + A_1^3;");
  EXPECT_EQ(m.lagrangian, E(A(0)).pow(2) + E(A(1)).pow(3));
}

TEST(Parser, TexStyleIndexNames) {
  auto m = parse_model("dim 2; signature + -; field A[down]; lagrangian A_{\\mu} * A^{\\mu};");
  EXPECT_EQ(m.lagrangian, E(A(0)).pow(2) - E(A(1)).pow(2));
}

TEST(Parser, EquationRoundTrip) {
  const auto& ds = maxwell();
  for (const auto* set : {&ds.field_equations.velocity_equations, &ds.field_equations.momentum_equations,
                          &ds.hj.embedding_conditions, &ds.hj.constraint_conditions}) {
    for (const auto& e : *set) {
      auto parsed = parse_equations(render::equation_text(ds.model, e), ds.model);
      ASSERT_EQ(parsed.size(), 1u);
      EXPECT_EQ(parsed[0].first, e.lhs);
      EXPECT_EQ(parsed[0].second, e.rhs);
    }
  }
  auto hj = parse_equations(render::equation_text(ds.model, ds.hj.hj_equation), ds.model);
  EXPECT_EQ(hj[0].first, ds.hj.hj_equation.lhs);
}

TEST(Parser, ModelRoundTrip) {
  for (const char* f : {"maxwell_palatini.lag", "maxwell_standard.lag", "scalar_field.lag", "mechanics.lag"}) {
    auto m = model(f);
    EXPECT_EQ(parse_model(render::model_text(m)), m) << f;
  }
}

TEST(Parser, ExpressionWithSecondDerivative) {
  auto m = model("maxwell_palatini.lag");
  EXPECT_EQ(parse_expression("d(d(A_{1},0),2)", m), E(Variable::jet2(A(1), 0, 2)));
  EXPECT_EQ(parse_expression("d(A_{1} * A_{2}, 3)", m),
            E(Variable::jet(A(1), 3)) * E(A(2)) + E(A(1)) * E(Variable::jet(A(2), 3)));
}
