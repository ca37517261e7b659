#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace ddw;
using namespace testing_support;

TEST(Numeric, ExprDerivativeIsExact) {
  auto a = Variable::field("A", {2});
  auto x = Variable::coordinate(0);
  NumExpr e = NumExpr::func("sin", NumExpr::var(x)) * NumExpr::var(a).pow(2) + NumExpr::func("exp", NumExpr::var(a));
  NumExpr d = e.derivative(a);
  auto env = [&](const Variable& v) { return v == a ? 0.5 : 0.3; };
  EXPECT_DOUBLE_EQ(d.eval(env), 2 * std::sin(0.3) * 0.5 + std::exp(0.5));
}

TEST(Numeric, ParseSolutionFile) {
  auto m = model("maxwell_palatini.lag");
  auto sol = parse_solution(slurp("plane_wave.sol"), m);
  EXPECT_EQ(sol.fields.size(), 4u);
  EXPECT_EQ(sol.momenta.size(), 4u);
  EXPECT_EQ(sol.s.size(), 4u);
  double v = sol.fields.at(A(2)).eval([](const Variable& c) { return c.deriv == 0 ? 1.0 : 0.25; });
  EXPECT_DOUBLE_EQ(v, std::cos(0.75));
}

TEST(Numeric, SolutionErrors) {
  auto m = model("maxwell_palatini.lag");
  EXPECT_THROW(parse_solution("A_{2} = cos(x0) * A_{1};", m), ParseError);
  EXPECT_THROW(parse_solution("B_{2} = 1;", m), ParseError);
  EXPECT_THROW(parse_solution("A_{2} = 1; A_{2} = 2;", m), ParseError);
  EXPECT_THROW(parse_solution("S(7) = 1;", m), ParseError);
  EXPECT_THROW(parse_solution("A_{2} = tan(x0);", m), ParseError);
}

TEST(Numeric, PlaneWaveSatisfiesEverything) {
  const auto& ds = maxwell();
  auto sol = parse_solution(slurp("plane_wave.sol"), ds.model);
  auto rep = verify_numeric(ds, sol);
  EXPECT_TRUE(rep.ok()) << rep.max_residual();
  EXPECT_LE(rep.max_residual(), 1e-6);
  bool saw_hj = false;
  for (const auto& e : rep.entries) saw_hj = saw_hj || e.group == "hamilton-jacobi";
  EXPECT_TRUE(saw_hj);
}

TEST(Numeric, ZeroSolutionIsExact) {
  const auto& ds = maxwell();
  auto rep = verify_numeric(ds, parse_solution(slurp("zero.sol"), ds.model));
  EXPECT_EQ(rep.max_residual(), 0.0);
}

TEST(Numeric, WrongSolutionIsRejected) {
  const auto& ds = maxwell();
  auto sol = parse_solution("A_{0} = 0; A_{1} = 0; A_{2} = cos(x0 - 2*x1); A_{3} = 0;", ds.model);
  EXPECT_FALSE(verify_numeric(ds, sol).ok());
}

TEST(Numeric, MomentaDerivedFromEmbedding) {
  const auto& ds = maxwell();
  auto sol = parse_solution("A_{0} = 0; A_{1} = 0; A_{2} = cos(x0 - x1); A_{3} = 0;", ds.model);
  EXPECT_TRUE(verify_numeric(ds, sol).ok());
}

TEST(Numeric, MissingSolutionFunction) {
  const auto& ds = maxwell();
  EXPECT_THROW(verify_numeric(ds, parse_solution("A_{2} = 1;", ds.model)), VerificationError);
  EXPECT_THROW(verify_numeric(ds, parse_solution("S(0) = 1;", ds.model)), VerificationError);
  EXPECT_THROW(verify_numeric(ds, Solution{}), VerificationError);
}

TEST(Numeric, NonFiniteResidual) {
  const auto& ds = maxwell();
  auto sol = parse_solution("A_{0} = 1/(x0 - x0); A_{1} = 0; A_{2} = 0; A_{3} = 0;", ds.model);
  EXPECT_THROW(verify_numeric(ds, sol), VerificationError);
}

TEST(Numeric, MechanicsHamiltonJacobi) {
  // uniform motion with momentum 2; S = 2 q - 2 t
  auto ds = run_pipeline(model("mechanics.lag"));
  auto sol = parse_solution("q = 2 * x0 + 1; S(0) = 2 * q - 2 * x0;", ds.model);
  auto rep = verify_numeric(ds, sol);
  EXPECT_TRUE(rep.ok()) << rep.max_residual();
}

TEST(Numeric, ScalarFieldLinearWave) {
  // a massless wave misses the potential terms
  auto ds = run_pipeline(model("scalar_field.lag"));
  auto sol = parse_solution("phi = cos(x0 - x1);", ds.model);
  EXPECT_FALSE(verify_numeric(ds, sol).ok());
}
