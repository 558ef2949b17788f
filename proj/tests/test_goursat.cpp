#include "oracles.hpp"

#include "tsg/goursat.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>

using namespace tsg;

namespace {

ProblemSpec make_spec(TimeScale s1, TimeScale s2, const std::string& rhs, std::size_t dim = 1, double h = 0.1) {
  ProblemSpec spec;
  spec.scale1 = std::move(s1);
  spec.scale2 = std::move(s2);
  spec.dim = dim;
  spec.rhs = RhsExpr::parse(rhs, rhs_vars(dim));
  spec.h = h;
  return spec;
}

BoundSpec make_bound(const std::string& G, const std::string& g0) {
  return {RhsExpr::parse(G, {"x", "y", "r"}), RhsExpr::parse(g0, {"x", "y"})};
}

TimeScale hybrid() { return TimeScale({{0, 1}, {2, 2}, {3, 3}, {3.5, 3.5}, {4, 4}}); }

} // namespace

TEST_CASE("spec validation names the field") {
  auto spec = make_spec(TimeScale::integers(2), TimeScale::integers(2), "1");
  spec.h = 0;
  try {
    spec.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "h");
  }
  spec.h = 0.1;
  spec.max_iter = 0;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
  spec.max_iter = 10;
  spec.dim = 2;
  CHECK_THROWS_AS(spec.validate(), ValidationError);
}

TEST_CASE("apply_F examples") {
  const auto z3 = make_spec(TimeScale::integers(3), TimeScale::integers(3), "0");
  const IntegralOperator zero_op(z3);
  GridFunction2D z = zero_op.zeros();
  z.at(2, 2)[0] = 42.0;
  const auto out0 = apply_F(z, z3);
  for (double v : out0.values())
    CHECK(v == 0.0);

  const auto one = make_spec(hybrid(), TimeScale({{0, 1.5}}), "1", 1, 0.25);
  const IntegralOperator op(one);
  const auto xy = op.apply(op.zeros());
  for (std::size_t i = 0; i < xy.rows(); ++i)
    for (std::size_t j = 0; j < xy.cols(); ++j)
      CHECK(xy.at(i, j)[0] == doctest::Approx(xy.xs()[i] * xy.ys()[j]).epsilon(1e-14));

  const auto zp1 = make_spec(TimeScale::integers(3), TimeScale::integers(3), "z1 + 1");
  const auto out = apply_F(IntegralOperator(zp1).zeros(), zp1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(out.at(i, j)[0] == double(i * j));
}

TEST_CASE("apply_F reports the failing lattice point") {
  const auto spec = make_spec(TimeScale::integers(3), TimeScale::integers(3), "1 / (x - 2)");
  const IntegralOperator F(spec);
  try {
    F.apply(F.zeros());
    FAIL("expected RhsEvaluationError");
  } catch (const RhsEvaluationError& e) {
    CHECK(e.x() == 2.0);
    CHECK(e.y() == 0.0);
  }
}

TEST_CASE("picard_solve: f = 1 gives xy") {
  const auto spec = make_spec(hybrid(), hybrid(), "1", 1, 0.25);
  const auto res = picard_solve(spec);
  CHECK(res.report.converged);
  CHECK(res.report.iterations <= 2);
  for (std::size_t i = 0; i < res.solution.rows(); ++i)
    for (std::size_t j = 0; j < res.solution.cols(); ++j)
      CHECK(std::abs(res.solution.at(i, j)[0] - res.solution.xs()[i] * res.solution.ys()[j]) <= 1e-12);
  CHECK(res.report.residual_sup <= 1e-10);
}

TEST_CASE("picard_solve matches the forward recursion on scattered scales") {
  const auto spec = make_spec(TimeScale::integers(3), TimeScale::integers(3), "z1 + 1");
  const auto res = picard_solve(spec);
  CHECK(res.report.converged);
  CHECK(res.solution.at(2, 2)[0] == 5.0);

  const TimeScale T1 = TimeScale::points({0, 0.5, 1.5, 1.75, 3, 4.5, 5});
  const TimeScale T2 = TimeScale::points({0, 1, 1.1, 2, 2.5, 4});
  const auto nl = make_spec(T1, T2, "sin(x*z1) + y - 0.3*z1^2");
  const auto sol = picard_solve(nl);
  CHECK(sol.report.converged);
  CHECK(sol.report.iterations <= int(T1.size() + T2.size()));
  const auto ref = oracle::forward_recursion(T1.lattice(), T2.lattice(), [](double x, double y, double z) {
    return std::sin(x * z) + y - 0.3 * z * z;
  });
  for (std::size_t i = 0; i < ref.size(); ++i)
    for (std::size_t j = 0; j < ref[i].size(); ++j)
      CHECK(sol.solution.at(i, j)[0] == doctest::Approx(ref[i][j]).epsilon(1e-12).scale(1.0));
  CHECK(sol.report.residual_sup <= 1e-10);
}

TEST_CASE("boundary values are exactly zero for every iterate") {
  auto spec = make_spec(TimeScale({{0, 1}}), TimeScale({{0, 2}}), "exp(x) + z1", 1, 0.2);
  for (int iters = 1; iters <= 4; ++iters) {
    spec.max_iter = iters;
    const auto z = picard_solve(spec).solution;
    for (std::size_t i = 0; i < z.rows(); ++i)
      CHECK(z.at(i, 0)[0] == 0.0);
    for (std::size_t j = 0; j < z.cols(); ++j)
      CHECK(z.at(0, j)[0] == 0.0);
  }
}

TEST_CASE("non-convergence returns the last iterate") {
  auto spec = make_spec(TimeScale({{0, 1}}), TimeScale({{0, 1}}), "1 + z1", 1, 0.1);
  spec.max_iter = 2;
  const auto res = picard_solve(spec);
  CHECK_FALSE(res.report.converged);
  CHECK(res.report.iterations == 2);
  CHECK(res.report.final_delta_sup > spec.tol);
}

TEST_CASE("vector-valued problems") {
  // z1'' = 1, z2'' = z1: z1 = xy, z2 = iint st = sum over the lattice
  const auto spec = make_spec(TimeScale::integers(4), TimeScale::integers(3), "[1, z1]", 2);
  const auto res = picard_solve(spec);
  CHECK(res.report.converged);
  const auto ref = oracle::forward_recursion({0, 1, 2, 3, 4}, {0, 1, 2, 3}, [](double x, double y, double) { return x * y; });
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(res.solution.at(i, j)[0] == double(i * j));
      CHECK(res.solution.at(i, j)[1] == ref[i][j]);
    }
}

TEST_CASE("fixed-point property and equivalence audit") {
  for (const auto& rhs : {"1", "z1 + 1", "cos(z1) * x"}) {
    const auto spec = make_spec(hybrid(), TimeScale({{0, 1.2}}), rhs, 1, 0.2);
    const auto rep = equivalence_check(spec);
    CHECK(rep.solve.converged);
    CHECK(rep.fixed_point_gap <= 2 * spec.tol);
  }
  const auto scattered = make_spec(TimeScale::integers(3), TimeScale::integers(3), "z1 + 1");
  const auto rep = equivalence_check(scattered);
  CHECK(rep.residual <= 1e-10);
  CHECK(rep.fixed_point_gap <= 1e-10);
}

TEST_CASE("residual of xy with f = 1 vanishes on every scale") {
  const auto spec = make_spec(hybrid(), TimeScale({{0, 1}, {3, 3}}), "1", 1, 0.125);
  const IntegralOperator F(spec);
  const auto z = GridFunction2D::sample(F.scale1(), F.scale2(), 1, [](double x, double y) { return Vec{x * y}; });
  CHECK(residual(z, spec) <= 1e-10);
}

TEST_CASE("classical limit of z_xy = 1 + z on the unit square") {
  const double exact = oracle::bessel_series(1, 1);
  CHECK(exact == doctest::Approx(1.27957).epsilon(1e-5));
  double prev = INFINITY;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const auto spec = make_spec(TimeScale::interval(1), TimeScale::interval(1), "1 + z1", 1, h);
    const auto res = picard_solve(spec);
    REQUIRE(res.report.converged);
    const double err = std::abs(res.solution.at(res.solution.rows() - 1, res.solution.cols() - 1)[0] - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("determinism across thread counts") {
  const auto spec = make_spec(TimeScale::interval(1), hybrid(), "sin(x + z1) + y", 1, 0.05);
  ::setenv("TSG_THREADS", "1", 1);
  const auto a = picard_solve(spec);
  ::setenv("TSG_THREADS", "8", 1);
  const auto b = picard_solve(spec);
  ::unsetenv("TSG_THREADS");
  CHECK(a.solution == b.solution);
  CHECK(a.report.iterations == b.report.iterations);
  CHECK(std::memcmp(&a.report.residual_sup, &b.report.residual_sup, sizeof(double)) == 0);
}

TEST_CASE("bound_check: equality case passes with zero margin") {
  auto spec = make_spec(hybrid(), TimeScale({{0, 2}}), "1", 1, 0.25);
  spec.bound = make_bound("1", "x*y");
  const auto z = picard_solve(spec).solution;
  const auto rep = bound_check(z, spec);
  CHECK(rep.ok);
  CHECK(std::abs(rep.margin) <= 1e-12);
  CHECK(rep.warnings.empty());
}

TEST_CASE("bound_check: undersized g0 fails at the first lattice point") {
  auto spec = make_spec(TimeScale::integers(3), TimeScale::integers(3), "z1 + 1");
  spec.bound = make_bound("r + 1", "64");
  const auto z = picard_solve(spec).solution;
  auto rep = bound_check(z, spec);
  CHECK_FALSE(rep.ok);
  CHECK_FALSE(rep.inequality_ok);
  CHECK(rep.ball_ok);
  // iint over [0,3)^2 of 65 = 585 > 64; the first violation in row-major order is (2,2): 4*65 = 260
  CHECK(rep.margin == 64.0 - 585.0);
  REQUIRE(rep.first_failure);
  CHECK(rep.first_failure->x == 1.0);
  CHECK(rep.first_failure->y == 1.0); // 1*1*65 = 65 > 64 already

  spec = make_spec(TimeScale::integers(1), TimeScale::integers(1), "z1 + 1");
  spec.bound = make_bound("r + 1", "1");
  rep = bound_check(picard_solve(spec).solution, spec);
  CHECK_FALSE(rep.ok); // 2 > 1 at (1,1)
  CHECK(rep.first_failure->i == 1);
  CHECK(rep.first_failure->j == 1);
  spec.bound = make_bound("r + 1", "3");
  rep = bound_check(picard_solve(spec).solution, spec);
  CHECK_FALSE(rep.ok); // 4 > 3
  CHECK(rep.margin == -1.0);
}

TEST_CASE("bound_check: solution outside the ball") {
  auto spec = make_spec(TimeScale::integers(3), TimeScale::integers(3), "3");
  spec.bound = make_bound("1", "x*y");
  const auto rep = bound_check(picard_solve(spec).solution, spec);
  CHECK(rep.inequality_ok);
  CHECK_FALSE(rep.ball_ok);
  CHECK(rep.failed_clause == "||z|| <= g0");
}

TEST_CASE("bound_check warns when G decreases in r") {
  auto spec = make_spec(TimeScale::integers(2), TimeScale::integers(2), "0");
  spec.bound = make_bound("1 / (1 + r)", "4");
  CHECK_FALSE(bound_check(picard_solve(spec).solution, spec).warnings.empty());
}

TEST_CASE("bound audits need a BoundSpec") {
  const auto spec = make_spec(TimeScale::integers(2), TimeScale::integers(2), "1");
  const auto z = picard_solve(spec).solution;
  CHECK_THROWS_AS(bound_check(z, spec), PreconditionError);
  CHECK_THROWS_AS(modulus_check(z, spec), PreconditionError);
}

TEST_CASE("modulus_check") {
  auto spec = make_spec(hybrid(), TimeScale({{0, 1}}), "1", 1, 0.25);
  spec.bound = make_bound("1", "x*y");
  auto z = picard_solve(spec).solution;
  auto rep = modulus_check(z, spec);
  CHECK(rep.ok);
  CHECK(rep.pairs_checked == (z.rows() * z.cols()) * (z.rows() * z.cols()));
  CHECK(std::abs(rep.margin) <= 1e-12);

  // z = 0 always satisfies it
  auto zero = make_spec(TimeScale::integers(3), TimeScale::integers(3), "0");
  zero.bound = make_bound("1", "x*y");
  CHECK(modulus_check(picard_solve(zero).solution, zero).ok);

  // a perturbed grid violates it
  z.at(2, 2)[0] += 1.0;
  CHECK_FALSE(modulus_check(z, spec).ok);
}

TEST_CASE("bound audits on the classical problem with the series majorant") {
  auto spec = make_spec(TimeScale::interval(1), TimeScale::interval(1), "1 + z1", 1, 0.05);
  spec.bound = make_bound("1 + r", "x*y + (x*y)^2/4 + (x*y)^3/36 + (x*y)^4/576 + (x*y)^5/14400 + (x*y)^6/518400");
  const auto res = picard_solve(spec);
  CHECK(res.report.converged);
  CHECK(res.report.bound_ok == true);
  CHECK(res.report.modulus_ok == true);
  const auto m = modulus_check(res.solution, spec);
  CHECK(m.pairs_checked == 400); // 21 x 21 lattice is sampled
}
