#pragma once

#include "tsg/delta_calculus.hpp"
#include "tsg/error.hpp"
#include "tsg/rhs_expr.hpp"
#include "tsg/time_scale.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tsg {

/// Growth bound ||f(x, y, u)|| <= G(x, y, ||u||) and a candidate solution g0
/// of the scalar inequality g(x, y) >= iint_0^x iint_0^y G(s, t, g(s, t)).
struct BoundSpec {
  RhsExpr G;  ///< variables {x, y, r}
  RhsExpr g0; ///< variables {x, y}
};

/// Input for  z^{Gamma Delta}(x, y) = f(x, y, z),  z(x, 0) = z(0, y) = 0.
struct ProblemSpec {
  TimeScale scale1 = TimeScale::integers(1);
  TimeScale scale2 = TimeScale::integers(1);
  RhsExpr rhs; ///< variables {x, y, z1..zn}
  std::size_t dim = 1;
  double h = 0.1;       ///< step used to discretize dense segments
  double delta = 1e-9;  ///< partition fineness on the working lattice
  double tol = 1e-10;   ///< sup-norm stopping tolerance
  int max_iter = 200;
  std::optional<BoundSpec> bound;

  /// Throws ValidationError naming the offending field.
  void validate() const;
  TimeScale working_scale1() const { return discretize(scale1, h); }
  TimeScale working_scale2() const { return discretize(scale2, h); }
};

/// RHS evaluation failed at a lattice point.
class RhsEvaluationError : public EvalError {
public:
  RhsEvaluationError(double x, double y, const std::string& what) : EvalError(what), x_(x), y_(y) {}
  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

private:
  double x_, y_;
};

/// The integral operator (Fz)(x, y) = iint_{[0,x) x [0,y)} f(s, t, z(s, t))
/// on the working lattice. Partitions of every [0, x_i] and [0, y_j] are
/// built once.
class IntegralOperator {
public:
  explicit IntegralOperator(const ProblemSpec& spec);

  const TimeScale& scale1() const noexcept { return scale1_; }
  const TimeScale& scale2() const noexcept { return scale2_; }

  /// f(x, y, z(x, y)) at every lattice point.
  GridFunction2D rhs_grid(const GridFunction2D& z) const;
  GridFunction2D apply(const GridFunction2D& z) const;
  /// iint over [0, x_i] x [0, y_j] of a lattice-sampled integrand.
  Vec integrate_from_origin(const GridFunction2D& g, std::size_t i, std::size_t j) const;

  GridFunction2D zeros() const { return GridFunction2D(scale1_, scale2_, dim_); }

private:
  RhsExpr rhs_;
  std::size_t dim_;
  TimeScale scale1_;
  TimeScale scale2_;
  std::vector<AxisCells> prefix1_;
  std::vector<AxisCells> prefix2_;
};

GridFunction2D apply_F(const GridFunction2D& z, const ProblemSpec& spec);

struct SolveReport {
  int iterations = 0;
  double final_delta_sup = 0.0;
  double residual_sup = 0.0;
  std::optional<bool> bound_ok;
  std::optional<bool> modulus_ok;
  bool converged = false;
};

struct SolveResult {
  GridFunction2D solution;
  SolveReport report;
};

/// Successive approximation z_0 = 0, z_{k+1} = F(z_k) until the sup-norm
/// increment is <= tol or max_iter is reached. On exit without convergence
/// the last iterate is returned with converged = false.
SolveResult picard_solve(const ProblemSpec& spec);

/// sup over interior lattice points of |z^{Gamma Delta} - f(x, y, z)|.
double residual(const GridFunction2D& z, const ProblemSpec& spec);

struct LatticePoint {
  std::size_t i = 0;
  std::size_t j = 0;
  double x = 0.0;
  double y = 0.0;
};

struct BoundReport {
  bool ok = false;
  bool inequality_ok = false; ///< g0 >= iint G(s, t, g0)
  bool ball_ok = false;       ///< ||z|| <= g0
  /// Smallest slack over both clauses; negative when a clause fails.
  double margin = 0.0;
  /// First failing lattice point in row-major order.
  std::optional<LatticePoint> first_failure;
  std::string failed_clause;
  /// Sampled evidence that G is not nondecreasing in r, if any.
  std::vector<std::string> warnings;
};

BoundReport bound_check(const GridFunction2D& z, const ProblemSpec& spec);

struct ModulusReport {
  bool ok = false;
  double margin = 0.0;
  std::size_t pairs_checked = 0;
  std::optional<std::pair<LatticePoint, LatticePoint>> worst_pair;
};

/// ||z(p1) - z(p2)|| <= |iint_0^{x2} iint_{y1}^{y2} G| + |iint_{x1}^{x2} iint_0^{y1} G|
/// over all pairs of a lattice with at most 400 points, otherwise over 400
/// pairs drawn with a fixed seed.
ModulusReport modulus_check(const GridFunction2D& z, const ProblemSpec& spec);

struct EquivalenceReport {
  SolveReport solve;
  double residual = 0.0;         ///< differential form
  double fixed_point_gap = 0.0;  ///< ||F(z) - z||
};

/// Both directions of the differential/integral equivalence for a given grid.
EquivalenceReport audit_solution(const GridFunction2D& z, const ProblemSpec& spec);
/// Solves, then audits.
EquivalenceReport equivalence_check(const ProblemSpec& spec);

} // namespace tsg
