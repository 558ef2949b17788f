#include "tsg/goursat.hpp"

#include "tsg/number_format.hpp"
#include "tsg/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace tsg {

void ProblemSpec::validate() const {
  if (!(h > 0.0) || !std::isfinite(h))
    throw ValidationError("h", "h must be positive, got " + format_double(h));
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ValidationError("delta", "delta must be positive, got " + format_double(delta));
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw ValidationError("tol", "tol must be positive, got " + format_double(tol));
  if (max_iter < 1)
    throw ValidationError("max_iter", "max_iter must be >= 1, got " + std::to_string(max_iter));
  if (dim < 1)
    throw ValidationError("dim", "dim must be >= 1");
  if (rhs.dim() != dim)
    throw ValidationError("rhs", "rhs has " + std::to_string(rhs.dim()) + " components, dim is " +
                                     std::to_string(dim));
  if (rhs.vars() != rhs_vars(dim))
    throw ValidationError("rhs", "rhs must be declared over x, y, z1..z" + std::to_string(dim));
  if (bound) {
    if (bound->G.dim() != 1)
      throw ValidationError("bound_G", "G must be scalar");
    if (bound->g0.dim() != 1)
      throw ValidationError("bound_g0", "g0 must be scalar");
  }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<AxisCells> prefix_cells(const TimeScale& T, double delta) {
  const auto pts = T.lattice();
  std::vector<AxisCells> out(pts.size());
  for (std::size_t i = 1; i < pts.size(); ++i)
    out[i] = axis_cells(T, make_partition(T, pts[0], pts[i], delta));
  return out;
}

std::string at_point(double x, double y) {
  return "(" + format_double(x) + "," + format_double(y) + ")";
}

} // namespace

IntegralOperator::IntegralOperator(const ProblemSpec& spec)
    : rhs_(spec.rhs), dim_(spec.dim), scale1_(spec.working_scale1()),
      scale2_(spec.working_scale2()) {
  spec.validate();
  prefix1_ = prefix_cells(scale1_, spec.delta);
  prefix2_ = prefix_cells(scale2_, spec.delta);
}

GridFunction2D IntegralOperator::rhs_grid(const GridFunction2D& z) const {
  if (z.rows() != prefix1_.size() || z.cols() != prefix2_.size() || z.dim() != dim_)
    throw DomainError("grid does not match the working lattice");
  GridFunction2D out(scale1_, scale2_, dim_);
  std::vector<double> args(2 + dim_);
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) {
      args[0] = z.xs()[i];
      args[1] = z.ys()[j];
      auto zij = z.at(i, j);
      std::copy(zij.begin(), zij.end(), args.begin() + 2);
      try {
        rhs_.eval(args, out.at(i, j));
      } catch (const EvalError& e) {
        throw RhsEvaluationError(args[0], args[1],
                                 "rhs evaluation failed at " + at_point(args[0], args[1]) + ": " + e.what());
      }
    }
  return out;
}

Vec IntegralOperator::integrate_from_origin(const GridFunction2D& g, std::size_t i, std::size_t j) const {
  if (i == 0 || j == 0)
    return Vec(g.dim(), 0.0);
  return iterated_integral(g, prefix1_[i], prefix2_[j]);
}

GridFunction2D IntegralOperator::apply(const GridFunction2D& z) const {
  const GridFunction2D fz = rhs_grid(z);
  GridFunction2D out = zeros();
  // rows are independent; each writes only its own slots
  parallel_for(out.rows(), [&](std::size_t i) {
    if (i == 0)
      return;
    for (std::size_t j = 1; j < out.cols(); ++j) {
      const Vec v = iterated_integral(fz, prefix1_[i], prefix2_[j]);
      std::copy(v.begin(), v.end(), out.at(i, j).begin());
    }
  });
  return out;
}

GridFunction2D apply_F(const GridFunction2D& z, const ProblemSpec& spec) {
  return IntegralOperator(spec).apply(z);
}

// ---------------------------------------------------------------------------

SolveResult picard_solve(const ProblemSpec& spec) {
  const IntegralOperator F(spec);
  GridFunction2D z = F.zeros();
  SolveReport rep;
  for (int k = 1; k <= spec.max_iter; ++k) {
    GridFunction2D next = F.apply(z);
    rep.iterations = k;
    rep.final_delta_sup = sup_distance(next, z);
    z = std::move(next);
    if (rep.final_delta_sup <= spec.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.residual_sup = residual(z, spec);
  if (spec.bound) {
    rep.bound_ok = bound_check(z, spec).ok;
    rep.modulus_ok = modulus_check(z, spec).ok;
  }
  return {std::move(z), rep};
}

double residual(const GridFunction2D& z, const ProblemSpec& spec) {
  const IntegralOperator F(spec);
  const GridFunction2D fz = F.rhs_grid(z);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < z.rows(); ++i)
    for (std::size_t j = 0; j + 1 < z.cols(); ++j) {
      const Vec d = mixed_gamma_delta(z, i, j);
      auto f = fz.at(i, j);
      for (std::size_t c = 0; c < d.size(); ++c)
        worst = std::max(worst, std::abs(d[c] - f[c]));
    }
  return worst;
}

// ---------------------------------------------------------------------------
// bound audits

namespace {

double eval_g0(const BoundSpec& b, double x, double y) {
  const std::array<double, 2> args{x, y};
  return b.g0.eval(args)[0];
}

double eval_G(const BoundSpec& b, double x, double y, double r) {
  const std::array<double, 3> args{x, y, r};
  return b.G.eval(args)[0];
}

const BoundSpec& require_bound(const ProblemSpec& spec) {
  if (!spec.bound)
    throw PreconditionError("bound audit requires a BoundSpec (G and g0)");
  return *spec.bound;
}

// G(s, t, g0(s, t)) on the lattice of z.
GridFunction2D majorant_grid(const GridFunction2D& z, const BoundSpec& b) {
  return GridFunction2D::sample(z.scale1(), z.scale2(), 1, [&](double s, double t) {
    return Vec{eval_G(b, s, t, eval_g0(b, s, t))};
  });
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double c : v)
    m = std::max(m, std::abs(c));
  return m;
}

// Slack is treated as zero when within rounding of the compared magnitudes.
bool within(double slack, double a, double b) { return slack >= -1e-12 * (1.0 + std::abs(a) + std::abs(b)); }

} // namespace

BoundReport bound_check(const GridFunction2D& z, const ProblemSpec& spec) {
  const BoundSpec& b = require_bound(spec);
  const IntegralOperator F(spec);
  const GridFunction2D gG = majorant_grid(z, b);

  BoundReport rep;
  rep.inequality_ok = rep.ball_ok = true;
  rep.margin = std::numeric_limits<double>::infinity();
  const auto record = [&](std::size_t i, std::size_t j, double slack, bool ok, const char* clause) {
    rep.margin = std::min(rep.margin, slack);
    if (!ok && !rep.first_failure) {
      rep.first_failure = LatticePoint{i, j, z.xs()[i], z.ys()[j]};
      rep.failed_clause = clause;
    }
  };

  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) {
      const double x = z.xs()[i], y = z.ys()[j];
      const double g0 = eval_g0(b, x, y);
      if (g0 < 0.0 || gG.at(i, j)[0] < 0.0) {
        rep.inequality_ok = false;
        record(i, j, std::min(g0, gG.at(i, j)[0]), false, "nonnegativity of G and g0");
        continue;
      }
      const double integral = F.integrate_from_origin(gG, i, j)[0];
      const bool ineq = within(g0 - integral, g0, integral);
      rep.inequality_ok = rep.inequality_ok && ineq;
      record(i, j, g0 - integral, ineq, "g0 >= iint G(s,t,g0)");

      const double norm = sup_norm(z.at(i, j));
      const bool ball = within(g0 - norm, g0, norm);
      rep.ball_ok = rep.ball_ok && ball;
      record(i, j, g0 - norm, ball, "||z|| <= g0");

      // spot check: G nondecreasing in r
      const std::array<double, 4> rs{0.0, 0.5 * g0, g0, 2.0 * g0 + 1.0};
      for (std::size_t k = 1; k < rs.size(); ++k)
        if (eval_G(b, x, y, rs[k]) < eval_G(b, x, y, rs[k - 1]) && rep.warnings.size() < 8)
          rep.warnings.push_back("G decreases in r at " + at_point(x, y) + " between r=" +
                                 format_double(rs[k - 1]) + " and r=" + format_double(rs[k]));
    }
  rep.ok = rep.inequality_ok && rep.ball_ok;
  return rep;
}

ModulusReport modulus_check(const GridFunction2D& z, const ProblemSpec& spec) {
  const BoundSpec& b = require_bound(spec);
  const GridFunction2D gG = majorant_grid(z, b);
  const std::size_t n1 = z.rows(), n2 = z.cols();

  // cells[a][b] partitions [x_a, x_b] for a < b
  const auto interval_cells = [&](const TimeScale& T) {
    const auto pts = T.lattice();
    std::vector<std::vector<AxisCells>> cells(pts.size(), std::vector<AxisCells>(pts.size()));
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t c = a + 1; c < pts.size(); ++c)
        cells[a][c] = axis_cells(T, make_partition(T, pts[a], pts[c], spec.delta));
    return cells;
  };
  const auto cells1 = interval_cells(z.scale1());
  const auto cells2 = interval_cells(z.scale2());

  const std::size_t points = n1 * n2;
  const bool all_pairs = points <= 400;
  // memo over (a, b, c, d) with a < b, c < d; only for the exhaustive mode
  std::vector<double> memo(all_pairs ? n1 * n1 * n2 * n2 : 0, -1.0);

  // |iint_{x_a}^{x_b} iint_{y_c}^{y_d} G|; orientation only flips the sign
  const auto abs_integral = [&](std::size_t a, std::size_t bb, std::size_t c, std::size_t d) {
    if (a == bb || c == d)
      return 0.0;
    if (a > bb)
      std::swap(a, bb);
    if (c > d)
      std::swap(c, d);
    double* slot = all_pairs ? &memo[((a * n1 + bb) * n2 + c) * n2 + d] : nullptr;
    if (slot && *slot >= 0.0)
      return *slot;
    const double v = std::abs(iterated_integral(gG, cells1[a][bb], cells2[c][d])[0]);
    if (slot)
      *slot = v;
    return v;
  };

  ModulusReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  rep.ok = true;
  const auto check = [&](std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2) {
    auto v1 = z.at(i1, j1), v2 = z.at(i2, j2);
    double lhs = 0.0;
    for (std::size_t c = 0; c < v1.size(); ++c)
      lhs = std::max(lhs, std::abs(v1[c] - v2[c]));
    const double rhs = abs_integral(0, i2, j1, j2) + abs_integral(i1, i2, 0, j1);
    const double slack = rhs - lhs;
    if (slack < rep.margin) {
      rep.margin = slack;
      rep.worst_pair = {LatticePoint{i1, j1, z.xs()[i1], z.ys()[j1]},
                        LatticePoint{i2, j2, z.xs()[i2], z.ys()[j2]}};
    }
    rep.ok = rep.ok && within(slack, lhs, rhs);
    ++rep.pairs_checked;
  };

  if (all_pairs) {
    for (std::size_t p = 0; p < points; ++p)
      for (std::size_t q = 0; q < points; ++q)
        check(p / n2, p % n2, q / n2, q % n2);
  } else {
    std::mt19937_64 rng(20240611ULL);
    for (int k = 0; k < 400; ++k) {
      const std::size_t p = rng() % points, q = rng() % points;
      check(p / n2, p % n2, q / n2, q % n2);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

EquivalenceReport audit_solution(const GridFunction2D& z, const ProblemSpec& spec) {
  EquivalenceReport rep;
  rep.residual = residual(z, spec);
  rep.fixed_point_gap = sup_distance(apply_F(z, spec), z);
  return rep;
}

EquivalenceReport equivalence_check(const ProblemSpec& spec) {
  const SolveResult solved = picard_solve(spec);
  EquivalenceReport rep = audit_solution(solved.solution, spec);
  rep.solve = solved.report;
  return rep;
}

} // namespace tsg
