#include "tsg/commands.hpp"

#include "tsg/error.hpp"
#include "tsg/number_format.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace tsg {

void write_solution_csv(std::ostream& out, const GridFunction2D& z) {
  out << "x,y";
  for (std::size_t c = 1; c <= z.dim(); ++c)
    out << ",z" << c;
  out << '\n';
  for (std::size_t i = 0; i < z.rows(); ++i)
    for (std::size_t j = 0; j < z.cols(); ++j) {
      out << format_double(z.xs()[i]) << ',' << format_double(z.ys()[j]);
      for (double v : z.at(i, j))
        out << ',' << format_double(v);
      out << '\n';
    }
}

GridFunction2D read_solution_csv(std::istream& in, const TimeScale& scale1, const TimeScale& scale2,
                                 std::size_t dim) {
  GridFunction2D z(scale1, scale2, dim);
  std::string line;
  if (!std::getline(in, line))
    throw DomainError("solution CSV is empty");
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      fields.push_back(std::stod(cell));
    if (fields.size() != dim + 2)
      throw DomainError("solution CSV row " + std::to_string(row + 1) + " has " +
                        std::to_string(fields.size()) + " fields");
    const std::size_t i = scale1.index_of(fields[0]);
    const std::size_t j = scale2.index_of(fields[1]);
    if (i * z.cols() + j != row)
      throw DomainError("solution CSV rows are not in row-major lattice order");
    std::copy(fields.begin() + 2, fields.end(), z.at(i, j).begin());
    ++row;
  }
  if (row != z.rows() * z.cols())
    throw DomainError("solution CSV has " + std::to_string(row) + " rows, lattice has " +
                      std::to_string(z.rows() * z.cols()));
  return z;
}

namespace {

std::ofstream open_output(const CommandOptions& opts, const std::string& name) {
  std::filesystem::create_directories(opts.out_dir);
  const auto path = opts.out_dir / name;
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string fmt(double v) { return format_double(v); }

std::string point(const LatticePoint& p) { return "(" + fmt(p.x) + "," + fmt(p.y) + ")"; }

void describe_bounds(std::ostream& out, const GridFunction2D& z, const ProblemSpec& spec,
                     bool& all_ok) {
  if (!spec.bound) {
    out << "bound_check: skipped\nmodulus_check: skipped\n";
    return;
  }
  const BoundReport b = bound_check(z, spec);
  out << "bound_check: " << (b.ok ? "pass" : "fail") << " (margin " << fmt(b.margin);
  if (b.first_failure)
    out << ", first failure at " << point(*b.first_failure) << ": " << b.failed_clause;
  out << ")\n";
  for (const auto& w : b.warnings)
    out << "warning: " << w << '\n';
  const ModulusReport m = modulus_check(z, spec);
  out << "modulus_check: " << (m.ok ? "pass" : "fail") << " (margin " << fmt(m.margin) << ", pairs "
      << m.pairs_checked;
  if (!m.ok && m.worst_pair)
    out << ", worst pair " << point(m.worst_pair->first) << " " << point(m.worst_pair->second);
  out << ")\n";
  all_ok = all_ok && b.ok && m.ok;
}

double min_step(std::span<const double> pts) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < pts.size(); ++k)
    m = std::min(m, pts[k] - pts[k - 1]);
  return m;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    err << "error: invalid field '" << e.field() << "': " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

} // namespace

int cmd_solve(const RunConfig& config, const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemSpec& spec = config.problem;
    const SolveResult res = picard_solve(spec);

    {
      auto csv = open_output(opts, config.solution_csv);
      write_solution_csv(csv, res.solution);
    }

    std::ostringstream report;
    const SolveReport& r = res.report;
    report << "command: solve\n"
           << "converged: " << (r.converged ? "true" : "false") << '\n'
           << "iterations: " << r.iterations << '\n'
           << "final_increment: " << fmt(r.final_delta_sup) << '\n'
           << "residual: " << fmt(r.residual_sup) << '\n';
    bool bounds_ok = true;
    describe_bounds(report, res.solution, spec, bounds_ok);
    open_output(opts, config.report) << report.str();
    log << report.str();

    if (!r.converged) {
      err << "error: no convergence after " << r.iterations << " iterations (last increment "
          << fmt(r.final_delta_sup) << ")\n";
      return int(kExitCheckFailed);
    }
    return int(kExitOk);
  });
}

int cmd_study(const RunConfig& config, const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    if (config.study_h.empty())
      throw ValidationError("study_h", "study requires a non-empty study_h list");
    const ProblemSpec& base = config.problem;
    if (!base.scale1.has_dense_part() && !base.scale2.has_dense_part())
      throw ValidationError("study_h", "both scales are purely discrete; there is nothing to refine");

    const double px = config.probe_x.value_or(base.scale1.max());
    const double py = config.probe_y.value_or(base.scale2.max());
    const std::size_t comp = config.probe_component - 1;

    bool all_converged = true;
    const auto probe = [&](double h) {
      ProblemSpec spec = base;
      spec.h = h;
      const SolveResult res = picard_solve(spec);
      all_converged = all_converged && res.report.converged;
      const auto& z = res.solution;
      return z.at(z.scale1().index_of(px), z.scale2().index_of(py))[comp];
    };

    std::vector<double> values;
    for (double h : config.study_h)
      values.push_back(probe(h));

    double reference = 0.0;
    if (config.oracle) {
      reference = *config.oracle;
    } else {
      // first-order Richardson extrapolation from two finer grids
      const double hf = config.study_h.back();
      reference = 2.0 * probe(hf / 4.0) - probe(hf / 2.0);
    }

    auto csv = open_output(opts, config.study_csv);
    csv << "h,error,order\n";
    log << "reference: " << fmt(reference) << (config.oracle ? " (oracle)" : " (richardson)") << '\n';
    const double exact_tol = 1e-14 * (1.0 + std::abs(reference));
    bool monotone = true;
    bool orders_positive = true;
    std::vector<double> errors;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double e = std::abs(values[k] - reference);
      double order = std::numeric_limits<double>::quiet_NaN();
      if (k > 0) {
        const double prev = errors.back();
        if (prev > exact_tol && e > exact_tol)
          order = std::log(prev / e) / std::log(config.study_h[k - 1] / config.study_h[k]);
        if (e > exact_tol && !(e < prev))
          monotone = false;
        if (!std::isnan(order) && !(order > 0.0))
          orders_positive = false;
      }
      errors.push_back(e);
      const std::string order_text = std::isnan(order) ? "nan" : fmt(order);
      csv << fmt(config.study_h[k]) << ',' << fmt(e) << ',' << order_text << '\n';
      log << "h=" << fmt(config.study_h[k]) << " value=" << fmt(values[k]) << " error=" << fmt(e)
          << " order=" << order_text << '\n';
    }

    if (!all_converged) {
      err << "error: a study solve did not converge\n";
      return int(kExitCheckFailed);
    }
    if (!monotone || !orders_positive) {
      err << "error: error does not decrease monotonically under refinement\n";
      return int(kExitCheckFailed);
    }
    return int(kExitOk);
  });
}

int cmd_verify(const RunConfig& config, const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemSpec& spec = config.problem;
    SolveResult res = picard_solve(spec);
    GridFunction2D& z = res.solution;

    if (opts.fault_inject && z.rows() > 1 && z.cols() > 1) {
      const std::size_t i = std::max<std::size_t>(1, z.rows() / 2);
      const std::size_t j = std::max<std::size_t>(1, z.cols() / 2);
      auto v = z.at(i, j);
      v[0] += 1e-3 * (1.0 + std::abs(v[0]));
      log << "fault injected at (" << fmt(z.xs()[i]) << "," << fmt(z.ys()[j]) << ")\n";
    }

    const EquivalenceReport eq = audit_solution(z, spec);
    const double residual_limit =
        std::max(1e-10, 4.0 * spec.tol / (min_step(z.xs()) * min_step(z.ys())));
    const double gap_limit = 2.0 * spec.tol;

    const IntegralOperator F(spec);
    const Rect full{0.0, z.xs().back(), 0.0, z.ys().back()};
    std::optional<MvtReport> mvt;
    if (z.rows() > 1 && z.cols() > 1)
      mvt = mvt_containment_check(F.rhs_grid(z), full, spec.delta);

    const bool residual_ok = eq.residual <= residual_limit;
    const bool gap_ok = eq.fixed_point_gap <= gap_limit;
    bool all_ok = res.report.converged && residual_ok && gap_ok && (!mvt || mvt->ok);

    std::ostringstream report;
    report << "command: verify\n"
           << "converged: " << (res.report.converged ? "true" : "false") << '\n'
           << "iterations: " << res.report.iterations << '\n'
           << "residual: " << fmt(eq.residual) << " (limit " << fmt(residual_limit) << ") "
           << (residual_ok ? "pass" : "fail") << '\n'
           << "fixed_point_gap: " << fmt(eq.fixed_point_gap) << " (limit " << fmt(gap_limit) << ") "
           << (gap_ok ? "pass" : "fail") << '\n';
    if (mvt)
      report << "mvt_containment: " << (mvt->ok ? "pass" : "fail") << " (margin " << fmt(mvt->margin)
             << (mvt->hull_checked ? ", hull" : ", bounding box") << ")\n";
    else
      report << "mvt_containment: skipped (degenerate rectangle)\n";
    describe_bounds(report, z, spec, all_ok);
    log << report.str();
    open_output(opts, config.report) << report.str();

    if (!all_ok) {
      err << "error: verification failed\n";
      return int(kExitCheckFailed);
    }
    return int(kExitOk);
  });
}

} // namespace tsg
