#pragma once

#include "tsg/config.hpp"
#include "tsg/delta_calculus.hpp"
#include "tsg/goursat.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace tsg {

/// Process exit codes of the solve/study/verify commands.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitCheckFailed = 2, ///< non-convergence, failed audit, non-monotone study
};

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  bool fault_inject = false; ///< verify only: perturb the solution before auditing
};

/// Solution CSV: header "x,y,z1,...,zn", one row per lattice point, row-major
/// by x then y, shortest round-trip decimal formatting.
void write_solution_csv(std::ostream& out, const GridFunction2D& z);
/// Reads a solution CSV written by write_solution_csv onto the given lattice.
GridFunction2D read_solution_csv(std::istream& in, const TimeScale& scale1, const TimeScale& scale2,
                                 std::size_t dim);

int cmd_solve(const RunConfig& config, const CommandOptions& opts, std::ostream& log, std::ostream& err);
int cmd_study(const RunConfig& config, const CommandOptions& opts, std::ostream& log, std::ostream& err);
int cmd_verify(const RunConfig& config, const CommandOptions& opts, std::ostream& log, std::ostream& err);

} // namespace tsg
