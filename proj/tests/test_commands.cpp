#include "tsg/commands.hpp"
#include "tsg/config.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tsg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tsg_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Run {
  int code;
  std::string log, err;
};

template <class Cmd>
Run run(Cmd cmd, const std::string& cfg_text, const fs::path& out, bool fault = false) {
  const RunConfig cfg = parse_config(cfg_text);
  CommandOptions opts;
  opts.out_dir = out;
  opts.fault_inject = fault;
  std::ostringstream log, err;
  const int code = cmd(cfg, opts, log, err);
  return {code, log.str(), err.str()};
}

const std::string kIntegers3 = "scale1 = lattice(0,3,1)\nscale2 = lattice(0,3,1)\n";

} // namespace

TEST_CASE("solve writes the CSV and report") {
  const auto dir = scratch("solve");
  auto r = run(cmd_solve, kIntegers3 + "rhs = 1\n", dir);
  CHECK(r.code == kExitOk);
  std::string csv = slurp(dir / "solution.csv");
  CHECK(csv.rfind("x,y,z1\n", 0) == 0);
  CHECK(csv.find("\n2,2,4\n") != std::string::npos);
  CHECK(slurp(dir / "report.txt").find("converged: true") != std::string::npos);

  r = run(cmd_solve, kIntegers3 + "rhs = z1 + 1\n", dir);
  CHECK(r.code == kExitOk);
  csv = slurp(dir / "solution.csv");
  CHECK(csv.find("\n2,2,5\n") != std::string::npos);
  CHECK(csv.find("\n3,3,19\n") != std::string::npos);
}

TEST_CASE("solve exit codes") {
  const auto dir = scratch("codes");
  auto r = run(cmd_solve, "scale1 = [0,1]\nscale2 = [0,1]\nrhs = 1 + z1\nmax_iter = 2\n", dir);
  CHECK(r.code == kExitCheckFailed);
  CHECK(r.err.find("no convergence") != std::string::npos);
  CHECK(fs::exists(dir / "solution.csv"));

  r = run(cmd_solve, kIntegers3 + "rhs = sqrt(z1 - 1)\n", dir);
  CHECK(r.code == kExitError);
  CHECK(r.err.find("z1=0") != std::string::npos);
}

TEST_CASE("solve reports bound audits") {
  const auto dir = scratch("bounds");
  auto r = run(cmd_solve, kIntegers3 + "rhs = 1\nbound_G = 1\nbound_g0 = x*y\n", dir);
  CHECK(r.code == kExitOk);
  CHECK(r.log.find("bound_check: pass") != std::string::npos);
  CHECK(r.log.find("modulus_check: pass") != std::string::npos);
  r = run(cmd_solve, kIntegers3 + "rhs = z1 + 1\nbound_G = r + 1\nbound_g0 = 64\n", dir);
  CHECK(r.log.find("bound_check: fail") != std::string::npos);
  CHECK(r.log.find("first failure at (1,1)") != std::string::npos);
}

TEST_CASE("CSV round trip preserves the solution") {
  auto spec_cfg = parse_config("scale1 = [0,1]; {2}\nscale2 = [0,0.5]\nrhs = sin(x*y) + 0.3*z1\nh = 0.1\n");
  const auto res = picard_solve(spec_cfg.problem);
  std::stringstream buf;
  write_solution_csv(buf, res.solution);
  const auto back = read_solution_csv(buf, res.solution.scale1(), res.solution.scale2(), 1);
  CHECK(back == res.solution);
  CHECK(residual(back, spec_cfg.problem) <= 1e-12 + res.report.residual_sup);

  std::stringstream bad("x,y,z1\n0,0\n");
  CHECK_THROWS(read_solution_csv(bad, res.solution.scale1(), res.solution.scale2(), 1));
}

TEST_CASE("study on the unit square with a series oracle") {
  const auto dir = scratch("study");
  const auto r = run(cmd_study,
                     "scale1 = [0,1]\nscale2 = [0,1]\nrhs = 1 + z1\nstudy_h = 0.2, 0.1, 0.05, 0.025\n"
                     "oracle = 1.2795853023360673\n",
                     dir);
  CHECK(r.code == kExitOk);
  std::istringstream csv(slurp(dir / "study.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "h,error,order");
  std::vector<double> err, order;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string h, e, o;
    std::getline(row, h, ',');
    std::getline(row, e, ',');
    std::getline(row, o, ',');
    err.push_back(std::stod(e));
    if (o != "nan")
      order.push_back(std::stod(o));
  }
  REQUIRE(err.size() == 4);
  CHECK(err.back() < 0.02);
  REQUIRE(order.size() == 3);
  for (double o : order)
    CHECK(o >= 0.8);
}

TEST_CASE("study edge cases") {
  const auto dir = scratch("study_edge");
  // f = 1 is exact at every h
  auto r = run(cmd_study, "scale1 = [0,1]\nscale2 = [0,1]\nrhs = 1\nstudy_h = 0.5, 0.25\noracle = 1\n", dir);
  CHECK(r.code == kExitOk);
  CHECK(slurp(dir / "study.csv").find("0.5,0,nan") != std::string::npos);
  // without an oracle the reference is extrapolated
  r = run(cmd_study, "scale1 = [0,1]\nscale2 = [0,1]\nrhs = 1 + z1\nstudy_h = 0.2, 0.1\n", dir);
  CHECK(r.code == kExitOk);
  CHECK(r.log.find("richardson") != std::string::npos);
  // nothing to refine
  r = run(cmd_study, kIntegers3 + "rhs = 1\nstudy_h = 0.5, 0.25\n", dir);
  CHECK(r.code == kExitError);
  r = run(cmd_study, "scale1 = [0,1]\nscale2 = [0,1]\nrhs = 1\n", dir);
  CHECK(r.code == kExitError);
  // a wrong oracle makes the error stall
  r = run(cmd_study, "scale1 = [0,1]\nscale2 = [0,1]\nrhs = 1 + z1\nstudy_h = 0.2, 0.1, 0.05\noracle = 1\n", dir);
  CHECK(r.code == kExitCheckFailed);
}

TEST_CASE("verify passes on good solutions and catches injected faults") {
  const auto dir = scratch("verify");
  for (const std::string cfg : {kIntegers3 + "rhs = z1 + 1\n",
                                std::string("scale1 = [0,1]; {2}\nscale2 = [0,1]\nrhs = 1 + z1\nh = 0.1\n"),
                                kIntegers3 + "rhs = 1\nbound_G = 1\nbound_g0 = x*y\n"}) {
    auto r = run(cmd_verify, cfg, dir);
    CHECK_MESSAGE(r.code == kExitOk, r.log);
    r = run(cmd_verify, cfg, dir, true);
    CHECK_MESSAGE(r.code == kExitCheckFailed, r.log);
    CHECK(r.log.find("fault injected") != std::string::npos);
  }
}

#ifdef TSG_CLI_PATH
TEST_CASE("command-line binary") {
  const auto dir = scratch("cli");
  {
    std::ofstream(dir / "run.cfg") << kIntegers3 << "rhs = z1 + 1\n";
    std::ofstream(dir / "bad.cfg") << kIntegers3 << "rhs = z1 + 1\nh = 0\n";
  }
  const std::string exe = TSG_CLI_PATH;
  const auto sh = [&](const std::string& args) {
    const std::string cmd = "\"" + exe + "\" " + args + " > \"" + (dir / "stdout.txt").string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  CHECK(sh("solve --config \"" + (dir / "run.cfg").string() + "\" --out \"" + (dir / "o").string() + "\"") == 0);
  CHECK(slurp(dir / "o" / "solution.csv").find("\n2,2,5\n") != std::string::npos);
  CHECK(sh("verify --config \"" + (dir / "run.cfg").string() + "\" --out \"" + (dir / "o").string() + "\"") == 0);
  CHECK(sh("verify --fault-inject --config \"" + (dir / "run.cfg").string() + "\" --out \"" +
           (dir / "o").string() + "\"") == 2);
  CHECK(sh("solve --config \"" + (dir / "bad.cfg").string() + "\"") == 1);
  CHECK(slurp(dir / "stdout.txt").find("'h'") != std::string::npos);
  CHECK(sh("solve --config /nonexistent.cfg") == 1);
  CHECK(sh("") != 0);
}
#endif
