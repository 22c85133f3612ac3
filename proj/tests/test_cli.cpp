#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "scalefit/io.hpp"

using namespace scalefit;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

// Runs the built binary, capturing stdout; stderr goes to a scratch file so
// diagnostics never mix with data. With raw = true the string is executed as
// given (for environment-variable prefixes).
RunResult run_cli(const std::string& args, bool raw = false) {
  const std::string command =
      raw ? args : std::string(SCALEFIT_CLI_PATH) + " " + args + " 2>cli_stderr.txt";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  while (std::size_t got = std::fread(buffer, 1, sizeof(buffer), pipe)) {
    result.output.append(buffer, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

struct Cleanup {
  std::vector<std::string> paths;
  ~Cleanup() {
    for (const auto& p : paths) std::remove(p.c_str());
  }
};

}  // namespace

TEST_CASE("gen writes deterministic csv and validates flags") {
  Cleanup cleanup{{"cli_gen_a.csv", "cli_gen_b.csv", "cli_stderr.txt"}};
  const std::string flags =
      "gen --loc sine --scale linear --noise gaussian --n 120 --seed 7 "
      "--scale-base 0.2 --out ";
  CHECK(run_cli(flags + "cli_gen_a.csv").exit_code == 0);
  CHECK(run_cli(flags + "cli_gen_b.csv").exit_code == 0);
  const std::string a = read_file("cli_gen_a.csv");
  CHECK(a == read_file("cli_gen_b.csv"));
  CHECK(count_lines(a) == 121);  // header + rows

  CHECK(run_cli("gen --n 0 --out cli_gen_a.csv").exit_code == 2);
  CHECK(run_cli("gen --n 10 --noise cauchy --out cli_gen_a.csv").exit_code == 2);
  CHECK(run_cli("gen --n 10 --out /no/such/dir/out.csv").exit_code == 3);

  const RunResult stdout_run = run_cli("gen --n 5 --seed 1 --out -");
  CHECK(stdout_run.exit_code == 0);
  CHECK(count_lines(stdout_run.output) == 6);
}

TEST_CASE("fit, curves and model files") {
  Cleanup cleanup{{"cli_data.csv", "cli_q.sfm", "cli_iqr.sfm", "cli_asym.sfm", "cli_mad.sfm",
                   "cli_curves.csv", "cli_stderr.txt"}};
  REQUIRE(run_cli("gen --loc sine --scale linear --noise gaussian --n 200 --seed 3 "
                  "--scale-base 0.3 --scale-slope 0.5 --out cli_data.csv")
              .exit_code == 0);

  CHECK(run_cli("fit quantile --data cli_data.csv --tau 0.5 --lambda 0.01 --gamma 4 "
                "--out cli_q.sfm")
            .exit_code == 0);
  CHECK(run_cli("fit iqr --data cli_data.csv --tau 0.25,0.75 --lambda 0.01 --gamma 4 "
                "--out cli_iqr.sfm")
            .exit_code == 0);
  CHECK(run_cli("fit asym --data cli_data.csv --lambda 0.01 --gamma 4 --out cli_asym.sfm")
            .exit_code == 0);
  CHECK(run_cli("fit mad --data cli_data.csv --lambda1 0.01 --lambda2 0.01 --eps 0.1 "
                "--gamma 4 --out cli_mad.sfm")
            .exit_code == 0);

  // model files load back with the expected shapes
  const Model iqr = load_model("cli_iqr.sfm");
  REQUIRE(std::holds_alternative<CombinationModel>(iqr));
  const auto& combo = std::get<CombinationModel>(iqr);
  CHECK(combo.weights == std::vector<double>{-1.0, 1.0});
  const Model asym = load_model("cli_asym.sfm");
  REQUIRE(std::holds_alternative<CombinationModel>(asym));
  CHECK(std::get<CombinationModel>(asym).weights == std::vector<double>{1.0, -2.0, 1.0});
  CHECK(std::holds_alternative<MadModel>(load_model("cli_mad.sfm")));

  // curves: header + grid rows, one column per model
  CHECK(run_cli("curves --model cli_q.sfm,cli_iqr.sfm,cli_mad.sfm --grid 0.05:0.95:21 "
                "--double-mad --out cli_curves.csv")
            .exit_code == 0);
  const std::string curves = read_file("cli_curves.csv");
  CHECK(count_lines(curves) == 22);
  CHECK(curves.substr(0, curves.find('\n')) == "x,q0.5,iqr,2xmad");

  CHECK(run_cli("curves --model cli_q.sfm --grid 0:1:0 --out -").exit_code == 2);
  CHECK(run_cli("curves --model missing.sfm --grid 0:1:5 --out -").exit_code == 3);
  CHECK(run_cli("fit quantile --data cli_data.csv --tau 1.5 --out cli_q.sfm").exit_code == 2);
  CHECK(run_cli("fit quantile --data nope.csv --out cli_q.sfm").exit_code == 3);
  CHECK(run_cli("fit quantile --data cli_data.csv --tau 0.5 --lambda 0.01 --gamma 4 "
                "--max-iter 1 --tol 1e-15 --out cli_q.sfm")
            .exit_code == 4);
}

TEST_CASE("select reports the grid and the argmin") {
  Cleanup cleanup{{"cli_sel_data.csv", "cli_sel.csv", "cli_stderr.txt"}};
  REQUIRE(run_cli("gen --loc sine --scale constant --scale-base 0.3 --n 80 --seed 5 "
                  "--out cli_sel_data.csv")
              .exit_code == 0);
  const RunResult result = run_cli(
      "select --data cli_sel_data.csv --tau 0.5 --lambdas 0.01,0.1 --gammas 1,4 --folds 3 "
      "--out -");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("lambda,gamma,mean_risk,status") != std::string::npos);
  CHECK(result.output.find("# selected lambda=") != std::string::npos);
  CHECK(count_lines(result.output) == 6);  // header + 4 cells + selection
}

TEST_CASE("converge emits a report") {
  Cleanup cleanup{{"cli_conv.csv", "cli_stderr.txt"}};
  const RunResult result = run_cli(
      "converge --loc sine --loc-amplitude 0.5 --scale linear --scale-base 0.5 "
      "--scale-slope 0.5 --noise gaussian --e1 0.2 --e2 0.2 --sizes 40,80 --eps 0.1 "
      "--gamma 2 --exp-seed 9 --eval-points 2000 --out cli_conv.csv");
  CHECK(result.exit_code == 0);
  const std::string report = read_file("cli_conv.csv");
  CHECK(report.find("n,lambda1,lambda2,l1_median") != std::string::npos);
  CHECK(report.find("40,") != std::string::npos);
  CHECK(report.find("80,") != std::string::npos);
  CHECK(report.find(",ok") != std::string::npos);

  CHECK(run_cli("converge --e1 0.3 --e2 0.3 --sizes 40,80 --out cli_conv.csv").exit_code == 2);
}

TEST_CASE("SCALEFIT_THREADS caps workers without changing results") {
  Cleanup cleanup{{"cli_thr_data.csv", "cli_thr_a.csv", "cli_thr_b.csv", "cli_stderr.txt"}};
  REQUIRE(run_cli("gen --loc sine --scale linear --scale-base 0.5 --noise gaussian --n 60 "
                  "--seed 8 --out cli_thr_data.csv")
              .exit_code == 0);
  const std::string select =
      "select --data cli_thr_data.csv --tau 0.5 --lambdas 0.01,0.1 --gammas 1,4 --folds 3 "
      "--out ";
  CHECK(run_cli("SCALEFIT_THREADS=1 " + std::string(SCALEFIT_CLI_PATH) + " " + select +
                    "cli_thr_a.csv 2>/dev/null",
                true)
            .exit_code == 0);
  CHECK(run_cli(select + "cli_thr_b.csv").exit_code == 0);
  CHECK(read_file("cli_thr_a.csv") == read_file("cli_thr_b.csv"));
}

TEST_CASE("config file supplies defaults, flags override") {
  Cleanup cleanup{{"cli_cfg.conf", "cli_cfg_a.csv", "cli_cfg_b.csv", "cli_stderr.txt"}};
  {
    std::ofstream cfg("cli_cfg.conf");
    cfg << "# generator settings\n";
    cfg << "n = 30\n";
    cfg << "seed = 21\n";
    cfg << "loc = sine\n";
  }
  CHECK(run_cli("gen --config cli_cfg.conf --out cli_cfg_a.csv").exit_code == 0);
  CHECK(count_lines(read_file("cli_cfg_a.csv")) == 31);
  // flag wins over the file
  CHECK(run_cli("gen --config cli_cfg.conf --n 10 --out cli_cfg_b.csv").exit_code == 0);
  CHECK(count_lines(read_file("cli_cfg_b.csv")) == 11);
}
