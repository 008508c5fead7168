#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"
#include "slln_lab/io.hpp"

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell, capturing stdout (stderr discarded unless redirected in args).
Outcome cli(const std::string& args) {
  const std::string cmd = std::string("'") + SLLN_LAB_CLI + "' " + args;
  Outcome o;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) o.out.append(buf.data(), n);
  const int status = pclose(p);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += line.find(needle) != std::string::npos;
  return n;
}

}  // namespace

TEST_CASE("simulate-wk output is byte-identical across runs") {
  const auto a = cli("simulate-wk --gamma 2 --tau 1 --kmax 100 --seed 7");
  const auto b = cli("simulate-wk --gamma 2 --tau 1 --kmax 100 --seed 7");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("seed,scale,k,value\n", 0) == 0);
  CHECK(count_lines_with(a.out, "7,normalized,") == 100);
  const auto c = cli("simulate-wk --gamma 2 --tau 1 --kmax 100 --seed 8");
  CHECK(c.out != a.out);
}

TEST_CASE("oracle s_jk on an empty product prints 1") {
  const auto r = cli("oracle s_jk --j 10 --k 10 --gamma 3");
  CHECK(r.code == 0);
  CHECK(r.out == "1\n");
}

TEST_CASE("evt conditions give five bounded verdict lines") {
  const auto r = cli("check-conditions prop2 --gamma 2 --tau 1 --delta 0.5 --kmax 100000 2>&1 >/dev/null");
  CHECK(r.code == 0);
  CHECK(count_lines_with(r.out, " bounded ") == 5);
  CHECK(count_lines_with(r.out, "diverging") == 0);
}

TEST_CASE("exit codes") {
  CHECK(cli("oracle s_jk --j 11 --k 10 --gamma 1 2>/dev/null").code == 2);
  CHECK(cli("simulate-wk --gamma -1 2>/dev/null").code == 2);
  CHECK(cli("no-such-command 2>/dev/null").code == 2);
  CHECK(cli("experiment /nonexistent/config.json 2>/dev/null").code == 2);
  CHECK(cli("check-conditions newman --model stationary --rho power --rho-exponent 1 2>/dev/null").code == 1);
  CHECK(cli("check-conditions newman --model stationary --rho power --rho-exponent 2 2>/dev/null").code == 0);
}

TEST_CASE("output files, formats and the output directory variable") {
  const auto dir = std::filesystem::temp_directory_path() / "slln_lab_cli_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string env = "SLLN_LAB_OUTPUT_DIR='" + dir.string() + "' ";
  const std::string cmd = env + "'" + SLLN_LAB_CLI + "' simulate-wk --kmax 20 --seed 3 --format json -o path.json";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const auto j = slln::json::parse(slln::read_file((dir / "path.json").string()));
  const auto path = slln::wk_path_from_json(j);
  CHECK(path.values.size() == 20);
  CHECK(path.seed == 3);

  CHECK(cli("simulate-wk --kmax 20 -o /nonexistent-dir/x.csv 2>/dev/null").code == 2);

  // experiment subcommand end to end
  const auto cfg = dir / "cfg.json";
  slln::write_file_atomic(cfg.string(),
                          R"({"experiment_id":"wk_convergence","params":{"gamma":2,"tau":1},)"
                          R"("replications":20,"grid":[10,50]})");
  const auto e = cli("experiment '" + cfg.string() + "' --threads 2");
  CHECK(e.code == 0);
  const auto res = slln::json::parse(e.out);
  CHECK(res.at("replications") == 20);
  CHECK(res.at("rows").size() == 2);
  slln::write_file_atomic(cfg.string(), R"({"experiment_id":"wk_convergence","bogus":1,"grid":[10]})");
  CHECK(cli("experiment '" + cfg.string() + "' 2>/dev/null").code == 2);
  std::filesystem::remove_all(dir);
}
