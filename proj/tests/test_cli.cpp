#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "cli_app.hpp"

using namespace lpp;
using namespace lpp::cli;

namespace {

struct Result {
  int code;
  std::string out, err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

/** Runs the built binary with the given arguments, capturing both streams and the exit code. */
Result run_cli(const std::string& args) {
  const std::string out_path = "cli_test_stdout.txt", err_path = "cli_test_stderr.txt";
  const std::string cmd = std::string(LPP_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out_path), slurp(err_path)};
}

/** CSV lines that are not '#' header lines. */
std::string csv_body(const std::string& text) {
  std::istringstream in(text);
  std::string line, body;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') body += line + "\n";
  return body;
}

}  // namespace

TEST_CASE("simulate example reports about one half", "[cli]") {
  const Result r = run_cli("simulate --rows 2 --cols 2 --samples 1000000 --seed 7 --event tail --t1 0 --t2 0");
  REQUIRE(r.code == 0);
  const Output o = parse_json(r.out);
  REQUIRE(o.rows.size() == 1);
  const double v = o.rows[0]["value_re"].get<double>(), se = o.rows[0]["stderr"].get<double>();
  CHECK(o.rows[0]["quantity"] == "mc_tail");
  CHECK(std::abs(v - 0.5) < 4.0 * se);
  CHECK(o.config["samples"] == "1000000");
  CHECK(o.config["seed"] == "7");
}

TEST_CASE("exact finite-density example on the single-path grid", "[cli]") {
  const Result r = run_cli("exact finite-density --m 1 --n 1 --M 2 --N 1 --s1 1 --s2 1");
  REQUIRE(r.code == 0);
  const Output o = parse_json(r.out);
  REQUIRE(o.rows.size() == 2);
  CHECK(o.rows[0]["k1"] == -1);
  CHECK(o.rows[0]["k2"] == -1);
  CHECK(std::abs(o.rows[0]["value_re"].get<double>() - std::exp(-2.0)) < 1e-6);
  CHECK(o.rows[1]["k1"] == 1);
  CHECK(o.rows[1]["k2"] == 1);
  CHECK(o.rows[0]["runtime_ms"].get<double>() == 0.0);

  const Result quiet = run_cli("--no-terms exact finite-density --m 1 --n 1 --M 2 --N 1 --s1 1 --s2 1");
  REQUIRE(quiet.code == 0);
  CHECK(parse_json(quiet.out).rows.size() == 1);
}

TEST_CASE("verify example writes CSV with small relative differences", "[cli]") {
  const Result r = run_cli("verify --which cauchy-gen --trials 100 --size 5 --seed 1");
  REQUIRE(r.code == 0);
  std::istringstream in(csv_body(r.out));
  std::string line;
  std::getline(in, line);
  CHECK(line == "identity,size,seed,lhs_re,lhs_im,rhs_re,rhs_im,rel_diff");
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const double rel = std::stod(line.substr(line.rfind(',') + 1));
    CHECK(rel < 1e-9);
  }
  CHECK(n == 100);
}

TEST_CASE("tw reports F_GUE(0)", "[cli]") {
  const Result r = run_cli("tw --s 0 --format csv");
  REQUIRE(r.code == 0);
  const std::string body = csv_body(r.out);
  const auto nl = body.find('\n');
  const std::string row = body.substr(nl + 1);
  CHECK(row.rfind("fgue,", 0) == 0);
  CHECK(std::abs(std::stod(row.substr(5)) - 0.969372828355263) < 1e-12);
}

TEST_CASE("validation failures exit with code 2", "[cli]") {
  const Result unknown = run_cli("simulate --bogus 3");
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("simulate") != std::string::npos);
  CHECK(run_cli("simulate --samples 0").code == 2);
  CHECK(run_cli("simulate --m 3 --cols 2").code == 2);
  CHECK(run_cli("exact tail --N 9").code == 2);
  CHECK(run_cli("limit-density --gamma 1.0").code == 2);
  CHECK(run_cli("").code == 2);
}

TEST_CASE("an unwritable output path exits with code 4", "[cli]") {
  CHECK(run_cli("--out /nonexistent_dir/x.json tw --s 0").code == 4);
}

TEST_CASE("config file values are defaults that flags override", "[cli]") {
  {
    std::ofstream f("cli_test_config.txt");
    f << "# comment\nsamples = 2000\nseed=11\n";
  }
  const Result a = run_cli("--config cli_test_config.txt simulate");
  REQUIRE(a.code == 0);
  const Output oa = parse_json(a.out);
  CHECK(oa.config["samples"] == "2000");
  CHECK(oa.config["seed"] == "11");
  const Result b = run_cli("--config cli_test_config.txt simulate --samples 3000");
  REQUIRE(b.code == 0);
  CHECK(parse_json(b.out).config["samples"] == "3000");

  {
    std::ofstream f("cli_test_bad_config.txt");
    f << "not_an_option=1\n";
  }
  CHECK(run_cli("--config cli_test_bad_config.txt simulate").code == 2);
  CHECK(run_cli("--config cli_test_missing_config.txt simulate").code == 4);
}

TEST_CASE("JSON output round-trips", "[cli][property]") {
  Output o;
  o.config["subcommand"] = "exact tail";
  o.config["t1"] = "0.25";
  o.rows.push_back(cli::detail::report_row("tail", cplx(0.1234567890123456789, -1e-17), 0.0, -1, -1, 1.5e-9, 0.0, 3));
  o.rows.push_back(cli::detail::report_row("tail", cplx(1.0 / 3.0, 0.0), 0.0, 1, 2, 2.0, 0.0, 3));
  o.diagnostic = "imag_residue";
  CHECK(parse_json(to_json(o)) == o);

  const Result r = run_cli("exact tail --M 2 --N 1 --t1 0.4 --t2 1.3");
  REQUIRE(r.code == 0);
  CHECK(to_json(parse_json(r.out)) == r.out);
}

TEST_CASE("CSV header and row layout", "[cli]") {
  Output o;
  o.config["subcommand"] = "tw";
  o.rows.push_back(cli::detail::report_row("fgue", cplx(0.5, 0.0), 0.0, -1, -1, 0.0, 0.0, 0));
  const std::string text = to_csv(o);
  CHECK(text.rfind("# lpp 1.0.0\n# subcommand=tw\n", 0) == 0);
  CHECK(csv_body(text) == "quantity,value_re,value_im,stderr,k1,k2,term_abs,runtime_ms,seed\nfgue,0.5,0,0,-1,-1,0,0,0\n");
}

TEST_CASE("imaginary residue threshold", "[cli]") {
  CHECK_FALSE(imag_residue(cplx(1.0, 5e-5)));
  CHECK(imag_residue(cplx(1.0, 2e-4)));
  CHECK_FALSE(imag_residue(cplx(0.0, 0.0)));
}

TEST_CASE("output bodies do not depend on the thread count", "[cli][property]") {
  const std::string sim = "simulate --rows 3 --cols 3 --samples 200000 --seed 5 --event interval --t1 1 --t2 1";
  const Output a = parse_json(run_cli("--threads 1 " + sim).out);
  const Output b = parse_json(run_cli("--threads 4 " + sim).out);
  CHECK(a.rows == b.rows);
  CHECK(a.diagnostic == b.diagnostic);

  const std::string ver = "verify --which cpq --trials 20 --size 3 --seed 2";
  CHECK(csv_body(run_cli("--threads 1 " + ver).out) == csv_body(run_cli("--threads 4 " + ver).out));

  const std::string ex = "exact geodesic-prob --M 2 --N 1";
  CHECK(parse_json(run_cli("--threads 1 " + ex).out).rows == parse_json(run_cli("--threads 4 " + ex).out).rows);
}
