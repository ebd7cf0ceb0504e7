#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "grassmin/cli.hpp"
#include "grassmin/io.hpp"
#include "grassmin/points.hpp"
#include "grassmin/rng.hpp"

using namespace grassmin;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "grassmin_io_cli_tests";
    fs::remove_all(d);  // stale artifacts change test outcomes
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string p(const std::string& name) { return (work_dir() / name).string(); }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("grassmin");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

void write_family_2x2(const std::string& a_path, const std::string& c_path, double beta, double c) {
  save_matrix(a_path, SymMat::diag({1.0, 2.0}));
  save_matrix(c_path, SymMat::from(Mat(2, 2, {c, beta, beta, -c})));
}

nlohmann::json json_file(const std::string& path) {
  return nlohmann::json::parse(read_text(path));
}

}  // namespace

TEST_CASE("matrix round trip is exact") {
  Rng rng(900);
  Mat m(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = rng.normal() * std::pow(10.0, static_cast<int>(rng.next_u64() % 7) - 3);
  save_matrix(p("round.txt"), m);
  const Mat back = load_matrix_raw(p("round.txt"));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(back(i, j) == m(i, j));
}

TEST_CASE("matrix parse errors carry locations") {
  write_text(p("ragged.txt"), "2 3\n1 2 3\n4 5\n");
  CHECK_THROWS_WITH_AS(load_matrix_raw(p("ragged.txt")), doctest::Contains("ragged.txt:3"),
                       IoError);

  write_text(p("extra.txt"), "2 2\n1 2\n3 4 5\n");
  CHECK_THROWS_WITH_AS(load_matrix_raw(p("extra.txt")), doctest::Contains("more than"), IoError);

  write_text(p("header.txt"), "two two\n");
  CHECK_THROWS_AS(load_matrix_raw(p("header.txt")), IoError);
  CHECK_THROWS_AS(load_matrix_raw(p("missing_file.txt")), IoError);

  write_text(p("short.txt"), "3 3\n1 0 0\n0 1 0\n");
  CHECK_THROWS_WITH_AS(load_matrix_raw(p("short.txt")), doctest::Contains("end of file"), IoError);
}

TEST_CASE("asymmetry policy") {
  write_text(p("sym.txt"), "2 2\n1 0\n0 2\n");
  const LoadedSym clean = load_sym_matrix(p("sym.txt"));
  CHECK_FALSE(clean.symmetrized_with_warning);
  CHECK(clean.mat(0, 0) == 1.0);
  CHECK(clean.mat(1, 1) == 2.0);

  write_text(p("warn.txt"), "2 2\n1 1e-6\n0 2\n");  // asymmetry ~4e-7: warn + symmetrize
  const LoadedSym warned = load_sym_matrix(p("warn.txt"));
  CHECK(warned.symmetrized_with_warning);
  CHECK(warned.mat(0, 1) == doctest::Approx(5e-7).epsilon(1e-12));

  write_text(p("hard.txt"), "2 2\n1 0.1\n-0.1 2\n");
  CHECK_THROWS_WITH_AS(load_sym_matrix(p("hard.txt")), doctest::Contains("hard limit"), IoError);
}

TEST_CASE("fragment files") {
  write_text(p("frag.txt"), "0\n3\n1\n");
  const std::vector<int> idx = load_fragment(p("frag.txt"));
  REQUIRE(idx.size() == 3);
  CHECK(idx[0] == 0);
  CHECK(idx[1] == 3);

  write_text(p("frag_bad.txt"), "0\n1 2\n");
  CHECK_THROWS_AS(load_fragment(p("frag_bad.txt")), IoError);
  write_text(p("frag_neg.txt"), "-1\n");
  CHECK_THROWS_AS(load_fragment(p("frag_neg.txt")), IoError);
}

TEST_CASE("cli solve writes report, trace and final point") {
  write_family_2x2(p("A.txt"), p("C.txt"), 0.0, 0.1);
  const int rc = run_cli({"solve", "--A", p("A.txt"), "--C", p("C.txt"), "-m", "1",
                          "--method", "roothaan", "--p0", "file:" + p("Pup.txt"),
                          "--json", p("solve.json"), "--trace", p("solve.csv"),
                          "--pfinal", p("pfinal.txt")});
  // the p0 file must exist first: rebuild it and retry
  CHECK(rc != 0);

  save_matrix(p("Pup.txt"), SymMat::diag({1.0, 0.0}));
  const int rc2 = run_cli({"solve", "--A", p("A.txt"), "--C", p("C.txt"), "-m", "1",
                           "--method", "roothaan", "--p0", "file:" + p("Pup.txt"),
                           "--json", p("solve.json"), "--trace", p("solve.csv"),
                           "--pfinal", p("pfinal.txt")});
  REQUIRE(rc2 == 0);
  const auto j = json_file(p("solve.json"));
  CHECK(j["status"] == "converged");
  CHECK(std::fabs(j["J_final"].get<double>() - 0.1) <= 1e-12);
  CHECK(j["method"] == "roothaan");

  const std::string csv = read_text(p("solve.csv"));
  CHECK(csv.rfind("iter,J,residual,alpha\n", 0) == 0);

  const Mat pfinal = load_matrix_raw(p("pfinal.txt"));
  CHECK(pfinal(0, 0) == doctest::Approx(1.0).epsilon(1e-10));

  // spectral-C initial guess goes straight to the global minimum here
  const int rc3 = run_cli({"solve", "--A", p("A.txt"), "--C", p("C.txt"), "-m", "1",
                           "--method", "roothaan", "--p0", "spectral-C",
                           "--json", p("solve2.json")});
  REQUIRE(rc3 == 0);
  CHECK(std::fabs(json_file(p("solve2.json"))["J_final"].get<double>() + 0.1) <= 1e-12);
}

TEST_CASE("cli traces are byte-identical across reruns") {
  write_family_2x2(p("A.txt"), p("C.txt"), 0.05, 0.02);
  for (const char* name : {"t1.csv", "t2.csv"}) {
    const int rc = run_cli({"solve", "--A", p("A.txt"), "--C", p("C.txt"), "-m", "1",
                            "--method", "multistart", "--starts", "8", "--seed", "42",
                            "--json", p("ms.json"), "--trace", p(name)});
    REQUIRE(rc == 0);
  }
  CHECK(read_text(p("t1.csv")) == read_text(p("t2.csv")));
}

TEST_CASE("cli certify on the degenerate 3x3 example") {
  save_matrix(p("A3.txt"), SymMat::diag({1.0, 2.0, 3.0}));
  save_matrix(p("C3.txt"),
              SymMat::from(Mat(3, 3, {0, -0.25, 0, -0.25, 0, -0.25, 0, -0.25, 0})));
  const int rc = run_cli({"certify", "--A", p("A3.txt"), "--C", p("C3.txt"), "-m", "1",
                          "--json", p("cert.json"), "--hstar", p("hstar.txt")});
  REQUIRE(rc == 0);
  const auto j = json_file(p("cert.json"));
  CHECK_FALSE(j["certified"].get<bool>());
  CHECK(std::fabs(j["gap"].get<double>()) <= 1e-7);
  const Mat h = load_matrix_raw(p("hstar.txt"));
  CHECK(h(0, 1) == doctest::Approx(-1.0 / 9).epsilon(1e-8));
}

TEST_CASE("cli bath sweep on a synthetic slater rdm") {
  const SymMat gamma = random_grassmann(6, 3, 950).P;
  save_matrix(p("gamma.txt"), gamma);
  write_text(p("frag01.txt"), "0\n1\n");
  const int rc = run_cli({"bath", "--gamma", p("gamma.txt"), "--fragment", p("frag01.txt"),
                          "--m-min", "1", "--m-max", "3", "--sweep-csv", p("sweep.csv"),
                          "--emit-instance", p("inst_"), "--json", p("bath.json")});
  REQUIRE(rc == 0);
  const auto j = json_file(p("bath.json"));
  CHECK(j["L"] == 6);
  CHECK(j["l"] == 2);
  CHECK(j["slater"].get<bool>());
  CHECK(j["min_bath_dimension"] == 2);
  const auto rows = j["sweep"];
  REQUIRE(rows.size() == 3);
  // full disentanglement from m = 2 on
  CHECK(rows[1]["min_cost"].get<double>() <= 1e-9);
  CHECK(rows[2]["min_cost"].get<double>() <= 1e-9);
  CHECK(rows[0]["min_cost"].get<double>() > 1e-6);

  const Mat a = load_matrix_raw(p("inst_A.txt"));
  CHECK(a.rows() == 4);
}

TEST_CASE("cli oracle and bench") {
  write_family_2x2(p("A.txt"), p("C.txt"), 0.1, 0.0);
  const int rc = run_cli({"oracle", "--angle", "--A", p("A.txt"), "--C", p("C.txt"), "-m", "1",
                          "--grid", "20000", "--json", p("oracle.json")});
  REQUIRE(rc == 0);
  CHECK(std::fabs(json_file(p("oracle.json"))["J_star"].get<double>() + 0.02) <= 1e-9);

  const int rc2 = run_cli({"oracle", "--A", p("A.txt"), "--C", p("C.txt"), "-m", "1",
                           "--starts", "16", "--json", p("oracle_ms.json")});
  REQUIRE(rc2 == 0);
  CHECK(std::fabs(json_file(p("oracle_ms.json"))["J_star"].get<double>() + 0.02) <= 1e-9);

  const int rc3 = run_cli({"bench", "--A", p("A.txt"), "--C", p("C.txt"), "-m", "1",
                           "--p0", "random:3", "--csv", p("bench.csv"),
                           "--json", p("bench.json")});
  REQUIRE(rc3 == 0);
  const auto j = json_file(p("bench.json"));
  CHECK(j["results"].size() == 7);
  const std::string csv = read_text(p("bench.csv"));
  CHECK(csv.find("roothaan-tilde") != std::string::npos);
  CHECK(csv.find("tr-stiefel") != std::string::npos);
}

TEST_CASE("cli exit codes name the failing stage") {
  // 2: config, 3: load, 4: validation
  write_family_2x2(p("A.txt"), p("C.txt"), 0.0, 0.1);
  CHECK(run_cli({"solve", "--A", p("A.txt"), "--C", p("C.txt"), "-m", "1",
                 "--method", "no-such-method"}) == 2);
  CHECK(run_cli({"solve", "--A", p("nope.txt"), "--C", p("C.txt"), "-m", "1"}) == 3);
  CHECK(run_cli({"solve", "--A", p("A.txt"), "-m", "1"}) == 2);  // neither --B nor --C

  save_matrix(p("Aneg.txt"), SymMat::diag({-0.5, 1.0}));
  CHECK(run_cli({"solve", "--A", p("Aneg.txt"), "--C", p("C.txt"), "-m", "1"}) == 4);
}

TEST_CASE("installed binary runs end to end") {
  write_family_2x2(p("A.txt"), p("C.txt"), 0.0, 0.1);
  const std::string cmd = std::string(GRASSMIN_CLI_PATH) + " solve --A " + p("A.txt") +
                          " --C " + p("C.txt") + " -m 1 --method tr-grassmann --p0 random:5" +
                          " --json " + p("bin.json") + " > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  const auto j = json_file(p("bin.json"));
  CHECK(j["command"] == "solve");
  CHECK(j["status"] == "converged");
}
