#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string &args) {
  const std::string path = testing::TempDir() + "sqlift_cli_out.txt";
  const std::string cmd = std::string(SQLIFT_CLI) + " " + args + " > " + path + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::remove(path.c_str());
  return r;
}

std::string problem(const char *name) { return std::string(SQLIFT_PROBLEMS) + "/" + name + ".json"; }

} // namespace

TEST(Cli, CertifySpuriousOrigin) {
  const CliRun r = run("certify " + problem("orthant2") + " --y 0,0");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("stationary_for_Phi: true"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("stationary_for_phi: false"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("second_order_nonneg_on_SI: false"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("consistent: true"), std::string::npos) << r.out;
}

TEST(Cli, CertifyResidual) {
  const CliRun r = run("certify " + problem("nnls1") + " --y 2");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("lifted_residual: 12"), std::string::npos) << r.out;
}

TEST(Cli, StrictComplementarity) {
  const CliRun a = run("strict-comp " + problem("quartic") + " --x 0");
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_NE(a.out.find("strict_complementarity: false"), std::string::npos) << a.out;
  const CliRun b = run("strict-comp " + problem("nnls1") + " --x 0");
  EXPECT_EQ(b.code, 3) << b.out;
}

TEST(Cli, KlFit) {
  const CliRun r = run("kl-fit " + problem("quartic") + " --y 0 --alpha 0.5 --gamma 1 --out -");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("predicted: 0.75"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("within_tolerance: true"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("# seed=0"), std::string::npos) << r.out;
}

TEST(Cli, Solve) {
  const CliRun r = run("solve " + problem("nnls1") + " --variant lifted --y0 0.5 --steps 500 --fstar 0");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("rate: linear"), std::string::npos) << r.out;
  EXPECT_EQ(run("solve " + problem("nnls1") + " --variant lifted --y0 0.5 --x0 0.5").code, 2);
  EXPECT_EQ(run("solve " + problem("maxpiece2") + " --variant original --x0 1,1").code, 3);
}

TEST(Cli, ErrorCodes) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("certify").code, 2);
  EXPECT_EQ(run("certify " + problem("orthant2") + " --y 1").code, 3);
  EXPECT_EQ(run("certify /nonexistent.json --y 1").code, 4);
  const std::string bad = testing::TempDir() + "sqlift_bad.json";
  {
    std::ofstream f(bad);
    f << "{ \"n\": 1,\n \"f\": [ }";
  }
  const CliRun r = run("certify " + bad + " --y 1");
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("line 2"), std::string::npos) << r.out;
  std::remove(bad.c_str());
}
