#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "srgc/light_field.h"
#include "test_util.h"

namespace srgc {
namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result RunCli(const std::string& args, const std::filesystem::path& dir) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(SRGC_CLI) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream o(out), e(err);
  std::stringstream so, se;
  so << o.rdbuf();
  se << e.rdbuf();
  r.out = so.str();
  r.err = se.str();
  return r;
}

std::map<std::string, std::string> ParseReport(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testing::TempDir(::testing::UnitTest::GetInstance()->current_test_info()->name()); }
  std::string P(const std::string& name) const { return (dir_ / name).string(); }
  std::filesystem::path dir_;
};

TEST_F(CliTest, Pipeline) {
  const std::string scene = std::string(SRGC_SCENES) + "/patches.txt";
  ASSERT_EQ(RunCli("synth --spec " + scene + " --out " + P("lf"), dir_).code, 0);
  const Result enc = RunCli("encode " + P("lf") + " --disparity " + P("lf/gt.lfdm") +
                             " --q-gft 8 --slic-k 16 --out " + P("a.srgc"),
                         dir_);
  ASSERT_EQ(enc.code, 0) << enc.err;
  EXPECT_NE(enc.out.find("eig_enc="), std::string::npos);
  const Result dec = RunCli("decode " + P("a.srgc") + " --out " + P("rec") + " --report " +
                             P("dec.txt"),
                         dir_);
  ASSERT_EQ(dec.code, 0) << dec.err;
  const LightField rec = LoadLightField(P("rec"));
  EXPECT_EQ(rec.rows, 3);
  std::ifstream rep(P("dec.txt"));
  std::stringstream ss;
  ss << rep.rdbuf();
  EXPECT_NE(ss.str().find("eig_dec="), std::string::npos);
  const Result an = RunCli("analyze " + P("a.srgc"), dir_);
  EXPECT_EQ(an.code, 0) << an.err;
  EXPECT_NE(an.out.find("section_residual_c0_bytes="), std::string::npos);
}

TEST_F(CliTest, MissingInput) {
  const Result r = RunCli("encode " + P("missing_dir") + " --disparity " + P("x.lfdm") +
                           " --out " + P("a.srgc"),
                       dir_);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("incomplete grid"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(RunCli("encode --bogus-flag", dir_).code, 1);
  EXPECT_EQ(RunCli("", dir_).code, 1);
  const std::string scene = std::string(SRGC_SCENES) + "/patches.txt";
  ASSERT_EQ(RunCli("synth --spec " + scene + " --out " + P("lf"), dir_).code, 0);
  EXPECT_EQ(RunCli("encode " + P("lf") + " --disparity " + P("lf/gt.lfdm") + " --q-gft -1 --out " +
                    P("a.srgc"),
                dir_)
                .code,
            1);
  const Result help = RunCli("encode --help", dir_);
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("--no-grouping"), std::string::npos);
}

TEST_F(CliTest, CorruptStream) {
  std::ofstream(P("junk.srgc")) << "NOPE";
  const Result r = RunCli("decode " + P("junk.srgc") + " --out " + P("rec"), dir_);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unsupported stream"), std::string::npos) << r.err;
}

TEST_F(CliTest, GroupingReducesDecoderDecompositions) {
  const std::string scene = std::string(SRGC_SCENES) + "/four_patches.txt";
  ASSERT_EQ(RunCli("synth --spec " + scene + " --out " + P("lf"), dir_).code, 0);
  const std::string common = "encode " + P("lf") + " --disparity " + P("lf/gt.lfdm") +
                             " --q-gft 16 --slic-k 16";
  ASSERT_EQ(RunCli(common + " --out " + P("g.srgc") + " --threads 1", dir_).code, 0);
  ASSERT_EQ(RunCli(common + " --out " + P("g8.srgc") + " --threads 8", dir_).code, 0);
  ASSERT_EQ(RunCli(common + " --no-grouping --out " + P("n.srgc"), dir_).code, 0);
  const auto g = ParseReport(RunCli("decode " + P("g.srgc") + " --out " + P("rg"), dir_).out);
  const auto n = ParseReport(RunCli("decode " + P("n.srgc") + " --out " + P("rn"), dir_).out);
  EXPECT_LT(std::stoi(g.at("eig_dec")), std::stoi(n.at("eig_dec")));
  std::ifstream a(P("g.srgc"), std::ios::binary), b(P("g8.srgc"), std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(CliTest, SweepCsv) {
  const std::string scene = std::string(SRGC_SCENES) + "/patches.txt";
  ASSERT_EQ(RunCli("synth --spec " + scene + " --out " + P("lf"), dir_).code, 0);
  const Result r = RunCli("sweep " + P("lf") + " --disparity " + P("lf/gt.lfdm") +
                           " --q-list 8,32 --slic-k 8",
                       dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header,
            "q_gft,q_dct,bpp,psnr_y,eig_enc,eig_dec,groups,grouped,coarsened,total_sr,"
            "ratio_c,ratio_o,t_enc_s,t_dec_s");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

}  // namespace
}  // namespace srgc
