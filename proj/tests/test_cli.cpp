#include "sigrecover/cli.hpp"
#include "sigrecover/path_io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sigrecover;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sigrecover_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string out_dir(const std::string& sub = "out") const { return (dir_ / sub).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  static json read(const fs::path& p) {
    std::ifstream is(p);
    return json::parse(is);
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

const char* kLPath = "t,x1,x2\n0,0,0\n0.5,1,0\n1,1,1\n";
const char* kLine = "t,x1,x2\n0,0,0\n1,2,0\n";

} // namespace

TEST_F(CliTest, SignatureOfLShapedPath) {
  const auto in = file("l.csv", kLPath);
  ASSERT_EQ(run({"signature", "--input", in, "--level", "2", "--out-dir", out_dir()}), 0) << err_.str();
  const auto doc = read(fs::path(out_dir()) / "signature.json");
  EXPECT_DOUBLE_EQ(doc.at("coefficients").at("coeff(1,2)").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(doc.at("coefficients").at("coeff(2,1)").get<double>(), 0.0);
  EXPECT_EQ(doc.at("metadata").at("config").at("level"), 2);
  EXPECT_TRUE(fs::exists(fs::path(out_dir()) / "signature_summary.txt"));
  EXPECT_NE(out_.str().find("level"), std::string::npos);
}

TEST_F(CliTest, SignatureOfReversalLoop) {
  const auto in = file("loop.csv", "t,x1,x2\n0,0,0\n0.25,0.3,-0.2\n0.5,0.7,0.4\n0.75,0.3,-0.2\n1,0,0\n");
  ASSERT_EQ(run({"signature", "--input", in, "--level", "4", "--out-dir", out_dir()}), 0);
  const auto doc = read(fs::path(out_dir()) / "signature.json");
  for (const auto& [key, v] : doc.at("coefficients").items()) {
    if (key != "coeff()") {
      EXPECT_LT(std::abs(v.get<double>()), 1e-10) << key;
    }
  }
}

TEST_F(CliTest, ValidationErrors) {
  EXPECT_EQ(run({"signature", "--input", file("empty.csv", ""), "--out-dir", out_dir()}), 2);
  EXPECT_NE(err_.str().find("empty.csv"), std::string::npos);
  EXPECT_EQ(run({"signature", "--input", file("l.csv", kLPath), "--level", "40"}), 2);
  EXPECT_NE(err_.str().find("d^L"), std::string::npos);
  EXPECT_EQ(run({"signature", "--config", file("c.json", R"({"levle": 3})")}), 2);
  EXPECT_NE(err_.str().find("levle"), std::string::npos);
  EXPECT_EQ(run({"signature", "--config", file("t.json", R"({"level": "3"})")}), 2);
  EXPECT_EQ(run({"signature", "--level", "abc"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"nonsense"}), 2);
  EXPECT_EQ(run({"--version"}), 0);
}

TEST_F(CliTest, MergeConfig) {
  const auto cfg = cli::merge_config("recover", json{{"epsilon", 0.5}}, json{{"epsilon", 1.0}});
  EXPECT_EQ(cfg.at("epsilon"), 1.0);
  EXPECT_EQ(cfg.at("delta"), 0.025);
  EXPECT_THROW(cli::merge_config("recover", json{{"bogus", 1}}, {}), cli::ValidationError);
  EXPECT_THROW(cli::default_config("nope"), cli::ValidationError);
  EXPECT_EQ(cli::commands().size(), 5u);
}

TEST_F(CliTest, RecoverStraightLine) {
  const auto in = file("line.csv", kLine);
  ASSERT_EQ(run({"recover", "--input", in, "--epsilon", "1", "--delta", "0.1", "--out-dir", out_dir()}), 0)
      << err_.str();
  const auto doc = read(fs::path(out_dir()) / "recover.json");
  EXPECT_TRUE(doc.at("agrees").get<bool>());
  EXPECT_EQ(doc.at("recovered"), (json{{0, 0}, {1, 0}, {2, 0}}));
  EXPECT_EQ(doc.at("extended_signature").at("sign"), 1);
  const auto poly = load_path((fs::path(out_dir()) / "polygon.csv").string());
  EXPECT_EQ(poly.size(), 4u);
}

TEST_F(CliTest, RecoverTunnelConfinedPath) {
  const auto in = file("tunnel.csv", "t,x1,x2\n0,0,0\n0.33,0.5,0\n0.66,0.5,0.9\n1,0.5,-0.3\n");
  ASSERT_EQ(run({"recover", "--input", in, "--epsilon", "1", "--delta", "0.1", "--out-dir", out_dir()}), 0);
  const auto doc = read(fs::path(out_dir()) / "recover.json");
  EXPECT_EQ(doc.at("recovered"), (json{{0, 0}}));
  const auto poly = load_path((fs::path(out_dir()) / "polygon.csv").string());
  for (std::size_t i = 0; i < poly.size(); ++i) {
    EXPECT_EQ(poly.point(i)[0], 0.0);
    EXPECT_EQ(poly.point(i)[1], 0.0);
  }
}

TEST_F(CliTest, RecoverSampledPathIsDeterministic) {
  const std::vector<std::string> base{"recover", "--seed", "3", "--n-points", "129"};
  auto a = base;
  a.insert(a.end(), {"--out-dir", out_dir("a")});
  auto b = base;
  b.insert(b.end(), {"--out-dir", out_dir("b")});
  ASSERT_EQ(run(a), 0) << err_.str();
  ASSERT_EQ(run(b), 0);
  auto da = read(fs::path(out_dir("a")) / "recover.json");
  auto db = read(fs::path(out_dir("b")) / "recover.json");
  EXPECT_TRUE(da.at("agrees").get<bool>());
  da["metadata"]["config"].erase("out_dir");
  db["metadata"]["config"].erase("out_dir");
  EXPECT_EQ(da, db);
  EXPECT_EQ(slurp(fs::path(out_dir("a")) / "polygon.csv"), slurp(fs::path(out_dir("b")) / "polygon.csv"));
}

TEST_F(CliTest, Converge) {
  ASSERT_EQ(run({"converge", "--n-list", "4,8", "--trials", "10", "--n-points", "129", "--out-dir", out_dir()}), 0)
      << err_.str();
  std::istringstream csv(slurp(fs::path(out_dir()) / "converge.csv"));
  std::size_t rows = 0;
  for (std::string l; std::getline(csv, l);) {
    ++rows;
  }
  EXPECT_EQ(rows, 21u);
  const auto s = read(fs::path(out_dir()) / "converge_summary.json");
  EXPECT_EQ(s.at("levels").size(), 2u);
  EXPECT_EQ(run({"converge", "--delta-ratio", "1.5"}), 2);
}

TEST_F(CliTest, Metric) {
  const auto a = file("a.csv", "t,x1,x2\n0,0,0\n1,1,0\n");
  const auto b = file("b.csv", "t,x1,x2\n0,0,0\n1,0,1\n");
  ASSERT_EQ(run({"metric", "--input", a, "--other", a}), 0);
  EXPECT_EQ(out_.str().substr(0, 11), "distance 0\n");
  ASSERT_EQ(run({"metric", "--input", a, "--other", b}), 0);
  EXPECT_NEAR(std::stod(out_.str().substr(9)), std::sqrt(2.0), 1e-15);
  const auto c = file("c.csv", "t,x1\n0,0\n1,1\n");
  EXPECT_EQ(run({"metric", "--input", a, "--other", c}), 2);
  EXPECT_EQ(run({"metric", "--input", a}), 2);
}

TEST_F(CliTest, Sample) {
  ASSERT_EQ(run({"sample", "--model", "ou", "--dim", "3", "--n-points", "17", "--out-dir", out_dir()}), 0);
  const auto p = load_path((fs::path(out_dir()) / "path.csv").string());
  EXPECT_EQ(p.dim(), 3);
  EXPECT_EQ(p.size(), 17u);
  EXPECT_TRUE(p.starts_at_origin());
  EXPECT_EQ(run({"sample", "--model", "fbm", "--hurst", "0.2"}), 2);
  EXPECT_EQ(run({"sample", "--model", "levy"}), 2);
}

TEST_F(CliTest, InstalledBinary) {
  const auto in = file("l.csv", kLPath);
  const std::string cmd = std::string(SIGRECOVER_CLI) + " signature --level 2 --input " + in +
                          " --out-dir " + out_dir() + " > " + (dir_ / "stdout.txt").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_DOUBLE_EQ(read(fs::path(out_dir()) / "signature.json").at("coefficients").at("coeff(1,2)").get<double>(), 1.0);
  const std::string bad = std::string(SIGRECOVER_CLI) + " signature --input " +
                          file("empty.csv", "") + " 2> " + (dir_ / "err.txt").string();
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
