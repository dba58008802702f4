#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config_file.hpp"
#include "manifest.hpp"
#include "tcan/error.hpp"

namespace fs = std::filesystem;
using namespace tcan::cli;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("tcan_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(TCAN_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST(ConfigFile, KeyValueAndJson) {
  const fs::path p = fs::temp_directory_path() / "tcan_cfg_test.toml";
  {
    std::ofstream out(p);
    out << "# model\nd = 8\nlr = 0.01\nvariant = \"G\"\nmlp_hidden = [4, 2]\nnormalize_time = true\n";
  }
  const auto cfg = model_config_from(read_config_file(p.string()));
  EXPECT_EQ(cfg.d, 8u);
  EXPECT_DOUBLE_EQ(cfg.lr, 0.01);
  EXPECT_EQ(cfg.variant, tcan::Variant::G);
  EXPECT_EQ(cfg.mlp_hidden, (std::vector<std::size_t>{4, 2}));
  EXPECT_TRUE(cfg.normalize_time);
  fs::remove(p);

  const fs::path q = fs::temp_directory_path() / "tcan_cfg_test.json";
  {
    std::ofstream out(q);
    out << R"({"n_cascades": 12, "branching_mean": 0.5})";
  }
  const auto g = gen_config_from(read_config_file(q.string()));
  EXPECT_EQ(g.n_cascades, 12u);
  EXPECT_DOUBLE_EQ(g.branching_mean, 0.5);
  fs::remove(q);
}

TEST(ConfigFile, OverridesAreTyped) {
  json j = json::object();
  apply_overrides(j, {{"heads", "2"}, {"dropout", "0.25"}, {"mlp_hidden", "16,8"}, {"mask", "symmetric"},
                      {"normalize_time", "true"}});
  const auto cfg = model_config_from(j);
  EXPECT_EQ(cfg.heads, 2u);
  EXPECT_DOUBLE_EQ(cfg.dropout, 0.25);
  EXPECT_EQ(cfg.mlp_hidden, (std::vector<std::size_t>{16, 8}));
  EXPECT_EQ(cfg.mask, tcan::MaskMode::Symmetric);
  EXPECT_TRUE(cfg.normalize_time);
}

TEST(ConfigFile, UnknownKeysAreRejected) {
  EXPECT_THROW(model_config_from(json{{"depth", 3}}), tcan::ValidationError);
  EXPECT_THROW(gen_config_from(json{{"mu", 0.5}}), tcan::ValidationError);
}

TEST(Manifest, Sha256KnownVector) {
  EXPECT_EQ(sha256_bytes("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(Cli, PipelineIsReproducible) {
  ASSERT_EQ(run("gen -o " + path("c.txt") + " --n_cascades 80 --min_size 3 --max_size 40 --n_users 100 --seed 3"), 0);
  const std::string prep = "prepare -i " + path("c.txt") + " --t-obs-quantile 0.5 --t-end 10 --min-obs 2 --seed 4";
  ASSERT_EQ(run(prep + " -o " + path("s1")), 0);
  ASSERT_EQ(run(prep + " -o " + path("s2")), 0);
  for (const char* part : {"train.cascades", "val.cascades", "test.cascades", "split.json"}) {
    EXPECT_EQ(sha256_file(path("s1/") + part), sha256_file(path("s2/") + part)) << part;
  }
  const json m = json::parse(slurp(path("s1/manifest.json")));
  EXPECT_EQ(m["command"], "prepare");
  EXPECT_EQ(m["outputs"].size(), 4u);

  const std::string train = "train -s " + path("s1") +
                            " --d 4 --d_t 4 --cgat_layers 1 --heads 2 --csat_layers 1 --d_h 4 --mlp_hidden 8"
                            " --max_epochs 2 -o ";
  ASSERT_EQ(run(train + path("t1")), 0);
  ASSERT_EQ(run(train + path("t2")), 0);
  EXPECT_EQ(sha256_file(path("t1/checkpoint.json")), sha256_file(path("t2/checkpoint.json")));
  EXPECT_EQ(json::parse(slurp(path("t1/history.json")))["epochs"].size(), 2u);

  ASSERT_EQ(run("eval -s " + path("s1") + " -c " + path("t1/checkpoint.json") + " --workers 2 -o " + path("e")), 0);
  const json rep = json::parse(slurp(path("e/report.json")));
  EXPECT_TRUE(rep.contains("msle"));
  std::size_t lines = 0;
  {
    std::ifstream in(path("e/predictions.csv"));
    for (std::string l; std::getline(in, l);) ++lines;
  }
  std::size_t test_lines = 0;
  {
    std::ifstream in(path("s1/test.cascades"));
    for (std::string l; std::getline(in, l);) test_lines += !l.empty();
  }
  EXPECT_EQ(lines, test_lines + 1);

  ASSERT_EQ(run("baseline -s " + path("s1") + " -o " + path("b")), 0);
  EXPECT_TRUE(fs::exists(path("b/report.json")));

  ASSERT_EQ(run("predict -c " + path("t1/checkpoint.json") + " -i " + path("s1/test.cascades") + " --t-obs 1 -o " +
                path("p.csv")),
            0);
  EXPECT_TRUE(fs::exists(path("p.csv.manifest.json")));
}

TEST_F(Cli, GradcheckExitCodes) {
  const std::string base = "gradcheck --d 4 --d_t 4 --cgat_layers 1 --heads 2 --csat_layers 1 --d_h 4 --mlp_hidden 6";
  EXPECT_EQ(run(base + " -o " + path("gc.json")), 0);
  const json r = json::parse(slurp(path("gc.json")));
  EXPECT_EQ(r["modules"].size(), 5u);
  EXPECT_EQ(run(base + " --tolerance 0"), 2);
}

TEST_F(Cli, BadInputsGiveValidationExit) {
  EXPECT_EQ(run("train"), 1);
  EXPECT_EQ(run("gen -o " + path("x.txt") + " --branching_mean 50"), 1);
  {
    std::ofstream out(path("bad.txt"));
    out << "1\tA\t0\t2\tA:0\n";
  }
  EXPECT_EQ(run("prepare -i " + path("bad.txt") + " --t-obs 1 --t-end 2 -o " + path("s")), 1);
  EXPECT_EQ(run("--version"), 0);
}
