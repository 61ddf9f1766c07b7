#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "explab/cli.hpp"
#include "explab/errors.hpp"
#include "explab/io.hpp"
#include "explab/parallel.hpp"

using namespace explab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "explab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("explab_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                                   ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

const char* kSec4File = R"({"input_labels":["0","1"],"output_labels":["0","1"],
  "W":[[0.01,0.99],[0.975,0.025]],"Wbar":[[0.0001,0.9999],[0.65,0.35]]})";
const char* kIdenticalFile = R"({"input_labels":["a","b"],"output_labels":["u","v","w"],
  "W":[[0.2,0.3,0.5],[0.6,0.3,0.1]],"Wbar":[[0.2,0.3,0.5],[0.6,0.3,0.1]]})";

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

double cell(const std::string& s) { return s == "inf" ? kInf : std::stod(s); }

// Walks a report and fails on anything that is not a finite number or "inf".
void expect_clean_numbers(const Json& j) {
  if (j.is_number()) {
    EXPECT_TRUE(std::isfinite(j.get<double>()));
  } else if (j.is_string()) {
    EXPECT_NE(j.get<std::string>(), "nan");
  } else if (j.is_structured()) {
    for (const auto& child : j) expect_clean_numbers(child);
  }
}

}  // namespace

TEST(Io, FormatNumber) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(kInf), "inf");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_THROW(format_number(std::nan("")), DomainError);
  EXPECT_EQ(json_number(kInf), Json("inf"));
}

TEST(Io, ChannelRoundTrip) {
  const auto pair = channel_pair_from_json(Json::parse(kSec4File));
  const auto again = channel_pair_from_json(to_json(pair));
  EXPECT_EQ(again.w(), pair.w());
  EXPECT_EQ(again.wbar(), pair.wbar());
}

TEST(Io, StateFormats) {
  const auto bloch = state_pair_from_json(Json::parse(R"({"bloch_rho":[0,0,0.5],"bloch_sigma":[0.2,0,0]})"));
  const auto flat = state_pair_from_json(Json::parse(
      R"({"dim":2,"rho":[[0.75,0],[0,0],[0,0],[0.25,0]],"sigma":[[0.5,0],[0.1,0],[0.1,0],[0.5,0]]})"));
  EXPECT_LT((bloch.first.matrix() - flat.first.matrix()).norm(), 1e-15);
  EXPECT_LT((bloch.second.matrix() - flat.second.matrix()).norm(), 1e-15);
  EXPECT_THROW(state_pair_from_json(Json::parse(R"({"dim":2,"rho":[[1,0]]})")), IoError);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitIo);
  EXPECT_EQ(run({"frobnicate"}).code, kExitIo);
  EXPECT_EQ(run({"bounds", "--r", "abc"}).code, kExitIo);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({"bounds"}).code, kExitIo);  // no --input
}

TEST(Cli, BoundsExitCodes) {
  TempDir dir;
  EXPECT_EQ(run({"bounds", "--input", dir.path("missing.json")}).code, kExitIo);
  EXPECT_EQ(run({"bounds", "--input", dir.write("bad.json", "{not json")}).code, kExitIo);
  const auto invalid = dir.write("invalid.json", R"({"input_labels":["0"],"output_labels":["a","b"],
    "W":[[0.5,0.6]],"Wbar":[[0.5,0.5]]})");
  EXPECT_EQ(run({"bounds", "--input", invalid}).code, kExitInvariant);
  const auto sec4 = dir.write("sec4.json", kSec4File);
  EXPECT_EQ(run({"bounds", "--input", sec4, "--r", "-1"}).code, kExitInvariant);
}

TEST(Cli, BoundsReports) {
  TempDir dir;
  const auto sec4 = dir.write("sec4.json", kSec4File);
  const auto r = run({"bounds", "--input", sec4, "--r", "0.1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_NEAR(j["stein"].get<double>(), 0.329352047165, 1e-11);
  EXPECT_EQ(j["attaining_inputs"]["stein"], "1");
  EXPECT_TRUE(j["regularity"]["regular"].get<bool>());
  expect_clean_numbers(j);

  const auto same = Json::parse(run({"bounds", "--input", dir.write("same.json", kIdenticalFile)}).out);
  for (const char* key : {"stein", "chernoff", "hoeffding", "hk"}) EXPECT_EQ(same[key].get<double>(), 0.0) << key;
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  TempDir dir;
  const auto sec4 = dir.write("sec4.json", kSec4File);
  const auto cfg = dir.write("cfg.json", R"({"input":")" + sec4 + R"(","r":0.2})");
  const auto from_cfg = Json::parse(run({"bounds", "--config", cfg}).out);
  EXPECT_EQ(from_cfg["r"].get<double>(), 0.2);
  const auto flag_wins = Json::parse(run({"bounds", "--config", cfg, "--r", "0.05"}).out);
  EXPECT_EQ(flag_wins["r"].get<double>(), 0.05);
  const auto underscores = dir.write("cfg2.json", R"({"s_lo":-2,"s_count":5})");
  const auto csv = parse_csv(run({"curve", "--config", underscores}).out);
  ASSERT_EQ(csv.size(), 6u);
  EXPECT_EQ(csv[1][0], "-2");
  EXPECT_EQ(run({"bounds", "--config", dir.write("cfg3.json", R"({"colour":1})")}).code, kExitIo);
}

TEST(Cli, OutFlagWritesFile) {
  TempDir dir;
  const auto target = dir.path("curve.csv");
  const auto r = run({"curve", "--s-count", "3", "--out", target});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(target);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), run({"curve", "--s-count", "3"}).out);
}

TEST(Cli, PhiCurveShape) {
  const auto r = run({"curve"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 202u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"s", "phi_row0", "phi_row1", "phi_envelope"}));
  bool positive = false;
  bool negative = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 4u);
    const double diff = cell(rows[i][1]) - cell(rows[i][2]);
    positive = positive || diff > 0;
    negative = negative || diff < 0;
    EXPECT_EQ(cell(rows[i][3]), std::max(cell(rows[i][1]), cell(rows[i][2])));
  }
  EXPECT_TRUE(positive && negative);
  EXPECT_EQ(run({"curve", "--s-count", "1"}).code, kExitInvariant);
  EXPECT_EQ(run({"curve", "--s-lo", "0", "--s-hi", "0"}).code, kExitInvariant);
  EXPECT_EQ(run({"curve", "--kind", "other"}).code, kExitIo);
}

TEST(Cli, ExponentCurveShape) {
  const auto rows = parse_csv(run({"curve", "--kind", "exponent", "--r-hi", "1.2", "--r-count", "61"}).out);
  ASSERT_EQ(rows.size(), 62u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"r", "Be_row0", "Be_row1", "BeStar_row0", "BeStar_row1", "hk_channel"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 6u);
    EXPECT_LE(cell(rows[i][5]), std::min(cell(rows[i][3]), cell(rows[i][4])) + 1e-12);
  }
}

TEST(Cli, IdenticalPairExponentCurve) {
  // Identical rows: B_e vanishes, while B_e*(r) = r (the linear branch with r0 = 0).
  TempDir dir;
  const auto same = dir.write("same.json", kIdenticalFile);
  const auto rows = parse_csv(run({"curve", "--kind", "exponent", "--input", same, "--r-count", "11"}).out);
  ASSERT_EQ(rows.size(), 12u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double r = cell(rows[i][0]);
    EXPECT_EQ(cell(rows[i][1]), 0.0);
    EXPECT_EQ(cell(rows[i][2]), 0.0);
    for (std::size_t c = 3; c < 6; ++c) EXPECT_NEAR(cell(rows[i][c]), r, 1e-12);
  }
}

TEST(Cli, SimulateReports) {
  TempDir dir;
  const auto same = dir.write("same.json", kIdenticalFile);
  const auto id = Json::parse(run({"simulate", "--input", same, "--n", "2"}).out);
  EXPECT_NEAR(id["exact"]["bayes_error"].get<double>(), 0.5, 1e-15);

  const auto r = run({"simulate", "--n", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = Json::parse(r.out);
  EXPECT_LE(j["theory"]["exponent_gap"].get<double>(), 0.05);
  EXPECT_EQ(j["source"], "exact");
  expect_clean_numbers(j);

  const auto mc = Json::parse(run({"simulate", "--n", "6", "--mode", "mc", "--trials", "20000", "--seed", "3"}).out);
  EXPECT_EQ(mc["source"], "monte_carlo");
  EXPECT_GT(mc["half_width_alpha"].get<double>(), 0.0);
}

TEST(Cli, SimulateScaleAndModes) {
  EXPECT_EQ(run({"simulate", "--n", "30"}).code, kExitScale);
  const auto fallback = run({"simulate", "--n", "30", "--trials", "2000"});
  ASSERT_EQ(fallback.code, kExitOk) << fallback.err;
  EXPECT_EQ(Json::parse(fallback.out)["policy"], "best_fixed_fallback");
  const auto fixed = Json::parse(run({"simulate", "--n", "40", "--mode", "fixed"}).out);
  EXPECT_EQ(fixed["policy"], "best_fixed");
  EXPECT_FALSE(fixed.contains("alpha"));
  EXPECT_EQ(run({"simulate", "--n", "5", "--mode", "mc"}).code, kExitIo);
  EXPECT_EQ(run({"simulate"}).code, kExitIo);
  EXPECT_EQ(run({"simulate", "--n", "3", "--prior", "1.5"}).code, kExitInvariant);
}

TEST(Cli, SimulatePolicyFile) {
  TempDir dir;
  const auto policy = dir.write("policy.json", R"({"policy_default":"1","test":"bayes"})");
  const auto j = Json::parse(run({"simulate", "--n", "4", "--policy", policy}).out);
  const auto fixed = Json::parse(run({"simulate", "--n", "4", "--mode", "fixed"}).out);
  EXPECT_EQ(j["policy"], "file");
  EXPECT_EQ(j["exact"]["bayes_error"], fixed["exact"]["bayes_error"]);
  const auto never = dir.write("never.json", R"({"policy":{"":{"0":0.5,"1":0.5}},"test":{},"test_default":0})");
  const auto k = Json::parse(run({"simulate", "--n", "2", "--policy", never}).out);
  EXPECT_EQ(k["exact"]["alpha"].get<double>(), 0.0);
  EXPECT_EQ(k["exact"]["beta"].get<double>(), 1.0);
}

TEST(Cli, QuantumExitCodes) {
  TempDir dir;
  const auto qutrit = dir.write("qutrit.json", R"({"dim":3,
    "rho":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
    "sigma":[[0.5,0],[0,0],[0,0],[0,0],[0.5,0],[0,0],[0,0],[0,0],[0,0]]})");
  EXPECT_EQ(run({"quantum", "--input", qutrit}).code, kExitUnsupported);
  EXPECT_EQ(run({"quantum", "--input", dir.path("none.json")}).code, kExitIo);
  const auto same = dir.write("same.json", R"({"bloch_rho":[0.1,0.2,0.3],"bloch_sigma":[0.1,0.2,0.3]})");
  const auto r = run({"quantum", "--input", same});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = Json::parse(r.out);
  for (const char* key : {"measured_stein", "measured_chernoff", "measured_hoeffding", "measured_hk", "gap"}) {
    EXPECT_NEAR(j[key].get<double>(), 0.0, 1e-12) << key;
  }
}

TEST(Cli, DeterministicAcrossWorkerCounts) {
  const std::vector<std::vector<std::string>> commands = {
      {"example-sec4", "--r", "0.6"},
      {"curve", "--kind", "exponent", "--r-count", "21"},
      {"simulate", "--n", "8", "--trials", "5000", "--seed", "11"},
  };
  for (const auto& args : commands) {
    set_worker_count_override(1);
    const auto a = run(args);
    set_worker_count_override(8);
    const auto b = run(args);
    const auto c = run(args);
    set_worker_count_override(0);
    ASSERT_EQ(a.code, kExitOk) << a.err;
    EXPECT_EQ(a.out, b.out) << args[0];
    EXPECT_EQ(b.out, c.out) << args[0];
  }
}
