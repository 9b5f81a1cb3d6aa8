#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "brl/core/errors.hpp"
#include "brl/envs/environment.hpp"
#include "brl/envs/rewards.hpp"
#include "brl/explore/baselines.hpp"
#include "brl/harness/cli.hpp"
#include "brl/harness/config.hpp"
#include "brl/harness/evaluate.hpp"
#include "brl/harness/report.hpp"
#include "brl/offline/policy.hpp"
#include "../support.hpp"

namespace brl {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "brl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// ---- CLI --------------------------------------------------------------------

TEST(Cli, UsageProblemsExitTwo) {
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"dance"}).code, 2);
  EXPECT_EQ(run_cli({"explore", "--bogus", "1"}).code, 2);
  const auto r = run_cli({"explore", "--env", "nowhere", "--method", "random", "--steps", "5",
                          "--seed", "1", "--out", "/tmp/x.brl"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_EQ(run_cli({"explore", "--env", "pointmass", "--method", "magic", "--steps", "5",
                     "--seed", "1", "--out", "/tmp/x.brl"})
                .code,
            2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, FileProblemsExitOne) {
  const auto dir = testing::scratch_dir("cli-files");
  const auto r = run_cli({"train", "--dataset", (dir / "missing.brl").string(), "--algo", "td3",
                          "--reward", "point-goal:0,0", "--steps", "1", "--seed", "1", "--out",
                          (dir / "p.brlp").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, ExploreTrainEvalPipeline) {
  const auto dir = testing::scratch_dir("cli-pipeline");
  const std::string d = (dir / "d.brl").string();
  const std::string p = (dir / "p.brlp").string();
  ASSERT_EQ(run_cli({"explore", "--env", "pointmass", "--method", "random", "--steps", "1000",
                     "--seed", "7", "--out", d})
                .code,
            0);
  EXPECT_EQ(fs::file_size(d), kDatasetHeaderBytes + 1000u * (4 + 2 + 4) * 4 + 1000u);
  const auto side = nlohmann::json::parse(testing::read_text(d + ".json"));
  EXPECT_EQ(side["env"], "pointmass");
  EXPECT_EQ(side["method"], "random");
  EXPECT_EQ(side["steps"], 1000);
  EXPECT_EQ(side["config_hash"].get<std::string>().size(), 16u);

  ASSERT_EQ(run_cli({"train", "--dataset", d, "--algo", "td3", "--reward", "point-goal:0,0",
                     "--steps", "0", "--seed", "1", "--out", p})
                .code,
            0);
  const OfflinePolicy trained = load_policy(p);
  Rng rng(1);
  TrainOptions defaults;
  const OfflinePolicy fresh = make_offline_policy(dataset_env_spec(dataset_read(d)),
                                                  OfflineAlgorithm::kTd3, defaults, rng);
  const auto a = trained.networks();
  const auto b = fresh.networks();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < a[i].second->params().size(); ++k) {
      ASSERT_EQ(a[i].second->params().values[k],
                static_cast<double>(static_cast<float>(b[i].second->params().values[k])));
    }
  }
  EXPECT_TRUE(fs::exists(p + ".loss.csv"));

  for (const char* name : {"e1.csv", "e2.csv"}) {
    ASSERT_EQ(run_cli({"eval", "--policy", p, "--env", "pointmass", "--episodes", "20", "--seed",
                       "3", "--csv", (dir / name).string()})
                  .code,
              0);
  }
  const std::string e1 = testing::read_text(dir / "e1.csv");
  EXPECT_EQ(e1, testing::read_text(dir / "e2.csv"));
  const CsvTable table = parse_csv(e1, "e1.csv");
  EXPECT_EQ(table.header, (std::vector<std::string>{"episode", "return", "closest_distance"}));
  EXPECT_EQ(table.rows.size(), 20u);
  EXPECT_EQ(table.provenance.at("env"), "pointmass");
  EXPECT_EQ(table.provenance.at("reward"), "point-goal:0,0");
  EXPECT_TRUE(table.provenance.count("config_hash"));
}

TEST(Cli, SeedFallsBackToEnvironmentVariable) {
  const auto dir = testing::scratch_dir("cli-seed");
  ::setenv("BRL_SEED", "11", 1);
  const int a = run_cli({"explore", "--env", "pointmass", "--method", "random", "--steps", "300",
                         "--out", (dir / "a.brl").string()})
                    .code;
  ::unsetenv("BRL_SEED");
  const int b = run_cli({"explore", "--env", "pointmass", "--method", "random", "--steps", "300",
                         "--seed", "11", "--out", (dir / "b.brl").string()})
                    .code;
  const int c = run_cli({"explore", "--env", "pointmass", "--method", "random", "--steps", "300",
                         "--seed", "12", "--out", (dir / "c.brl").string()})
                    .code;
  ASSERT_EQ(a + b + c, 0);
  EXPECT_EQ(testing::read_text(dir / "a.brl"), testing::read_text(dir / "b.brl"));
  EXPECT_NE(testing::read_text(dir / "a.brl"), testing::read_text(dir / "c.brl"));
}

TEST(Cli, ConfigFileIsOverriddenByFlags) {
  const auto dir = testing::scratch_dir("cli-config");
  write_file(dir / "c.json",
             R"({"env": "pointmass", "method": "random", "steps": 40, "seed": 3})");
  ASSERT_EQ(run_cli({"explore", "--config", (dir / "c.json").string(), "--out",
                     (dir / "a.brl").string()})
                .code,
            0);
  EXPECT_EQ(dataset_read(dir / "a.brl").size(), 40u);
  ASSERT_EQ(run_cli({"explore", "--config", (dir / "c.json").string(), "--steps", "25", "--out",
                     (dir / "b.brl").string()})
                .code,
            0);
  EXPECT_EQ(dataset_read(dir / "b.brl").size(), 25u);
  write_file(dir / "bad.json", R"({"env": "pointmass", "colour": 3})");
  EXPECT_EQ(run_cli({"explore", "--config", (dir / "bad.json").string(), "--out",
                     (dir / "c.brl").string()})
                .code,
            2);
}

TEST(Cli, CoverageWritesHistogram) {
  const auto dir = testing::scratch_dir("cli-coverage");
  const std::string d = (dir / "d.brl").string();
  ASSERT_EQ(run_cli({"explore", "--env", "pointmass", "--method", "random", "--steps", "200",
                     "--seed", "2", "--out", d})
                .code,
            0);
  ASSERT_EQ(run_cli({"coverage", "--dataset", d, "--bins", "10", "--csv",
                     (dir / "c.csv").string()})
                .code,
            0);
  std::ifstream in(dir / "c.csv");
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_TRUE(parse_provenance(line).count("occupied"));
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(line, "dims,bins,count");
  // 4-dim observations: six pairwise histograms, each over all 200 points
  std::map<std::string, std::uint64_t> totals;
  while (std::getline(in, line)) {
    totals[line.substr(0, line.find(','))] += std::stoull(line.substr(line.rfind(',') + 1));
  }
  EXPECT_EQ(totals.size(), 6u);
  for (const auto& [dims, n] : totals) EXPECT_EQ(n, 200u) << dims;
}

// ---- config -----------------------------------------------------------------

TEST(Config, JsonRoundTripAndHash) {
  ExperimentConfig c;
  c.phase = "train";
  c.env = "pendulum";
  c.algo = "bcq";
  c.steps = 123;
  c.seed = 9;
  c.train.bcq.lambda = 0.5;
  const auto j = config_to_json(c);
  ExperimentConfig back;
  apply_config_json(j, back);
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(config_hash(back), config_hash(c));
  back.out = "/somewhere/else";
  EXPECT_EQ(config_hash(back), config_hash(c));
  back.train.bcq.lambda = 0.6;
  EXPECT_NE(config_hash(back), config_hash(c));
}

// ---- evaluation ---------------------------------------------------------------

class ZeroAgent : public Agent {
 public:
  explicit ZeroAgent(std::size_t dim) : dim_(dim) {}
  Vector act(std::span<const double>, Rng&) override { return Vector(dim_, 0.0); }

 private:
  std::size_t dim_;
};

// Records every action so the trajectory can be replayed independently.
class Recorder : public Agent {
 public:
  explicit Recorder(Agent& inner) : inner_(inner) {}
  void begin_episode(Rng& rng) override {
    episodes.emplace_back();
    inner_.begin_episode(rng);
  }
  Vector act(std::span<const double> obs, Rng& rng) override {
    Vector a = inner_.act(obs, rng);
    episodes.back().push_back(a);
    return a;
  }
  std::vector<std::vector<Vector>> episodes;

 private:
  Agent& inner_;
};

std::string tooltip_spec(double x, double y) {
  std::ostringstream s;
  s.precision(17);
  s << "tooltip-reach:" << x << "," << y;
  return s.str();
}

TEST(Evaluate, StationaryArmAtTargetHasZeroDistance) {
  PlanarArm arm;
  const auto home = forward_kinematics(Vector(7, 0.0));
  const auto reward = make_reward(tooltip_spec(home[0], home[1]), arm.spec());
  ZeroAgent agent(7);
  const EvalReport r = evaluate(agent, arm, reward, 3, 1);
  ASSERT_EQ(r.closest_distance.size(), 3u);
  for (double d : r.closest_distance) EXPECT_EQ(d, 0.0);
  ASSERT_EQ(r.returns.size(), 3u);
}

TEST(Evaluate, ClosestDistanceMatchesTrajectoryScan) {
  PlanarArm arm;
  const double tx = 0.7, ty = 0.7;
  const auto reward = make_reward(tooltip_spec(tx, ty), arm.spec());
  RandomPolicyExplorer random(arm.spec());
  Recorder recorder(random);
  const EvalReport r = evaluate(recorder, arm, reward, 5, 4);
  ASSERT_EQ(recorder.episodes.size(), 5u);
  double total_mean = 0.0;
  for (std::size_t e = 0; e < 5; ++e) {
    auto state = arm.reset(0).state;
    auto dist = [&](const Vector& obs) {
      const auto tip = forward_kinematics(std::span<const double>(obs.data(), 7));
      return std::hypot(tip[0] - tx, tip[1] - ty);
    };
    double best = dist(arm.observe(state));
    double ret = 0.0;
    for (const Vector& a : recorder.episodes[e]) {
      const auto s = arm.step(state, a);
      best = std::min(best, dist(s.observation));
      ret -= dist(s.observation);
      state = s.state;
    }
    EXPECT_NEAR(r.closest_distance[e], best, 1e-12);
    EXPECT_NEAR(r.returns[e], ret, 1e-9);
    EXPECT_GE(r.closest_distance[e], 0.0);
    total_mean += ret / 5.0;
  }
  EXPECT_NEAR(r.mean, total_mean, 1e-9);
}

TEST(Evaluate, NonArmEnvironmentsHaveNoDistance) {
  PointMass2D env;
  ZeroAgent agent(2);
  const EvalReport r = evaluate(agent, env, make_reward("point-goal:1,0", env.spec()), 2, 0);
  EXPECT_TRUE(r.closest_distance.empty());
  // Standing still at the origin for every step of an episode.
  EXPECT_DOUBLE_EQ(r.returns[0], -static_cast<double>(env.spec().max_episode_steps));
  EXPECT_EQ(r.std, 0.0);
  std::ostringstream csv;
  write_eval_csv(csv, r, "env=pointmass");
  EXPECT_NE(csv.str().find("\n0,-200,nan\n"), std::string::npos);
}

TEST(Evaluate, MismatchedPolicyIsConfigError) {
  Rng rng(1);
  Td3Config config;
  config.hidden = {4};
  OfflinePolicy policy(PointMass2D().spec(), config, rng);
  PlanarArm arm;
  EXPECT_THROW(evaluate(policy, arm, make_reward("zero", arm.spec()), 1, 0), ConfigError);
}

// ---- report -----------------------------------------------------------------

std::string loss_csv(const std::string& env, const std::vector<std::array<double, 2>>& rows) {
  std::ostringstream s;
  s << "# env=" << env << " reward=point-goal:0,0\n";
  s << "step,critic_loss\n";
  for (const auto& r : rows) s << r[0] << "," << r[1] << "\n";
  return s.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

TEST(Report, EmptyDataIsAnErrorAndWritesNothing) {
  const auto dir = testing::scratch_dir("report-empty");
  write_file(dir / "a.csv", "# env=pointmass\nstep,critic_loss\n");
  EXPECT_THROW(emit_report({dir / "a.csv"}, dir / "out"), ParseError);
  EXPECT_FALSE(fs::exists(dir / "out" / "critic_loss.svg"));
}

TEST(Report, SingleSeriesIsOnePolylineWithThreePoints) {
  const auto dir = testing::scratch_dir("report-single");
  write_file(dir / "a.csv", loss_csv("pointmass", {{{1000, 0.5}}, {{2000, 0.25}}, {{3000, 0.2}}}));
  const auto written = emit_report({dir / "a.csv"}, dir / "out");
  ASSERT_EQ(written.size(), 1u);
  const std::string svg = testing::read_text(written[0]);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("version=\"1.1\""), std::string::npos);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
  EXPECT_EQ(count(svg, "<polygon"), 0u);
  const std::regex points(R"re(<polyline[^>]*points="([^"]*)")re");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, points));
  std::istringstream pairs(m[1].str());
  std::string pair;
  int n = 0;
  while (pairs >> pair) {
    EXPECT_EQ(std::count(pair.begin(), pair.end(), ','), 1);
    ++n;
  }
  EXPECT_EQ(n, 3);
}

TEST(Report, FiveSeedBandIsPerStepMinMax) {
  const auto dir = testing::scratch_dir("report-band");
  Rng rng(3);
  std::vector<fs::path> inputs;
  std::vector<std::vector<double>> values(5);
  for (int s = 0; s < 5; ++s) {
    std::vector<std::array<double, 2>> rows;
    for (int k = 1; k <= 4; ++k) {
      const double v = rng.uniform(0.0, 10.0);
      rows.push_back({1000.0 * k, v});
      values[s].push_back(v);
    }
    inputs.push_back(dir / ("seed" + std::to_string(s) + ".csv"));
    write_file(inputs.back(), loss_csv("pointmass", rows));
  }
  std::vector<CsvTable> runs;
  for (const auto& p : inputs) runs.push_back(read_csv(p));
  const Band band = aggregate(runs, "critic_loss", true);
  ASSERT_EQ(band.min.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    double lo = INFINITY, hi = -INFINITY, mean = 0.0;
    for (int s = 0; s < 5; ++s) {
      // CSV text round trip, as the report sees it.
      const double v = std::stod(runs[static_cast<std::size_t>(s)].rows[k][1]);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      mean += v / 5.0;
    }
    EXPECT_EQ(band.min[k], lo);
    EXPECT_EQ(band.max[k], hi);
    EXPECT_NEAR(band.mean[k], mean, 1e-12);
    EXPECT_EQ(band.xs[k], 1000.0 * static_cast<double>(k + 1));
  }
  const auto written = emit_report(inputs, dir / "out");
  const std::string svg = testing::read_text(written.at(0));
  EXPECT_EQ(count(svg, "<polygon"), 1u);
  EXPECT_EQ(count(svg, "<polyline"), 1u);
}

TEST(Report, MalformedCsvNamesTheLine) {
  try {
    parse_csv("# env=x\nstep,critic_loss\n1,2\n2,oops\n", "bad.csv");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_csv("step,critic_loss\n1,2,3\n", "ragged.csv"), ParseError);
  EXPECT_THROW(parse_csv("", "empty.csv"), ParseError);
}

TEST(Report, MismatchedEnvironmentsAreRefused) {
  const auto dir = testing::scratch_dir("report-mismatch");
  write_file(dir / "a.csv", loss_csv("pointmass", {{{1, 1}}}));
  write_file(dir / "b.csv", loss_csv("pendulum", {{{1, 2}}}));
  EXPECT_THROW(emit_report({dir / "a.csv", dir / "b.csv"}, dir / "out"), ConfigError);
  EXPECT_FALSE(fs::exists(dir / "out" / "critic_loss.svg"));
}

TEST(Report, CategoricalXBecomesBarChart) {
  const auto dir = testing::scratch_dir("report-bars");
  write_file(dir / "e.csv", "# env=pointmass reward=point-goal:0,0\nmethod,return\nrandom,-3\ngep,-5\n");
  const auto written = emit_report({dir / "e.csv"}, dir / "out");
  ASSERT_FALSE(written.empty());
  const std::string svg = testing::read_text(dir / "out" / "return.svg");
  EXPECT_GT(count(svg, "class=\"bar\""), 0u);
}

TEST(Report, ProvenanceParsing) {
  const auto p = parse_provenance("env=pointmass reward=point-goal:1,1 seed=3");
  EXPECT_EQ(p.at("env"), "pointmass");
  EXPECT_EQ(p.at("reward"), "point-goal:1,1");
  EXPECT_EQ(p.at("seed"), "3");
}

}  // namespace
}  // namespace brl
