#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

#include "brl/core/errors.hpp"
#include "brl/data/dataset.hpp"
#include "brl/envs/environment.hpp"
#include "brl/envs/rewards.hpp"
#include "../support.hpp"

namespace brl {
namespace {

Dataset random_dataset(std::size_t n, std::size_t obs_dim, std::size_t act_dim, Rng& rng) {
  DatasetMetadata meta;
  meta.env = "pointmass";
  meta.method = "random";
  meta.seed = 4;
  meta.steps = n;
  Dataset d(obs_dim, act_dim, meta);
  for (std::size_t i = 0; i < n; ++i) {
    Transition t;
    t.obs.resize(obs_dim);
    t.action.resize(act_dim);
    t.next_obs.resize(obs_dim);
    for (double& v : t.obs) v = rng.uniform(-2, 2);
    for (double& v : t.action) v = rng.uniform(-1, 1);
    for (double& v : t.next_obs) v = rng.uniform(-2, 2);
    t.done = rng.uniform() < 0.1;
    t.timeout = t.done && rng.uniform() < 0.5;
    d.append(t);
  }
  return d;
}

void overwrite(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TEST(DatasetFile, SingleTransitionIs41Bytes) {
  Dataset d(2, 1);
  d.append({{1, 2}, {0.5}, {3, 4}, false, false});
  const auto dir = testing::scratch_dir("ds41");
  dataset_write(d, dir / "d.brl");
  EXPECT_EQ(std::filesystem::file_size(dir / "d.brl"), 41u);
  const std::string bytes = testing::read_text(dir / "d.brl");
  EXPECT_EQ(bytes.substr(0, 4), "BRL1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 2);   // obs_dim
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1);   // act_dim
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 1);  // n_transitions
}

TEST(DatasetFile, RoundTripIsIdentityAtFloatPrecision) {
  Rng rng(1);
  const Dataset d = random_dataset(500, 4, 2, rng);
  const auto dir = testing::scratch_dir("dsrt");
  dataset_write(d, dir / "d.brl");
  const Dataset back = dataset_read(dir / "d.brl");
  ASSERT_EQ(back.size(), d.size());
  EXPECT_TRUE(back.frozen());
  EXPECT_EQ(back.metadata().env, "pointmass");
  EXPECT_EQ(back.metadata().seed, 4u);
  auto f32 = [](std::span<const double> s) {
    Vector out;
    for (double v : s) out.push_back(static_cast<float>(v));
    return out;
  };
  for (std::size_t i = 0; i < d.size(); ++i) {
    ASSERT_EQ(f32(d.obs(i)), Vector(back.obs(i).begin(), back.obs(i).end()));
    ASSERT_EQ(f32(d.action(i)), Vector(back.action(i).begin(), back.action(i).end()));
    ASSERT_EQ(f32(d.next_obs(i)), Vector(back.next_obs(i).begin(), back.next_obs(i).end()));
    ASSERT_EQ(d.done(i), back.done(i));
    ASSERT_EQ(d.timeout(i), back.timeout(i));
  }
  // Writing what was read reproduces the file exactly.
  dataset_write(back, dir / "again.brl");
  EXPECT_EQ(testing::read_text(dir / "d.brl"), testing::read_text(dir / "again.brl"));
}

TEST(DatasetFile, SameDatasetTwiceIsByteIdentical) {
  Rng rng(2);
  const Dataset d = random_dataset(50, 3, 1, rng);
  const auto dir = testing::scratch_dir("dstwice");
  dataset_write(d, dir / "a.brl");
  dataset_write(d, dir / "b.brl");
  EXPECT_EQ(testing::read_text(dir / "a.brl"), testing::read_text(dir / "b.brl"));
  EXPECT_EQ(file_digest(dir / "a.brl"), file_digest(dir / "b.brl"));
}

TEST(DatasetFile, SidecarCarriesMetadata) {
  Rng rng(3);
  Dataset d = random_dataset(5, 4, 2, rng);
  d.metadata().config_hash = "abc";
  const auto dir = testing::scratch_dir("dsside");
  dataset_write(d, dir / "d.brl");
  const auto j = nlohmann::json::parse(testing::read_text(sidecar_path(dir / "d.brl")));
  for (const char* key : {"env", "method", "seed", "steps", "config_hash", "created_utc"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["config_hash"], "abc");
  EXPECT_EQ(sidecar_path("x/d.brl"), std::filesystem::path("x/d.brl.json"));
}

TEST(DatasetFile, FormatAndCorruptionErrors) {
  Rng rng(4);
  const Dataset d = random_dataset(3, 2, 1, rng);
  const auto dir = testing::scratch_dir("dsbad");
  dataset_write(d, dir / "d.brl");
  const std::string good = testing::read_text(dir / "d.brl");

  std::string bad = good;
  bad[0] = 'X';
  overwrite(dir / "magic.brl", bad);
  EXPECT_THROW(dataset_read(dir / "magic.brl"), FormatError);

  bad = good;
  bad[4] = 9;
  overwrite(dir / "version.brl", bad);
  EXPECT_THROW(dataset_read(dir / "version.brl"), FormatError);

  overwrite(dir / "trunc.brl", good.substr(0, good.size() - 7));
  EXPECT_THROW(dataset_read(dir / "trunc.brl"), CorruptionError);

  overwrite(dir / "header.brl", good.substr(0, 12));
  EXPECT_THROW(dataset_read(dir / "header.brl"), CorruptionError);

  bad = good;
  bad.back() = 2;  // timeout without done
  overwrite(dir / "flags.brl", bad);
  EXPECT_THROW(dataset_read(dir / "flags.brl"), CorruptionError);

  EXPECT_THROW(dataset_read(dir / "missing.brl"), Error);
}

TEST(Dataset, AppendValidatesAndFreezes) {
  Dataset d(2, 1);
  EXPECT_THROW(d.append({{1}, {0}, {1, 2}, false, false}), ShapeError);
  d.append({{1, 2}, {0}, {1, 2}, false, false});
  d.freeze();
  EXPECT_THROW(d.append({{1, 2}, {0}, {1, 2}, false, false}), UsageError);
  EXPECT_THROW(dataset_write(Dataset(2, 1), "/tmp/never.brl"), UsageError);
}

TEST(Dataset, EpisodesSplitAfterDone) {
  Dataset d(1, 1);
  const bool done[] = {false, true, false, false, true, false};
  for (bool f : done) d.append({{0}, {0}, {0}, f, false});
  const auto eps = d.episodes();
  ASSERT_EQ(eps.size(), 3u);
  EXPECT_EQ(eps[0], (std::pair<std::size_t, std::size_t>{0, 2}));
  EXPECT_EQ(eps[1], (std::pair<std::size_t, std::size_t>{2, 5}));
  EXPECT_EQ(eps[2], (std::pair<std::size_t, std::size_t>{5, 6}));
}

TEST(Sampling, SingleTransitionAlwaysIndexZero) {
  Dataset d(1, 1);
  d.append({{0}, {0}, {0}, false, false});
  Rng rng(5);
  for (std::size_t i : sample_batch(d, 64, rng)) EXPECT_EQ(i, 0u);
}

TEST(Sampling, DeterministicGivenSeed) {
  Rng rng(6);
  const Dataset d = random_dataset(100, 1, 1, rng);
  Rng a(10), b(10);
  EXPECT_EQ(sample_batch(d, 10, a), sample_batch(d, 10, b));
}

TEST(Sampling, EmptyDatasetOrZeroBatchIsUsageError) {
  Dataset empty(1, 1);
  Rng rng(0);
  EXPECT_THROW(sample_batch(empty, 4, rng), UsageError);
  Dataset one(1, 1);
  one.append({{0}, {0}, {0}, false, false});
  EXPECT_THROW(sample_batch(one, 0, rng), UsageError);
}

TEST(Sampling, FrequenciesWithinFiveSigmaOfUniform) {
  Dataset d(1, 1);
  for (int i = 0; i < 10000; ++i) d.append({{0}, {0}, {0}, false, false});
  Rng rng(7);
  const auto idx = sample_batch(d, 1000000, rng);
  std::vector<int> counts(10000, 0);
  for (std::size_t i : idx) ++counts[i];
  const double p = 1.0 / 10000.0;
  const double mean = 1e6 * p;
  const double sigma = std::sqrt(1e6 * p * (1 - p));
  for (int c : counts) ASSERT_LE(std::abs(c - mean), 5 * sigma);
}

TEST(Relabel, ZeroRewardLeavesTransitionsAlone) {
  Rng rng(8);
  const Dataset d = random_dataset(20, 4, 2, rng);
  const auto spec = PointMass2D().spec();
  std::vector<std::size_t> idx(20);
  for (std::size_t i = 0; i < 20; ++i) idx[i] = i;
  const auto b = relabel(d, make_reward("zero", spec), idx);
  EXPECT_TRUE((b.reward.array() == 0.0).all());
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_EQ(b.obs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)), d.obs(i)[k]);
      EXPECT_EQ(b.next_obs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)),
                d.next_obs(i)[k]);
    }
    EXPECT_EQ(b.not_done(static_cast<Eigen::Index>(i), 0), d.done(i) && !d.timeout(i) ? 0.0 : 1.0);
  }
}

TEST(Relabel, PointGoalUsesNextObservation) {
  Dataset d(4, 2);
  d.metadata().env = "pointmass";
  d.append({{0, 0, 0, 0}, {1, 1}, {3, 4, 0, 0}, false, false});
  const std::size_t idx[] = {0};
  const auto b = relabel(d, make_reward("point-goal:0,0", PointMass2D().spec()), idx);
  EXPECT_DOUBLE_EQ(b.reward(0, 0), -5.0);
}

TEST(Relabel, TwoRewardsShareTransitionArrays) {
  Rng rng(9);
  const Dataset d = random_dataset(30, 4, 2, rng);
  const auto spec = PointMass2D().spec();
  std::vector<std::size_t> idx{3, 1, 4, 1, 5, 9, 2, 6};
  const auto a = relabel(d, make_reward("point-goal:1,1", spec), idx);
  const auto b = relabel(d, make_reward("velocity", spec), idx);
  EXPECT_EQ(a.obs, b.obs);
  EXPECT_EQ(a.action, b.action);
  EXPECT_EQ(a.next_obs, b.next_obs);
  EXPECT_EQ(a.not_done, b.not_done);
  EXPECT_NE(a.reward, b.reward);
}

TEST(Relabel, FileUnchangedByRelabelling) {
  Rng rng(10);
  const auto dir = testing::scratch_dir("relabel");
  dataset_write(random_dataset(40, 4, 2, rng), dir / "d.brl");
  const auto before = file_digest(dir / "d.brl");
  const Dataset d = dataset_read(dir / "d.brl");
  RelabeledSampler sampler(d, make_reward("point-goal:0,0", PointMass2D().spec()), 1);
  sampler.next(16);
  EXPECT_EQ(file_digest(dir / "d.brl"), before);
}

TEST(Relabel, EnvironmentMismatchIsConfigError) {
  Dataset d(14, 7);
  d.metadata().env = "planar-arm";
  d.append({Vector(14, 0.0), Vector(7, 0.0), Vector(14, 0.0), false, false});
  const std::size_t idx[] = {0};
  EXPECT_THROW(relabel(d, make_reward("point-goal:0,0", PointMass2D().spec()), idx),
               ConfigError);
}

TEST(Relabel, SamplerIsDeterministic) {
  Rng rng(11);
  const Dataset d = random_dataset(64, 4, 2, rng);
  const auto r = make_reward("point-goal:0,0", PointMass2D().spec());
  RelabeledSampler a(d, r, 3), b(d, r, 3);
  EXPECT_EQ(a.next(8).reward, b.next(8).reward);
}

TEST(Coverage, IdenticalObservationsOccupyOneBin) {
  Dataset d(2, 1);
  for (int i = 0; i < 30; ++i) d.append({{0.3, 0.3}, {0}, {0, 0}, false, false});
  const Vector lo{-1, -1}, hi{1, 1};
  EXPECT_EQ(coverage(d, 10, lo, hi).occupied, 1.0);
}

TEST(Coverage, FourQuadrantCentres) {
  Dataset d(2, 1);
  for (double x : {-0.5, 0.5}) {
    for (double y : {-0.5, 0.5}) d.append({{x, y}, {0}, {0, 0}, false, false});
  }
  const Vector lo{-1, -1}, hi{1, 1};
  const auto c = coverage(d, 2, lo, hi);
  EXPECT_EQ(c.occupied, 4.0);
  EXPECT_FALSE(c.pairwise);
}

TEST(Coverage, OutOfRangeClampsToEdgeBins) {
  EXPECT_EQ(coverage_bin(-5.0, 0.0, 1.0, 4), 0u);
  EXPECT_EQ(coverage_bin(5.0, 0.0, 1.0, 4), 3u);
  EXPECT_EQ(coverage_bin(1.0, 0.0, 1.0, 4), 3u);
  EXPECT_EQ(coverage_bin(0.26, 0.0, 1.0, 4), 1u);
}

TEST(Coverage, MatchesNestedLoopOracle) {
  Rng rng(12);
  Dataset d(2, 1);
  for (int i = 0; i < 1000; ++i) {
    d.append({{rng.normal(0.0, 0.6), rng.normal(0.3, 0.4)}, {0}, {0, 0}, false, false});
  }
  const Vector lo{-1, -1}, hi{1, 1};
  const std::size_t bins = 12;
  // For each cell, scan every point and test its interval membership.
  std::size_t occupied = 0;
  std::uint64_t total = 0;
  auto in_cell = [&](double v, double l, double h, std::size_t k) {
    const double w = (h - l) / static_cast<double>(bins);
    const double a = l + w * static_cast<double>(k);
    const double b = l + w * static_cast<double>(k + 1);
    if (k == 0 && v < a) return true;
    if (k + 1 == bins && v >= b) return true;
    return v >= a && v < b;
  };
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t j = 0; j < bins; ++j) {
      std::uint64_t count = 0;
      for (std::size_t t = 0; t < d.size(); ++t) {
        if (in_cell(d.obs(t)[0], lo[0], hi[0], i) && in_cell(d.obs(t)[1], lo[1], hi[1], j)) ++count;
      }
      total += count;
      if (count > 0) ++occupied;
    }
  }
  EXPECT_EQ(total, 1000u);
  const auto c = coverage(d, bins, lo, hi);
  EXPECT_EQ(c.occupied, static_cast<double>(occupied));
  std::uint64_t sum = 0;
  for (auto n : c.histograms.at(0).counts) sum += n;
  EXPECT_EQ(sum, 1000u);
}

TEST(Coverage, HighDimensionalAveragesPairs) {
  Rng rng(13);
  Dataset d(4, 1);
  for (int i = 0; i < 200; ++i) {
    Vector o(4);
    for (double& v : o) v = rng.uniform(-1, 1);
    d.append({o, {0}, o, false, false});
  }
  const Vector lo(4, -1.0), hi(4, 1.0);
  const auto c = coverage(d, 5, lo, hi);
  EXPECT_TRUE(c.pairwise);
  ASSERT_EQ(c.histograms.size(), 6u);
  double mean = 0.0;
  for (const auto& h : c.histograms) {
    std::uint64_t sum = 0;
    for (auto n : h.counts) sum += n;
    EXPECT_EQ(sum, 200u);
    mean += static_cast<double>(h.occupied);
  }
  EXPECT_DOUBLE_EQ(c.occupied, mean / 6.0);
}

TEST(Coverage, BadConfigurationIsRejected) {
  Dataset d(2, 1);
  d.append({{0, 0}, {0}, {0, 0}, false, false});
  const Vector lo{-1, -1}, hi{1, 1}, bad{1, -1};
  EXPECT_THROW(coverage(d, 0, lo, hi), ConfigError);
  EXPECT_THROW(coverage(d, 4, lo, bad), ConfigError);
  EXPECT_THROW(coverage(d, 4, Vector{0}, Vector{1}), ConfigError);
}

}  // namespace
}  // namespace brl
