#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "brl/core/rng.hpp"
#include "brl/core/tensor.hpp"
#include "brl/envs/rewards.hpp"

namespace brl {

struct Transition {
  Vector obs;
  Vector action;
  Vector next_obs;
  // Set for every episode end; `timeout` additionally marks step-limit ends.
  bool done = false;
  bool timeout = false;

  bool failure() const { return done && !timeout; }
};

struct DatasetMetadata {
  std::string env;
  std::string method;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  std::string config_hash;
  std::string created_utc;
};

// Ordered transitions stored contiguously. Append-only until frozen; datasets
// read from disk are frozen.
class Dataset {
 public:
  Dataset(std::size_t obs_dim, std::size_t act_dim, DatasetMetadata metadata = {});

  void append(const Transition& t);
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  std::size_t size() const { return flags_.size(); }
  bool empty() const { return flags_.empty(); }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t act_dim() const { return act_dim_; }

  std::span<const double> obs(std::size_t i) const;
  std::span<const double> action(std::size_t i) const;
  std::span<const double> next_obs(std::size_t i) const;
  bool done(std::size_t i) const { return (flags_[i] & 1u) != 0; }
  bool timeout(std::size_t i) const { return (flags_[i] & 2u) != 0; }
  Transition at(std::size_t i) const;

  const DatasetMetadata& metadata() const { return metadata_; }
  DatasetMetadata& metadata() { return metadata_; }

  // [begin, end) index ranges of episodes, split after every done flag. A
  // trailing unfinished episode is included.
  std::vector<std::pair<std::size_t, std::size_t>> episodes() const;

 private:
  std::size_t obs_dim_;
  std::size_t act_dim_;
  DatasetMetadata metadata_;
  std::vector<double> obs_;
  std::vector<double> action_;
  std::vector<double> next_obs_;
  std::vector<std::uint8_t> flags_;
  bool frozen_ = false;
};

// ---- file format ------------------------------------------------------------
// Header (20 bytes, little-endian): magic "BRL1", version u16, obs_dim u16,
// act_dim u16, reserved u16, n_transitions u64. Then per transition:
// obs f32 x obs_dim, action f32 x act_dim, next_obs f32 x obs_dim,
// flags u8 (bit0 done, bit1 timeout). Metadata goes to a JSON sidecar at
// path + ".json".
inline constexpr std::uint16_t kDatasetVersion = 1;
inline constexpr std::size_t kDatasetHeaderBytes = 20;

std::string encode_dataset(const Dataset& dataset);
Dataset decode_dataset(std::span<const unsigned char> bytes);

void dataset_write(const Dataset& dataset, const std::filesystem::path& path);
// Reads the binary file and, if present, its sidecar.
Dataset dataset_read(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);
// Hex FNV-1a digest of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

// ---- sampling and relabeling ------------------------------------------------

// i.i.d. uniform indices in [0, dataset.size()).
std::vector<std::size_t> sample_batch(const Dataset& dataset, std::size_t batch_size, Rng& rng);

struct LabeledBatch {
  Matrix obs;
  Matrix action;
  Matrix reward;    // B x 1
  Matrix next_obs;
  Matrix not_done;  // B x 1; zero only for failure terminations

  std::size_t size() const { return static_cast<std::size_t>(obs.rows()); }
};

// Rewards computed from next_obs with `reward`. Throws ConfigError if the
// dataset belongs to a different environment.
LabeledBatch relabel(const Dataset& dataset, const TaskReward& reward,
                     std::span<const std::size_t> indices);

// Relabeled minibatch stream: rewards are computed once per transition, then
// batches are drawn uniformly with the sampler's own generator.
class RelabeledSampler {
 public:
  RelabeledSampler(const Dataset& dataset, const TaskReward& reward, std::uint64_t seed);

  LabeledBatch next(std::size_t batch_size);
  const std::vector<double>& rewards() const { return rewards_; }

 private:
  const Dataset* dataset_;
  std::vector<double> rewards_;
  Rng rng_;
};

// ---- coverage ---------------------------------------------------------------

struct Histogram {
  std::vector<std::size_t> dims;    // observation dimensions spanned
  std::vector<std::uint64_t> counts;  // row-major over dims, bins_per_dim each
  std::size_t occupied = 0;
};

struct CoverageReport {
  std::size_t bins_per_dim = 0;
  // Full-grid occupied count when obs_dim <= 3, otherwise the mean occupied
  // count over all dimension pairs.
  double occupied = 0.0;
  bool pairwise = false;
  std::vector<Histogram> histograms;
};

// Uniform bin of `v` within [lo, hi]; out-of-range values clamp to edge bins.
std::size_t coverage_bin(double v, double lo, double hi, std::size_t bins);

CoverageReport coverage(const Dataset& dataset, std::size_t bins_per_dim,
                        std::span<const double> low, std::span<const double> high);

}  // namespace brl
