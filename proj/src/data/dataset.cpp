#include "brl/data/dataset.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>

#include "json.hpp"

#include "brl/core/binary_io.hpp"
#include "brl/core/errors.hpp"
#include "brl/core/hash.hpp"

namespace brl {

namespace {

constexpr char kMagic[4] = {'B', 'R', 'L', '1'};

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Dataset::Dataset(std::size_t obs_dim, std::size_t act_dim, DatasetMetadata metadata)
    : obs_dim_(obs_dim), act_dim_(act_dim), metadata_(std::move(metadata)) {
  if (obs_dim == 0 || act_dim == 0) throw ConfigError("dataset dimensions must be positive");
  if (obs_dim > 0xffff || act_dim > 0xffff) throw ConfigError("dataset dimensions exceed u16");
}

void Dataset::append(const Transition& t) {
  if (frozen_) throw UsageError("dataset is immutable once written");
  if (t.obs.size() != obs_dim_ || t.next_obs.size() != obs_dim_ || t.action.size() != act_dim_) {
    throw ShapeError("transition dimensions do not match dataset");
  }
  obs_.insert(obs_.end(), t.obs.begin(), t.obs.end());
  action_.insert(action_.end(), t.action.begin(), t.action.end());
  next_obs_.insert(next_obs_.end(), t.next_obs.begin(), t.next_obs.end());
  const bool done = t.done || t.timeout;
  flags_.push_back(static_cast<std::uint8_t>((done ? 1u : 0u) | (t.timeout ? 2u : 0u)));
}

std::span<const double> Dataset::obs(std::size_t i) const {
  return {obs_.data() + i * obs_dim_, obs_dim_};
}

std::span<const double> Dataset::action(std::size_t i) const {
  return {action_.data() + i * act_dim_, act_dim_};
}

std::span<const double> Dataset::next_obs(std::size_t i) const {
  return {next_obs_.data() + i * obs_dim_, obs_dim_};
}

Transition Dataset::at(std::size_t i) const {
  if (i >= size()) throw UsageError("transition index out of range");
  const auto o = obs(i);
  const auto a = action(i);
  const auto n = next_obs(i);
  return Transition{{o.begin(), o.end()}, {a.begin(), a.end()}, {n.begin(), n.end()},
                    done(i), timeout(i)};
}

std::vector<std::pair<std::size_t, std::size_t>> Dataset::episodes() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (done(i)) {
      out.emplace_back(begin, i + 1);
      begin = i + 1;
    }
  }
  if (begin < size()) out.emplace_back(begin, size());
  return out;
}

// ---- serialization ----------------------------------------------------------

std::string encode_dataset(const Dataset& d) {
  std::string out;
  const std::size_t per = (2 * d.obs_dim() + d.act_dim()) * sizeof(float) + 1;
  out.reserve(kDatasetHeaderBytes + d.size() * per);
  out.append(kMagic, 4);
  bin::put<std::uint16_t>(out, kDatasetVersion);
  bin::put<std::uint16_t>(out, static_cast<std::uint16_t>(d.obs_dim()));
  bin::put<std::uint16_t>(out, static_cast<std::uint16_t>(d.act_dim()));
  bin::put<std::uint16_t>(out, 0);
  bin::put<std::uint64_t>(out, static_cast<std::uint64_t>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (double v : d.obs(i)) bin::put<float>(out, static_cast<float>(v));
    for (double v : d.action(i)) bin::put<float>(out, static_cast<float>(v));
    for (double v : d.next_obs(i)) bin::put<float>(out, static_cast<float>(v));
    bin::put<std::uint8_t>(out, static_cast<std::uint8_t>((d.done(i) ? 1u : 0u) |
                                                          (d.timeout(i) ? 2u : 0u)));
  }
  return out;
}

Dataset decode_dataset(std::span<const unsigned char> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a BRL1 dataset (bad magic)");
  }
  if (bytes.size() < kDatasetHeaderBytes) throw CorruptionError("truncated dataset header");
  bin::Reader r(bytes, 4);
  const auto version = r.get<std::uint16_t>();
  if (version != kDatasetVersion) {
    throw FormatError("unsupported dataset version " + std::to_string(version));
  }
  const auto obs_dim = r.get<std::uint16_t>();
  const auto act_dim = r.get<std::uint16_t>();
  r.get<std::uint16_t>();
  const auto n = r.get<std::uint64_t>();
  if (obs_dim == 0 || act_dim == 0) throw CorruptionError("dataset header has zero dimension");
  const std::uint64_t per = (2ull * obs_dim + act_dim) * sizeof(float) + 1;
  if (r.remaining() / per < n || r.remaining() != n * per) {
    throw CorruptionError("dataset body holds " + std::to_string(r.remaining()) +
                          " bytes, header promises " + std::to_string(n) + " transitions");
  }
  Dataset d(obs_dim, act_dim);
  Transition t;
  t.obs.resize(obs_dim);
  t.action.resize(act_dim);
  t.next_obs.resize(obs_dim);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (double& v : t.obs) v = r.get<float>();
    for (double& v : t.action) v = r.get<float>();
    for (double& v : t.next_obs) v = r.get<float>();
    const auto flags = r.get<std::uint8_t>();
    if (flags > 3 || (flags == 2)) throw CorruptionError("invalid transition flags");
    t.done = (flags & 1u) != 0;
    t.timeout = (flags & 2u) != 0;
    d.append(t);
  }
  d.freeze();
  return d;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void dataset_write(const Dataset& dataset, const std::filesystem::path& path) {
  if (dataset.empty()) throw UsageError("refusing to write an empty dataset");
  bin::write_file(path, encode_dataset(dataset));
  const DatasetMetadata& m = dataset.metadata();
  nlohmann::ordered_json meta;
  meta["env"] = m.env;
  meta["method"] = m.method;
  meta["seed"] = m.seed;
  meta["steps"] = m.steps != 0 ? m.steps : static_cast<std::uint64_t>(dataset.size());
  meta["config_hash"] = m.config_hash;
  meta["created_utc"] = m.created_utc.empty() ? utc_now() : m.created_utc;
  bin::write_file(sidecar_path(path), meta.dump(2) + "\n");
}

Dataset dataset_read(const std::filesystem::path& path) {
  Dataset d = decode_dataset(bin::read_file(path));
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    try {
      std::ifstream in(side);
      const auto meta = nlohmann::json::parse(in);
      DatasetMetadata& m = d.metadata();
      m.env = meta.value("env", "");
      m.method = meta.value("method", "");
      m.seed = meta.value("seed", std::uint64_t{0});
      m.steps = meta.value("steps", std::uint64_t{0});
      m.config_hash = meta.value("config_hash", "");
      m.created_utc = meta.value("created_utc", "");
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("bad dataset sidecar " + side.string() + ": " + e.what());
    }
  }
  return d;
}

std::string file_digest(const std::filesystem::path& path) {
  const auto bytes = bin::read_file(path);
  Fnv1a h;
  h.update(bytes.data(), bytes.size());
  return hex64(h.digest());
}

// ---- sampling and relabeling ------------------------------------------------

std::vector<std::size_t> sample_batch(const Dataset& dataset, std::size_t batch_size, Rng& rng) {
  if (dataset.empty()) throw UsageError("cannot sample from an empty dataset");
  if (batch_size == 0) throw UsageError("batch_size must be at least 1");
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = rng.index(dataset.size());
  return idx;
}

namespace {

void check_reward_env(const Dataset& dataset, const TaskReward& reward) {
  if (reward.obs_dim() != dataset.obs_dim()) {
    throw ConfigError("reward '" + reward.name() + "' does not match dataset observation size");
  }
  const std::string& env = dataset.metadata().env;
  if (!env.empty() && !reward.applies_to(env)) {
    throw ConfigError("reward '" + reward.name() + "' is for " + reward.env() +
                      " but the dataset was collected on " + env);
  }
}

LabeledBatch gather(const Dataset& dataset, std::span<const std::size_t> indices,
                    const std::function<double(std::size_t)>& reward_of) {
  const auto b = static_cast<Eigen::Index>(indices.size());
  const auto od = static_cast<Eigen::Index>(dataset.obs_dim());
  const auto ad = static_cast<Eigen::Index>(dataset.act_dim());
  LabeledBatch out{Matrix(b, od), Matrix(b, ad), Matrix(b, 1), Matrix(b, od), Matrix(b, 1)};
  for (Eigen::Index r = 0; r < b; ++r) {
    const std::size_t i = indices[static_cast<std::size_t>(r)];
    if (i >= dataset.size()) throw UsageError("batch index out of range");
    std::memcpy(out.obs.row(r).data(), dataset.obs(i).data(), dataset.obs_dim() * sizeof(double));
    std::memcpy(out.action.row(r).data(), dataset.action(i).data(),
                dataset.act_dim() * sizeof(double));
    std::memcpy(out.next_obs.row(r).data(), dataset.next_obs(i).data(),
                dataset.obs_dim() * sizeof(double));
    out.reward(r, 0) = reward_of(i);
    out.not_done(r, 0) = (dataset.done(i) && !dataset.timeout(i)) ? 0.0 : 1.0;
  }
  return out;
}

}  // namespace

LabeledBatch relabel(const Dataset& dataset, const TaskReward& reward,
                     std::span<const std::size_t> indices) {
  check_reward_env(dataset, reward);
  return gather(dataset, indices, [&](std::size_t i) { return reward(dataset.next_obs(i)); });
}

RelabeledSampler::RelabeledSampler(const Dataset& dataset, const TaskReward& reward,
                                   std::uint64_t seed)
    : dataset_(&dataset), rng_(seed) {
  check_reward_env(dataset, reward);
  if (dataset.empty()) throw UsageError("cannot sample from an empty dataset");
  rewards_.resize(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    rewards_[i] = reward(dataset.next_obs(i));
    if (!std::isfinite(rewards_[i])) throw InputError("non-finite task reward");
  }
}

LabeledBatch RelabeledSampler::next(std::size_t batch_size) {
  const auto idx = sample_batch(*dataset_, batch_size, rng_);
  return gather(*dataset_, idx, [this](std::size_t i) { return rewards_[i]; });
}

// ---- coverage ---------------------------------------------------------------

std::size_t coverage_bin(double v, double lo, double hi, std::size_t bins) {
  const double t = (v - lo) / (hi - lo) * static_cast<double>(bins);
  if (!(t > 0.0)) return 0;  // also catches NaN
  const auto b = static_cast<std::size_t>(std::floor(t));
  return b >= bins ? bins - 1 : b;
}

CoverageReport coverage(const Dataset& dataset, std::size_t bins_per_dim,
                        std::span<const double> low, std::span<const double> high) {
  const std::size_t d = dataset.obs_dim();
  if (bins_per_dim == 0) throw ConfigError("bins_per_dim must be at least 1");
  if (low.size() != d || high.size() != d) throw ConfigError("coverage bounds do not match obs_dim");
  for (std::size_t k = 0; k < d; ++k) {
    if (!std::isfinite(low[k]) || !std::isfinite(high[k]) || !(low[k] < high[k])) {
      throw ConfigError("coverage bounds must be finite with low < high");
    }
  }

  std::vector<std::vector<std::size_t>> groups;
  CoverageReport report;
  report.bins_per_dim = bins_per_dim;
  report.pairwise = d > 3;
  if (report.pairwise) {
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a + 1; b < d; ++b) groups.push_back({a, b});
    }
  } else {
    std::vector<std::size_t> all(d);
    for (std::size_t k = 0; k < d; ++k) all[k] = k;
    groups.push_back(all);
  }

  double occupied_total = 0.0;
  for (const auto& dims : groups) {
    Histogram h;
    h.dims = dims;
    std::size_t cells = 1;
    for (std::size_t k = 0; k < dims.size(); ++k) cells *= bins_per_dim;
    h.counts.assign(cells, 0);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const auto o = dataset.obs(i);
      std::size_t cell = 0;
      for (std::size_t k : dims) cell = cell * bins_per_dim + coverage_bin(o[k], low[k], high[k], bins_per_dim);
      h.counts[cell] += 1;
    }
    for (auto c : h.counts) h.occupied += c > 0 ? 1 : 0;
    occupied_total += static_cast<double>(h.occupied);
    report.histograms.push_back(std::move(h));
  }
  report.occupied = occupied_total / static_cast<double>(groups.size());
  return report;
}

}  // namespace brl
