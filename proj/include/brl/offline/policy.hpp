#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "brl/envs/environment.hpp"
#include "brl/explore/agent.hpp"
#include "brl/offline/bcq.hpp"
#include "brl/offline/td3.hpp"

namespace brl {

enum class OfflineAlgorithm { kTd3, kBcq };

OfflineAlgorithm offline_algorithm_from_name(std::string_view name);  // "td3" | "bcq"
std::string_view offline_algorithm_name(OfflineAlgorithm algo);

// Provenance recorded next to a checkpoint.
struct PolicyInfo {
  std::string env;
  std::string reward;
  std::string dataset_hash;
  std::string config_hash;
  std::uint64_t seed = 0;
};

// A TD3 or BCQ learner. Acting is deterministic for TD3 (actor output, no
// noise) and the candidate argmax for BCQ.
class OfflinePolicy : public Agent {
 public:
  OfflinePolicy(const EnvSpec& spec, const Td3Config& config, Rng& rng);
  OfflinePolicy(const EnvSpec& spec, const BcqConfig& config, Rng& rng);

  OfflineAlgorithm algorithm() const { return td3_ ? OfflineAlgorithm::kTd3 : OfflineAlgorithm::kBcq; }
  Vector act(std::span<const double> obs, Rng& rng) override;

  // Named networks in checkpoint order.
  std::vector<std::pair<std::string, const Mlp*>> networks() const;
  std::uint64_t hash() const;
  std::size_t steps() const;

  const EnvSpec& env_spec() const { return spec_; }
  const Td3Config& td3_config() const { return td3_config_; }
  const BcqConfig& bcq_config() const { return bcq_config_; }
  Td3Nets& td3() { return *td3_; }
  const Td3Nets& td3() const { return *td3_; }
  BcqNets& bcq() { return *bcq_; }
  const BcqNets& bcq() const { return *bcq_; }

  PolicyInfo info;

 private:
  std::vector<std::pair<std::string, Mlp*>> mutable_networks();
  friend OfflinePolicy load_policy(const std::filesystem::path& path);

  EnvSpec spec_;
  Td3Config td3_config_;
  BcqConfig bcq_config_;
  std::optional<Td3Nets> td3_;
  std::optional<BcqNets> bcq_;
};

// Spec of the environment a dataset was collected in (no stepping).
EnvSpec dataset_env_spec(const Dataset& dataset);

// Writes BRLP records to `path` and a JSON sidecar (path + ".json") with the
// algorithm, network names, provenance and configuration.
void save_policy(const std::filesystem::path& path, const OfflinePolicy& policy);
OfflinePolicy load_policy(const std::filesystem::path& path);

}  // namespace brl
