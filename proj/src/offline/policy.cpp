#include "brl/offline/policy.hpp"

#include "json.hpp"

#include "brl/core/binary_io.hpp"
#include "brl/core/checkpoint.hpp"
#include "brl/core/errors.hpp"
#include "brl/core/hash.hpp"
#include "brl/offline/config_json.hpp"

namespace brl {

using nlohmann::ordered_json;

OfflineAlgorithm offline_algorithm_from_name(std::string_view name) {
  if (name == "td3") return OfflineAlgorithm::kTd3;
  if (name == "bcq") return OfflineAlgorithm::kBcq;
  throw ConfigError("unknown offline algorithm '" + std::string(name) + "'");
}

std::string_view offline_algorithm_name(OfflineAlgorithm algo) {
  return algo == OfflineAlgorithm::kTd3 ? "td3" : "bcq";
}

OfflinePolicy::OfflinePolicy(const EnvSpec& spec, const Td3Config& config, Rng& rng)
    : spec_(spec), td3_config_(config) {
  td3_.emplace(spec.obs_dim, spec.action_low, spec.action_high, config, rng);
  info.env = spec.name;
}

OfflinePolicy::OfflinePolicy(const EnvSpec& spec, const BcqConfig& config, Rng& rng)
    : spec_(spec), bcq_config_(config) {
  bcq_.emplace(spec.obs_dim, spec.action_low, spec.action_high, config, rng);
  info.env = spec.name;
}

Vector OfflinePolicy::act(std::span<const double> obs, Rng& rng) {
  if (obs.size() != spec_.obs_dim) throw ShapeError("policy: observation size mismatch");
  if (td3_) return to_vector(td3_->act(row_matrix(obs)));
  return bcq_select_action(*bcq_, obs, bcq_config_, rng);
}

std::vector<std::pair<std::string, Mlp*>> OfflinePolicy::mutable_networks() {
  if (td3_) {
    Td3Nets& n = *td3_;
    return {{"actor", &n.actor},
            {"critic1", &n.critic1},
            {"critic2", &n.critic2},
            {"actor_target", &n.actor_target},
            {"critic1_target", &n.critic1_target},
            {"critic2_target", &n.critic2_target}};
  }
  BcqNets& n = *bcq_;
  return {{"encoder", &n.generator.encoder},
          {"decoder", &n.generator.decoder},
          {"perturb", &n.perturb},
          {"critic1", &n.critic1},
          {"critic2", &n.critic2},
          {"perturb_target", &n.perturb_target},
          {"critic1_target", &n.critic1_target},
          {"critic2_target", &n.critic2_target}};
}

std::vector<std::pair<std::string, const Mlp*>> OfflinePolicy::networks() const {
  std::vector<std::pair<std::string, const Mlp*>> out;
  for (auto& [name, net] : const_cast<OfflinePolicy*>(this)->mutable_networks()) {
    out.emplace_back(name, net);
  }
  return out;
}

std::uint64_t OfflinePolicy::hash() const {
  Fnv1a h;
  for (const auto& [name, net] : networks()) {
    h.update(std::string_view(name));
    h.update(std::span<const double>(net->params().values));
  }
  return h.digest();
}

std::size_t OfflinePolicy::steps() const { return td3_ ? td3_->steps : bcq_->steps; }

namespace {

EnvSpec env_spec_named(const std::string& env, std::size_t act_dim) {
  EnvOptions options;
  if (canonical_env_name(env) == "planar-arm") options.joints = act_dim;
  return make_environment(env, options)->spec();
}

}  // namespace

EnvSpec dataset_env_spec(const Dataset& dataset) {
  const std::string& env = dataset.metadata().env;
  if (env.empty()) throw ConfigError("dataset does not name its environment");
  EnvSpec spec = env_spec_named(env, dataset.act_dim());
  if (spec.obs_dim != dataset.obs_dim() || spec.act_dim != dataset.act_dim()) {
    throw ConfigError("dataset dimensions do not match environment " + env);
  }
  return spec;
}

void save_policy(const std::filesystem::path& path, const OfflinePolicy& policy) {
  const auto nets = policy.networks();
  std::vector<const Mlp*> ptrs;
  ordered_json names = ordered_json::array();
  for (const auto& [name, net] : nets) {
    ptrs.push_back(net);
    names.push_back(name);
  }
  ordered_json side;
  side["algorithm"] = std::string(offline_algorithm_name(policy.algorithm()));
  side["env"] = policy.env_spec().name;
  side["obs_dim"] = policy.env_spec().obs_dim;
  side["act_dim"] = policy.env_spec().act_dim;
  side["reward"] = policy.info.reward;
  side["dataset_hash"] = policy.info.dataset_hash;
  side["config_hash"] = policy.info.config_hash;
  side["seed"] = policy.info.seed;
  side["steps"] = policy.steps();
  side["networks"] = names;
  if (policy.algorithm() == OfflineAlgorithm::kTd3) {
    side["config"] = policy.td3_config();
  } else {
    side["config"] = policy.bcq_config();
  }
  save_networks(path, ptrs);
  bin::write_file(path.string() + ".json", side.dump(2) + "\n");
}

OfflinePolicy load_policy(const std::filesystem::path& path) {
  ordered_json side;
  try {
    side = ordered_json::parse(bin::read_file(path.string() + ".json"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("policy sidecar: " + std::string(e.what()));
  }
  std::string algo, env;
  std::size_t act_dim = 0, obs_dim = 0;
  read_key(side, "algorithm", algo);
  read_key(side, "env", env);
  read_key(side, "act_dim", act_dim);
  read_key(side, "obs_dim", obs_dim);
  const EnvSpec spec = env_spec_named(env, act_dim);
  if (spec.obs_dim != obs_dim) throw FormatError("policy sidecar: obs_dim does not match env");

  Rng scratch(0);
  OfflinePolicy policy = [&] {
    if (offline_algorithm_from_name(algo) == OfflineAlgorithm::kTd3) {
      Td3Config c;
      if (side.contains("config")) side["config"].get_to(c);
      return OfflinePolicy(spec, c, scratch);
    }
    BcqConfig c;
    if (side.contains("config")) side["config"].get_to(c);
    return OfflinePolicy(spec, c, scratch);
  }();

  std::vector<Mlp> loaded = load_networks(path);
  auto slots = policy.mutable_networks();
  if (loaded.size() != slots.size()) {
    throw FormatError("checkpoint holds " + std::to_string(loaded.size()) + " networks, expected " +
                      std::to_string(slots.size()));
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].second->same_shape(loaded[i])) {
      throw FormatError("checkpoint network '" + slots[i].first + "' has the wrong shape");
    }
    slots[i].second->copy_params_from(loaded[i]);
  }
  read_key(side, "reward", policy.info.reward);
  read_key(side, "dataset_hash", policy.info.dataset_hash);
  read_key(side, "config_hash", policy.info.config_hash);
  read_key(side, "seed", policy.info.seed);
  std::size_t steps = 0;
  read_key(side, "steps", steps);
  if (policy.td3_) {
    policy.td3_->steps = steps;
  } else {
    policy.bcq_->steps = steps;
  }
  return policy;
}

}  // namespace brl
