#include "brl/offline/config_json.hpp"

#include <algorithm>
#include <cstring>

namespace brl {

using nlohmann::ordered_json;

void reject_unknown_keys(const ordered_json& j, std::initializer_list<const char*> keys,
                         const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(keys.begin(), keys.end(),
                                   [&](const char* k) { return key == k; });
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

void to_json(ordered_json& j, const AdamConfig& c) {
  j = ordered_json{{"lr", c.lr}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"eps", c.eps}};
}

void from_json(const ordered_json& j, AdamConfig& c) {
  if (j.is_number()) {
    c.lr = j.get<double>();
    return;
  }
  reject_unknown_keys(j, {"lr", "beta1", "beta2", "eps"}, "optimizer config");
  read_key(j, "lr", c.lr);
  read_key(j, "beta1", c.beta1);
  read_key(j, "beta2", c.beta2);
  read_key(j, "eps", c.eps);
}

void to_json(ordered_json& j, const Td3Config& c) {
  j = ordered_json{{"gamma", c.gamma},
                   {"tau", c.tau},
                   {"target_noise", c.target_noise},
                   {"noise_clip", c.noise_clip},
                   {"policy_delay", c.policy_delay},
                   {"batch_size", c.batch_size},
                   {"actor_opt", c.actor_opt},
                   {"critic_opt", c.critic_opt},
                   {"hidden", c.hidden}};
}

void from_json(const ordered_json& j, Td3Config& c) {
  reject_unknown_keys(j,
                      {"gamma", "tau", "target_noise", "noise_clip", "policy_delay", "batch_size",
                       "actor_opt", "critic_opt", "hidden"},
                      "td3 config");
  read_key(j, "gamma", c.gamma);
  read_key(j, "tau", c.tau);
  read_key(j, "target_noise", c.target_noise);
  read_key(j, "noise_clip", c.noise_clip);
  read_key(j, "policy_delay", c.policy_delay);
  read_key(j, "batch_size", c.batch_size);
  read_key(j, "actor_opt", c.actor_opt);
  read_key(j, "critic_opt", c.critic_opt);
  read_key(j, "hidden", c.hidden);
  c.validate();
}

void to_json(ordered_json& j, const BcqConfig& c) {
  j = ordered_json{{"gamma", c.gamma},
                   {"tau", c.tau},
                   {"n_candidates", c.n_candidates},
                   {"phi", c.phi},
                   {"lambda", c.lambda},
                   {"latent_dim", c.latent_dim},
                   {"batch_size", c.batch_size},
                   {"actor_opt", c.actor_opt},
                   {"critic_opt", c.critic_opt},
                   {"vae_opt", c.vae_opt},
                   {"hidden", c.hidden},
                   {"vae_hidden", c.vae_hidden}};
}

void from_json(const ordered_json& j, BcqConfig& c) {
  reject_unknown_keys(j,
                      {"gamma", "tau", "n_candidates", "phi", "lambda", "latent_dim", "batch_size",
                       "actor_opt", "critic_opt", "vae_opt", "hidden", "vae_hidden"},
                      "bcq config");
  read_key(j, "gamma", c.gamma);
  read_key(j, "tau", c.tau);
  read_key(j, "n_candidates", c.n_candidates);
  read_key(j, "phi", c.phi);
  read_key(j, "lambda", c.lambda);
  read_key(j, "latent_dim", c.latent_dim);
  read_key(j, "batch_size", c.batch_size);
  read_key(j, "actor_opt", c.actor_opt);
  read_key(j, "critic_opt", c.critic_opt);
  read_key(j, "vae_opt", c.vae_opt);
  read_key(j, "hidden", c.hidden);
  read_key(j, "vae_hidden", c.vae_hidden);
  c.validate();
}

}  // namespace brl
