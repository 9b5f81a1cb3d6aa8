#include "brl/harness/config.hpp"

#include "brl/core/binary_io.hpp"
#include "brl/core/errors.hpp"
#include "brl/core/hash.hpp"
#include "brl/offline/config_json.hpp"

namespace brl {

using nlohmann::ordered_json;

void to_json(ordered_json& j, const SacConfig& c) {
  j = ordered_json{{"gamma", c.gamma},         {"tau", c.tau},
                   {"alpha", c.alpha},         {"actor_opt", c.actor_opt},
                   {"critic_opt", c.critic_opt}, {"hidden", c.hidden}};
}

void from_json(const ordered_json& j, SacConfig& c) {
  reject_unknown_keys(j, {"gamma", "tau", "alpha", "actor_opt", "critic_opt", "hidden"},
                      "sac config");
  read_key(j, "gamma", c.gamma);
  read_key(j, "tau", c.tau);
  read_key(j, "alpha", c.alpha);
  read_key(j, "actor_opt", c.actor_opt);
  read_key(j, "critic_opt", c.critic_opt);
  read_key(j, "hidden", c.hidden);
}

void to_json(ordered_json& j, const GepConfig& c) {
  j = ordered_json{{"bootstrap_episodes", c.bootstrap_episodes},
                   {"init_sigma", c.init_sigma},
                   {"perturb_sigma", c.perturb_sigma}};
}

void from_json(const ordered_json& j, GepConfig& c) {
  reject_unknown_keys(j, {"bootstrap_episodes", "init_sigma", "perturb_sigma"}, "gep config");
  read_key(j, "bootstrap_episodes", c.bootstrap_episodes);
  read_key(j, "init_sigma", c.init_sigma);
  read_key(j, "perturb_sigma", c.perturb_sigma);
}

void to_json(ordered_json& j, const RndConfig& c) {
  j = ordered_json{{"embed_dim", c.embed_dim}, {"hidden", c.hidden}, {"opt", c.opt}};
}

void from_json(const ordered_json& j, RndConfig& c) {
  reject_unknown_keys(j, {"embed_dim", "hidden", "opt"}, "rnd config");
  read_key(j, "embed_dim", c.embed_dim);
  read_key(j, "hidden", c.hidden);
  read_key(j, "opt", c.opt);
}

void to_json(ordered_json& j, const DiaynConfig& c) {
  j = ordered_json{{"n_skills", c.n_skills}, {"disc_hidden", c.disc_hidden},
                   {"disc_opt", c.disc_opt}};
}

void from_json(const ordered_json& j, DiaynConfig& c) {
  reject_unknown_keys(j, {"n_skills", "disc_hidden", "disc_opt"}, "diayn config");
  read_key(j, "n_skills", c.n_skills);
  read_key(j, "disc_hidden", c.disc_hidden);
  read_key(j, "disc_opt", c.disc_opt);
}

void to_json(ordered_json& j, const SseConfig& c) {
  j = ordered_json{{"horizon", c.horizon},           {"gamma", c.gamma},
                   {"model_hidden", c.model_hidden}, {"policy_hidden", c.policy_hidden},
                   {"model_opt", c.model_opt},       {"done_opt", c.done_opt},
                   {"policy_opt", c.policy_opt}};
}

void from_json(const ordered_json& j, SseConfig& c) {
  reject_unknown_keys(j,
                      {"horizon", "gamma", "model_hidden", "policy_hidden", "model_opt",
                       "done_opt", "policy_opt"},
                      "sse config");
  read_key(j, "horizon", c.horizon);
  read_key(j, "gamma", c.gamma);
  read_key(j, "model_hidden", c.model_hidden);
  read_key(j, "policy_hidden", c.policy_hidden);
  read_key(j, "model_opt", c.model_opt);
  read_key(j, "done_opt", c.done_opt);
  read_key(j, "policy_opt", c.policy_opt);
}

void to_json(ordered_json& j, const LearnerSchedule& c) {
  j = ordered_json{{"warmup_steps", c.warmup_steps},
                   {"batch_size", c.batch_size},
                   {"update_every", c.update_every}};
}

void from_json(const ordered_json& j, LearnerSchedule& c) {
  reject_unknown_keys(j, {"warmup_steps", "batch_size", "update_every"}, "schedule");
  read_key(j, "warmup_steps", c.warmup_steps);
  read_key(j, "batch_size", c.batch_size);
  read_key(j, "update_every", c.update_every);
}

namespace {

ordered_json hashed_part(const ExperimentConfig& c) {
  ordered_json explore{{"random_init_sigma", c.explore.random_init_sigma},
                       {"gep", c.explore.gep},
                       {"rnd", c.explore.rnd},
                       {"diayn", c.explore.diayn},
                       {"sse", c.explore.sse},
                       {"sac", c.explore.sac},
                       {"schedule", c.explore.schedule}};
  ordered_json train{{"td3", c.train.td3}, {"bcq", c.train.bcq}, {"log_every", c.train.log_every}};
  return ordered_json{{"phase", c.phase},
                      {"env", c.env},
                      {"method", c.method},
                      {"algo", c.algo},
                      {"steps", c.steps},
                      {"seed", c.seed},
                      {"reward", c.reward},
                      {"episodes", c.episodes},
                      {"bins", c.bins},
                      {"joints", c.joints},
                      {"max_episode_steps", c.max_episode_steps},
                      {"explore", explore},
                      {"train", train}};
}

}  // namespace

ordered_json config_to_json(const ExperimentConfig& c) {
  ordered_json j = hashed_part(c);
  j["dataset"] = c.dataset;
  j["policy"] = c.policy;
  j["out"] = c.out;
  j["csv"] = c.csv;
  j["inputs"] = c.inputs;
  return j;
}

void apply_config_json(const ordered_json& j, ExperimentConfig& c) {
  reject_unknown_keys(j,
                      {"phase", "env", "method", "algo", "steps", "seed", "reward", "episodes",
                       "bins", "joints", "max_episode_steps", "explore", "train", "dataset",
                       "policy", "out", "csv", "inputs"},
                      "config");
  read_key(j, "phase", c.phase);
  read_key(j, "env", c.env);
  read_key(j, "method", c.method);
  read_key(j, "algo", c.algo);
  read_key(j, "steps", c.steps);
  read_key(j, "seed", c.seed);
  read_key(j, "reward", c.reward);
  read_key(j, "episodes", c.episodes);
  read_key(j, "bins", c.bins);
  read_key(j, "joints", c.joints);
  read_key(j, "max_episode_steps", c.max_episode_steps);
  read_key(j, "dataset", c.dataset);
  read_key(j, "policy", c.policy);
  read_key(j, "out", c.out);
  read_key(j, "csv", c.csv);
  read_key(j, "inputs", c.inputs);
  if (auto it = j.find("explore"); it != j.end()) {
    reject_unknown_keys(*it,
                        {"random_init_sigma", "gep", "rnd", "diayn", "sse", "sac", "schedule"},
                        "explore config");
    read_key(*it, "random_init_sigma", c.explore.random_init_sigma);
    read_key(*it, "gep", c.explore.gep);
    read_key(*it, "rnd", c.explore.rnd);
    read_key(*it, "diayn", c.explore.diayn);
    read_key(*it, "sse", c.explore.sse);
    read_key(*it, "sac", c.explore.sac);
    read_key(*it, "schedule", c.explore.schedule);
  }
  if (auto it = j.find("train"); it != j.end()) {
    reject_unknown_keys(*it, {"td3", "bcq", "log_every"}, "train config");
    read_key(*it, "td3", c.train.td3);
    read_key(*it, "bcq", c.train.bcq);
    read_key(*it, "log_every", c.train.log_every);
  }
}

ExperimentConfig load_config_file(const std::string& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(bin::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  ExperimentConfig c;
  apply_config_json(j, c);
  return c;
}

std::string config_hash(const ExperimentConfig& config) {
  return hex64(fnv1a(hashed_part(config).dump()));
}

EnvOptions env_options(const ExperimentConfig& config) {
  EnvOptions o;
  o.max_episode_steps = config.max_episode_steps;
  o.joints = config.joints;
  return o;
}

}  // namespace brl
