#include "brl/harness/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "brl/core/binary_io.hpp"
#include "brl/core/errors.hpp"
#include "brl/core/format.hpp"
#include "brl/data/dataset.hpp"
#include "brl/explore/collect.hpp"
#include "brl/harness/config.hpp"
#include "brl/harness/evaluate.hpp"
#include "brl/harness/report.hpp"
#include "brl/offline/train.hpp"

namespace brl {

namespace {

// Flag values that were given on the command line; they override --config.
struct Flags {
  std::string config;
  std::optional<std::string> env, method, algo, reward, dataset, policy, out, csv;
  std::optional<std::uint64_t> steps, seed, episodes, bins, joints, max_episode_steps;
  std::vector<std::string> inputs;
};

template <class T>
void overlay(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

ExperimentConfig resolve(const Flags& f, const std::string& phase) {
  ExperimentConfig c;
  bool file_seed = false;
  if (!f.config.empty()) {
    c = load_config_file(f.config);
    const auto bytes = bin::read_file(f.config);
    file_seed = nlohmann::json::parse(bytes.begin(), bytes.end()).contains("seed");
  }
  c.phase = phase;
  overlay(f.env, c.env);
  overlay(f.method, c.method);
  overlay(f.algo, c.algo);
  overlay(f.reward, c.reward);
  overlay(f.dataset, c.dataset);
  overlay(f.policy, c.policy);
  overlay(f.out, c.out);
  overlay(f.csv, c.csv);
  overlay(f.steps, c.steps);
  overlay(f.episodes, c.episodes);
  overlay(f.bins, c.bins);
  overlay(f.joints, c.joints);
  overlay(f.max_episode_steps, c.max_episode_steps);
  if (!f.inputs.empty()) c.inputs = f.inputs;
  if (f.seed) {
    c.seed = *f.seed;
  } else if (!file_seed) {
    if (const char* env_seed = std::getenv("BRL_SEED"); env_seed != nullptr && *env_seed) {
      try {
        std::size_t used = 0;
        c.seed = std::stoull(env_seed, &used);
        if (used != std::string(env_seed).size()) throw std::invalid_argument(env_seed);
      } catch (const std::exception&) {
        throw ConfigError(std::string("BRL_SEED is not an unsigned integer: ") + env_seed);
      }
    }
  }
  return c;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required option ") + flag);
}

void write_text(const std::string& path, const std::string& text) { bin::write_file(path, text); }

std::string provenance(std::initializer_list<std::pair<const char*, std::string>> fields) {
  std::string s;
  for (const auto& [k, v] : fields) {
    if (v.empty()) continue;
    if (!s.empty()) s += ' ';
    s += k;
    s += '=';
    s += v;
  }
  return s;
}

int run_explore(const ExperimentConfig& c, std::ostream& out) {
  require(c.env, "--env");
  require(c.method, "--method");
  require(c.out, "--out");
  const auto env = make_environment(c.env, env_options(c));
  Rng init(Rng::mix(c.seed));
  auto explorer = make_explorer(c.method, env->spec(), c.explore, init);
  const Dataset data = collect(*explorer, *env, c.steps, c.seed, config_hash(c));
  dataset_write(data, c.out);
  out << "wrote " << data.size() << " transitions to " << c.out << "\n";
  return 0;
}

int run_train(const ExperimentConfig& c, std::ostream& out) {
  require(c.dataset, "--dataset");
  require(c.algo, "--algo");
  require(c.reward, "--reward");
  require(c.out, "--out");
  const Dataset data = dataset_read(c.dataset);
  const TaskReward reward = make_reward(c.reward, dataset_env_spec(data));
  TrainOptions options = c.train;
  options.config_hash = config_hash(c);
  const TrainResult result = train_offline(data, reward, c.algo, c.steps, c.seed, options);
  save_policy(c.out, result.policy);
  const std::string csv = c.csv.empty() ? c.out + ".loss.csv" : c.csv;
  std::ostringstream text;
  write_loss_csv(text, result.log,
                 provenance({{"env", data.metadata().env},
                             {"reward", reward.spec_string()},
                             {"method", data.metadata().method},
                             {"algo", c.algo},
                             {"seed", std::to_string(c.seed)},
                             {"config_hash", options.config_hash}}));
  write_text(csv, text.str());
  out << "trained " << c.algo << " for " << c.steps << " steps; checkpoint " << c.out
      << ", log " << csv << "\n";
  return 0;
}

int run_eval(const ExperimentConfig& c, std::ostream& out) {
  require(c.policy, "--policy");
  require(c.csv, "--csv");
  OfflinePolicy policy = load_policy(c.policy);
  const std::string env_name = c.env.empty() ? policy.info.env : c.env;
  const std::string reward_spec = c.reward.empty() ? policy.info.reward : c.reward;
  require(env_name, "--env");
  require(reward_spec, "--reward");
  ExperimentConfig eval_cfg = c;
  if (canonical_env_name(env_name) == "planar-arm" && eval_cfg.joints == 7) {
    eval_cfg.joints = policy.env_spec().act_dim;
  }
  const auto env = make_environment(env_name, env_options(eval_cfg));
  const TaskReward reward = make_reward(reward_spec, env->spec());
  const EvalReport report = evaluate(policy, *env, reward, c.episodes, c.seed);
  std::ostringstream text;
  write_eval_csv(text, report,
                 provenance({{"env", env->spec().name},
                             {"reward", reward.spec_string()},
                             {"algo", std::string(offline_algorithm_name(policy.algorithm()))},
                             {"seed", std::to_string(c.seed)},
                             {"config_hash", config_hash(c)}}));
  write_text(c.csv, text.str());
  out << "mean return " << format_double(report.mean) << " (std " << format_double(report.std)
      << ") over " << report.returns.size() << " episodes\n";
  return 0;
}

int run_coverage(const ExperimentConfig& c, std::ostream& out) {
  require(c.dataset, "--dataset");
  require(c.csv, "--csv");
  const Dataset data = dataset_read(c.dataset);
  const EnvSpec spec = dataset_env_spec(data);
  const CoverageReport rep = coverage(data, c.bins, spec.obs_low, spec.obs_high);
  std::ostringstream text;
  text << "# "
       << provenance({{"env", spec.name},
                      {"method", data.metadata().method},
                      {"bins", std::to_string(c.bins)},
                      {"occupied", format_double(rep.occupied)},
                      {"config_hash", config_hash(c)}})
       << "\n";
  text << "dims,bins,count\n";
  for (const Histogram& h : rep.histograms) {
    std::string dims;
    for (std::size_t d = 0; d < h.dims.size(); ++d) dims += (d ? ":" : "") + std::to_string(h.dims[d]);
    for (std::size_t cell = 0; cell < h.counts.size(); ++cell) {
      if (h.counts[cell] == 0) continue;
      std::string bins;
      std::size_t rest = cell;
      std::vector<std::size_t> idx(h.dims.size());
      for (std::size_t d = h.dims.size(); d-- > 0;) {
        idx[d] = rest % c.bins;
        rest /= c.bins;
      }
      for (std::size_t d = 0; d < idx.size(); ++d) bins += (d ? ":" : "") + std::to_string(idx[d]);
      text << dims << ',' << bins << ',' << h.counts[cell] << "\n";
    }
  }
  write_text(c.csv, text.str());
  out << "occupied bins " << format_double(rep.occupied) << (rep.pairwise ? " (pairwise mean)" : "")
      << "\n";
  return 0;
}

int run_report(const ExperimentConfig& c, std::ostream& out) {
  require(c.out, "--out");
  if (c.inputs.empty()) throw ConfigError("report needs at least one input CSV");
  std::vector<std::filesystem::path> inputs(c.inputs.begin(), c.inputs.end());
  for (const auto& p : emit_report(inputs, c.out)) out << "wrote " << p.string() << "\n";
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Batch reinforcement learning workbench: explore, train offline, evaluate."};
  app.require_subcommand(1);
  Flags f;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "JSON config file; flags override it");
    sub->add_option("--seed", f.seed, "Seed (falls back to BRL_SEED)");
  };
  auto* explore = app.add_subcommand("explore", "Collect a dataset with an exploration method");
  common(explore);
  explore->add_option("--env", f.env, "pointmass | pendulum | planar-arm");
  explore->add_option("--method", f.method, "random | gep | rnd | diayn | sse | noise");
  explore->add_option("--steps", f.steps, "Number of transitions");
  explore->add_option("--joints", f.joints, "PlanarArm joint count");
  explore->add_option("--max-episode-steps", f.max_episode_steps, "Episode length override");
  explore->add_option("--out", f.out, "Dataset path");

  auto* train = app.add_subcommand("train", "Train an offline learner on a dataset");
  common(train);
  train->add_option("--dataset", f.dataset, "Dataset path");
  train->add_option("--algo", f.algo, "td3 | bcq");
  train->add_option("--reward", f.reward, "Task reward, name:param,param");
  train->add_option("--steps", f.steps, "Training steps");
  train->add_option("--out", f.out, "Checkpoint path");
  train->add_option("--csv", f.csv, "Loss log path (default <out>.loss.csv)");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint in an environment");
  common(eval);
  eval->add_option("--policy", f.policy, "Checkpoint path");
  eval->add_option("--env", f.env, "Environment (default: the training environment)");
  eval->add_option("--reward", f.reward, "Task reward (default: the training reward)");
  eval->add_option("--episodes", f.episodes, "Episode count");
  eval->add_option("--joints", f.joints, "PlanarArm joint count");
  eval->add_option("--max-episode-steps", f.max_episode_steps, "Episode length override");
  eval->add_option("--csv", f.csv, "Output CSV");

  auto* cov = app.add_subcommand("coverage", "Occupied-bin histogram of a dataset");
  common(cov);
  cov->add_option("--dataset", f.dataset, "Dataset path");
  cov->add_option("--bins", f.bins, "Bins per dimension");
  cov->add_option("--csv", f.csv, "Output CSV");

  auto* report = app.add_subcommand("report", "Render SVG charts from CSV files");
  common(report);
  report->add_option("--out", f.out, "Output directory");
  report->add_option("inputs", f.inputs, "CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const ExperimentConfig c = resolve(f, sub->get_name());
    if (sub == explore) return run_explore(c, out);
    if (sub == train) return run_train(c, out);
    if (sub == eval) return run_eval(c, out);
    if (sub == cov) return run_coverage(c, out);
    return run_report(c, out);
  } catch (const ConfigError& e) {
    err << "brl: error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "brl: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "brl: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace brl
