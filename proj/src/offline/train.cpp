#include "brl/offline/train.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "brl/core/errors.hpp"
#include "brl/core/format.hpp"
#include "brl/core/hash.hpp"

namespace brl {

OfflinePolicy make_offline_policy(const EnvSpec& spec, OfflineAlgorithm algo,
                                  const TrainOptions& options, Rng& rng) {
  if (algo == OfflineAlgorithm::kTd3) return OfflinePolicy(spec, options.td3, rng);
  return OfflinePolicy(spec, options.bcq, rng);
}

namespace {

struct Window {
  double critic = 0.0, actor = 0.0, aux = 0.0;
  std::size_t n = 0, n_actor = 0;

  LossRow flush(std::size_t step, bool has_aux) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    LossRow row{step, n ? critic / static_cast<double>(n) : nan,
                n_actor ? actor / static_cast<double>(n_actor) : nan,
                has_aux && n ? aux / static_cast<double>(n) : nan};
    *this = Window{};
    return row;
  }
};

}  // namespace

TrainResult train_offline(const Dataset& dataset, const TaskReward& reward, std::string_view algo_name,
                          std::size_t steps, std::uint64_t seed, const TrainOptions& options) {
  const OfflineAlgorithm algo = offline_algorithm_from_name(algo_name);
  const EnvSpec spec = dataset_env_spec(dataset);
  if (!reward.applies_to(spec.name)) {
    throw ConfigError("reward '" + reward.spec_string() + "' does not apply to " + spec.name);
  }
  if (options.log_every == 0) throw ConfigError("log_every must be positive");
  Rng rng(seed);
  TrainResult result{make_offline_policy(spec, algo, options, rng), {}};
  OfflinePolicy& policy = result.policy;
  policy.info.env = spec.name;
  policy.info.reward = reward.spec_string();
  policy.info.dataset_hash = hex64(fnv1a(encode_dataset(dataset)));
  policy.info.config_hash = options.config_hash;
  policy.info.seed = seed;
  if (steps == 0) return result;
  if (dataset.size() == 0) throw UsageError("cannot train on an empty dataset");

  RelabeledSampler sampler(dataset, reward, rng.next_u64());
  const std::size_t batch =
      algo == OfflineAlgorithm::kTd3 ? options.td3.batch_size : options.bcq.batch_size;
  Window window;
  for (std::size_t step = 1; step <= steps; ++step) {
    const LabeledBatch b = sampler.next(batch);
    try {
      if (algo == OfflineAlgorithm::kTd3) {
        const Td3Losses l = td3_update(policy.td3(), b, options.td3, rng);
        window.critic += l.critic;
        if (l.actor_updated) {
          window.actor += l.actor;
          window.n_actor += 1;
        }
      } else {
        const BcqLosses l = bcq_update(policy.bcq(), b, options.bcq, rng);
        window.critic += l.critic;
        window.actor += l.actor;
        window.aux += l.generator;
        window.n_actor += 1;
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError("step " + std::to_string(step) + ": " + e.what());
    }
    window.n += 1;
    if (step % options.log_every == 0 || step == steps) {
      result.log.push_back(window.flush(step, algo == OfflineAlgorithm::kBcq));
    }
  }
  return result;
}

void write_loss_csv(std::ostream& out, const std::vector<LossRow>& rows,
                    const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "step,critic_loss,actor_loss,aux_loss\n";
  for (const LossRow& r : rows) {
    out << r.step << ',' << format_double(r.critic_loss) << ',' << format_double(r.actor_loss)
        << ',' << format_double(r.aux_loss) << "\n";
  }
}

}  // namespace brl
