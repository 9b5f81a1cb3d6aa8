#include "brl/harness/evaluate.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "brl/core/errors.hpp"
#include "brl/core/format.hpp"

namespace brl {

std::optional<std::array<double, 2>> tooltip_target(const TaskReward& reward) {
  if (reward.name() != "tooltip-reach" || reward.params().size() != 2) return std::nullopt;
  return std::array<double, 2>{reward.params()[0], reward.params()[1]};
}

EvalReport evaluate(Agent& agent, const Environment& env, const TaskReward& reward,
                    std::size_t episodes, std::uint64_t seed) {
  const EnvSpec& spec = env.spec();
  if (!reward.applies_to(spec.name)) {
    throw ConfigError("reward '" + reward.spec_string() + "' does not apply to " + spec.name);
  }
  if (episodes == 0) throw ConfigError("evaluation needs at least one episode");
  const auto target = spec.name == "planar-arm" ? tooltip_target(reward) : std::nullopt;
  auto distance = [&](const Vector& obs) {
    const auto tip = forward_kinematics(std::span<const double>(obs).first(spec.act_dim));
    return std::hypot(tip[0] - (*target)[0], tip[1] - (*target)[1]);
  };

  EvalReport report;
  Rng rng(seed);
  for (std::size_t e = 0; e < episodes; ++e) {
    auto start = env.reset(rng.next_u64());
    EnvState state = start.state;
    Vector obs = start.observation;
    agent.begin_episode(rng);
    double total = 0.0;
    double closest = target ? distance(obs) : 0.0;
    while (true) {
      const StepResult r = env.step(state, agent.act(obs, rng));
      total += reward(r.observation);
      if (target) closest = std::min(closest, distance(r.observation));
      if (r.done) break;
      state = r.state;
      obs = r.observation;
    }
    report.returns.push_back(total);
    if (target) report.closest_distance.push_back(closest);
  }
  double sum = 0.0;
  for (double v : report.returns) sum += v;
  report.mean = sum / static_cast<double>(episodes);
  double sq = 0.0;
  for (double v : report.returns) sq += (v - report.mean) * (v - report.mean);
  report.std = std::sqrt(sq / static_cast<double>(episodes));
  return report;
}

EvalReport evaluate(OfflinePolicy& policy, const Environment& env, const TaskReward& reward,
                    std::size_t episodes, std::uint64_t seed) {
  const EnvSpec& a = policy.env_spec();
  const EnvSpec& b = env.spec();
  if (a.obs_dim != b.obs_dim || a.act_dim != b.act_dim) {
    throw ConfigError("policy was trained for " + a.name + " (" + std::to_string(a.obs_dim) +
                      "/" + std::to_string(a.act_dim) + "), environment is " + b.name + " (" +
                      std::to_string(b.obs_dim) + "/" + std::to_string(b.act_dim) + ")");
  }
  return evaluate(static_cast<Agent&>(policy), env, reward, episodes, seed);
}

void write_eval_csv(std::ostream& out, const EvalReport& report, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "episode,return,closest_distance\n";
  for (std::size_t i = 0; i < report.returns.size(); ++i) {
    const double d = i < report.closest_distance.size() ? report.closest_distance[i]
                                                        : std::numeric_limits<double>::quiet_NaN();
    out << i << ',' << format_double(report.returns[i]) << ',' << format_double(d) << "\n";
  }
}

}  // namespace brl
