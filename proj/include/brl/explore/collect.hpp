#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "brl/data/dataset.hpp"
#include "brl/envs/environment.hpp"
#include "brl/explore/agent.hpp"
#include "brl/explore/diayn.hpp"
#include "brl/explore/gep.hpp"
#include "brl/explore/rnd.hpp"
#include "brl/explore/sse.hpp"

namespace brl {

// sum_t gamma^t (1 - D_t) r_t. Throws ConfigError for gamma outside [0, 1).
double discounted_return(std::span<const double> rewards, std::span<const double> dones,
                         double gamma);

// Hyperparameters for every exploration method, defaults throughout.
struct ExplorerSettings {
  double random_init_sigma = 1.0;
  GepConfig gep;
  RndConfig rnd;
  DiaynConfig diayn;
  SseConfig sse;
  SacConfig sac;
  LearnerSchedule schedule;
};

// random | gep | rnd | diayn | sse | noise. Network initialization draws from `rng`.
std::unique_ptr<Explorer> make_explorer(std::string_view method, const EnvSpec& spec,
                                        const ExplorerSettings& settings, Rng& rng);

// Runs the explorer for exactly `total_steps` environment steps, resetting at
// episode ends. Actions are stored after clipping. The result is frozen.
Dataset collect(Explorer& explorer, const Environment& env, std::size_t total_steps,
                std::uint64_t seed, std::string config_hash = "");

}  // namespace brl
