#pragma once

#include <span>
#include <string>

#include "brl/core/rng.hpp"
#include "brl/core/tensor.hpp"
#include "brl/data/dataset.hpp"

namespace brl {

// Anything that chooses actions episode by episode: exploration methods,
// trained offline policies, evaluation baselines.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual void begin_episode(Rng& /*rng*/) {}
  virtual Vector act(std::span<const double> obs, Rng& rng) = 0;
};

// Task-agnostic data collector. observe() receives every executed transition
// and is where learning explorers run their updates.
class Explorer : public Agent {
 public:
  virtual std::string method() const = 0;
  virtual void observe(const Transition& /*t*/, Rng& /*rng*/) {}
};

}  // namespace brl
