#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brl/core/tensor.hpp"

namespace brl {

struct EnvSpec {
  std::string name;
  std::size_t obs_dim = 0;
  std::size_t act_dim = 0;
  Vector action_low;
  Vector action_high;
  std::size_t max_episode_steps = 200;
  double dt = 0.05;
  // Nominal observation range, used as default coverage bounds.
  Vector obs_low;
  Vector obs_high;
};

struct EnvState {
  Vector x;
  std::size_t step_count = 0;
};

struct ResetResult {
  EnvState state;
  Vector observation;
};

struct StepResult {
  EnvState state;
  Vector observation;
  // Episode ended, either by failure or by reaching max_episode_steps.
  bool done = false;
  // Episode ended only because of the step limit.
  bool timeout = false;
};

struct EnvOptions {
  // 0 keeps the environment default.
  std::size_t max_episode_steps = 0;
  // PlanarArm joint count.
  std::size_t joints = 7;
};

// Deterministic continuous-control environment. Instances are immutable after
// construction: all episode state travels in EnvState, so reset/step are const
// and an instance may be shared by several threads.
class Environment {
 public:
  virtual ~Environment() = default;

  const EnvSpec& spec() const { return spec_; }

  ResetResult reset(std::uint64_t seed) const;
  // Clips `action` to the bounds, then advances the dynamics by one step.
  // Throws ShapeError on a wrong action size and InputError on non-finite values.
  StepResult step(const EnvState& state, std::span<const double> action) const;

  Vector clip_action(std::span<const double> action) const;
  virtual Vector observe(const EnvState& state) const = 0;

 protected:
  explicit Environment(EnvSpec spec);

  virtual Vector initial_state(std::uint64_t seed) const = 0;
  virtual Vector advance(const Vector& x, const Vector& action) const = 0;
  virtual bool failed(const Vector& /*x*/) const { return false; }

 private:
  EnvSpec spec_;
};

// Point mass in a 4x4 box: state (px, py, vx, vy), acceleration actions in [-1, 1].
class PointMass2D final : public Environment {
 public:
  explicit PointMass2D(const EnvOptions& options = {});
  Vector observe(const EnvState& state) const override;

  static constexpr double kWall = 2.0;
  static constexpr double kMaxSpeed = 1.0;

 protected:
  Vector initial_state(std::uint64_t seed) const override;
  Vector advance(const Vector& x, const Vector& action) const override;
};

// Torque-driven pendulum, theta = 0 upright. Observation (cos, sin, theta_dot).
class Pendulum final : public Environment {
 public:
  explicit Pendulum(const EnvOptions& options = {});
  Vector observe(const EnvState& state) const override;
  // Mechanical energy of (theta, theta_dot) with zero at the upright position.
  static double energy(double theta, double theta_dot);

  static constexpr double kGravity = 9.8;
  static constexpr double kLength = 1.0;
  static constexpr double kMass = 1.0;
  static constexpr double kMaxSpeed = 8.0;

 protected:
  Vector initial_state(std::uint64_t seed) const override;
  Vector advance(const Vector& x, const Vector& action) const override;
};

// Planar revolute chain driven by joint velocity commands. State holds the
// joint angles followed by the last (clipped) velocity command.
class PlanarArm final : public Environment {
 public:
  explicit PlanarArm(const EnvOptions& options = {});
  Vector observe(const EnvState& state) const override;
  std::size_t joints() const { return joints_; }

  static constexpr double kLinkLength = 0.2;
  static constexpr double kJointLimit = 2.8;
  static constexpr double kMaxJointSpeed = 0.5;

 protected:
  Vector initial_state(std::uint64_t seed) const override;
  Vector advance(const Vector& x, const Vector& action) const override;
  bool failed(const Vector& x) const override;

 private:
  std::size_t joints_;
};

// Accepts "pointmass", "pendulum" and "planar-arm". Throws ConfigError otherwise.
std::unique_ptr<Environment> make_environment(std::string_view name,
                                              const EnvOptions& options = {});
std::string canonical_env_name(std::string_view name);

// Tooltip of a planar chain with equal link lengths.
std::array<double, 2> forward_kinematics(std::span<const double> angles,
                                         double link_length = PlanarArm::kLinkLength);

// Total number of Environment::step calls made by this process.
std::uint64_t env_step_calls();

}  // namespace brl
