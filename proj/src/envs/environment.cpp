#include "brl/envs/environment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "brl/core/errors.hpp"

namespace brl {

namespace {

std::atomic<std::uint64_t> g_step_calls{0};

EnvSpec with_options(EnvSpec spec, const EnvOptions& options) {
  if (options.max_episode_steps > 0) spec.max_episode_steps = options.max_episode_steps;
  return spec;
}

}  // namespace

std::uint64_t env_step_calls() { return g_step_calls.load(); }

Environment::Environment(EnvSpec spec) : spec_(std::move(spec)) {
  if (spec_.action_low.size() != spec_.act_dim || spec_.action_high.size() != spec_.act_dim) {
    throw ConfigError("action bounds do not match act_dim");
  }
  for (std::size_t i = 0; i < spec_.act_dim; ++i) {
    if (!(spec_.action_low[i] < spec_.action_high[i])) {
      throw ConfigError("action_low must be below action_high");
    }
  }
  if (spec_.max_episode_steps == 0) throw ConfigError("max_episode_steps must be positive");
}

ResetResult Environment::reset(std::uint64_t seed) const {
  ResetResult r;
  r.state.x = initial_state(seed);
  r.state.step_count = 0;
  r.observation = observe(r.state);
  return r;
}

Vector Environment::clip_action(std::span<const double> action) const {
  if (action.size() != spec_.act_dim) {
    throw ShapeError(spec_.name + ": action has " + std::to_string(action.size()) +
                     " components, expected " + std::to_string(spec_.act_dim));
  }
  Vector clipped(action.begin(), action.end());
  for (std::size_t i = 0; i < clipped.size(); ++i) {
    if (!std::isfinite(clipped[i])) throw InputError(spec_.name + ": non-finite action");
    clipped[i] = std::clamp(clipped[i], spec_.action_low[i], spec_.action_high[i]);
  }
  return clipped;
}

StepResult Environment::step(const EnvState& state, std::span<const double> action) const {
  g_step_calls.fetch_add(1, std::memory_order_relaxed);
  if (state.step_count >= spec_.max_episode_steps) {
    throw UsageError(spec_.name + ": step called on a finished episode");
  }
  const Vector clipped = clip_action(action);
  StepResult r;
  r.state.x = advance(state.x, clipped);
  r.state.step_count = state.step_count + 1;
  r.observation = observe(r.state);
  if (failed(r.state.x)) {
    r.done = true;
  } else if (r.state.step_count >= spec_.max_episode_steps) {
    r.done = true;
    r.timeout = true;
  }
  return r;
}

// ---- PointMass2D --------------------------------------------------------------

PointMass2D::PointMass2D(const EnvOptions& options)
    : Environment(with_options(EnvSpec{.name = "pointmass",
                                       .obs_dim = 4,
                                       .act_dim = 2,
                                       .action_low = {-1.0, -1.0},
                                       .action_high = {1.0, 1.0},
                                       .max_episode_steps = 200,
                                       .dt = 0.05,
                                       .obs_low = {-kWall, -kWall, -kMaxSpeed, -kMaxSpeed},
                                       .obs_high = {kWall, kWall, kMaxSpeed, kMaxSpeed}},
                               options)) {}

Vector PointMass2D::initial_state(std::uint64_t) const { return {0.0, 0.0, 0.0, 0.0}; }

Vector PointMass2D::observe(const EnvState& state) const { return state.x; }

Vector PointMass2D::advance(const Vector& x, const Vector& a) const {
  const double dt = spec().dt;
  Vector next = x;
  for (std::size_t d = 0; d < 2; ++d) {
    double v = std::clamp(x[2 + d] + a[d] * dt, -kMaxSpeed, kMaxSpeed);
    double p = x[d] + v * dt;
    if (p > kWall || p < -kWall) {
      p = std::clamp(p, -kWall, kWall);
      v = 0.0;
    }
    next[d] = p;
    next[2 + d] = v;
  }
  return next;
}

// ---- Pendulum -----------------------------------------------------------------

Pendulum::Pendulum(const EnvOptions& options)
    : Environment(with_options(EnvSpec{.name = "pendulum",
                                       .obs_dim = 3,
                                       .act_dim = 1,
                                       .action_low = {-2.0},
                                       .action_high = {2.0},
                                       .max_episode_steps = 200,
                                       .dt = 0.05,
                                       .obs_low = {-1.0, -1.0, -kMaxSpeed},
                                       .obs_high = {1.0, 1.0, kMaxSpeed}},
                               options)) {}

Vector Pendulum::initial_state(std::uint64_t) const { return {std::numbers::pi, 0.0}; }

Vector Pendulum::observe(const EnvState& state) const {
  return {std::cos(state.x[0]), std::sin(state.x[0]), state.x[1]};
}

double Pendulum::energy(double theta, double theta_dot) {
  return 0.5 * kMass * kLength * kLength * theta_dot * theta_dot +
         kMass * kGravity * kLength * (std::cos(theta) - 1.0);
}

Vector Pendulum::advance(const Vector& x, const Vector& a) const {
  // Velocity Verlet (kick-drift-kick) with the torque held over the step.
  // theta = 0 is the upright (unstable) equilibrium.
  const double dt = spec().dt;
  const double torque_accel = a[0] / (kMass * kLength * kLength);
  auto accel = [&](double theta) { return (kGravity / kLength) * std::sin(theta) + torque_accel; };
  const double half = x[1] + 0.5 * dt * accel(x[0]);
  const double theta = x[0] + dt * half;
  const double theta_dot = std::clamp(half + 0.5 * dt * accel(theta), -kMaxSpeed, kMaxSpeed);
  return {theta, theta_dot};
}

// ---- PlanarArm ----------------------------------------------------------------

namespace {

EnvSpec arm_spec(std::size_t joints) {
  if (joints == 0) throw ConfigError("planar-arm needs at least one joint");
  EnvSpec s;
  s.name = "planar-arm";
  s.obs_dim = 2 * joints;
  s.act_dim = joints;
  s.action_low.assign(joints, -PlanarArm::kMaxJointSpeed);
  s.action_high.assign(joints, PlanarArm::kMaxJointSpeed);
  s.max_episode_steps = 200;
  s.dt = 0.05;
  s.obs_low.assign(joints, -PlanarArm::kJointLimit);
  s.obs_low.insert(s.obs_low.end(), joints, -PlanarArm::kMaxJointSpeed);
  s.obs_high.assign(joints, PlanarArm::kJointLimit);
  s.obs_high.insert(s.obs_high.end(), joints, PlanarArm::kMaxJointSpeed);
  return s;
}

}  // namespace

PlanarArm::PlanarArm(const EnvOptions& options)
    : Environment(with_options(arm_spec(options.joints), options)), joints_(options.joints) {}

Vector PlanarArm::initial_state(std::uint64_t) const { return Vector(2 * joints_, 0.0); }

Vector PlanarArm::observe(const EnvState& state) const { return state.x; }

Vector PlanarArm::advance(const Vector& x, const Vector& a) const {
  const double dt = spec().dt;
  Vector next(2 * joints_);
  for (std::size_t j = 0; j < joints_; ++j) {
    next[j] = x[j] + a[j] * dt;
    next[joints_ + j] = a[j];
  }
  return next;
}

bool PlanarArm::failed(const Vector& x) const {
  for (std::size_t j = 0; j < joints_; ++j) {
    if (std::abs(x[j]) > kJointLimit) return true;
  }
  return false;
}

std::array<double, 2> forward_kinematics(std::span<const double> angles, double link_length) {
  std::array<double, 2> tip{0.0, 0.0};
  double heading = 0.0;
  for (double theta : angles) {
    heading += theta;
    tip[0] += link_length * std::cos(heading);
    tip[1] += link_length * std::sin(heading);
  }
  return tip;
}

// ---- registry -----------------------------------------------------------------

std::string canonical_env_name(std::string_view name) {
  if (name == "pointmass" || name == "pointmass2d" || name == "PointMass2D") return "pointmass";
  if (name == "pendulum" || name == "Pendulum") return "pendulum";
  if (name == "planar-arm" || name == "planararm" || name == "arm" || name == "PlanarArm") {
    return "planar-arm";
  }
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

std::unique_ptr<Environment> make_environment(std::string_view name, const EnvOptions& options) {
  const std::string canonical = canonical_env_name(name);
  if (canonical == "pointmass") return std::make_unique<PointMass2D>(options);
  if (canonical == "pendulum") return std::make_unique<Pendulum>(options);
  return std::make_unique<PlanarArm>(options);
}

}  // namespace brl
