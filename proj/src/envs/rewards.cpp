#include "brl/envs/rewards.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "brl/core/errors.hpp"

namespace brl {

TaskReward::TaskReward(std::string name, std::string env, Vector params, std::size_t obs_dim, Fn fn)
    : name_(std::move(name)), env_(std::move(env)), params_(std::move(params)),
      obs_dim_(obs_dim), fn_(std::move(fn)) {}

double TaskReward::operator()(std::span<const double> observation) const {
  if (observation.size() != obs_dim_) {
    throw ShapeError("reward '" + name_ + "' expects " + std::to_string(obs_dim_) +
                     "-dim observations, got " + std::to_string(observation.size()));
  }
  return fn_(observation);
}

bool TaskReward::applies_to(std::string_view env) const {
  return env_.empty() || env_ == canonical_env_name(env);
}

std::string TaskReward::spec_string() const {
  std::ostringstream os;
  os << name_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    os << (i == 0 ? ':' : ',');
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), params_[i]);
    os.write(buf, res.ptr - buf);
  }
  return os.str();
}

namespace {

Vector parse_params(std::string_view text, std::string_view spec) {
  Vector params;
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string item(text.substr(0, comma));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad reward parameter '" + item + "' in '" + std::string(spec) + "'");
    }
    params.push_back(value);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return params;
}

void require_env(std::string_view reward, const EnvSpec& env, std::string_view expected) {
  if (env.name != expected) {
    throw ConfigError("reward '" + std::string(reward) + "' is defined for " +
                      std::string(expected) + ", not " + env.name);
  }
}

void require_params(std::string_view reward, const Vector& params, std::size_t n) {
  if (params.size() != n) {
    throw ConfigError("reward '" + std::string(reward) + "' takes " + std::to_string(n) +
                      " parameters, got " + std::to_string(params.size()));
  }
}

}  // namespace

TaskReward make_reward(std::string_view spec, const EnvSpec& env) {
  const auto colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  Vector params;
  if (colon != std::string_view::npos) params = parse_params(spec.substr(colon + 1), spec);

  if (name == "zero") {
    require_params(name, params, 0);
    return TaskReward(name, "", params, env.obs_dim, [](std::span<const double>) { return 0.0; });
  }
  if (name == "point-goal") {
    require_env(name, env, "pointmass");
    if (params.empty()) params = {0.0, 0.0};
    require_params(name, params, 2);
    const double gx = params[0], gy = params[1];
    return TaskReward(name, env.name, params, env.obs_dim, [gx, gy](std::span<const double> o) {
      return -std::hypot(o[0] - gx, o[1] - gy);
    });
  }
  if (name == "velocity") {
    require_env(name, env, "pointmass");
    require_params(name, params, 0);
    return TaskReward(name, env.name, params, env.obs_dim,
                      [](std::span<const double> o) { return o[2]; });
  }
  if (name == "upright") {
    require_env(name, env, "pendulum");
    require_params(name, params, 0);
    // Observation carries (cos theta, sin theta, theta_dot).
    return TaskReward(name, env.name, params, env.obs_dim,
                      [](std::span<const double> o) { return o[0]; });
  }
  if (name == "tooltip-reach") {
    require_env(name, env, "planar-arm");
    require_params(name, params, 2);
    const std::size_t joints = env.act_dim;
    const double tx = params[0], ty = params[1];
    return TaskReward(name, env.name, params, env.obs_dim,
                      [joints, tx, ty](std::span<const double> o) {
                        const auto tip = forward_kinematics(o.first(joints));
                        return -std::hypot(tip[0] - tx, tip[1] - ty);
                      });
  }
  throw ConfigError("unknown reward '" + name + "'");
}

}  // namespace brl
