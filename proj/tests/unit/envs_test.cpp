#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "brl/core/errors.hpp"
#include "brl/core/rng.hpp"
#include "brl/envs/environment.hpp"
#include "brl/envs/rewards.hpp"

namespace brl {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Envs, ResetObservations) {
  EXPECT_EQ(PlanarArm().reset(0).observation, Vector(14, 0.0));
  EXPECT_EQ(PointMass2D().reset(0).observation, (Vector{0, 0, 0, 0}));
  const Vector p = Pendulum().reset(0).observation;
  EXPECT_EQ(p[0], -1.0);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
  EXPECT_EQ(p[2], 0.0);
  EXPECT_EQ(PlanarArm().reset(5).state.step_count, 0u);
}

TEST(Envs, SpecsDeclareShapes) {
  const auto arm = PlanarArm().spec();
  EXPECT_EQ(arm.obs_dim, 14u);
  EXPECT_EQ(arm.act_dim, 7u);
  EXPECT_EQ(arm.action_low, Vector(7, -0.5));
  EXPECT_EQ(arm.action_high, Vector(7, 0.5));
  EXPECT_EQ(Pendulum().spec().obs_dim, 3u);
  EXPECT_EQ(Pendulum().spec().action_high, Vector{2.0});
  EXPECT_EQ(PointMass2D().spec().act_dim, 2u);
}

TEST(Envs, UnknownNameIsConfigError) {
  EXPECT_THROW(make_environment("cartpole"), ConfigError);
  EXPECT_EQ(make_environment("planar-arm")->spec().obs_dim, 14u);
}

TEST(PlanarArm, HalfSpeedStepMovesEveryJoint) {
  PlanarArm arm;
  const auto r = arm.reset(0);
  const auto s = arm.step(r.state, Vector(7, 0.5));
  for (std::size_t j = 0; j < 7; ++j) {
    EXPECT_EQ(s.observation[j], 0.025);
    EXPECT_EQ(s.observation[7 + j], 0.5);
  }
  EXPECT_FALSE(s.done);
  EXPECT_EQ(s.state.step_count, 1u);
}

TEST(PlanarArm, OversizedActionIsClipped) {
  PlanarArm arm;
  const auto r = arm.reset(0);
  const auto a = arm.step(r.state, Vector(7, 7.0));
  const auto b = arm.step(r.state, Vector(7, 0.5));
  EXPECT_EQ(a.observation, b.observation);
}

TEST(PlanarArm, DoneExactlyWhenJointLimitViolated) {
  PlanarArm arm;
  auto state = arm.reset(0).state;
  Vector action(7, 0.0);
  action[2] = 0.5;
  // 2.8 / 0.025 = 112 steps reach the limit exactly; the next one exceeds it.
  std::size_t steps = 0;
  while (true) {
    const auto s = arm.step(state, action);
    ++steps;
    if (s.done) {
      EXPECT_GT(std::abs(s.observation[2]), PlanarArm::kJointLimit);
      EXPECT_FALSE(s.timeout);
      break;
    }
    EXPECT_LE(std::abs(s.observation[2]), PlanarArm::kJointLimit);
    state = s.state;
    ASSERT_LT(steps, 200u);
  }
  EXPECT_GE(steps, 112u);
  EXPECT_LE(steps, 113u);
}

TEST(PlanarArm, StepLimitIsTimeout) {
  EnvOptions options;
  options.max_episode_steps = 3;
  PlanarArm arm(options);
  auto state = arm.reset(0).state;
  for (int i = 0; i < 2; ++i) {
    const auto s = arm.step(state, Vector(7, 0.0));
    EXPECT_FALSE(s.done);
    state = s.state;
  }
  const auto last = arm.step(state, Vector(7, 0.0));
  EXPECT_TRUE(last.done);
  EXPECT_TRUE(last.timeout);
}

TEST(PointMass, AccelerationStep) {
  PointMass2D env;
  const auto s = env.step(env.reset(0).state, Vector{1.0, 0.0});
  EXPECT_DOUBLE_EQ(s.observation[2], 0.05);
  EXPECT_DOUBLE_EQ(s.observation[0], 0.0025);
  EXPECT_EQ(s.observation[1], 0.0);
  EXPECT_EQ(s.observation[3], 0.0);
}

TEST(PointMass, WallsClampPositionAndStopNormalVelocity) {
  PointMass2D env;
  auto state = env.reset(0).state;
  StepResult s;
  for (int i = 0; i < 150; ++i) {
    s = env.step(state, Vector{1.0, -1.0});
    state = s.state;
    EXPECT_LE(std::abs(s.observation[0]), PointMass2D::kWall);
    EXPECT_LE(std::abs(s.observation[2]), PointMass2D::kMaxSpeed);
  }
  EXPECT_EQ(s.observation[0], 2.0);
  EXPECT_EQ(s.observation[1], -2.0);
  // Pinned against the wall, the next push restarts from zero velocity.
  s = env.step(state, Vector{1.0, -1.0});
  EXPECT_EQ(s.observation[0], 2.0);
}

TEST(PointMass, NeverFails) {
  PointMass2D env;
  auto state = env.reset(0).state;
  for (std::size_t i = 0; i + 1 < env.spec().max_episode_steps; ++i) {
    const auto s = env.step(state, Vector{-1.0, 1.0});
    ASSERT_FALSE(s.done);
    state = s.state;
  }
}

TEST(Pendulum, ZeroTorqueEnergyChangeIsSmall) {
  Pendulum env;
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    EnvState state;
    state.x = {rng.uniform(-kPi, kPi), rng.uniform(-3.0, 3.0)};
    for (int i = 0; i < 100; ++i) {
      const auto s = env.step(state, Vector{0.0});
      const double before = Pendulum::energy(state.x[0], state.x[1]);
      const double after = Pendulum::energy(s.state.x[0], s.state.x[1]);
      EXPECT_LE(std::abs(after - before), 0.05);
      state = s.state;
      state.step_count = 0;
    }
  }
}

TEST(Pendulum, SpeedIsClipped) {
  Pendulum env;
  auto state = env.reset(0).state;
  for (int i = 0; i < 199; ++i) {
    const auto s = env.step(state, Vector{2.0});
    EXPECT_LE(std::abs(s.observation[2]), Pendulum::kMaxSpeed);
    state = s.state;
  }
}

TEST(Envs, NonFiniteOrMisShapedActionsAreRejected) {
  PointMass2D env;
  const auto r = env.reset(0);
  EXPECT_THROW(env.step(r.state, Vector{std::nan(""), 0.0}), InputError);
  EXPECT_THROW(env.step(r.state, Vector{0.0}), ShapeError);
}

TEST(Envs, StepEqualsStepOfClippedAction) {
  Rng rng(9);
  for (const char* name : {"pointmass", "pendulum", "planar-arm"}) {
    const auto env = make_environment(name);
    auto state = env->reset(1).state;
    for (int i = 0; i < 50; ++i) {
      Vector a(env->spec().act_dim);
      for (double& v : a) v = rng.uniform(-10.0, 10.0);
      const auto raw = env->step(state, a);
      const auto clipped = env->step(state, env->clip_action(a));
      ASSERT_EQ(raw.observation, clipped.observation) << name;
      if (raw.done) break;
      state = raw.state;
    }
  }
}

TEST(Envs, SameSeedSameTrajectory) {
  for (const char* name : {"pointmass", "pendulum", "planar-arm"}) {
    auto run = [&] {
      const auto env = make_environment(name);
      Rng rng(77);
      auto state = env->reset(5).state;
      std::vector<Vector> obs;
      for (int i = 0; i < 100; ++i) {
        Vector a(env->spec().act_dim);
        for (double& v : a) v = rng.uniform(-1.0, 1.0);
        const auto s = env->step(state, a);
        obs.push_back(s.observation);
        if (s.done) break;
        state = s.state;
      }
      return obs;
    };
    EXPECT_EQ(run(), run()) << name;
  }
}

TEST(Kinematics, StraightAndRotatedChains) {
  const auto home = forward_kinematics(Vector(7, 0.0));
  EXPECT_NEAR(home[0], 1.4, 1e-12);
  EXPECT_EQ(home[1], 0.0);
  Vector up(7, 0.0);
  up[0] = kPi / 2;
  const auto tip = forward_kinematics(up);
  EXPECT_NEAR(tip[0], 0.0, 1e-12);
  EXPECT_NEAR(tip[1], 1.4, 1e-12);
}

TEST(Kinematics, MatchesPerLinkAccumulation) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    Vector angles(7);
    for (double& a : angles) a = rng.uniform(-2.8, 2.8);
    // Walk the chain joint by joint with explicit frame composition.
    double x = 0.0, y = 0.0, c = 1.0, s = 0.0;
    for (double a : angles) {
      const double c2 = c * std::cos(a) - s * std::sin(a);
      const double s2 = s * std::cos(a) + c * std::sin(a);
      c = c2;
      s = s2;
      x += 0.2 * c;
      y += 0.2 * s;
    }
    const auto tip = forward_kinematics(angles);
    EXPECT_NEAR(tip[0], x, 1e-12);
    EXPECT_NEAR(tip[1], y, 1e-12);
  }
}

TEST(Rewards, DeclaredExamples) {
  const auto pm = PointMass2D().spec();
  EXPECT_EQ(make_reward("point-goal:0,0", pm)(Vector{0, 0, 0.3, 0.1}), 0.0);
  EXPECT_DOUBLE_EQ(make_reward("point-goal:0,0", pm)(Vector{3, 4, 0, 0}), -5.0);
  EXPECT_EQ(make_reward("velocity", pm)(Vector{1, 1, 0.7, 0.2}), 0.7);

  Pendulum pendulum;
  EnvState upright;
  upright.x = {0.0, 0.0};
  EXPECT_EQ(make_reward("upright", pendulum.spec())(pendulum.observe(upright)), 1.0);

  const auto arm = PlanarArm().spec();
  const auto home = forward_kinematics(Vector(7, 0.0));
  const std::string target =
      "tooltip-reach:" + std::to_string(home[0]) + "," + std::to_string(home[1]);
  EXPECT_NEAR(make_reward(target, arm)(Vector(14, 0.0)), 0.0, 1e-12);
}

TEST(Rewards, BadSpecsAreConfigErrors) {
  const auto pm = PointMass2D().spec();
  EXPECT_THROW(make_reward("nope", pm), ConfigError);
  EXPECT_THROW(make_reward("upright", pm), ConfigError);
  EXPECT_THROW(make_reward("point-goal:1", pm), ConfigError);
  EXPECT_THROW(make_reward("point-goal:1,x", pm), ConfigError);
}

TEST(Rewards, SpecStringRoundTrips) {
  const auto pm = PointMass2D().spec();
  const auto r = make_reward("point-goal:1.5,-0.25", pm);
  EXPECT_EQ(make_reward(r.spec_string(), pm).params(), r.params());
  EXPECT_THROW(r(Vector{1.0}), ShapeError);
}

}  // namespace
}  // namespace brl
