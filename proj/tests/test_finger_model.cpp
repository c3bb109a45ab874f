#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "exotendon/errors.hpp"
#include "exotendon/finger_model.hpp"

using namespace exo;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exo::Error";
  return ErrorCode::PropertyViolation;
}

}  // namespace

TEST(Chain, DefaultAccepted) {
  const PhalanxChain c;
  EXPECT_NO_THROW(validate_chain(c));
  EXPECT_DOUBLE_EQ(c.proximal_len, 45.0);
  EXPECT_DOUBLE_EQ(c.middle_len, 25.0);
  EXPECT_DOUBLE_EQ(c.distal_len, 20.0);
  // The 17 mm tendon height sits strictly above the skin.
  EXPECT_LT(c.dorsal_offset, 17.0);
}

TEST(Chain, ZeroMiddleRejected) {
  PhalanxChain c;
  c.middle_len = 0.0;
  EXPECT_EQ(code_of([&] { validate_chain(c); }), ErrorCode::InvalidGeometry);
}

TEST(Chain, RadiusExceedingLinkRejected) {
  PhalanxChain c;
  c.joint_radius[index(Joint::Pip)] = 30.0;
  try {
    validate_chain(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidGeometry);
    EXPECT_EQ(e.field(), "joint_radius.pip");
  }
}

TEST(Chain, NegativeOffsetRejected) {
  PhalanxChain c;
  c.dorsal_offset = -1.0;
  EXPECT_EQ(code_of([&] { validate_chain(c); }), ErrorCode::InvalidGeometry);
}

TEST(Kinematics, ExtendedIsCollinear) {
  const PhalanxChain c;
  const LinkFrames f = forward_kinematics(c, JointConfig{});
  EXPECT_NEAR(f.joint_center(Joint::Mcp).norm(), 0.0, 1e-12);
  EXPECT_NEAR(f.joint_center(Joint::Pip).x(), 45.0, 1e-12);
  EXPECT_NEAR(f.joint_center(Joint::Dip).x(), 70.0, 1e-12);
  EXPECT_NEAR(f.to_world(Link::Distal, Vec2d(20.0, 0.0)).x(), 90.0, 1e-12);
  for (const auto& l : f.links) {
    EXPECT_NEAR(l.origin.y(), 0.0, 1e-12);
    EXPECT_NEAR(l.angle, 0.0, 1e-12);
  }
}

TEST(Kinematics, McpRightAnglePointsProximalDown) {
  const PhalanxChain c;
  const LinkFrames f = forward_kinematics(c, JointConfig{-90.0, 0.0, 0.0});
  EXPECT_NEAR(f.joint_center(Joint::Pip).x(), 0.0, 1e-12);
  EXPECT_NEAR(f.joint_center(Joint::Pip).y(), -45.0, 1e-12);
}

TEST(Kinematics, FortyFiveDegreeOracle) {
  const PhalanxChain c;
  const LinkFrames f = forward_kinematics(c, JointConfig{-45.0, -45.0, 0.0});
  const double s = std::sqrt(0.5);
  EXPECT_NEAR(f.joint_center(Joint::Pip).x(), 45.0 * s, 1e-12);
  EXPECT_NEAR(f.joint_center(Joint::Pip).y(), -45.0 * s, 1e-12);
  // Middle link orientation is the sum of MCP and PIP.
  EXPECT_NEAR(f[Link::Middle].angle, -std::numbers::pi / 2.0, 1e-12);
}

TEST(Kinematics, OutOfRange) {
  const PhalanxChain c;
  EXPECT_EQ(code_of([&] { forward_kinematics(c, JointConfig{-91.0, 0.0, 0.0}); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { forward_kinematics(c, JointConfig{0.0, 1.0, 0.0}); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { validate_config(JointConfig{0.0, 0.0, 5.0}); }), ErrorCode::OutOfRange);
  EXPECT_NO_THROW(validate_config(JointConfig{0.0, 0.0, 5.0}, true));
}

TEST(Kinematics, Continuity) {
  const PhalanxChain c;
  const JointVector a = JointConfig{-37.0, -52.0, -10.0}.radians();
  const JointVector b = a + JointVector::Constant(1e-6);
  const LinkFrames fa = detail::forward_kinematics_rad(c, a);
  const LinkFrames fb = detail::forward_kinematics_rad(c, b);
  for (std::size_t i = 0; i < fa.links.size(); ++i) {
    EXPECT_LE((fa.links[i].origin - fb.links[i].origin).norm(), (c.total_length() + c.palm_len) * 2e-6);
  }
}

TEST(Coupling, Examples) {
  const JointConfig a = apply_coupling(-90.0, CouplingRule::locked());
  EXPECT_DOUBLE_EQ(a.mcp_deg, -90.0);
  EXPECT_DOUBLE_EQ(a.pip_deg, -90.0);
  EXPECT_DOUBLE_EQ(a.dip_deg, 0.0);
  const JointConfig b = apply_coupling(0.0, CouplingRule::locked());
  EXPECT_DOUBLE_EQ(b.mcp_deg, 0.0);
  EXPECT_DOUBLE_EQ(b.dip_deg, 0.0);
  const JointConfig c = apply_coupling(-30.0, CouplingRule::linear(0.67));
  EXPECT_DOUBLE_EQ(c.mcp_deg, -30.0);
  EXPECT_DOUBLE_EQ(c.pip_deg, -30.0);
  EXPECT_NEAR(c.dip_deg, -20.1, 1e-12);
  EXPECT_EQ(code_of([] { apply_coupling(5.0, {}); }), ErrorCode::OutOfRange);
}

TEST(Springs, ZeroAtRest) {
  const JointVector t = spring_torques(TorsionSpringSet::artificial_finger(), JointConfig::uniform(-90.0));
  EXPECT_EQ(t, JointVector::Zero());
}

TEST(Springs, PaperRatioAtExtension) {
  const JointVector t = spring_torques(TorsionSpringSet::artificial_finger(), JointConfig{});
  EXPECT_NEAR(t[index(Joint::Pip)] / t[index(Joint::Mcp)], 76.9 / 54.9, 1e-12);
  EXPECT_NEAR(76.9 / 54.9, 1.4007, 1e-4);
}

TEST(Springs, Linearity) {
  for (const auto& s : {TorsionSpringSet::artificial_finger(), TorsionSpringSet::cruz_kamper()}) {
    const JointVector half = spring_torques(s, JointConfig::uniform(-45.0));
    const JointVector full = spring_torques(s, JointConfig{0.0, 0.0, 0.0});
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(half[j], 0.5 * full[j], 1e-12 * std::abs(full[j]));
    const JointVector scaled = spring_torques(s.scaled_by(3.0), JointConfig::uniform(-45.0));
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(scaled[j], 3.0 * half[j], 1e-12 * std::abs(scaled[j]));
  }
}

TEST(Springs, RatioPreservation) {
  for (const auto& s : {TorsionSpringSet::artificial_finger(), TorsionSpringSet::cruz_kamper()}) {
    for (double th : {-80.0, -45.0, -10.0, 0.0}) {
      const JointVector t = spring_torques(s, JointConfig::uniform(th));
      EXPECT_NEAR(t[1] / t[0], s.k_pip / s.k_mcp, 1e-14);
      EXPECT_NEAR(t[2] / t[1], s.k_dip / s.k_pip, 1e-14);
    }
  }
  EXPECT_DOUBLE_EQ(TorsionSpringSet::cruz_kamper().k_pip, 0.66);
}

TEST(Springs, Validation) {
  TorsionSpringSet s;
  s.k_pip = -1.0;
  EXPECT_EQ(code_of([&] { validate_springs(s); }), ErrorCode::ValidationError);
}

TEST(Springs, EnergyMatchesTorqueIntegral) {
  const TorsionSpringSet s;
  const JointConfig c{-30.0, -60.0, 0.0};
  const double e = spring_energy(s, c);
  double expect = 0.0;
  for (Joint j : kAllJoints) {
    const double d = deg_to_rad(c.deg(j) + 90.0);
    expect += 0.5 * s.stiffness(j) * d * d;
  }
  EXPECT_NEAR(e, expect, 1e-12 * expect);
}
