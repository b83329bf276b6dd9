#include <gtest/gtest.h>

#include "imufresh/error.hpp"
#include "imufresh/virtual_sensors.hpp"

using namespace imufresh;

namespace {

Recording make(std::initializer_list<std::pair<const char*, std::vector<double>>> channels, double rate = 500.0) {
  Channels ch;
  for (const auto& [name, values] : channels) ch.emplace(ChannelKind(name), values);
  return Recording(rate, 0.0, std::move(ch));
}

std::vector<double> values(const Recording& rec, const char* kind) {
  const auto s = rec.channel(ChannelKind(kind));
  return {s.begin(), s.end()};
}

}  // namespace

TEST(VirtualSensors, AbsDiff) {
  const Recording rec = make({{"a", {1, 4}}, {"b", {3, 1}}});
  const VirtualSensorSpec spec{VirtualOp::abs_diff, {ChannelKind("a"), ChannelKind("b")}, ChannelKind("d")};
  const Recording out = apply_virtual_sensors(rec, std::span(&spec, 1));
  EXPECT_EQ(values(out, "d"), (std::vector<double>{2, 3}));
  EXPECT_EQ(out.channels().size(), 3u);
  EXPECT_EQ(rec.channels().size(), 2u);
}

TEST(VirtualSensors, AbsDiffOfIdenticalIsZero) {
  const Recording rec = make({{"a", {1, -4, 7}}, {"b", {1, -4, 7}}});
  const VirtualSensorSpec spec{VirtualOp::abs_diff, {ChannelKind("a"), ChannelKind("b")}, ChannelKind("d")};
  EXPECT_EQ(values(apply_virtual_sensors(rec, std::span(&spec, 1)), "d"), (std::vector<double>{0, 0, 0}));
}

TEST(VirtualSensors, AbsDiffSymmetricAndNonNegative) {
  const Recording rec = make({{"a", {1.5, -2, 3, 0.25}}, {"b", {-1, 4, 3, 9}}});
  const std::vector<VirtualSensorSpec> specs{
      {VirtualOp::abs_diff, {ChannelKind("a"), ChannelKind("b")}, ChannelKind("ab")},
      {VirtualOp::abs_diff, {ChannelKind("b"), ChannelKind("a")}, ChannelKind("ba")},
      {VirtualOp::diff, {ChannelKind("a"), ChannelKind("b")}, ChannelKind("dab")},
  };
  const Recording out = apply_virtual_sensors(rec, specs);
  EXPECT_EQ(values(out, "ab"), values(out, "ba"));
  for (double v : values(out, "ab")) EXPECT_GE(v, 0.0);
  EXPECT_EQ(values(out, "dab"), (std::vector<double>{2.5, -6, 0, -8.75}));
}

TEST(VirtualSensors, DerivativeAndChaining) {
  const Recording rec = make({{"x", {0, 1, 3}}});
  const std::vector<VirtualSensorSpec> specs{
      {VirtualOp::derivative, {ChannelKind("x")}, ChannelKind("dx")},
      {VirtualOp::derivative, {ChannelKind("dx")}, ChannelKind("ddx")},
  };
  const Recording out = apply_virtual_sensors(rec, specs);
  EXPECT_EQ(values(out, "dx"), (std::vector<double>{0, 500, 1000}));
  EXPECT_EQ(values(out, "ddx"), (std::vector<double>{0, 250000, 250000}));
}

TEST(VirtualSensors, Errors) {
  const Recording rec = make({{"a", {1, 2}}, {"b", {3, 4}}});
  const VirtualSensorSpec missing{VirtualOp::abs_diff, {ChannelKind("a"), ChannelKind("zz")}, ChannelKind("d")};
  const VirtualSensorSpec dup{VirtualOp::abs_diff, {ChannelKind("a"), ChannelKind("b")}, ChannelKind("b")};
  try {
    apply_virtual_sensors(rec, std::span(&missing, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownKind);
  }
  try {
    apply_virtual_sensors(rec, std::span(&dup, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateKind);
  }
}

TEST(DefaultPairing, TwoPairs) {
  const Recording rec =
      make({{"accel_x_l", {0, 0}}, {"accel_x_r", {0, 0}}, {"gyro_y_l", {0, 0}}, {"gyro_y_r", {0, 0}}});
  const auto specs = default_pairing(rec, "_l", "_r");
  ASSERT_EQ(specs.size(), 2u);
  EXPECT_EQ(specs[0].output.str(), "accel_x_diff");
  EXPECT_EQ(specs[1].output.str(), "gyro_y_diff");
  EXPECT_EQ(specs[0].to_line(), "abs_diff accel_x_l accel_x_r accel_x_diff");
}

TEST(DefaultPairing, FullTwoSensorSetGivesSixPairs) {
  Channels ch;
  for (const char* sensor : {"accel", "gyro", "compass"}) {
    for (const char* axis : {"x", "y", "z"}) {
      for (const char* side : {"l", "r"}) {
        ch.emplace(ChannelKind(std::string(sensor) + "_" + axis + "_" + side), std::vector<double>{0, 1});
      }
    }
  }
  const Recording rec(500.0, 0.0, ch);
  const auto specs = default_pairing(rec, "_l", "_r");
  std::vector<std::string> names;
  for (const auto& s : specs) names.push_back(s.output.str());
  EXPECT_EQ(names, (std::vector<std::string>{"accel_x_diff", "accel_y_diff", "accel_z_diff", "gyro_x_diff",
                                             "gyro_y_diff", "gyro_z_diff"}));
  EXPECT_EQ(apply_virtual_sensors(rec, specs).channels().size(), 24u);
}

TEST(DefaultPairing, CompassOnlyHasNoPairs) {
  const Recording rec = make({{"compass_x_l", {0, 0}}, {"compass_x_r", {0, 0}}});
  try {
    default_pairing(rec, "_l", "_r");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoPairsFound);
  }
}

TEST(VirtualSensorSpec, ParseLine) {
  const auto spec = VirtualSensorSpec::parse("abs_diff accel_x_l accel_x_r accel_x_diff");
  EXPECT_EQ(spec.op, VirtualOp::abs_diff);
  EXPECT_EQ(spec.inputs.size(), 2u);
  EXPECT_EQ(VirtualSensorSpec::parse(spec.to_line()), spec);
  EXPECT_EQ(VirtualSensorSpec::parse("derivative gyro_z_l gyro_z_l_dt").inputs.size(), 1u);
  EXPECT_THROW(VirtualSensorSpec::parse("abs_diff a b"), Error);
  EXPECT_THROW(VirtualSensorSpec::parse("sum a b c"), Error);
}
