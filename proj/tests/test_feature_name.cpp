#include <gtest/gtest.h>

#include <random>

#include "ankle_subset.hpp"
#include "imufresh/calculators.hpp"
#include "imufresh/error.hpp"
#include "imufresh/extraction.hpp"
#include "imufresh/feature_name.hpp"

using namespace imufresh;

namespace {

ErrorCode decode_error(std::string_view text, const std::optional<std::set<ChannelKind>>& kinds = std::nullopt) {
  try {
    decode_feature_name(text, kinds);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decoded without error: " << text;
  return ErrorCode::IoError;
}

}  // namespace

TEST(EncodeFeatureName, CanonicalExamples) {
  EXPECT_EQ(encode_feature_name({ChannelKind("accel_y_r"),
                                 "change_quantiles",
                                 {{"f_agg", std::string("var")}, {"isabs", false}, {"qh", 1.0}, {"ql", 0.4}}}),
            "accel_y_r__change_quantiles__f_agg_\"var\"__isabs_False__qh_1.0__ql_0.4");
  EXPECT_EQ(encode_feature_name({ChannelKind("accel_z_r"), "minimum", {}}), "accel_z_r__minimum");
  EXPECT_EQ(encode_feature_name({ChannelKind("gyro_y_diff"),
                                 "agg_linear_trend",
                                 {{"f_agg", std::string("max")}, {"chunk_len", 50LL}, {"attr", std::string("stderr")}}}),
            "gyro_y_diff__agg_linear_trend__f_agg_\"max\"__chunk_len_50__attr_\"stderr\"");
}

TEST(RenderParamValue, Forms) {
  EXPECT_EQ(render_param_value(true), "True");
  EXPECT_EQ(render_param_value(false), "False");
  EXPECT_EQ(render_param_value(7LL), "7");
  EXPECT_EQ(render_param_value(-3LL), "-3");
  EXPECT_EQ(render_param_value(1.0), "1.0");
  EXPECT_EQ(render_param_value(0.4), "0.4");
  EXPECT_EQ(render_param_value(std::string("max")), "\"max\"");
}

TEST(DecodeFeatureName, Minimum) {
  const FeatureName f = decode_feature_name("accel_z_r__minimum");
  EXPECT_EQ(f.kind.str(), "accel_z_r");
  EXPECT_EQ(f.calculator, "minimum");
  EXPECT_TRUE(f.params.empty());
}

TEST(DecodeFeatureName, AnkleSubsetRoundTrips) {
  ASSERT_EQ(kAnkleSubset.size(), 20u);
  for (const auto& name : kAnkleSubset) {
    EXPECT_EQ(encode_feature_name(decode_feature_name(name)), name);
  }
}

TEST(DecodeFeatureName, KnownKindsLongestMatch) {
  const std::set<ChannelKind> kinds{ChannelKind("gyro_y"), ChannelKind("gyro_y_diff")};
  const FeatureName f = decode_feature_name("gyro_y_diff__minimum", kinds);
  EXPECT_EQ(f.kind.str(), "gyro_y_diff");
  EXPECT_EQ(decode_error("accel_x__minimum", kinds), ErrorCode::UnknownKind);
}

TEST(DecodeFeatureName, Errors) {
  EXPECT_EQ(decode_error("accel_z_r__nosuchcalc"), ErrorCode::UnknownCalculator);
  EXPECT_EQ(decode_error(""), ErrorCode::MalformedFeatureName);
  EXPECT_EQ(decode_error("accel_z_r"), ErrorCode::MalformedFeatureName);
  EXPECT_EQ(decode_error("a__quantile__q"), ErrorCode::MalformedFeatureName);
  EXPECT_EQ(decode_error("a__quantile__q_\"x"), ErrorCode::MalformedFeatureName);
  EXPECT_EQ(decode_error("a__quantile"), ErrorCode::BadParameters);
  EXPECT_EQ(decode_error("a__quantile__q_0.5__q_0.5"), ErrorCode::BadParameters);
  EXPECT_EQ(decode_error("a__minimum__q_0.5"), ErrorCode::BadParameters);
  EXPECT_EQ(decode_error("a__change_quantiles__f_agg_\"var\"__isabs_False__qh_0.2__ql_0.4"),
            ErrorCode::BadParameters);
  EXPECT_EQ(decode_error("a__change_quantiles__isabs_False__f_agg_\"var\"__qh_1.0__ql_0.4"),
            ErrorCode::BadParameters);
}

TEST(SettingsFromFeatureNames, AnkleSubsetSpansTenKinds) {
  const ExtractionSettings s = settings_from_feature_names(kAnkleSubset);
  EXPECT_EQ(s.size(), 20u);
  const auto kinds = s.kinds();
  EXPECT_EQ(kinds.size(), 10u);
  std::size_t right = 0, left = 0, diff = 0;
  for (const auto& k : kinds) {
    const std::string& n = k.str();
    if (n.ends_with("_r")) ++right;
    if (n.ends_with("_l")) ++left;
    if (n.ends_with("_diff")) ++diff;
  }
  EXPECT_EQ(right, 4u);
  EXPECT_EQ(left, 3u);
  EXPECT_EQ(diff, 3u);
}

TEST(SettingsFromFeatureNames, DedupAndEmpty) {
  const std::vector<std::string> twice{"accel_z_r__minimum", "accel_z_r__minimum"};
  EXPECT_EQ(settings_from_feature_names(twice).size(), 1u);
  EXPECT_TRUE(settings_from_feature_names(std::vector<std::string>{}).empty());
}

// Random valid names drawn from every calculator's declared signature.
TEST(FeatureNameCodec, RandomRoundTrip) {
  std::mt19937_64 gen(1234);
  const std::vector<std::string> kinds{"a", "accel_x_l", "gyro_z_diff", "x1_y2_z3", "compass_y_r"};
  const auto& reg = calculator_registry();
  for (int iter = 0; iter < 5000; ++iter) {
    const auto& info = reg[gen() % reg.size()];
    const auto& params = info.grid.empty() ? ParamList{} : info.grid[gen() % info.grid.size()];
    ParamList p = params;
    for (auto& param : p) {
      if (param.name == "q") param.value = std::uniform_real_distribution<double>(0.0, 1.0)(gen);
    }
    const FeatureName f{ChannelKind(kinds[gen() % kinds.size()]), info.name, p};
    const std::string s = encode_feature_name(f);
    EXPECT_EQ(decode_feature_name(s), f) << s;
    EXPECT_EQ(decode_feature_name(s, std::set<ChannelKind>{f.kind}), f) << s;
  }
}
