#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "imufresh/timeseries.hpp"

namespace imufresh {

/// Typed calculator parameter value. Canonical renderings: booleans
/// `True`/`False`, integers in decimal, reals with at least one decimal digit
/// (`1.0`, `0.4`), strings in double quotes.
using ParamValue = std::variant<bool, long long, double, std::string>;

struct Param {
  std::string name;
  ParamValue value;

  friend bool operator==(const Param&, const Param&) = default;
};

using ParamList = std::vector<Param>;

std::string render_param_value(const ParamValue& value);

/// Identifies one feature column: which channel, which calculator and the
/// calculator's parameters in declared order.
struct FeatureName {
  ChannelKind kind;
  std::string calculator;
  ParamList params;

  friend bool operator==(const FeatureName&, const FeatureName&) = default;
};

/// `kind__calculator__p1_v1__p2_v2...`
std::string encode_feature_name(const FeatureName& feature);

/// Inverse of encode_feature_name. With `known_kinds`, the kind is the longest
/// `__`-joined token prefix naming a known kind; otherwise it is the first
/// token. Parameters are checked against the calculator's signature.
/// Throws Error(MalformedFeatureName | UnknownCalculator | BadParameters |
/// UnknownKind | InvalidKindName).
FeatureName decode_feature_name(std::string_view text,
                                const std::optional<std::set<ChannelKind>>& known_kinds = std::nullopt);

/// Orders by canonical string, the column order of every FeatureMatrix.
struct CanonicalLess {
  bool operator()(const FeatureName& a, const FeatureName& b) const {
    return encode_feature_name(a) < encode_feature_name(b);
  }
};

}  // namespace imufresh
