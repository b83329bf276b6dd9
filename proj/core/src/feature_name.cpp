#include "imufresh/feature_name.hpp"

#include <algorithm>

#include "imufresh/calculators.hpp"
#include "imufresh/error.hpp"
#include "imufresh/text.hpp"

namespace imufresh {

namespace {

constexpr std::string_view kSeparator = "__";

std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(kSeparator, start);
    if (pos == std::string_view::npos) {
      tokens.push_back(text.substr(start));
      break;
    }
    tokens.push_back(text.substr(start, pos - start));
    start = pos + kSeparator.size();
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string_view> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += kSeparator;
    out += tokens[i];
  }
  return out;
}

ParamValue parse_value(std::string_view text, std::string_view feature) {
  auto malformed = [&] {
    return Error(ErrorCode::MalformedFeatureName,
                 "cannot parse value '" + std::string(text) + "' in '" + std::string(feature) + "'");
  };
  if (text.empty()) throw malformed();
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw malformed();
    const auto inner = text.substr(1, text.size() - 2);
    if (inner.find('"') != std::string_view::npos) throw malformed();
    return std::string(inner);
  }
  if (text == "True") return true;
  if (text == "False") return false;
  if (const auto integer = parse_int(text)) return *integer;
  if (const auto real = parse_double(text)) return *real;
  throw malformed();
}

}  // namespace

std::string render_param_value(const ParamValue& value) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, bool>) {
          return v ? "True" : "False";
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          std::string text = format_double(v);
          if (text.find_first_of(".eni") == std::string::npos) text += ".0";
          return text;
        } else {
          return "\"" + v + "\"";
        }
      },
      value);
}

std::string encode_feature_name(const FeatureName& feature) {
  std::string out = feature.kind.str();
  out += kSeparator;
  out += feature.calculator;
  for (const auto& param : feature.params) {
    out += kSeparator;
    out += param.name;
    out += '_';
    out += render_param_value(param.value);
  }
  return out;
}

FeatureName decode_feature_name(std::string_view text, const std::optional<std::set<ChannelKind>>& known_kinds) {
  if (text.empty()) throw Error(ErrorCode::MalformedFeatureName, "empty feature name");
  const auto tokens = split_tokens(text);
  if (std::any_of(tokens.begin(), tokens.end(), [](std::string_view t) { return t.empty(); })) {
    throw Error(ErrorCode::MalformedFeatureName, "empty token in '" + std::string(text) + "'");
  }
  if (tokens.size() < 2) {
    throw Error(ErrorCode::MalformedFeatureName, "'" + std::string(text) + "' lacks a calculator");
  }

  std::size_t kind_tokens = 1;
  if (known_kinds) {
    kind_tokens = 0;
    for (std::size_t n = tokens.size() - 1; n >= 1; --n) {
      const std::string candidate = join_tokens(std::span(tokens).first(n));
      if (ChannelKind::is_valid(candidate) && known_kinds->contains(ChannelKind(candidate))) {
        kind_tokens = n;
        break;
      }
    }
    if (kind_tokens == 0) {
      throw Error(ErrorCode::UnknownKind, "'" + std::string(text) + "' does not start with a known kind");
    }
  }

  ChannelKind kind(join_tokens(std::span(tokens).first(kind_tokens)));
  const std::string_view calculator = tokens[kind_tokens];
  const CalculatorInfo* info = find_calculator(calculator);
  if (info == nullptr) {
    throw Error(ErrorCode::UnknownCalculator, "unknown calculator '" + std::string(calculator) + "'");
  }

  const auto param_tokens = std::span(tokens).subspan(kind_tokens + 1);
  if (param_tokens.size() != info->params.size()) {
    throw Error(ErrorCode::BadParameters, "'" + std::string(text) + "': " + info->name + " takes " +
                                              std::to_string(info->params.size()) + " parameter(s)");
  }
  ParamList params;
  for (std::size_t i = 0; i < param_tokens.size(); ++i) {
    const auto& declared = info->params[i].name;
    const auto token = param_tokens[i];
    if (token == declared || token == declared + "_") {
      throw Error(ErrorCode::MalformedFeatureName, "parameter '" + declared + "' has no value in '" +
                                                       std::string(text) + "'");
    }
    if (token.size() <= declared.size() + 1 || !token.starts_with(declared) || token[declared.size()] != '_') {
      throw Error(ErrorCode::BadParameters, "'" + std::string(token) + "' is not parameter '" + declared +
                                                "' of " + info->name);
    }
    params.push_back({declared, parse_value(token.substr(declared.size() + 1), text)});
  }
  return FeatureName{std::move(kind), info->name, normalize_params(info->name, std::move(params))};
}

}  // namespace imufresh
