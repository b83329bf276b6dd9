#include "imufresh/virtual_sensors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "imufresh/error.hpp"

namespace imufresh {

std::string_view to_string(VirtualOp op) noexcept {
  switch (op) {
    case VirtualOp::abs_diff: return "abs_diff";
    case VirtualOp::diff: return "diff";
    case VirtualOp::derivative: return "derivative";
  }
  return "?";
}

std::string VirtualSensorSpec::to_line() const {
  std::string line(to_string(op));
  for (const auto& input : inputs) line += " " + input.str();
  line += " " + output.str();
  return line;
}

VirtualSensorSpec VirtualSensorSpec::parse(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> tokens;
  for (std::string token; in >> token;) tokens.push_back(token);
  if (tokens.empty()) throw Error(ErrorCode::ConfigError, "empty virtual sensor line");

  VirtualOp op;
  std::size_t arity = 2;
  if (tokens[0] == "abs_diff") {
    op = VirtualOp::abs_diff;
  } else if (tokens[0] == "diff") {
    op = VirtualOp::diff;
  } else if (tokens[0] == "derivative") {
    op = VirtualOp::derivative;
    arity = 1;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown virtual sensor op '" + tokens[0] + "'");
  }
  if (tokens.size() != arity + 2) {
    throw Error(ErrorCode::ConfigError, "'" + std::string(line) + "': " + tokens[0] + " expects " +
                                            std::to_string(arity) + " input(s) and an output");
  }
  std::vector<ChannelKind> inputs;
  for (std::size_t i = 1; i <= arity; ++i) inputs.emplace_back(tokens[i]);
  return VirtualSensorSpec{op, std::move(inputs), ChannelKind(tokens.back())};
}

Recording apply_virtual_sensors(const Recording& recording, std::span<const VirtualSensorSpec> specs) {
  Channels channels = recording.channels();
  const double rate = recording.sample_rate_hz();

  auto input = [&](const ChannelKind& kind) -> const std::vector<double>& {
    const auto it = channels.find(kind);
    if (it == channels.end()) throw Error(ErrorCode::UnknownKind, "virtual sensor input '" + kind.str() + "' missing");
    return it->second;
  };

  for (const auto& spec : specs) {
    const std::size_t arity = spec.op == VirtualOp::derivative ? 1 : 2;
    if (spec.inputs.size() != arity) {
      throw Error(ErrorCode::BadParameters, std::string(to_string(spec.op)) + " needs " +
                                                std::to_string(arity) + " input(s)");
    }
    if (arity == 2 && spec.inputs[0] == spec.inputs[1]) {
      throw Error(ErrorCode::BadParameters, "pairwise virtual sensor needs two distinct inputs");
    }
    if (channels.contains(spec.output)) {
      throw Error(ErrorCode::DuplicateKind, "channel '" + spec.output.str() + "' already exists");
    }

    std::vector<double> out;
    if (spec.op == VirtualOp::derivative) {
      const auto& x = input(spec.inputs[0]);
      out.assign(x.size(), 0.0);
      for (std::size_t t = 1; t < x.size(); ++t) out[t] = (x[t] - x[t - 1]) * rate;
    } else {
      const auto& a = input(spec.inputs[0]);
      const auto& b = input(spec.inputs[1]);
      out.resize(a.size());
      for (std::size_t t = 0; t < a.size(); ++t) {
        const double d = a[t] - b[t];
        out[t] = spec.op == VirtualOp::abs_diff ? std::abs(d) : d;
      }
    }
    channels.emplace(spec.output, std::move(out));
  }
  return Recording(rate, recording.t0(), std::move(channels));
}

std::vector<VirtualSensorSpec> default_pairing(const Recording& recording, std::string_view left_suffix,
                                               std::string_view right_suffix) {
  std::vector<VirtualSensorSpec> specs;
  std::vector<std::string> bases;
  for (const auto& [kind, values] : recording.channels()) {
    const auto& name = kind.str();
    if (name.size() <= left_suffix.size() || !name.ends_with(left_suffix)) continue;
    const std::string base = name.substr(0, name.size() - left_suffix.size());
    if (!base.starts_with("accel_") && !base.starts_with("gyro_")) continue;
    if (!ChannelKind::is_valid(base + std::string(right_suffix))) continue;
    if (!recording.has_kind(ChannelKind(base + std::string(right_suffix)))) continue;
    bases.push_back(base);
  }
  std::sort(bases.begin(), bases.end());
  for (const auto& base : bases) {
    specs.push_back({VirtualOp::abs_diff,
                     {ChannelKind(base + std::string(left_suffix)), ChannelKind(base + std::string(right_suffix))},
                     ChannelKind(base.ends_with('_') ? base + "diff" : base + "_diff")});
  }
  if (specs.empty()) {
    throw Error(ErrorCode::NoPairsFound, "no accel_/gyro_ channels carry both '" + std::string(left_suffix) +
                                             "' and '" + std::string(right_suffix) + "' suffixes");
  }
  return specs;
}

}  // namespace imufresh
