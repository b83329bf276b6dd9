#include "imufresh/calculators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "imufresh/error.hpp"

namespace imufresh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<double> kQuantileGrid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
const std::vector<double> kCorridorLow{0.0, 0.2, 0.4, 0.6, 0.8};
const std::vector<double> kCorridorHigh{0.2, 0.4, 0.6, 0.8, 1.0};
const std::vector<std::string> kTrendAttrs{"intercept", "rvalue", "slope", "stderr"};

std::vector<CalculatorInfo> build_registry() {
  using enum ParamType;
  std::vector<CalculatorInfo> reg;
  auto plain = [&](std::string name) { reg.push_back({std::move(name), {}, {ParamList{}}}); };

  for (const char* name : {"minimum", "maximum", "mean", "median", "variance", "standard_deviation", "skewness",
                           "kurtosis", "abs_energy", "root_mean_square", "mean_abs_change", "mean_change",
                           "partial_stationarity_gap"}) {
    plain(name);
  }

  {
    CalculatorInfo info{"quantile", {{"q", real}}, {}};
    for (const double q : kQuantileGrid) info.grid.push_back({{"q", q}});
    reg.push_back(std::move(info));
  }
  {
    CalculatorInfo info{"change_quantiles", {{"f_agg", string}, {"isabs", boolean}, {"qh", real}, {"ql", real}}, {}};
    for (const char* agg : {"mean", "var"}) {
      for (const bool isabs : {false, true}) {
        for (const double qh : kCorridorHigh) {
          for (const double ql : kCorridorLow) {
            if (ql < qh) info.grid.push_back({{"f_agg", std::string(agg)}, {"isabs", isabs}, {"qh", qh}, {"ql", ql}});
          }
        }
      }
    }
    reg.push_back(std::move(info));
  }
  {
    CalculatorInfo info{"linear_trend", {{"attr", string}}, {}};
    for (const auto& attr : kTrendAttrs) info.grid.push_back({{"attr", attr}});
    reg.push_back(std::move(info));
  }
  {
    CalculatorInfo info{"agg_linear_trend", {{"f_agg", string}, {"chunk_len", integer}, {"attr", string}}, {}};
    for (const char* agg : {"max", "mean", "min"}) {
      for (const long long chunk : {5LL, 10LL, 50LL}) {
        for (const auto& attr : kTrendAttrs) {
          info.grid.push_back({{"f_agg", std::string(agg)}, {"chunk_len", chunk}, {"attr", attr}});
        }
      }
    }
    reg.push_back(std::move(info));
  }
  {
    CalculatorInfo info{"autocorrelation", {{"lag", integer}}, {}};
    for (const long long lag : {1LL, 2LL, 3LL, 5LL, 10LL}) info.grid.push_back({{"lag", lag}});
    reg.push_back(std::move(info));
  }
  {
    CalculatorInfo info{"binned_entropy", {{"bins", integer}}, {}};
    for (const long long bins : {5LL, 10LL}) info.grid.push_back({{"bins", bins}});
    reg.push_back(std::move(info));
  }
  for (const char* name : {"c3", "time_reversal_asymmetry_statistic"}) {
    CalculatorInfo info{name, {{"lag", integer}}, {}};
    for (const long long lag : {1LL, 2LL, 3LL}) info.grid.push_back({{"lag", lag}});
    reg.push_back(std::move(info));
  }

  std::sort(reg.begin(), reg.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return reg;
}

[[noreturn]] void bad(std::string_view calculator, const std::string& why) {
  throw Error(ErrorCode::BadParameters, std::string(calculator) + ": " + why);
}

const ParamValue& param(const ParamList& params, std::string_view name) {
  for (const auto& p : params) {
    if (p.name == name) return p.value;
  }
  throw Error(ErrorCode::BadParameters, "missing parameter '" + std::string(name) + "'");
}

// --- numeric kernels --------------------------------------------------------

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

/// Population variance; exactly 0 for constant input.
double variance_of(std::span<const double> x) {
  if (is_constant(x)) return 0.0;
  const double m = mean_of(x);
  double ss = 0.0;
  for (const double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size());
}

double quantile_sorted(std::span<const double> sorted, double q) {
  const double pos = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct Trend {
  double slope;
  double intercept;
  double stderr_;
  double rvalue;
};

Trend fit_line(std::span<const double> y) {
  const std::size_t n = y.size();
  const double t_mean = static_cast<double>(n - 1) / 2.0;
  const double y_mean = mean_of(y);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double dt = static_cast<double>(t) - t_mean;
    const double dy = y[t] - y_mean;
    sxx += dt * dt;
    sxy += dt * dy;
    syy += dy * dy;
  }
  Trend fit{};
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * t_mean;
  if (n > 2) {
    double sse = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double r = y[t] - (fit.intercept + fit.slope * static_cast<double>(t));
      sse += r * r;
    }
    fit.stderr_ = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  } else {
    fit.stderr_ = 0.0;
  }
  fit.rvalue = is_constant(y) ? 0.0 : std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return fit;
}

long long as_int(const ParamValue& v) { return std::get<long long>(v); }
double as_real(const ParamValue& v) { return std::get<double>(v); }
const std::string& as_str(const ParamValue& v) { return std::get<std::string>(v); }

}  // namespace

const std::vector<CalculatorInfo>& calculator_registry() {
  static const std::vector<CalculatorInfo> registry = build_registry();
  return registry;
}

const CalculatorInfo* find_calculator(std::string_view name) {
  const auto& reg = calculator_registry();
  const auto it = std::lower_bound(reg.begin(), reg.end(), name,
                                   [](const CalculatorInfo& info, std::string_view n) { return info.name < n; });
  return it != reg.end() && it->name == name ? &*it : nullptr;
}

std::size_t default_grid_size() {
  std::size_t total = 0;
  for (const auto& info : calculator_registry()) total += info.grid.size();
  return total;
}

ParamList normalize_params(std::string_view calculator, ParamList params) {
  const CalculatorInfo* info = find_calculator(calculator);
  if (info == nullptr) throw Error(ErrorCode::UnknownCalculator, "unknown calculator '" + std::string(calculator) + "'");
  if (params.size() != info->params.size()) {
    bad(calculator, "expects " + std::to_string(info->params.size()) + " parameter(s), got " +
                        std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& spec = info->params[i];
    auto& p = params[i];
    if (p.name != spec.name) bad(calculator, "parameter " + std::to_string(i) + " must be '" + spec.name + "'");
    const bool ok = std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          switch (spec.type) {
            case ParamType::boolean: return std::is_same_v<T, bool>;
            case ParamType::integer: return std::is_same_v<T, long long>;
            case ParamType::real: return std::is_same_v<T, double> || std::is_same_v<T, long long>;
            case ParamType::string: return std::is_same_v<T, std::string>;
          }
          return false;
        },
        p.value);
    if (!ok) bad(calculator, "parameter '" + spec.name + "' has the wrong type");
    if (spec.type == ParamType::real && std::holds_alternative<long long>(p.value)) {
      p.value = static_cast<double>(std::get<long long>(p.value));
    }
  }

  auto in_unit = [&](const char* name) {
    const double v = as_real(param(params, name));
    if (!(v >= 0.0 && v <= 1.0)) bad(calculator, std::string(name) + " must lie in [0, 1]");
    return v;
  };
  auto positive = [&](const char* name) {
    if (as_int(param(params, name)) < 1) bad(calculator, std::string(name) + " must be >= 1");
  };
  auto one_of = [&](const char* name, std::initializer_list<std::string_view> allowed) {
    const auto& v = as_str(param(params, name));
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      bad(calculator, std::string(name) + " value \"" + v + "\" is not supported");
    }
  };

  if (calculator == "quantile") {
    in_unit("q");
  } else if (calculator == "change_quantiles") {
    const double ql = in_unit("ql");
    const double qh = in_unit("qh");
    if (!(ql < qh)) bad(calculator, "ql must be smaller than qh");
    one_of("f_agg", {"mean", "var"});
  } else if (calculator == "linear_trend") {
    one_of("attr", {"slope", "intercept", "stderr", "rvalue"});
  } else if (calculator == "agg_linear_trend") {
    one_of("attr", {"slope", "intercept", "stderr", "rvalue"});
    one_of("f_agg", {"max", "min", "mean"});
    positive("chunk_len");
  } else if (calculator == "autocorrelation" || calculator == "c3" ||
             calculator == "time_reversal_asymmetry_statistic") {
    positive("lag");
  } else if (calculator == "binned_entropy") {
    positive("bins");
  }
  return params;
}

CompiledCalculator::CompiledCalculator(std::string_view calculator, const ParamList& raw) {
  const ParamList params = normalize_params(calculator, raw);
  static const std::vector<std::pair<std::string_view, Id>> ids{
      {"minimum", Id::minimum},
      {"maximum", Id::maximum},
      {"mean", Id::mean},
      {"median", Id::median},
      {"variance", Id::variance},
      {"standard_deviation", Id::standard_deviation},
      {"skewness", Id::skewness},
      {"kurtosis", Id::kurtosis},
      {"quantile", Id::quantile},
      {"abs_energy", Id::abs_energy},
      {"root_mean_square", Id::root_mean_square},
      {"mean_abs_change", Id::mean_abs_change},
      {"mean_change", Id::mean_change},
      {"change_quantiles", Id::change_quantiles},
      {"linear_trend", Id::linear_trend},
      {"agg_linear_trend", Id::agg_linear_trend},
      {"autocorrelation", Id::autocorrelation},
      {"partial_stationarity_gap", Id::partial_stationarity_gap},
      {"binned_entropy", Id::binned_entropy},
      {"c3", Id::c3},
      {"time_reversal_asymmetry_statistic", Id::time_reversal_asymmetry_statistic},
  };
  const auto it = std::find_if(ids.begin(), ids.end(), [&](const auto& e) { return e.first == calculator; });
  id_ = it->second;

  auto attr_of = [](const std::string& s) {
    if (s == "slope") return Attr::slope;
    if (s == "intercept") return Attr::intercept;
    if (s == "stderr") return Attr::stderr_;
    return Attr::rvalue;
  };
  auto agg_of = [](const std::string& s) {
    if (s == "mean") return Agg::mean;
    if (s == "var") return Agg::var;
    if (s == "max") return Agg::max;
    return Agg::min;
  };

  switch (id_) {
    case Id::quantile:
      q_ = as_real(param(params, "q"));
      break;
    case Id::change_quantiles:
      ql_ = as_real(param(params, "ql"));
      qh_ = as_real(param(params, "qh"));
      isabs_ = std::get<bool>(param(params, "isabs"));
      agg_ = agg_of(as_str(param(params, "f_agg")));
      break;
    case Id::linear_trend:
      attr_ = attr_of(as_str(param(params, "attr")));
      break;
    case Id::agg_linear_trend:
      attr_ = attr_of(as_str(param(params, "attr")));
      agg_ = agg_of(as_str(param(params, "f_agg")));
      chunk_len_ = static_cast<std::size_t>(as_int(param(params, "chunk_len")));
      break;
    case Id::autocorrelation:
    case Id::c3:
    case Id::time_reversal_asymmetry_statistic:
      lag_ = static_cast<std::size_t>(as_int(param(params, "lag")));
      break;
    case Id::binned_entropy:
      bins_ = static_cast<std::size_t>(as_int(param(params, "bins")));
      break;
    default:
      break;
  }
}

double CompiledCalculator::evaluate(std::span<const double> x, std::span<const double> sorted) const {
  const std::size_t n = x.size();
  const auto nd = static_cast<double>(n);

  auto pick = [](const Trend& fit, Attr attr) {
    switch (attr) {
      case Attr::slope: return fit.slope;
      case Attr::intercept: return fit.intercept;
      case Attr::stderr_: return fit.stderr_;
      case Attr::rvalue: return fit.rvalue;
    }
    return kNaN;
  };

  switch (id_) {
    case Id::minimum: return sorted.front();
    case Id::maximum: return sorted.back();
    case Id::mean: return mean_of(x);
    case Id::median: return quantile_sorted(sorted, 0.5);
    case Id::variance: return variance_of(x);
    case Id::standard_deviation: return std::sqrt(variance_of(x));
    case Id::skewness:
    case Id::kurtosis: {
      const std::size_t min_n = id_ == Id::skewness ? 3 : 4;
      if (n < min_n || sorted.front() == sorted.back()) return kNaN;
      const double m = mean_of(x);
      double m2 = 0.0, m3 = 0.0, m4 = 0.0;
      for (const double v : x) {
        const double d = v - m;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
      }
      m2 /= nd;
      m3 /= nd;
      m4 /= nd;
      if (id_ == Id::skewness) {
        const double g1 = m3 / std::pow(m2, 1.5);
        return g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
      }
      const double g2 = m4 / (m2 * m2) - 3.0;
      return ((nd + 1.0) * g2 + 6.0) * (nd - 1.0) / ((nd - 2.0) * (nd - 3.0));
    }
    case Id::quantile: return quantile_sorted(sorted, q_);
    case Id::abs_energy: {
      double s = 0.0;
      for (const double v : x) s += v * v;
      return s;
    }
    case Id::root_mean_square: {
      double s = 0.0;
      for (const double v : x) s += v * v;
      return std::sqrt(s / nd);
    }
    case Id::mean_abs_change: {
      double s = 0.0;
      for (std::size_t t = 0; t + 1 < n; ++t) s += std::abs(x[t + 1] - x[t]);
      return s / (nd - 1.0);
    }
    case Id::mean_change: return (x[n - 1] - x[0]) / (nd - 1.0);
    case Id::change_quantiles: {
      const double lo = quantile_sorted(sorted, ql_);
      const double hi = quantile_sorted(sorted, qh_);
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t t = 0; t + 1 < n; ++t) {
        if (x[t] < lo || x[t] > hi || x[t + 1] < lo || x[t + 1] > hi) continue;
        double d = x[t + 1] - x[t];
        if (isabs_) d = std::abs(d);
        sum += d;
        ++count;
      }
      if (count == 0) return 0.0;
      const double c = static_cast<double>(count);
      const double m = sum / c;
      if (agg_ == Agg::mean) return m;
      // Second pass keeps the variance exact for constant differences.
      double ss = 0.0;
      for (std::size_t t = 0; t + 1 < n; ++t) {
        if (x[t] < lo || x[t] > hi || x[t + 1] < lo || x[t + 1] > hi) continue;
        double d = x[t + 1] - x[t];
        if (isabs_) d = std::abs(d);
        ss += (d - m) * (d - m);
      }
      return ss / c;
    }
    case Id::linear_trend: return pick(fit_line(x), attr_);
    case Id::agg_linear_trend: {
      const std::size_t chunks = n / chunk_len_;
      if (chunks < 2) return kNaN;
      std::vector<double> agg(chunks);
      for (std::size_t c = 0; c < chunks; ++c) {
        const auto chunk = x.subspan(c * chunk_len_, chunk_len_);
        switch (agg_) {
          case Agg::max: agg[c] = *std::max_element(chunk.begin(), chunk.end()); break;
          case Agg::min: agg[c] = *std::min_element(chunk.begin(), chunk.end()); break;
          default: agg[c] = mean_of(chunk); break;
        }
      }
      return pick(fit_line(agg), attr_);
    }
    case Id::autocorrelation: {
      if (lag_ >= n || sorted.front() == sorted.back()) return kNaN;
      const double m = mean_of(x);
      const double var = variance_of(x);
      double s = 0.0;
      for (std::size_t t = 0; t + lag_ < n; ++t) s += (x[t] - m) * (x[t + lag_] - m);
      return s / (static_cast<double>(n - lag_) * var);
    }
    case Id::partial_stationarity_gap: {
      const std::size_t half = n / 2;
      const double gap = std::abs(mean_of(x.first(half)) - mean_of(x.subspan(half)));
      return gap / (std::sqrt(variance_of(x)) + 1e-12);
    }
    case Id::binned_entropy: {
      const double lo = sorted.front();
      const double hi = sorted.back();
      if (lo == hi) return 0.0;
      const double width = (hi - lo) / static_cast<double>(bins_);
      std::vector<std::size_t> counts(bins_, 0);
      for (const double v : x) {
        auto bin = static_cast<std::size_t>(std::floor((v - lo) / width));
        counts[std::min(bin, bins_ - 1)]++;
      }
      double h = 0.0;
      for (const std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / nd;
        h -= p * std::log(p);
      }
      return h;
    }
    case Id::c3:
    case Id::time_reversal_asymmetry_statistic: {
      if (n <= 2 * lag_) return kNaN;
      const std::size_t terms = n - 2 * lag_;
      double s = 0.0;
      for (std::size_t t = 0; t < terms; ++t) {
        const double a = x[t];
        const double b = x[t + lag_];
        const double c = x[t + 2 * lag_];
        s += id_ == Id::c3 ? a * b * c : c * c * b - b * a * a;
      }
      return s / static_cast<double>(terms);
    }
  }
  return kNaN;
}

double compute_feature(std::span<const double> x, std::string_view calculator, const ParamList& params) {
  const CompiledCalculator compiled(calculator, params);
  if (x.size() < 2) bad(calculator, "series needs at least 2 values");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  return compiled.evaluate(x, sorted);
}

}  // namespace imufresh
