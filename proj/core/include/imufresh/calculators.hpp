#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imufresh/feature_name.hpp"

namespace imufresh {

enum class ParamType { boolean, integer, real, string };

struct ParamSpec {
  std::string name;
  ParamType type;
};

/// A calculator, its declared parameter order and its default grid.
struct CalculatorInfo {
  std::string name;
  std::vector<ParamSpec> params;
  std::vector<ParamList> grid;
};

/// The curated calculator set, ordered by name.
///
/// All statistics are population statistics over x of length n >= 2.
///
///   minimum, maximum, mean, median, variance, standard_deviation
///   skewness             adjusted Fisher-Pearson G1; NaN if n < 3 or x constant
///   kurtosis             adjusted excess G2; NaN if n < 4 or x constant
///   quantile(q)          linear interpolation at zero-based position (n-1)q
///   abs_energy           sum x_t^2
///   root_mean_square     sqrt(abs_energy / n)
///   mean_abs_change      mean |x_{t+1} - x_t|
///   mean_change          (x_n - x_1) / (n - 1)
///   change_quantiles(f_agg, isabs, qh, ql)
///                        aggregate of x_{t+1} - x_t over pairs with both ends in
///                        [quantile(ql), quantile(qh)]; 0.0 if no pair qualifies
///   linear_trend(attr)   least squares of x on t = 0..n-1; stderr is 0.0 for
///                        n = 2, rvalue is 0.0 for constant x
///   agg_linear_trend(f_agg, chunk_len, attr)
///                        linear_trend over per-chunk aggregates, trailing partial
///                        chunk dropped; NaN if fewer than 2 full chunks
///   autocorrelation(lag) NaN if x constant or lag >= n
///   partial_stationarity_gap
///                        |mean(first half) - mean(second half)| / (std + 1e-12)
///   binned_entropy(bins) natural-log entropy of an equal-width histogram over
///                        [min, max]; 0.0 if x constant
///   c3(lag)              mean x_t x_{t+lag} x_{t+2lag}; NaN if n <= 2 lag
///   time_reversal_asymmetry_statistic(lag)
///                        mean x_{t+2lag}^2 x_{t+lag} - x_{t+lag} x_t^2; NaN if n <= 2 lag
const std::vector<CalculatorInfo>& calculator_registry();

/// nullptr when unknown.
const CalculatorInfo* find_calculator(std::string_view name);

/// Number of features the default grid produces for one kind.
std::size_t default_grid_size();

/// Checks names, order, types and domains. Integer literals are accepted for
/// real parameters and converted. Throws Error(UnknownCalculator | BadParameters).
ParamList normalize_params(std::string_view calculator, ParamList params);

/// Throws Error(UnknownCalculator | BadParameters); BadParameters also when
/// x has fewer than 2 values.
double compute_feature(std::span<const double> x, std::string_view calculator, const ParamList& params);

/// Pre-validated calculator call, cheap to evaluate repeatedly.
class CompiledCalculator {
 public:
  CompiledCalculator(std::string_view calculator, const ParamList& params);

  /// `sorted` must hold the values of `x` in ascending order.
  [[nodiscard]] double evaluate(std::span<const double> x, std::span<const double> sorted) const;

 private:
  enum class Id {
    minimum, maximum, mean, median, variance, standard_deviation, skewness, kurtosis, quantile,
    abs_energy, root_mean_square, mean_abs_change, mean_change, change_quantiles, linear_trend,
    agg_linear_trend, autocorrelation, partial_stationarity_gap, binned_entropy, c3,
    time_reversal_asymmetry_statistic,
  };
  enum class Agg { mean, var, max, min };
  enum class Attr { slope, intercept, stderr_, rvalue };

  Id id_ = Id::mean;
  double q_ = 0.0;
  double ql_ = 0.0;
  double qh_ = 1.0;
  bool isabs_ = false;
  Agg agg_ = Agg::mean;
  Attr attr_ = Attr::slope;
  std::size_t lag_ = 1;
  std::size_t chunk_len_ = 1;
  std::size_t bins_ = 1;
};

}  // namespace imufresh
