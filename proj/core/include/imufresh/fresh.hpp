#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imufresh/extraction.hpp"
#include "imufresh/feature_name.hpp"

namespace imufresh {

enum class TestKind { fisher_exact, ks_two_sample, kendall_tau };
enum class FdrMethod { benjamini_yekutieli, benjamini_hochberg };

std::string_view to_string(TestKind kind) noexcept;
std::string_view to_string(FdrMethod method) noexcept;

struct FeatureTargetTest {
  FeatureName feature_name;
  TestKind test_kind = TestKind::fisher_exact;
  double p_value = 1.0;
  std::size_t n_effective = 0;
};

struct SelectionReport {
  double q = 0.05;
  FdrMethod method = FdrMethod::benjamini_yekutieli;
  /// Sorted by p-value ascending, ties by canonical name.
  std::vector<FeatureTargetTest> tests;
  /// Same order as `tests`.
  std::vector<FeatureName> selected;
  /// Largest rank passing the step-up criterion (max over classes for
  /// one-vs-rest targets); 0 when nothing is selected.
  std::size_t threshold_rank = 0;

  [[nodiscard]] std::vector<std::string> selected_strings() const;
};

/// True iff the non-NaN values take at most two distinct values.
/// Throws Error(DegenerateFeature) when every value is NaN.
bool is_binary(std::span<const double> values);

using ContingencyTable = std::array<std::array<long long, 2>, 2>;

/// Two-sided exact test: total hypergeometric mass of the tables sharing the
/// observed margins that are no more probable than the observed one.
/// Throws Error(DegenerateTable) on a zero margin or negative count.
double fisher_exact_test(const ContingencyTable& table);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic two-sample Kolmogorov-Smirnov test with the effective-size
/// correction lambda = (sqrt(ne) + 0.12 + 0.11 / sqrt(ne)) * D.
/// Throws Error(DegenerateSplit) when either sample is empty.
KsResult ks_two_sample_test(std::span<const double> a, std::span<const double> b);

/// Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2), clamped to [0, 1].
double kolmogorov_survival(double lambda);

struct KendallResult {
  double tau = 0.0;  ///< tau-b
  long long s = 0;   ///< concordant minus discordant pairs
  double z = 0.0;
  double p_value = 1.0;
};

/// Tau-b with the tie-corrected normal approximation, O(n log n).
/// Throws Error(ShapeMismatch) for unequal lengths, Error(BadParameters) for
/// n < 3 and Error(DegenerateFeature) when x or y is constant.
KendallResult kendall_tau_test(std::span<const double> x, std::span<const double> y);

/// Step-up procedures over m p-values. Return selected indices ascending.
std::vector<std::size_t> benjamini_yekutieli(std::span<const double> p_values, double q);
std::vector<std::size_t> benjamini_hochberg(std::span<const double> p_values, double q);

/// Prediction target: class labels or real values. A real target with at
/// most two distinct values is treated as binary.
class Target {
 public:
  static Target categorical(std::vector<std::string> labels);
  static Target real(std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool is_real() const noexcept { return is_real_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  /// One indicator per class (a single one for binary targets).
  [[nodiscard]] const std::vector<std::vector<double>>& indicators() const noexcept { return indicators_; }

 private:
  std::size_t size_ = 0;
  bool is_real_ = false;
  std::vector<double> values_;
  std::vector<std::vector<double>> indicators_;
};

/// FRESH selection: one hypothesis test per column, dispatched on
/// feature/target type, then FDR control at level q. Multiclass targets are
/// tested one-vs-rest; a feature is kept if it passes for any class.
/// Throws Error(DegenerateTarget | ShapeMismatch | BadParameters).
SelectionReport select_features(const FeatureMatrix& matrix, const Target& target, double q,
                                FdrMethod method = FdrMethod::benjamini_yekutieli, std::size_t workers = 1);

/// `feature,p_value,test_kind,selected`, sorted by p ascending.
void write_selection_report_csv(const SelectionReport& report, std::ostream& out);

}  // namespace imufresh
