#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "imufresh/calculators.hpp"
#include "imufresh/feature_name.hpp"
#include "imufresh/timeseries.hpp"

namespace imufresh {

struct CalculatorCall {
  std::string calculator;
  ParamList params;

  friend bool operator==(const CalculatorCall&, const CalculatorCall&) = default;
};

/// Which calculators run on which channel. Entries are unique per kind.
class ExtractionSettings {
 public:
  /// Adds one feature; duplicates are ignored. Parameters are normalized.
  void add(const FeatureName& feature);
  void add(const ChannelKind& kind, const CalculatorCall& call);

  [[nodiscard]] const std::map<ChannelKind, std::vector<CalculatorCall>>& entries() const noexcept {
    return entries_;
  }
  [[nodiscard]] std::set<ChannelKind> kinds() const;
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool empty() const noexcept { return size_ == 0; }

  /// Every configured feature, sorted by canonical string.
  [[nodiscard]] std::vector<FeatureName> feature_names() const;

  friend bool operator==(const ExtractionSettings&, const ExtractionSettings&) = default;

 private:
  std::map<ChannelKind, std::vector<CalculatorCall>> entries_;
  std::set<std::string> canonical_;
  std::size_t size_ = 0;
};

/// Full default grid on every kind. Throws Error(BadParameters) for no kinds.
ExtractionSettings default_settings(const std::set<ChannelKind>& kinds);

/// Groups decoded names by kind, dropping duplicates.
ExtractionSettings settings_from_feature_names(std::span<const std::string> names);

/// Settings file: one canonical feature name per line, or a line
/// `DEFAULT kind1 kind2 ...`. Blank lines and `#` comments are skipped.
ExtractionSettings parse_settings(std::string_view text);
ExtractionSettings load_settings_file(const std::string& path);
/// Writes one canonical name per line in column order.
std::string format_settings(const ExtractionSettings& settings);

/// Windows x features. Rows are row-major; columns are sorted by canonical
/// name. `labels` is empty or has one entry per row, where "" marks an
/// unlabeled row. Cells are NaN only where a calculator is undefined.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<FeatureName> columns, std::vector<std::int64_t> window_ids,
                std::vector<std::string> labels, std::vector<double> cells);

  [[nodiscard]] std::size_t rows() const noexcept { return window_ids_.size(); }
  [[nodiscard]] std::size_t cols() const noexcept { return columns_.size(); }
  [[nodiscard]] const std::vector<FeatureName>& column_names() const noexcept { return columns_; }
  [[nodiscard]] const std::vector<std::string>& column_strings() const noexcept { return column_strings_; }
  [[nodiscard]] const std::vector<std::int64_t>& window_ids() const noexcept { return window_ids_; }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] bool has_labels() const noexcept { return !labels_.empty(); }

  [[nodiscard]] double at(std::size_t row, std::size_t col) const { return cells_[row * cols() + col]; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return std::span(cells_).subspan(r * cols(), cols());
  }
  [[nodiscard]] std::vector<double> column(std::size_t c) const;
  [[nodiscard]] const std::vector<double>& cells() const noexcept { return cells_; }

  /// Index of a canonical name, or npos.
  [[nodiscard]] std::size_t find_column(const std::string& canonical) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  /// Keeps the named columns (any order in, canonical order out).
  /// Throws Error(UnknownKind) naming the first missing column.
  [[nodiscard]] FeatureMatrix select_columns(std::span<const std::string> canonical) const;
  /// Drops every column holding a NaN; names of dropped columns go to `dropped`.
  [[nodiscard]] FeatureMatrix drop_nan_columns(std::vector<std::string>* dropped = nullptr) const;
  /// Stacks rows of matrices with identical columns.
  static FeatureMatrix concat_rows(std::span<const FeatureMatrix> parts);

  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b);

 private:
  std::vector<FeatureName> columns_;
  std::vector<std::string> column_strings_;
  std::vector<std::int64_t> window_ids_;
  std::vector<std::string> labels_;
  std::vector<double> cells_;
};

/// One row per window, one column per configured feature. Work is spread
/// over `workers` threads (0 = all cores); results are identical for any
/// worker count. Throws Error(UnknownKind).
FeatureMatrix extract(std::span<const Window> windows, const Recording& recording,
                      const ExtractionSettings& settings, std::size_t workers = 1);
FeatureMatrix extract(const WindowSet& windows, const Recording& recording, const ExtractionSettings& settings,
                      std::size_t workers = 1);

/// `window_id[,label],<canonical names...>`; cells use shortest round-trip
/// decimals so a reload is bitwise identical.
void write_feature_matrix_csv(const FeatureMatrix& matrix, std::ostream& out);
FeatureMatrix read_feature_matrix_csv(std::istream& in);

}  // namespace imufresh
