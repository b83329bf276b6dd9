#include "imufresh/extraction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "imufresh/error.hpp"
#include "imufresh/parallel.hpp"
#include "imufresh/text.hpp"

namespace imufresh {

// ---------------------------------------------------------------------------
// ExtractionSettings

void ExtractionSettings::add(const ChannelKind& kind, const CalculatorCall& call) {
  CalculatorCall normalized{call.calculator, normalize_params(call.calculator, call.params)};
  const std::string canonical = encode_feature_name({kind, normalized.calculator, normalized.params});
  if (!canonical_.insert(canonical).second) return;
  entries_[kind].push_back(std::move(normalized));
  ++size_;
}

void ExtractionSettings::add(const FeatureName& feature) {
  add(feature.kind, CalculatorCall{feature.calculator, feature.params});
}

std::set<ChannelKind> ExtractionSettings::kinds() const {
  std::set<ChannelKind> out;
  for (const auto& [kind, calls] : entries_) out.insert(kind);
  return out;
}

std::vector<FeatureName> ExtractionSettings::feature_names() const {
  std::vector<std::pair<std::string, FeatureName>> keyed;
  keyed.reserve(size_);
  for (const auto& [kind, calls] : entries_) {
    for (const auto& call : calls) {
      FeatureName name{kind, call.calculator, call.params};
      keyed.emplace_back(encode_feature_name(name), std::move(name));
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<FeatureName> out;
  out.reserve(keyed.size());
  for (auto& [key, name] : keyed) out.push_back(std::move(name));
  return out;
}

ExtractionSettings default_settings(const std::set<ChannelKind>& kinds) {
  if (kinds.empty()) throw Error(ErrorCode::BadParameters, "default settings need at least one kind");
  ExtractionSettings settings;
  for (const auto& kind : kinds) {
    for (const auto& info : calculator_registry()) {
      for (const auto& params : info.grid) settings.add(kind, CalculatorCall{info.name, params});
    }
  }
  return settings;
}

ExtractionSettings settings_from_feature_names(std::span<const std::string> names) {
  ExtractionSettings settings;
  for (const auto& name : names) settings.add(decode_feature_name(name));
  return settings;
}

ExtractionSettings parse_settings(std::string_view text) {
  ExtractionSettings settings;
  std::set<ChannelKind> default_kinds;
  for (auto line : split_lines(text)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.starts_with("DEFAULT")) {
      std::istringstream in{std::string(line.substr(7))};
      for (std::string kind; in >> kind;) default_kinds.emplace(kind);
      if (default_kinds.empty()) throw Error(ErrorCode::ConfigError, "DEFAULT needs a kind list");
      continue;
    }
    settings.add(decode_feature_name(line));
  }
  if (!default_kinds.empty()) {
    for (const auto& name : default_settings(default_kinds).feature_names()) settings.add(name);
  }
  return settings;
}

ExtractionSettings load_settings_file(const std::string& path) { return parse_settings(read_file(path)); }

std::string format_settings(const ExtractionSettings& settings) {
  std::string out;
  for (const auto& name : settings.feature_names()) {
    out += encode_feature_name(name);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// FeatureMatrix

FeatureMatrix::FeatureMatrix(std::vector<FeatureName> columns, std::vector<std::int64_t> window_ids,
                             std::vector<std::string> labels, std::vector<double> cells)
    : columns_(std::move(columns)),
      window_ids_(std::move(window_ids)),
      labels_(std::move(labels)),
      cells_(std::move(cells)) {
  column_strings_.reserve(columns_.size());
  for (const auto& c : columns_) column_strings_.push_back(encode_feature_name(c));
  if (!std::is_sorted(column_strings_.begin(), column_strings_.end()) ||
      std::adjacent_find(column_strings_.begin(), column_strings_.end()) != column_strings_.end()) {
    throw Error(ErrorCode::ShapeMismatch, "feature columns must be unique and sorted by canonical name");
  }
  if (cells_.size() != window_ids_.size() * columns_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "cell count does not match rows x columns");
  }
  if (!labels_.empty() && labels_.size() != window_ids_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "label count does not match row count");
  }
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::size_t FeatureMatrix::find_column(const std::string& canonical) const {
  const auto it = std::lower_bound(column_strings_.begin(), column_strings_.end(), canonical);
  if (it == column_strings_.end() || *it != canonical) return npos;
  return static_cast<std::size_t>(it - column_strings_.begin());
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::string> canonical) const {
  std::vector<std::size_t> indices;
  for (const auto& name : canonical) {
    const std::size_t idx = find_column(name);
    if (idx == npos) throw Error(ErrorCode::UnknownKind, "matrix has no column '" + name + "'");
    indices.push_back(idx);
  }
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

  std::vector<FeatureName> columns;
  for (const auto idx : indices) columns.push_back(columns_[idx]);
  std::vector<double> cells;
  cells.reserve(rows() * indices.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (const auto idx : indices) cells.push_back(at(r, idx));
  }
  return FeatureMatrix(std::move(columns), window_ids_, labels_, std::move(cells));
}

FeatureMatrix FeatureMatrix::drop_nan_columns(std::vector<std::string>* dropped) const {
  std::vector<std::string> keep;
  for (std::size_t c = 0; c < cols(); ++c) {
    bool has_nan = false;
    for (std::size_t r = 0; r < rows() && !has_nan; ++r) has_nan = std::isnan(at(r, c));
    if (has_nan) {
      if (dropped != nullptr) dropped->push_back(column_strings_[c]);
    } else {
      keep.push_back(column_strings_[c]);
    }
  }
  return select_columns(keep);
}

FeatureMatrix FeatureMatrix::concat_rows(std::span<const FeatureMatrix> parts) {
  if (parts.empty()) return {};
  std::vector<std::int64_t> ids;
  std::vector<std::string> labels;
  std::vector<double> cells;
  const bool labeled = std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.has_labels(); });
  for (const auto& part : parts) {
    if (part.column_strings_ != parts.front().column_strings_) {
      throw Error(ErrorCode::ShapeMismatch, "cannot stack matrices with different columns");
    }
    ids.insert(ids.end(), part.window_ids_.begin(), part.window_ids_.end());
    if (labeled) labels.insert(labels.end(), part.labels_.begin(), part.labels_.end());
    cells.insert(cells.end(), part.cells_.begin(), part.cells_.end());
  }
  FeatureMatrix out;
  out.columns_ = parts.front().columns_;
  out.column_strings_ = parts.front().column_strings_;
  out.window_ids_ = std::move(ids);
  out.labels_ = std::move(labels);
  out.cells_ = std::move(cells);
  return out;
}

bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.column_strings_ != b.column_strings_ || a.window_ids_ != b.window_ids_ || a.labels_ != b.labels_ ||
      a.cells_.size() != b.cells_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.cells_.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a.cells_[i]) != std::bit_cast<std::uint64_t>(b.cells_[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Extraction

FeatureMatrix extract(std::span<const Window> windows, const Recording& recording,
                      const ExtractionSettings& settings, std::size_t workers) {
  for (const auto& kind : settings.kinds()) {
    if (!recording.has_kind(kind)) throw Error(ErrorCode::UnknownKind, "settings reference missing kind '" + kind.str() + "'");
  }
  auto columns = settings.feature_names();
  const std::size_t n_cols = columns.size();

  struct KindPlan {
    ChannelKind kind;
    std::vector<std::size_t> column_index;
    std::vector<CompiledCalculator> calculators;
  };
  std::vector<KindPlan> plans;
  for (std::size_t c = 0; c < n_cols; ++c) {
    const auto& name = columns[c];
    // A kind's columns share the prefix "kind__", so they are contiguous.
    if (plans.empty() || plans.back().kind != name.kind) plans.push_back({name.kind, {}, {}});
    plans.back().column_index.push_back(c);
    plans.back().calculators.emplace_back(name.calculator, name.params);
  }

  const std::size_t n_rows = windows.size();
  std::vector<double> cells(n_rows * n_cols);
  const std::size_t tasks = plans.empty() ? 0 : n_rows * plans.size();
  parallel_for(tasks, workers, [&](std::size_t task) {
    const std::size_t row = task / plans.size();
    const auto& plan = plans[task % plans.size()];
    const auto x = slice_window(recording, windows[row], plan.kind);
    if (x.size() < 2) throw Error(ErrorCode::WindowTooShort, "window shorter than 2 samples");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < plan.calculators.size(); ++k) {
      cells[row * n_cols + plan.column_index[k]] = plan.calculators[k].evaluate(x, sorted);
    }
  });

  std::vector<std::int64_t> ids;
  std::vector<std::string> labels;
  const bool any_label = std::any_of(windows.begin(), windows.end(), [](const Window& w) { return w.label.has_value(); });
  for (const auto& w : windows) {
    ids.push_back(w.window_id);
    if (any_label) labels.push_back(w.label.value_or(""));
  }
  return FeatureMatrix(std::move(columns), std::move(ids), std::move(labels), std::move(cells));
}

FeatureMatrix extract(const WindowSet& windows, const Recording& recording, const ExtractionSettings& settings,
                      std::size_t workers) {
  return extract(std::span<const Window>(windows.windows), recording, settings, workers);
}

// ---------------------------------------------------------------------------
// CSV

void write_feature_matrix_csv(const FeatureMatrix& matrix, std::ostream& out) {
  out << "window_id";
  if (matrix.has_labels()) out << ",label";
  for (const auto& name : matrix.column_strings()) out << ',' << name;
  out << '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    out << matrix.window_ids()[r];
    if (matrix.has_labels()) out << ',' << matrix.labels()[r];
    for (const double v : matrix.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
}

FeatureMatrix read_feature_matrix_csv(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string contents = ss.str();
  const auto lines = split_lines(contents);
  if (lines.empty()) throw Error(ErrorCode::MalformedCsv, "feature matrix is empty");
  const auto header = split(lines.front(), ',');
  if (header.empty() || header.front() != "window_id") {
    throw Error(ErrorCode::MalformedCsv, "feature matrix must start with 'window_id'");
  }
  const bool labeled = header.size() > 1 && header[1] == "label";
  const std::size_t first_feature = labeled ? 2 : 1;
  std::vector<FeatureName> columns;
  for (std::size_t i = first_feature; i < header.size(); ++i) columns.push_back(decode_feature_name(header[i]));

  std::vector<std::int64_t> ids;
  std::vector<std::string> labels;
  std::vector<double> cells;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (lines[row].empty() && row + 1 == lines.size()) break;
    const auto fields = split(lines[row], ',');
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MalformedCsv, "feature matrix line " + std::to_string(row + 1) + " has wrong width");
    }
    const auto id = parse_int(fields[0]);
    if (!id) throw Error(ErrorCode::MalformedCsv, "bad window_id on line " + std::to_string(row + 1));
    ids.push_back(*id);
    if (labeled) labels.emplace_back(fields[1]);
    for (std::size_t i = first_feature; i < fields.size(); ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) throw Error(ErrorCode::MalformedCsv, "bad cell on line " + std::to_string(row + 1));
      cells.push_back(*v);
    }
  }
  return FeatureMatrix(std::move(columns), std::move(ids), std::move(labels), std::move(cells));
}

}  // namespace imufresh
