#include "imufresh/forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "imufresh/error.hpp"
#include "imufresh/parallel.hpp"
#include "imufresh/rng.hpp"
#include "imufresh/text.hpp"

namespace imufresh {

namespace {

/// Column-major training data with integer class ids.
struct TrainingData {
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<double> columns;  // columns[f * n_rows + r]
  std::vector<std::uint32_t> y;

  [[nodiscard]] double value(std::size_t row, std::size_t feature) const { return columns[feature * n_rows + row]; }
};

double gini(std::span<const std::uint32_t> counts, double total) {
  if (total <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (const auto c : counts) {
    const double p = static_cast<double>(c) / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

class TreeBuilder {
 public:
  TreeBuilder(const TrainingData& data, const ForestParams& params, std::size_t mtry, SplitMix64 rng)
      : data_(data), params_(params), mtry_(mtry), rng_(rng), importance_(data.n_features, 0.0) {}

  DecisionTree build() {
    std::vector<std::uint32_t> sample(data_.n_rows);
    for (auto& s : sample) s = static_cast<std::uint32_t>(rng_.below(data_.n_rows));
    root_size_ = static_cast<double>(sample.size());
    grow(sample, 0);
    return std::move(tree_);
  }

  [[nodiscard]] const std::vector<double>& importance() const { return importance_; }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double weighted_impurity = 0.0;
    bool found = false;
  };

  std::uint32_t grow(std::vector<std::uint32_t>& sample, std::size_t depth) {
    const auto index = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();

    std::vector<std::uint32_t> counts(data_.n_classes, 0);
    for (const auto r : sample) counts[data_.y[r]]++;
    const double n = static_cast<double>(sample.size());
    const double impurity = gini(counts, n);
    const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
    const bool depth_limited = params_.max_depth && depth >= *params_.max_depth;

    Split split;
    if (!pure && !depth_limited && sample.size() >= 2 * params_.min_leaf) split = best_split(sample, counts);
    if (!split.found) {
      tree_.nodes[index].counts = std::move(counts);
      return index;
    }

    std::vector<std::uint32_t> left, right;
    for (const auto r : sample) (data_.value(r, split.feature) <= split.threshold ? left : right).push_back(r);
    importance_[split.feature] += (n * impurity - n * split.weighted_impurity) / root_size_;
    sample.clear();
    sample.shrink_to_fit();

    tree_.nodes[index].feature = static_cast<std::int32_t>(split.feature);
    tree_.nodes[index].threshold = split.threshold;
    const auto l = grow(left, depth + 1);
    const auto r = grow(right, depth + 1);
    tree_.nodes[index].left = l;
    tree_.nodes[index].right = r;
    return index;
  }

  Split best_split(std::span<const std::uint32_t> sample, std::span<const std::uint32_t> parent_counts) {
    std::vector<std::size_t> features(data_.n_features);
    std::iota(features.begin(), features.end(), 0);
    const double n = static_cast<double>(sample.size());

    Split best;
    std::size_t visited = 0;
    std::vector<std::pair<double, std::uint32_t>> values(sample.size());
    std::vector<std::uint32_t> left(data_.n_classes);
    std::vector<std::uint32_t> right(data_.n_classes);

    // Lazy Fisher-Yates: draw features until mtry non-constant ones were seen.
    for (std::size_t i = 0; i < features.size() && visited < mtry_; ++i) {
      const std::size_t j = i + rng_.below(features.size() - i);
      std::swap(features[i], features[j]);
      const std::size_t f = features[i];

      for (std::size_t s = 0; s < sample.size(); ++s) values[s] = {data_.value(sample[s], f), data_.y[sample[s]]};
      std::sort(values.begin(), values.end());
      if (values.front().first == values.back().first) continue;
      ++visited;

      std::fill(left.begin(), left.end(), 0);
      std::copy(parent_counts.begin(), parent_counts.end(), right.begin());
      for (std::size_t s = 0; s + 1 < values.size(); ++s) {
        left[values[s].second]++;
        right[values[s].second]--;
        if (values[s].first == values[s + 1].first) continue;
        const std::size_t n_left = s + 1;
        const std::size_t n_right = values.size() - n_left;
        if (n_left < params_.min_leaf || n_right < params_.min_leaf) continue;
        const double nl = static_cast<double>(n_left);
        const double nr = static_cast<double>(n_right);
        const double weighted = (nl * gini(left, nl) + nr * gini(right, nr)) / n;
        if (!best.found || weighted < best.weighted_impurity) {
          double threshold = 0.5 * (values[s].first + values[s + 1].first);
          if (threshold >= values[s + 1].first) threshold = values[s].first;
          best = {f, threshold, weighted, true};
        }
      }
    }
    return best;
  }

  const TrainingData& data_;
  const ForestParams& params_;
  std::size_t mtry_;
  SplitMix64 rng_;
  DecisionTree tree_;
  std::vector<double> importance_;
  double root_size_ = 1.0;
};

struct Encoded {
  TrainingData data;
  std::vector<std::string> classes;
};

Encoded encode(const FeatureMatrix& matrix, std::span<const std::string> labels,
               std::span<const std::size_t> rows) {
  if (labels.size() != matrix.rows()) throw Error(ErrorCode::ShapeMismatch, "label count differs from row count");
  std::set<std::string> class_set;
  for (const auto r : rows) class_set.insert(labels[r]);
  Encoded out;
  out.classes.assign(class_set.begin(), class_set.end());
  if (out.classes.size() < 2) throw Error(ErrorCode::DegenerateTarget, "training needs at least 2 classes");

  auto& d = out.data;
  d.n_rows = rows.size();
  d.n_features = matrix.cols();
  d.n_classes = out.classes.size();
  d.columns.resize(d.n_rows * d.n_features);
  d.y.resize(d.n_rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = matrix.row(rows[i]);
    for (std::size_t f = 0; f < d.n_features; ++f) {
      if (std::isnan(row[f])) {
        throw Error(ErrorCode::NaNInFeatures, "column '" + matrix.column_strings()[f] + "' contains NaN");
      }
      d.columns[f * d.n_rows + i] = row[f];
    }
    const auto it = std::lower_bound(out.classes.begin(), out.classes.end(), labels[rows[i]]);
    d.y[i] = static_cast<std::uint32_t>(it - out.classes.begin());
  }
  return out;
}

ForestModel fit(const FeatureMatrix& matrix, std::span<const std::string> labels, std::span<const std::size_t> rows,
                const ForestParams& params) {
  if (params.n_trees < 1) throw Error(ErrorCode::BadParameters, "n_trees must be >= 1");
  if (params.min_leaf < 1) throw Error(ErrorCode::BadParameters, "min_leaf must be >= 1");
  if (matrix.cols() == 0) throw Error(ErrorCode::BadParameters, "training needs at least one feature");
  const Encoded encoded = encode(matrix, labels, rows);
  const std::size_t p = matrix.cols();
  const std::size_t mtry =
      params.mtry.value_or(std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p))))));
  if (mtry < 1 || mtry > p) throw Error(ErrorCode::BadParameters, "mtry must lie in [1, p]");

  ForestModel model;
  model.classes = encoded.classes;
  model.feature_names = matrix.column_names();
  model.trees.resize(params.n_trees);
  std::vector<std::vector<double>> per_tree(params.n_trees);
  parallel_for(params.n_trees, params.workers, [&](std::size_t t) {
    TreeBuilder builder(encoded.data, params, mtry, SplitMix64::stream(params.seed, t));
    model.trees[t] = builder.build();
    per_tree[t] = builder.importance();
  });

  model.importances.assign(p, 0.0);
  for (const auto& imp : per_tree) {
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (total <= 0.0) continue;
    for (std::size_t f = 0; f < p; ++f) model.importances[f] += imp[f] / total;
  }
  const double total = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
  if (total > 0.0) {
    for (auto& v : model.importances) v /= total;
  }
  return model;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& node = nodes[i];
    i = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[i];
}

ForestModel train_forest(const FeatureMatrix& matrix, std::span<const std::string> labels,
                         const ForestParams& params) {
  const auto rows = all_rows(matrix.rows());
  return fit(matrix, labels, rows, params);
}

std::vector<double> predict_proba(const ForestModel& model, std::span<const double> row) {
  if (row.size() != model.n_features()) {
    throw Error(ErrorCode::ShapeMismatch, "row has " + std::to_string(row.size()) + " values, model expects " +
                                              std::to_string(model.n_features()));
  }
  std::vector<double> proba(model.classes.size(), 0.0);
  for (const auto& tree : model.trees) {
    const auto& leaf = tree.leaf_for(row);
    const double total = std::accumulate(leaf.counts.begin(), leaf.counts.end(), 0.0);
    for (std::size_t c = 0; c < proba.size(); ++c) proba[c] += static_cast<double>(leaf.counts[c]) / total;
  }
  for (auto& p : proba) p /= static_cast<double>(model.trees.size());
  return proba;
}

std::vector<std::vector<double>> predict_proba(const ForestModel& model, const FeatureMatrix& rows) {
  std::vector<std::vector<double>> out;
  out.reserve(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(predict_proba(model, rows.row(r)));
  return out;
}

std::size_t predict_class(const ForestModel& model, std::span<const double> row) {
  const auto proba = predict_proba(model, row);
  return static_cast<std::size_t>(std::max_element(proba.begin(), proba.end()) - proba.begin());
}

CVReport cross_validate(const FeatureMatrix& matrix, std::span<const std::string> labels, std::size_t k,
                        const ForestParams& params, std::optional<std::span<const std::string>> groups) {
  const std::size_t n = matrix.rows();
  if (k < 2) throw Error(ErrorCode::BadParameters, "k must be >= 2");
  if (k > n) throw Error(ErrorCode::BadParameters, "k exceeds the number of rows");
  if (labels.size() != n) throw Error(ErrorCode::ShapeMismatch, "label count differs from row count");

  CVReport report;
  report.fold_assignment.assign(n, 0);
  if (groups) {
    if (groups->size() != n) throw Error(ErrorCode::ShapeMismatch, "group count differs from row count");
    const std::set<std::string> distinct(groups->begin(), groups->end());
    if (distinct.size() < k) throw Error(ErrorCode::BadParameters, "fewer distinct groups than folds");
    std::map<std::string, std::size_t> fold_of;
    std::size_t next = 0;
    for (const auto& g : distinct) fold_of[g] = next++ % k;
    for (std::size_t r = 0; r < n; ++r) report.fold_assignment[r] = fold_of.at((*groups)[r]);
  } else {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t r = 0; r < n; ++r) by_class[labels[r]].push_back(r);
    SplitMix64 rng = SplitMix64::stream(params.seed, 0xC0FFEE);
    std::size_t next = 0;
    for (auto& [label, rows] : by_class) {
      rng.shuffle(rows.begin(), rows.end());
      for (const auto r : rows) report.fold_assignment[r] = next++ % k;
    }
  }

  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t r = 0; r < n; ++r) (report.fold_assignment[r] == fold ? test : train).push_back(r);
    if (test.empty()) continue;
    const ForestModel model = fit(matrix, labels, train, params);
    std::size_t correct = 0;
    for (const auto r : test) {
      if (model.classes[predict_class(model, matrix.row(r))] == labels[r]) ++correct;
    }
    report.fold_accuracies.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  report.mean_accuracy = std::accumulate(report.fold_accuracies.begin(), report.fold_accuracies.end(), 0.0) /
                         static_cast<double>(report.fold_accuracies.size());
  return report;
}

std::vector<RankedFeature> aggregate_importances(const FeatureMatrix& matrix, std::span<const std::string> labels,
                                                 std::size_t repeats, const ForestParams& params) {
  if (repeats < 1) throw Error(ErrorCode::BadParameters, "repeats must be >= 1");
  std::vector<double> sum(matrix.cols(), 0.0);
  for (std::size_t r = 0; r < repeats; ++r) {
    ForestParams run = params;
    run.seed = params.seed + r;
    const ForestModel model = train_forest(matrix, labels, run);
    for (std::size_t f = 0; f < sum.size(); ++f) sum[f] += model.importances[f];
  }
  std::vector<std::size_t> order = all_rows(matrix.cols());
  // Columns are in canonical order, so a stable sort breaks ties by name.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sum[a] > sum[b]; });
  std::vector<RankedFeature> ranked;
  ranked.reserve(order.size());
  for (const auto f : order) ranked.push_back({matrix.column_names()[f], sum[f] / static_cast<double>(repeats)});
  return ranked;
}

std::vector<FeatureName> top_k_features(std::span<const RankedFeature> ranked, std::size_t k) {
  if (k > ranked.size()) {
    throw Error(ErrorCode::BadParameters, "k=" + std::to_string(k) + " exceeds " + std::to_string(ranked.size()) +
                                              " ranked features");
  }
  std::vector<FeatureName> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].name);
  return out;
}

// ---------------------------------------------------------------------------
// Persistence
//
//   imufresh-forest 1
//   classes <C>            followed by C lines, one label each
//   features <P>           followed by P lines, one canonical name each
//   importances <P values>
//   trees <T>
//   tree <node count>      followed by nodes in preorder:
//     split <feature_idx> <threshold>
//     leaf <count_0> ... <count_{C-1}>

namespace {

void write_preorder(const DecisionTree& tree, std::size_t i, std::ostream& out) {
  const auto& node = tree.nodes[i];
  if (node.feature < 0) {
    out << "leaf";
    for (const auto c : node.counts) out << ' ' << c;
    out << '\n';
    return;
  }
  out << "split " << node.feature << ' ' << format_double(node.threshold) << '\n';
  write_preorder(tree, node.left, out);
  write_preorder(tree, node.right, out);
}

class ModelReader {
 public:
  explicit ModelReader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string text;
    if (!std::getline(in_, text)) fail("unexpected end of model file");
    if (!text.empty() && text.back() == '\r') text.pop_back();
    ++line_no_;
    return text;
  }

  std::size_t header(const std::string& key) {
    std::istringstream ss(line());
    std::string got;
    long long value = -1;
    if (!(ss >> got >> value) || got != key || value < 0) fail("expected '" + key + " <count>'");
    return static_cast<std::size_t>(value);
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::MalformedModel, "line " + std::to_string(line_no_) + ": " + why);
  }

  std::uint32_t read_node(DecisionTree& tree, std::size_t n_features, std::size_t n_classes, std::size_t budget) {
    if (tree.nodes.size() >= budget) fail("tree has more nodes than declared");
    const auto index = static_cast<std::uint32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::istringstream ss(line());
    std::string kind;
    ss >> kind;
    if (kind == "leaf") {
      std::vector<std::uint32_t> counts;
      for (long long c; ss >> c;) {
        if (c < 0) fail("negative leaf count");
        counts.push_back(static_cast<std::uint32_t>(c));
      }
      if (counts.size() != n_classes) fail("leaf needs one count per class");
      if (std::accumulate(counts.begin(), counts.end(), 0ULL) == 0) fail("empty leaf");
      tree.nodes[index].counts = std::move(counts);
      return index;
    }
    if (kind != "split") fail("expected 'split' or 'leaf'");
    long long feature = -1;
    std::string threshold_text;
    if (!(ss >> feature >> threshold_text) || feature < 0 || static_cast<std::size_t>(feature) >= n_features) {
      fail("bad split record");
    }
    const auto threshold = parse_double(threshold_text);
    if (!threshold) fail("bad threshold");
    tree.nodes[index].feature = static_cast<std::int32_t>(feature);
    tree.nodes[index].threshold = *threshold;
    const auto l = read_node(tree, n_features, n_classes, budget);
    const auto r = read_node(tree, n_features, n_classes, budget);
    tree.nodes[index].left = l;
    tree.nodes[index].right = r;
    return index;
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_forest(const ForestModel& model, std::ostream& out) {
  out << "imufresh-forest 1\n";
  out << "classes " << model.classes.size() << '\n';
  for (const auto& c : model.classes) out << c << '\n';
  out << "features " << model.feature_names.size() << '\n';
  for (const auto& f : model.feature_names) out << encode_feature_name(f) << '\n';
  out << "importances";
  for (const double v : model.importances) out << ' ' << format_double(v);
  out << '\n';
  out << "trees " << model.trees.size() << '\n';
  for (const auto& tree : model.trees) {
    out << "tree " << tree.nodes.size() << '\n';
    write_preorder(tree, 0, out);
  }
}

ForestModel load_forest(std::istream& in) {
  ModelReader reader(in);
  if (reader.line() != "imufresh-forest 1") reader.fail("not an imufresh-forest v1 file");
  ForestModel model;
  const std::size_t n_classes = reader.header("classes");
  for (std::size_t i = 0; i < n_classes; ++i) model.classes.push_back(reader.line());
  const std::size_t n_features = reader.header("features");
  for (std::size_t i = 0; i < n_features; ++i) model.feature_names.push_back(decode_feature_name(reader.line()));
  {
    std::istringstream ss(reader.line());
    std::string key;
    ss >> key;
    if (key != "importances") reader.fail("expected importances");
    for (std::string v; ss >> v;) {
      const auto d = parse_double(v);
      if (!d) reader.fail("bad importance");
      model.importances.push_back(*d);
    }
    if (model.importances.size() != n_features) reader.fail("importance count differs from feature count");
  }
  const std::size_t n_trees = reader.header("trees");
  if (n_trees == 0) reader.fail("model has no trees");
  for (std::size_t t = 0; t < n_trees; ++t) {
    const std::size_t n_nodes = reader.header("tree");
    DecisionTree tree;
    tree.nodes.reserve(n_nodes);
    reader.read_node(tree, n_features, n_classes, n_nodes);
    if (tree.nodes.size() != n_nodes) reader.fail("tree node count mismatch");
    model.trees.push_back(std::move(tree));
  }
  return model;
}

void save_forest_file(const ForestModel& model, const std::string& path) {
  std::ostringstream out;
  save_forest(model, out);
  write_file(path, out.str());
}

ForestModel load_forest_file(const std::string& path) {
  std::istringstream in(read_file(path));
  return load_forest(in);
}

}  // namespace imufresh
