#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "imufresh/extraction.hpp"
#include "imufresh/feature_name.hpp"

namespace imufresh {

struct ForestParams {
  std::size_t n_trees = 100;
  /// Features tried per node; defaults to floor(sqrt(p)).
  std::optional<std::size_t> mtry;
  std::size_t min_leaf = 1;
  std::optional<std::size_t> max_depth;
  std::uint64_t seed = 0;
  /// Threads used to grow trees; 0 = all cores. Does not affect the model.
  std::size_t workers = 1;
};

/// Axis-aligned binary tree stored in preorder. Rows with
/// value <= threshold go left.
struct TreeNode {
  std::int32_t feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<std::uint32_t> counts;  ///< per-class counts, leaves only
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  [[nodiscard]] const TreeNode& leaf_for(std::span<const double> row) const;
};

struct ForestModel {
  std::vector<std::string> classes;
  std::vector<FeatureName> feature_names;
  std::vector<DecisionTree> trees;
  /// Mean decrease in Gini impurity, sums to 1 (all zero if no tree split).
  std::vector<double> importances;

  [[nodiscard]] std::size_t n_features() const noexcept { return feature_names.size(); }
};

/// Throws Error(DegenerateTarget | NaNInFeatures | ShapeMismatch | BadParameters).
ForestModel train_forest(const FeatureMatrix& matrix, std::span<const std::string> labels,
                         const ForestParams& params);

/// Mean of the leaf class frequencies over all trees. Throws Error(ShapeMismatch).
std::vector<double> predict_proba(const ForestModel& model, std::span<const double> row);
std::vector<std::vector<double>> predict_proba(const ForestModel& model, const FeatureMatrix& rows);
/// Index into model.classes of the most probable class (lowest index on ties).
std::size_t predict_class(const ForestModel& model, std::span<const double> row);

struct CVReport {
  std::vector<double> fold_accuracies;
  double mean_accuracy = 0.0;
  std::vector<std::size_t> fold_assignment;
};

/// Stratified (seeded) k-fold, or group k-fold when `groups` is given: distinct
/// groups sorted by id go round-robin to folds, so no group is split.
/// Throws Error(BadParameters) plus anything train_forest throws.
CVReport cross_validate(const FeatureMatrix& matrix, std::span<const std::string> labels, std::size_t k,
                        const ForestParams& params,
                        std::optional<std::span<const std::string>> groups = std::nullopt);

struct RankedFeature {
  FeatureName name;
  double importance = 0.0;
};

/// Fits `repeats` forests with seeds seed, seed+1, ... and ranks features by
/// mean importance, descending, ties by canonical name.
std::vector<RankedFeature> aggregate_importances(const FeatureMatrix& matrix, std::span<const std::string> labels,
                                                 std::size_t repeats, const ForestParams& params);

/// First k names. Throws Error(BadParameters) when k exceeds the ranking.
std::vector<FeatureName> top_k_features(std::span<const RankedFeature> ranked, std::size_t k);

/// Text model format, see README. load(save(m)) predicts identically.
void save_forest(const ForestModel& model, std::ostream& out);
ForestModel load_forest(std::istream& in);
void save_forest_file(const ForestModel& model, const std::string& path);
ForestModel load_forest_file(const std::string& path);

}  // namespace imufresh
