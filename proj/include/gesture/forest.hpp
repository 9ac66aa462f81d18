#pragma once

#include "gesture/skeleton.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gesture {

/// Feature matrix (rows: samples, columns: features in canonical order) with labels.
struct LabeledDataset
{
   Eigen::MatrixXd features;
   std::vector<GestureClass> labels;
   std::vector<std::string> ids;
   std::vector<std::string> feature_names;

   std::size_t size() const noexcept { return labels.size(); }
   std::size_t dims() const noexcept { return static_cast<std::size_t>(features.cols()); }

   /// Throws DimensionMismatch on inconsistent sizes, NonFiniteInput on NaN/inf.
   void validate() const;

   /// Rows `rows`, in the given order.
   LabeledDataset select(std::span<const std::size_t> rows) const;

   std::array<std::size_t, kNumClasses> class_counts() const;
};

/// Per class, round-half-up(test_fraction * count) samples go to the test set
/// (clamped to [1, count - 1]). Members are picked by a seeded shuffle of the
/// class's ids sorted ascending; both outputs keep the input row order.
/// Throws ClassTooSmall if a present class has fewer than 2 samples.
std::pair<LabeledDataset, LabeledDataset>
stratified_split(const LabeledDataset& data, double test_fraction, std::uint64_t seed);

struct ForestParams
{
   std::size_t n_trees = 200;
   std::optional<std::size_t> max_depth;     // unlimited when empty
   std::size_t min_samples_leaf = 1;
   std::optional<std::size_t> mtry;          // floor(sqrt(d)) when empty
   bool bootstrap = true;
   std::uint64_t seed = 0;

   std::size_t resolved_mtry(std::size_t dims) const;
};

struct TreeNode
{
   std::int32_t feature = -1; // -1 marks a leaf
   double threshold = 0.0;    // go left when x[feature] <= threshold
   std::int32_t left = -1;
   std::int32_t right = -1;
   std::array<std::uint32_t, kNumClasses> counts{};
   double impurity_decrease = 0.0; // weighted: n_node / n_root * (gini - children)

   bool is_leaf() const noexcept { return feature < 0; }
   /// Majority class; ties resolve to the lowest class code.
   GestureClass majority() const noexcept;
   friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree
{
   std::vector<TreeNode> nodes; // nodes[0] is the root

   const TreeNode& leaf_for(std::span<const double> x) const;
   friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct ForestModel
{
   ForestParams params;
   std::vector<std::string> feature_names;
   std::vector<DecisionTree> trees;
   std::vector<double> importances; // per feature, sums to 1 when any split exists

   std::size_t dims() const noexcept { return feature_names.size(); }
};

struct Prediction
{
   GestureClass label = GestureClass::Stop;
   std::array<std::size_t, kNumClasses> votes{};
};

/// Seed for tree `k` of a forest with master seed `seed`.
std::uint64_t tree_seed(std::uint64_t seed, std::size_t k) noexcept;

/// Grows each tree from its own seed, so `n_threads` (0 = hardware
/// concurrency) never changes the result. Throws EmptyTrainingSet.
ForestModel train_forest(const LabeledDataset& train, const ForestParams& params, unsigned n_threads = 1);

/// Throws DimensionMismatch when x has the wrong length.
Prediction predict(const ForestModel& model, std::span<const double> x);

struct RankedFeature
{
   std::string name;
   std::size_t index = 0;
   double score = 0.0;
};

/// Importances sorted descending; ties keep feature order.
std::vector<RankedFeature> gini_importance(const ForestModel& model);

struct ConfusionMatrix
{
   std::array<std::array<std::size_t, kNumClasses>, kNumClasses> counts{}; // [true][predicted]
   double accuracy = 0.0;

   std::size_t total() const noexcept;
   std::size_t trace() const noexcept;
   /// Each row divided by its sum (zero rows stay zero).
   std::array<std::array<double, kNumClasses>, kNumClasses> row_normalized() const noexcept;
   /// Recall of class c, or nullopt if c is absent from the test set.
   std::optional<double> recall(GestureClass c) const noexcept;
};

/// Throws EmptyTestSet, DimensionMismatch.
ConfusionMatrix evaluate(const ForestModel& model, const LabeledDataset& test);

} // namespace gesture
