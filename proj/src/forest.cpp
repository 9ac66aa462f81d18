#include "gesture/forest.hpp"

#include "gesture/error.hpp"
#include "gesture/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace gesture {

namespace {

using Counts = std::array<std::uint32_t, kNumClasses>;

double gini(const Counts& c, double n) noexcept
{
   if(n <= 0.0) return 0.0;
   double s = 0.0;
   for(auto k : c) {
      const double p = static_cast<double>(k) / n;
      s += p * p;
   }
   return 1.0 - s;
}

struct Split
{
   std::size_t feature = 0;
   double threshold = 0.0;
   double decrease = -1.0;
};

class TreeBuilder
{
 public:
   TreeBuilder(const LabeledDataset& data, const ForestParams& params, std::uint64_t seed)
       : data_(data), params_(params), mtry_(params.resolved_mtry(data.dims())), rng_(seed)
   {}

   DecisionTree build()
   {
      const std::size_t n = data_.size();
      std::vector<std::size_t> rows(n);
      if(params_.bootstrap) {
         for(auto& r : rows) r = static_cast<std::size_t>(rng_.below(n));
      } else {
         std::iota(rows.begin(), rows.end(), std::size_t{0});
      }
      n_root_ = static_cast<double>(n);
      grow(rows, 0, rows.size(), 0);
      return std::move(tree_);
   }

 private:
   // Returns the index of the created node.
   std::int32_t grow(std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi, std::size_t depth)
   {
      const auto id = static_cast<std::int32_t>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      Counts counts{};
      for(std::size_t i = lo; i < hi; ++i) ++counts[code(data_.labels[rows[i]])];
      tree_.nodes[id].counts = counts;

      const std::size_t n = hi - lo;
      const double impurity = gini(counts, static_cast<double>(n));
      const bool depth_exhausted = params_.max_depth && depth >= *params_.max_depth;
      if(impurity <= 0.0 || depth_exhausted || n < 2 * params_.min_samples_leaf) return id;

      const auto split = best_split(rows, lo, hi, impurity);
      if(split.decrease < 0.0) return id;

      const auto mid = static_cast<std::size_t>(
          std::partition(rows.begin() + lo, rows.begin() + hi,
                         [&](std::size_t r) { return data_.features(r, split.feature) <= split.threshold; })
          - rows.begin());

      {
         auto& node = tree_.nodes[id];
         node.feature = static_cast<std::int32_t>(split.feature);
         node.threshold = split.threshold;
         node.impurity_decrease = static_cast<double>(n) / n_root_ * split.decrease;
      }
      // Children are grown depth-first, left before right; the rng stream
      // therefore depends only on the tree seed.
      const auto left = grow(rows, lo, mid, depth + 1);
      const auto right = grow(rows, mid, hi, depth + 1);
      tree_.nodes[id].left = left;
      tree_.nodes[id].right = right;
      return id;
   }

   // Draws up to mtry features that are non-constant in this node (in a
   // seeded random order), then scans them in ascending index.
   std::vector<std::size_t> candidate_features(const std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi)
   {
      const std::size_t d = data_.dims();
      std::vector<std::size_t> order(d);
      std::iota(order.begin(), order.end(), std::size_t{0});
      rng_.shuffle(order.begin(), order.end());

      std::vector<std::size_t> picked;
      picked.reserve(mtry_);
      for(auto f : order) {
         if(picked.size() == mtry_) break;
         const double first = data_.features(rows[lo], f);
         for(std::size_t i = lo + 1; i < hi; ++i) {
            if(data_.features(rows[i], f) != first) {
               picked.push_back(f);
               break;
            }
         }
      }
      std::sort(picked.begin(), picked.end());
      return picked;
   }

   Split best_split(const std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi, double parent_impurity)
   {
      const std::size_t n = hi - lo;
      const double nd = static_cast<double>(n);
      const std::size_t msl = std::max<std::size_t>(params_.min_samples_leaf, 1);

      Split best;
      std::vector<std::pair<double, std::size_t>> column(n);
      for(auto f : candidate_features(rows, lo, hi)) {
         Counts total{};
         for(std::size_t i = 0; i < n; ++i) {
            const auto r = rows[lo + i];
            column[i] = {data_.features(r, f), code(data_.labels[r])};
            ++total[column[i].second];
         }
         std::sort(column.begin(), column.end());

         Counts left{};
         for(std::size_t i = 0; i + 1 < n; ++i) {
            ++left[column[i].second];
            const double a = column[i].first;
            const double b = column[i + 1].first;
            if(!(a < b)) continue;
            const std::size_t nl = i + 1;
            const std::size_t nr = n - nl;
            if(nl < msl || nr < msl) continue;

            Counts right{};
            for(std::size_t c = 0; c < kNumClasses; ++c) right[c] = total[c] - left[c];
            const double dl = static_cast<double>(nl);
            const double dr = static_cast<double>(nr);
            const double decrease = parent_impurity - dl / nd * gini(left, dl) - dr / nd * gini(right, dr);
            if(decrease > best.decrease + 1e-12) {
               double threshold = a + (b - a) / 2.0;
               if(!(threshold < b)) threshold = a; // a and b are adjacent doubles
               best = {f, threshold, decrease};
            }
         }
      }
      return best;
   }

   const LabeledDataset& data_;
   const ForestParams& params_;
   std::size_t mtry_;
   Rng rng_;
   DecisionTree tree_;
   double n_root_ = 1.0;
};

std::vector<double> compute_importances(const std::vector<DecisionTree>& trees, std::size_t dims)
{
   std::vector<double> imp(dims, 0.0);
   for(const auto& tree : trees)
      for(const auto& node : tree.nodes)
         if(!node.is_leaf()) imp[static_cast<std::size_t>(node.feature)] += node.impurity_decrease;
   for(auto& v : imp) v /= static_cast<double>(trees.size());
   const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
   if(total > 0.0)
      for(auto& v : imp) v /= total;
   return imp;
}

} // namespace

void LabeledDataset::validate() const
{
   const auto n = static_cast<std::size_t>(features.rows());
   if(labels.size() != n || ids.size() != n)
      throw Error(ErrorKind::DimensionMismatch,
                  "dataset has " + std::to_string(n) + " rows, " + std::to_string(labels.size()) + " labels and "
                      + std::to_string(ids.size()) + " ids");
   if(!feature_names.empty() && feature_names.size() != dims())
      throw Error(ErrorKind::DimensionMismatch, "feature name count does not match column count");
   if(!features.allFinite()) throw Error(ErrorKind::NonFiniteInput, "dataset contains non-finite features");
}

LabeledDataset LabeledDataset::select(std::span<const std::size_t> rows) const
{
   LabeledDataset out;
   out.feature_names = feature_names;
   out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
   out.labels.reserve(rows.size());
   out.ids.reserve(rows.size());
   for(std::size_t i = 0; i < rows.size(); ++i) {
      out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
      out.labels.push_back(labels[rows[i]]);
      out.ids.push_back(ids[rows[i]]);
   }
   return out;
}

std::array<std::size_t, kNumClasses> LabeledDataset::class_counts() const
{
   std::array<std::size_t, kNumClasses> c{};
   for(auto l : labels) ++c[code(l)];
   return c;
}

std::pair<LabeledDataset, LabeledDataset>
stratified_split(const LabeledDataset& data, double test_fraction, std::uint64_t seed)
{
   if(!(test_fraction > 0.0 && test_fraction < 1.0))
      throw Error(ErrorKind::InvalidArgument, "test fraction must lie in (0, 1)");
   data.validate();

   std::vector<bool> in_test(data.size(), false);
   for(auto cls : kAllClasses) {
      std::vector<std::size_t> rows;
      for(std::size_t i = 0; i < data.size(); ++i)
         if(data.labels[i] == cls) rows.push_back(i);
      if(rows.empty()) continue;
      if(rows.size() < 2)
         throw Error(ErrorKind::ClassTooSmall,
                     "class '" + std::string(class_name(cls)) + "' has fewer than 2 samples", code(cls));

      std::stable_sort(rows.begin(), rows.end(),
                       [&](std::size_t a, std::size_t b) { return data.ids[a] < data.ids[b]; });
      Rng rng(mix_seed(seed, code(cls)));
      rng.shuffle(rows.begin(), rows.end());

      const double n = static_cast<double>(rows.size());
      auto n_test = static_cast<std::size_t>(std::floor(test_fraction * n + 0.5 + 1e-9));
      n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
      for(std::size_t i = 0; i < n_test; ++i) in_test[rows[i]] = true;
   }

   std::vector<std::size_t> train_rows, test_rows;
   for(std::size_t i = 0; i < data.size(); ++i) (in_test[i] ? test_rows : train_rows).push_back(i);
   return {data.select(train_rows), data.select(test_rows)};
}

std::size_t ForestParams::resolved_mtry(std::size_t dims) const
{
   const std::size_t m = mtry ? *mtry : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(dims))));
   return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(dims, 1));
}

GestureClass TreeNode::majority() const noexcept
{
   std::size_t best = 0;
   for(std::size_t c = 1; c < kNumClasses; ++c)
      if(counts[c] > counts[best]) best = c;
   return static_cast<GestureClass>(best);
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const
{
   std::size_t i = 0;
   while(!nodes[i].is_leaf())
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                                       ? nodes[i].left
                                       : nodes[i].right);
   return nodes[i];
}

std::uint64_t tree_seed(std::uint64_t seed, std::size_t k) noexcept { return mix_seed(seed, k); }

ForestModel train_forest(const LabeledDataset& train, const ForestParams& params, unsigned n_threads)
{
   if(train.size() == 0) throw Error(ErrorKind::EmptyTrainingSet, "no training samples");
   train.validate();
   if(params.n_trees < 1) throw Error(ErrorKind::InvalidArgument, "forest needs at least one tree");
   if(params.mtry && (*params.mtry < 1 || *params.mtry > train.dims()))
      throw Error(ErrorKind::InvalidArgument, "mtry must lie in [1, d]");

   ForestModel model;
   model.params = params;
   model.params.mtry = params.resolved_mtry(train.dims());
   model.feature_names = train.feature_names;
   if(model.feature_names.empty())
      for(std::size_t j = 0; j < train.dims(); ++j) model.feature_names.push_back("f" + std::to_string(j));
   model.trees.resize(params.n_trees);

   if(n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
   n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, params.n_trees));

   std::atomic<std::size_t> next{0};
   auto worker = [&] {
      for(std::size_t k = next++; k < params.n_trees; k = next++)
         model.trees[k] = TreeBuilder(train, model.params, tree_seed(params.seed, k)).build();
   };
   if(n_threads <= 1) {
      worker();
   } else {
      std::vector<std::jthread> pool;
      for(unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
   }

   model.importances = compute_importances(model.trees, train.dims());
   return model;
}

Prediction predict(const ForestModel& model, std::span<const double> x)
{
   if(x.size() != model.dims())
      throw Error(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(model.dims()) + " features, got " + std::to_string(x.size()));
   Prediction p;
   for(const auto& tree : model.trees) ++p.votes[code(tree.leaf_for(x).majority())];
   std::size_t best = 0;
   for(std::size_t c = 1; c < kNumClasses; ++c)
      if(p.votes[c] > p.votes[best]) best = c;
   p.label = static_cast<GestureClass>(best);
   return p;
}

std::vector<RankedFeature> gini_importance(const ForestModel& model)
{
   std::vector<RankedFeature> ranked;
   ranked.reserve(model.dims());
   for(std::size_t j = 0; j < model.dims(); ++j) ranked.push_back({model.feature_names[j], j, model.importances[j]});
   std::stable_sort(ranked.begin(), ranked.end(),
                    [](const RankedFeature& a, const RankedFeature& b) { return a.score > b.score; });
   return ranked;
}

std::size_t ConfusionMatrix::total() const noexcept
{
   std::size_t t = 0;
   for(const auto& row : counts)
      for(auto v : row) t += v;
   return t;
}

std::size_t ConfusionMatrix::trace() const noexcept
{
   std::size_t t = 0;
   for(std::size_t c = 0; c < kNumClasses; ++c) t += counts[c][c];
   return t;
}

std::array<std::array<double, kNumClasses>, kNumClasses> ConfusionMatrix::row_normalized() const noexcept
{
   std::array<std::array<double, kNumClasses>, kNumClasses> out{};
   for(std::size_t i = 0; i < kNumClasses; ++i) {
      const auto sum = std::accumulate(counts[i].begin(), counts[i].end(), std::size_t{0});
      if(sum == 0) continue;
      for(std::size_t j = 0; j < kNumClasses; ++j)
         out[i][j] = static_cast<double>(counts[i][j]) / static_cast<double>(sum);
   }
   return out;
}

std::optional<double> ConfusionMatrix::recall(GestureClass c) const noexcept
{
   const auto& row = counts[code(c)];
   const auto sum = std::accumulate(row.begin(), row.end(), std::size_t{0});
   if(sum == 0) return std::nullopt;
   return static_cast<double>(row[code(c)]) / static_cast<double>(sum);
}

ConfusionMatrix evaluate(const ForestModel& model, const LabeledDataset& test)
{
   if(test.size() == 0) throw Error(ErrorKind::EmptyTestSet, "no test samples");
   test.validate();
   if(test.dims() != model.dims())
      throw Error(ErrorKind::DimensionMismatch,
                  "model expects " + std::to_string(model.dims()) + " features, test set has "
                      + std::to_string(test.dims()));
   ConfusionMatrix cm;
   std::vector<double> row(test.dims());
   for(std::size_t i = 0; i < test.size(); ++i) {
      for(std::size_t j = 0; j < row.size(); ++j)
         row[j] = test.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      ++cm.counts[code(test.labels[i])][code(predict(model, row).label)];
   }
   cm.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
   return cm;
}

} // namespace gesture
