#include "gesture/clustering.hpp"

#include "gesture/error.hpp"
#include "gesture/forest.hpp"
#include "gesture/random.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace gesture {

namespace {

constexpr double kAffinityFloor = 1e-12;
constexpr double kEntropyTolerance = 1e-5;
constexpr int kMaxBisectionSteps = 50;
constexpr double kLogBetaBound = 40.0;
constexpr double kMinGain = 0.01;

// Fills `out` with p_{j|i} for precision `beta` over shifted distances and
// returns the entropy in bits.
double row_distribution(const Eigen::MatrixXd& d, Eigen::Index i, double dmin, double beta,
                        Eigen::Ref<Eigen::RowVectorXd> out)
{
   const Eigen::Index n = d.cols();
   double z = 0.0;
   double weighted = 0.0;
   for(Eigen::Index j = 0; j < n; ++j) {
      if(j == i) {
         out(j) = 0.0;
         continue;
      }
      const double shifted = d(i, j) - dmin;
      const double w = std::exp(-beta * shifted);
      out(j) = w;
      z += w;
      weighted += w * shifted;
   }
   out /= z;
   // H = ln Z + beta * E[shifted distance], converted to bits.
   return (std::log(z) + beta * weighted / z) / std::numbers::ln2;
}

} // namespace

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x)
{
   const Eigen::Index n = x.rows();
   std::vector<Eigen::Index> keep;
   std::vector<double> means, stdevs;
   for(Eigen::Index j = 0; j < x.cols(); ++j) {
      const double mean = x.col(j).mean();
      const double var = (x.col(j).array() - mean).square().sum() / static_cast<double>(n);
      const double sd = std::sqrt(var);
      if(sd < 1e-12) continue;
      keep.push_back(j);
      means.push_back(mean);
      stdevs.push_back(sd);
   }
   Eigen::MatrixXd out(n, static_cast<Eigen::Index>(keep.size()));
   for(std::size_t k = 0; k < keep.size(); ++k)
      out.col(static_cast<Eigen::Index>(k)) = (x.col(keep[k]).array() - means[k]) / stdevs[k];
   return out;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x)
{
   const Eigen::Index n = x.rows();
   Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
   for(Eigen::Index i = 0; i < n; ++i)
      for(Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).squaredNorm();
   return d;
}

ConditionalAffinities conditional_affinities(const Eigen::MatrixXd& d, double perplexity)
{
   const Eigen::Index n = d.rows();
   const double target = std::log2(perplexity);

   ConditionalAffinities out;
   out.p = Eigen::MatrixXd::Zero(n, n);
   out.entropy.resize(static_cast<std::size_t>(n));
   out.beta.resize(static_cast<std::size_t>(n));

   Eigen::RowVectorXd row(n);
   for(Eigen::Index i = 0; i < n; ++i) {
      double dmin = std::numeric_limits<double>::infinity();
      double dsum = 0.0;
      for(Eigen::Index j = 0; j < n; ++j) {
         if(j == i) continue;
         dmin = std::min(dmin, d(i, j));
         dsum += d(i, j);
      }
      // Work in log(beta * scale) so that the bracket is independent of the
      // distance magnitude.
      const double scale = dsum > 0.0 ? static_cast<double>(n - 1) / dsum : 1.0;
      double lo = -kLogBetaBound;
      double hi = kLogBetaBound;
      double log_beta = 0.0;
      double h = row_distribution(d, i, dmin, scale, row);
      for(int step = 0; step < kMaxBisectionSteps && std::abs(h - target) >= kEntropyTolerance; ++step) {
         // Entropy decreases with beta.
         if(h > target)
            lo = log_beta;
         else
            hi = log_beta;
         log_beta = (lo + hi) / 2.0;
         h = row_distribution(d, i, dmin, scale * std::exp(log_beta), row);
      }
      out.p.row(i) = row;
      out.entropy[static_cast<std::size_t>(i)] = h;
      out.beta[static_cast<std::size_t>(i)] = scale * std::exp(log_beta);
   }
   return out;
}

Eigen::MatrixXd joint_affinities(const ConditionalAffinities& cond)
{
   const Eigen::Index n = cond.p.rows();
   Eigen::MatrixXd p = (cond.p + cond.p.transpose()) / (2.0 * static_cast<double>(n));
   for(Eigen::Index i = 0; i < n; ++i)
      for(Eigen::Index j = 0; j < n; ++j) p(i, j) = i == j ? 0.0 : std::max(p(i, j), kAffinityFloor);
   p /= p.sum();
   return p;
}

namespace {

// Student-t kernel numerators (zero diagonal) and their sum.
Eigen::MatrixXd kernel(const Eigen::MatrixXd& y, double& total)
{
   const Eigen::Index n = y.rows();
   Eigen::MatrixXd num = Eigen::MatrixXd::Zero(n, n);
   total = 0.0;
   for(Eigen::Index i = 0; i < n; ++i)
      for(Eigen::Index j = i + 1; j < n; ++j) {
         const double v = 1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm());
         num(i, j) = num(j, i) = v;
         total += 2.0 * v;
      }
   return num;
}

} // namespace

double tsne_kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y)
{
   double total = 0.0;
   const Eigen::MatrixXd num = kernel(y, total);
   double kl = 0.0;
   for(Eigen::Index i = 0; i < p.rows(); ++i)
      for(Eigen::Index j = 0; j < p.cols(); ++j) {
         if(i == j || p(i, j) <= 0.0) continue;
         const double q = std::max(num(i, j) / total, std::numeric_limits<double>::min());
         kl += p(i, j) * std::log(p(i, j) / q);
      }
   return kl;
}

Eigen::MatrixXd tsne_gradient(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y)
{
   double total = 0.0;
   const Eigen::MatrixXd num = kernel(y, total);
   const Eigen::Index n = y.rows();
   Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, y.cols());
   for(Eigen::Index i = 0; i < n; ++i)
      for(Eigen::Index j = 0; j < n; ++j) {
         if(i == j) continue;
         const double w = (p(i, j) - num(i, j) / total) * num(i, j);
         grad.row(i) += 4.0 * w * (y.row(i) - y.row(j));
      }
   return grad;
}

Embedding2D tsne_embed(const Eigen::MatrixXd& features, const TsneParams& params)
{
   const Eigen::Index n = features.rows();
   if(!(params.perplexity > 0.0)) throw Error(ErrorKind::InvalidArgument, "perplexity must be positive");
   if(static_cast<double>(n) < 3.0 * params.perplexity + 1.0)
      throw Error(ErrorKind::TooFewSamples, std::to_string(n) + " samples is too few for perplexity "
                                                + std::to_string(params.perplexity));
   if(!features.allFinite()) throw Error(ErrorKind::NonFiniteInput, "t-SNE input contains non-finite values");

   const Eigen::MatrixXd p = joint_affinities(conditional_affinities(
       squared_distances(standardize_columns(features)), params.perplexity));

   Rng rng(params.seed);
   Eigen::MatrixXd y(n, 2);
   for(Eigen::Index i = 0; i < n; ++i)
      for(Eigen::Index k = 0; k < 2; ++k) y(i, k) = rng.normal(0.0, params.init_stdev);

   Embedding2D out;
   out.seed = params.seed;
   out.initial_kl = tsne_kl_divergence(p, y);

   Eigen::MatrixXd update = Eigen::MatrixXd::Zero(n, 2);
   Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
   const Eigen::MatrixXd p_exaggerated = p * params.early_exaggeration;
   for(std::size_t it = 0; it < params.iterations; ++it) {
      const bool exaggerate = it < params.exaggeration_iterations;
      const Eigen::MatrixXd grad = tsne_gradient(exaggerate ? p_exaggerated : p, y);
      const double momentum
          = it < params.momentum_switch_iteration ? params.initial_momentum : params.final_momentum;
      for(Eigen::Index i = 0; i < n; ++i)
         for(Eigen::Index k = 0; k < 2; ++k) {
            double& g = gains(i, k);
            g = (grad(i, k) > 0.0) != (update(i, k) > 0.0) ? g + 0.2 : g * 0.8;
            g = std::max(g, kMinGain);
            update(i, k) = momentum * update(i, k) - params.learning_rate * g * grad(i, k);
         }
      y += update;
      y.rowwise() -= y.colwise().mean();
   }

   out.points = y;
   out.iterations = params.iterations;
   out.final_kl = tsne_kl_divergence(p, y);
   return out;
}

Embedding2D tsne_embed(const LabeledDataset& data, const TsneParams& params)
{
   data.validate();
   Embedding2D out = tsne_embed(data.features, params);
   out.ids = data.ids;
   out.labels = data.labels;
   return out;
}

double silhouette_score(const Eigen::MatrixXd& points, std::span<const int> labels)
{
   const Eigen::Index n = points.rows();
   if(static_cast<std::size_t>(n) != labels.size())
      throw Error(ErrorKind::DimensionMismatch, "label count does not match point count");
   if(n < 3) throw Error(ErrorKind::TooFewSamples, "silhouette needs at least 3 samples");

   std::map<int, std::size_t> cluster_of;
   for(int l : labels) cluster_of.emplace(l, 0);
   if(cluster_of.size() < 2) throw Error(ErrorKind::SingleCluster, "silhouette needs at least two labels");
   std::size_t next = 0;
   for(auto& [label, idx] : cluster_of) idx = next++;

   const std::size_t k = cluster_of.size();
   std::vector<std::size_t> cluster(static_cast<std::size_t>(n));
   std::vector<std::size_t> sizes(k, 0);
   for(Eigen::Index i = 0; i < n; ++i) {
      cluster[static_cast<std::size_t>(i)] = cluster_of[labels[static_cast<std::size_t>(i)]];
      ++sizes[cluster[static_cast<std::size_t>(i)]];
   }

   double total = 0.0;
   std::vector<double> dist_sum(k);
   for(Eigen::Index i = 0; i < n; ++i) {
      const auto ci = cluster[static_cast<std::size_t>(i)];
      if(sizes[ci] < 2) continue; // singleton: s = 0
      std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
      for(Eigen::Index j = 0; j < n; ++j) {
         if(j == i) continue;
         dist_sum[cluster[static_cast<std::size_t>(j)]] += (points.row(i) - points.row(j)).norm();
      }
      const double a = dist_sum[ci] / static_cast<double>(sizes[ci] - 1);
      double b = std::numeric_limits<double>::infinity();
      for(std::size_t c = 0; c < k; ++c)
         if(c != ci) b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
      const double denom = std::max(a, b);
      if(denom > 0.0) total += (b - a) / denom;
   }
   return total / static_cast<double>(n);
}

double silhouette_score(const Eigen::MatrixXd& points, std::span<const GestureClass> labels)
{
   std::vector<int> codes;
   codes.reserve(labels.size());
   for(auto l : labels) codes.push_back(static_cast<int>(code(l)));
   return silhouette_score(points, codes);
}

std::vector<ClassGaussian> fit_class_gaussians(const Embedding2D& embedding)
{
   const auto n = static_cast<std::size_t>(embedding.points.rows());
   if(embedding.labels.size() != n || embedding.points.cols() != 2)
      throw Error(ErrorKind::DimensionMismatch, "embedding must be N x 2 with one label per row");

   std::vector<ClassGaussian> out;
   for(auto cls : kAllClasses) {
      std::vector<Eigen::Index> rows;
      for(std::size_t i = 0; i < n; ++i)
         if(embedding.labels[i] == cls) rows.push_back(static_cast<Eigen::Index>(i));
      if(rows.empty()) continue;
      if(rows.size() < 2)
         throw Error(ErrorKind::ClassTooSmall,
                     "class '" + std::string(class_name(cls)) + "' has a single embedded point", code(cls));

      ClassGaussian g;
      g.label = cls;
      g.count = rows.size();
      Eigen::Vector2d sum = Eigen::Vector2d::Zero();
      for(auto r : rows) sum += embedding.points.row(r).transpose();
      g.mean = sum / static_cast<double>(rows.size());

      Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
      for(auto r : rows) {
         const Eigen::Vector2d c = embedding.points.row(r).transpose() - g.mean;
         cov += c * c.transpose();
      }
      cov /= static_cast<double>(rows.size() - 1);
      cov(0, 1) = cov(1, 0) = (cov(0, 1) + cov(1, 0)) / 2.0;
      cov.diagonal().array() += kCovarianceRidge;
      g.covariance = cov;

      const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
      const Eigen::Vector2d major = eig.eigenvectors().col(1);
      g.ellipse.center = g.mean;
      g.ellipse.semi_major = kEllipseSigmas * std::sqrt(eig.eigenvalues()(1));
      g.ellipse.semi_minor = kEllipseSigmas * std::sqrt(eig.eigenvalues()(0));
      double angle = std::atan2(major.y(), major.x());
      // An axis has no direction; report it in (-pi/2, pi/2].
      if(angle > std::numbers::pi / 2) angle -= std::numbers::pi;
      if(angle <= -std::numbers::pi / 2) angle += std::numbers::pi;
      g.ellipse.angle = angle;
      out.push_back(g);
   }
   return out;
}

} // namespace gesture
