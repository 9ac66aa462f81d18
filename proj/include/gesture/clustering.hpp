#pragma once

#include "gesture/skeleton.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gesture {

struct LabeledDataset;

// ------------------------------------------------------------------------ t-SNE
//
struct TsneParams
{
   double perplexity = 30.0;
   std::size_t iterations = 1000;
   double learning_rate = 200.0;
   double early_exaggeration = 12.0;
   std::size_t exaggeration_iterations = 250;
   double initial_momentum = 0.5;
   double final_momentum = 0.8;
   std::size_t momentum_switch_iteration = 250;
   double init_stdev = 1e-4;
   std::uint64_t seed = 0;
};

struct Embedding2D
{
   Eigen::MatrixXd points; // N x 2
   std::vector<std::string> ids;
   std::vector<GestureClass> labels;
   double initial_kl = 0.0; // KL of the un-exaggerated P at the initial layout
   double final_kl = 0.0;
   std::size_t iterations = 0;
   std::uint64_t seed = 0;
};

/// Column-wise z-score (population stdev). Columns with stdev below 1e-12
/// are dropped.
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x);

/// Squared Euclidean distances between rows.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x);

struct ConditionalAffinities
{
   Eigen::MatrixXd p;             // row i holds p_{j|i}; zero diagonal
   std::vector<double> entropy;   // bits, per row
   std::vector<double> beta;      // precision 1 / (2 sigma_i^2)
};

/// Per-row bandwidth found by bisection (at most 50 steps, in log space)
/// so that each row's entropy matches log2(perplexity) to 1e-5 bits.
ConditionalAffinities conditional_affinities(const Eigen::MatrixXd& sq_dist, double perplexity);

/// (P + P^T) / (2N), floored at 1e-12 off the diagonal and renormalized.
Eigen::MatrixXd joint_affinities(const ConditionalAffinities& cond);

/// KL(P || Q) for a layout Y (N x 2) under the Student-t kernel.
double tsne_kl_divergence(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y);

/// dKL/dY, N x 2.
Eigen::MatrixXd tsne_gradient(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y);

/// Exact t-SNE on z-scored features. Throws TooFewSamples when
/// N < 3 * perplexity + 1 and NonFiniteInput on NaN/inf.
Embedding2D tsne_embed(const Eigen::MatrixXd& features, const TsneParams& params);

/// As above, carrying ids and labels from the dataset.
Embedding2D tsne_embed(const LabeledDataset& data, const TsneParams& params);

// ------------------------------------------------------------------- silhouette
//
/// Mean silhouette over all samples with Euclidean distance. Singleton
/// clusters and a == b == 0 contribute 0. Throws SingleCluster when fewer
/// than two labels are present and TooFewSamples for N < 3.
double silhouette_score(const Eigen::MatrixXd& points, std::span<const int> labels);

double silhouette_score(const Eigen::MatrixXd& points, std::span<const GestureClass> labels);

// --------------------------------------------------------------- class Gaussians
//
struct Ellipse
{
   Eigen::Vector2d center = Eigen::Vector2d::Zero();
   double semi_major = 0.0; // 2 sigma along the major eigenvector
   double semi_minor = 0.0;
   double angle = 0.0;      // radians, major axis from +x
};

struct ClassGaussian
{
   GestureClass label = GestureClass::Stop;
   std::size_t count = 0;
   Eigen::Vector2d mean = Eigen::Vector2d::Zero();
   Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
   Ellipse ellipse;
};

inline constexpr double kCovarianceRidge = 1e-6;
inline constexpr double kEllipseSigmas = 2.0;

/// Per-class sample mean and unbiased covariance (plus ridge), ordered by
/// class code. Throws ClassTooSmall for a present class with < 2 points.
std::vector<ClassGaussian> fit_class_gaussians(const Embedding2D& embedding);

} // namespace gesture
