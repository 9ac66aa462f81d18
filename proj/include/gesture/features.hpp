#pragma once

#include "gesture/skeleton.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gesture {

inline constexpr std::size_t kNumStaticFeatures = 71;
inline constexpr std::size_t kNumDynamicFeatures = 5;
inline constexpr std::size_t kNumFeatures = kNumStaticFeatures + kNumDynamicFeatures;

/// Schema tag carried by every exported feature vector and matrix.
inline constexpr std::string_view kFeatureSchema = "gesture-features/1";

/// Added to the right-wrist speed before forming the left/right speed ratio.
inline constexpr double kVelocityRatioEpsilon = 1e-6;

// Position statistics over a whole sequence, in torso units.
struct StaticFeatures
{
   std::array<double, kNumKeypoints> mean_x{};
   std::array<double, kNumKeypoints> mean_y{};
   std::array<double, kNumKeypoints> max_x{};
   std::array<double, kNumKeypoints> max_y{};
   double dist_lw_ls = 0.0;
   double dist_rw_rs = 0.0;
   double dist_lw_rw = 0.0;

   /// Canonical order: mean_x, mean_y, max_x, max_y (17 each), then the three distances.
   std::vector<double> values() const;
};

// Wrist motion statistics. Speeds are torso units per frame.
struct DynamicFeatures
{
   double vel_lw = 0.0;
   double vel_rw = 0.0;
   double vel_ratio = 0.0;
   double acc_lw = 0.0;
   double acc_rw = 0.0;

   std::vector<double> values() const; // vel_lw, vel_rw, vel_ratio, acc_lw, acc_rw
};

enum class FeatureSubset { Static, Dynamic, Combined };

std::string_view subset_name(FeatureSubset s) noexcept;
std::optional<FeatureSubset> parse_subset(std::string_view name) noexcept;
std::size_t subset_size(FeatureSubset s) noexcept;

/// Column names in canonical order, e.g. "mean_x_nose" ... "acc_rw".
std::vector<std::string> feature_names(FeatureSubset s);

/// Position of `name` in the combined 76-feature ordering.
std::size_t feature_index(std::string_view name);

struct FeatureVector
{
   FeatureSubset subset = FeatureSubset::Combined;
   std::vector<double> values;

   std::size_t size() const noexcept { return values.size(); }
   std::vector<std::string> names() const { return feature_names(subset); }
};

/// Throws EmptySequence for a sequence without frames.
StaticFeatures static_features(const NormalizedSequence& seq);

/// Throws TooFewFrames when the sequence has fewer than 3 frames.
DynamicFeatures dynamic_features(const NormalizedSequence& seq);

FeatureVector extract_feature_vector(const NormalizedSequence& seq, FeatureSubset subset);

/// Normalizes and extracts; propagates DegenerateTorso, EmptySequence, TooFewFrames.
FeatureVector extract_feature_vector(const KeypointSequence& seq, FeatureSubset subset);

} // namespace gesture
