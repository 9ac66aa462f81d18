#include "gesture/features.hpp"

#include "gesture/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gesture {

namespace {

double wrist_speed_mean(const NormalizedSequence& seq, std::size_t k)
{
   const auto& f = seq.frames;
   double sum = 0.0;
   for(std::size_t t = 1; t < f.size(); ++t) sum += distance(f[t].points[k], f[t - 1].points[k]);
   return sum / static_cast<double>(f.size() - 1);
}

// Mean norm of the change between consecutive velocity vectors.
double wrist_accel_mean(const NormalizedSequence& seq, std::size_t k)
{
   const auto& f = seq.frames;
   double sum = 0.0;
   for(std::size_t t = 2; t < f.size(); ++t) {
      const Point2 v_now = f[t].points[k] - f[t - 1].points[k];
      const Point2 v_prev = f[t - 1].points[k] - f[t - 2].points[k];
      sum += norm(v_now - v_prev);
   }
   return sum / static_cast<double>(f.size() - 2);
}

} // namespace

std::vector<double> StaticFeatures::values() const
{
   std::vector<double> v;
   v.reserve(kNumStaticFeatures);
   v.insert(v.end(), mean_x.begin(), mean_x.end());
   v.insert(v.end(), mean_y.begin(), mean_y.end());
   v.insert(v.end(), max_x.begin(), max_x.end());
   v.insert(v.end(), max_y.begin(), max_y.end());
   v.push_back(dist_lw_ls);
   v.push_back(dist_rw_rs);
   v.push_back(dist_lw_rw);
   return v;
}

std::vector<double> DynamicFeatures::values() const
{
   return {vel_lw, vel_rw, vel_ratio, acc_lw, acc_rw};
}

std::string_view subset_name(FeatureSubset s) noexcept
{
   switch(s) {
   case FeatureSubset::Static: return "static";
   case FeatureSubset::Dynamic: return "dynamic";
   case FeatureSubset::Combined: return "combined";
   }
   return "combined";
}

std::optional<FeatureSubset> parse_subset(std::string_view name) noexcept
{
   if(name == "static") return FeatureSubset::Static;
   if(name == "dynamic") return FeatureSubset::Dynamic;
   if(name == "combined") return FeatureSubset::Combined;
   return std::nullopt;
}

std::size_t subset_size(FeatureSubset s) noexcept
{
   switch(s) {
   case FeatureSubset::Static: return kNumStaticFeatures;
   case FeatureSubset::Dynamic: return kNumDynamicFeatures;
   case FeatureSubset::Combined: return kNumFeatures;
   }
   return kNumFeatures;
}

std::vector<std::string> feature_names(FeatureSubset s)
{
   std::vector<std::string> names;
   names.reserve(subset_size(s));
   if(s != FeatureSubset::Dynamic) {
      for(const char* stat : {"mean_x_", "mean_y_", "max_x_", "max_y_"})
         for(std::size_t i = 0; i < kNumKeypoints; ++i) names.push_back(stat + std::string(keypoint_name(i)));
      names.insert(names.end(), {"dist_lw_ls", "dist_rw_rs", "dist_lw_rw"});
   }
   if(s != FeatureSubset::Static) names.insert(names.end(), {"vel_lw", "vel_rw", "vel_ratio", "acc_lw", "acc_rw"});
   return names;
}

std::size_t feature_index(std::string_view name)
{
   static const auto names = feature_names(FeatureSubset::Combined);
   const auto it = std::find(names.begin(), names.end(), name);
   if(it == names.end()) throw Error(ErrorKind::InvalidArgument, "unknown feature '" + std::string(name) + "'");
   return static_cast<std::size_t>(it - names.begin());
}

StaticFeatures static_features(const NormalizedSequence& seq)
{
   if(seq.frames.empty()) throw Error(ErrorKind::EmptySequence, "no frames in '" + seq.source_id + "'");

   StaticFeatures out;
   out.max_x.fill(-std::numeric_limits<double>::infinity());
   out.max_y.fill(-std::numeric_limits<double>::infinity());
   for(const auto& f : seq.frames) {
      for(std::size_t i = 0; i < kNumKeypoints; ++i) {
         out.mean_x[i] += f.points[i].x;
         out.mean_y[i] += f.points[i].y;
         out.max_x[i] = std::max(out.max_x[i], f.points[i].x);
         out.max_y[i] = std::max(out.max_y[i], f.points[i].y);
      }
      out.dist_lw_ls += distance(f.points[kp::LW], f.points[kp::LS]);
      out.dist_rw_rs += distance(f.points[kp::RW], f.points[kp::RS]);
      out.dist_lw_rw += distance(f.points[kp::LW], f.points[kp::RW]);
   }

   const double n = static_cast<double>(seq.frames.size());
   for(std::size_t i = 0; i < kNumKeypoints; ++i) {
      out.mean_x[i] /= n;
      out.mean_y[i] /= n;
      // A mean can exceed the max it came from by one ulp of summation error.
      out.mean_x[i] = std::min(out.mean_x[i], out.max_x[i]);
      out.mean_y[i] = std::min(out.mean_y[i], out.max_y[i]);
   }
   out.dist_lw_ls /= n;
   out.dist_rw_rs /= n;
   out.dist_lw_rw /= n;
   return out;
}

DynamicFeatures dynamic_features(const NormalizedSequence& seq)
{
   if(seq.frames.size() < 3)
      throw Error(ErrorKind::TooFewFrames,
                  "'" + seq.source_id + "' has " + std::to_string(seq.frames.size())
                      + " frames; dynamic features need at least 3");
   DynamicFeatures out;
   out.vel_lw = wrist_speed_mean(seq, kp::LW);
   out.vel_rw = wrist_speed_mean(seq, kp::RW);
   out.vel_ratio = out.vel_lw / (out.vel_rw + kVelocityRatioEpsilon);
   out.acc_lw = wrist_accel_mean(seq, kp::LW);
   out.acc_rw = wrist_accel_mean(seq, kp::RW);
   return out;
}

FeatureVector extract_feature_vector(const NormalizedSequence& seq, FeatureSubset subset)
{
   FeatureVector fv;
   fv.subset = subset;
   fv.values.reserve(subset_size(subset));
   if(subset != FeatureSubset::Dynamic) {
      const auto s = static_features(seq).values();
      fv.values.insert(fv.values.end(), s.begin(), s.end());
   }
   if(subset != FeatureSubset::Static) {
      const auto d = dynamic_features(seq).values();
      fv.values.insert(fv.values.end(), d.begin(), d.end());
   }
   for(std::size_t i = 0; i < fv.values.size(); ++i)
      if(!std::isfinite(fv.values[i]))
         throw Error(ErrorKind::NonFiniteInput, "non-finite feature in '" + seq.source_id + "'", i);
   return fv;
}

FeatureVector extract_feature_vector(const KeypointSequence& seq, FeatureSubset subset)
{
   if(seq.frames.empty()) throw Error(ErrorKind::EmptySequence, "no frames in '" + seq.source_id + "'");
   if(subset != FeatureSubset::Static && seq.frames.size() < 3)
      throw Error(ErrorKind::TooFewFrames,
                  "'" + seq.source_id + "' has " + std::to_string(seq.frames.size())
                      + " frames; dynamic features need at least 3");
   return extract_feature_vector(normalize_sequence(seq), subset);
}

} // namespace gesture
