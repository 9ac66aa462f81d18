#pragma once

// Naive reference implementation of the 76 features, written loop by loop
// straight from the definitions. Used by the unit and acceptance tests.

#include "gesture/features.hpp"
#include "gesture/skeleton.hpp"

#include <cmath>
#include <vector>

namespace gesture::testing {

inline std::vector<double> oracle_features(const NormalizedSequence& seq)
{
   const std::size_t T = seq.frames.size();
   std::vector<double> mean_x(17), mean_y(17), max_x(17), max_y(17);
   for(std::size_t i = 0; i < 17; ++i) {
      double sx = 0.0, sy = 0.0;
      double mx = seq.frames[0].points[i].x, my = seq.frames[0].points[i].y;
      for(std::size_t t = 0; t < T; ++t) {
         const double x = seq.frames[t].points[i].x;
         const double y = seq.frames[t].points[i].y;
         sx += x;
         sy += y;
         if(x > mx) mx = x;
         if(y > my) my = y;
      }
      mean_x[i] = sx / double(T);
      mean_y[i] = sy / double(T);
      max_x[i] = mx;
      max_y[i] = my;
   }

   auto mean_distance = [&](std::size_t a, std::size_t b) {
      double s = 0.0;
      for(std::size_t t = 0; t < T; ++t) {
         const double dx = seq.frames[t].points[a].x - seq.frames[t].points[b].x;
         const double dy = seq.frames[t].points[a].y - seq.frames[t].points[b].y;
         s += std::sqrt(dx * dx + dy * dy);
      }
      return s / double(T);
   };

   auto mean_speed = [&](std::size_t k) {
      double s = 0.0;
      for(std::size_t t = 1; t < T; ++t) {
         const double vx = seq.frames[t].points[k].x - seq.frames[t - 1].points[k].x;
         const double vy = seq.frames[t].points[k].y - seq.frames[t - 1].points[k].y;
         s += std::sqrt(vx * vx + vy * vy);
      }
      return s / double(T - 1);
   };

   auto mean_accel = [&](std::size_t k) {
      double s = 0.0;
      for(std::size_t t = 2; t < T; ++t) {
         const double v1x = seq.frames[t].points[k].x - seq.frames[t - 1].points[k].x;
         const double v1y = seq.frames[t].points[k].y - seq.frames[t - 1].points[k].y;
         const double v0x = seq.frames[t - 1].points[k].x - seq.frames[t - 2].points[k].x;
         const double v0y = seq.frames[t - 1].points[k].y - seq.frames[t - 2].points[k].y;
         const double ax = v1x - v0x;
         const double ay = v1y - v0y;
         s += std::sqrt(ax * ax + ay * ay);
      }
      return s / double(T - 2);
   };

   std::vector<double> out;
   for(double v : mean_x) out.push_back(v);
   for(double v : mean_y) out.push_back(v);
   for(double v : max_x) out.push_back(v);
   for(double v : max_y) out.push_back(v);
   out.push_back(mean_distance(9, 5));
   out.push_back(mean_distance(10, 6));
   out.push_back(mean_distance(9, 10));
   const double vl = mean_speed(9);
   const double vr = mean_speed(10);
   out.push_back(vl);
   out.push_back(vr);
   out.push_back(vl / (vr + 1e-6));
   out.push_back(mean_accel(9));
   out.push_back(mean_accel(10));
   return out;
}

/// A normalized sequence with every point at the origin except the ones set.
inline NormalizedSequence zero_sequence(std::size_t n_frames)
{
   NormalizedSequence seq;
   seq.frames.resize(n_frames);
   for(auto& f : seq.frames) f.torso_size = 1.0;
   return seq;
}

/// The three-frame wrist example: LW moves 1 then 2 units along x, RW moves
/// 0.5 units per frame along y.
inline NormalizedSequence three_frame_example()
{
   auto seq = zero_sequence(3);
   const double lw[3] = {0.0, 1.0, 3.0};
   const double rw[3] = {0.0, 0.5, 1.0};
   for(std::size_t t = 0; t < 3; ++t) {
      seq.frames[t].points[9] = {lw[t], 0.0};
      seq.frames[t].points[10] = {0.0, rw[t]};
   }
   return seq;
}

} // namespace gesture::testing
