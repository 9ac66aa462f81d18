#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gesture {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
   x += 0x9E3779B97F4A7C15ull;
   x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
   x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
   return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a stream index. Used for
/// per-tree, per-class and per-sequence seeds so that results never depend
/// on the order in which work items are scheduled.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
   return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept
{
   return mix_seed(mix_seed(seed, a), b);
}

// std::*_distribution output is implementation-defined, so the few
// distributions we need are derived directly from the engine's bits to keep
// generated corpora and models byte-stable across standard libraries.
class Rng
{
 public:
   explicit Rng(std::uint64_t seed) : engine_(seed) {}

   std::uint64_t next_u64() { return engine_(); }

   /// Uniform in [0, 1).
   double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

   double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

   /// Uniform integer in [0, n). n must be positive.
   std::uint64_t below(std::uint64_t n)
   {
      // Rejection sampling to avoid modulo bias.
      const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
      std::uint64_t r = engine_();
      while(r >= limit) r = engine_();
      return r % n;
   }

   /// Standard normal via Box-Muller (no cached second variate).
   double normal()
   {
      double u1 = uniform();
      while(u1 <= 0.0) u1 = uniform();
      const double u2 = uniform();
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
   }

   double normal(double mean, double stdev) { return mean + stdev * normal(); }

   template<typename RandomIt> void shuffle(RandomIt first, RandomIt last)
   {
      const auto n = static_cast<std::uint64_t>(last - first);
      for(std::uint64_t i = n; i > 1; --i) {
         const auto j = below(i);
         std::swap(first[i - 1], first[j]);
      }
   }

 private:
   std::mt19937_64 engine_;
};

} // namespace gesture
