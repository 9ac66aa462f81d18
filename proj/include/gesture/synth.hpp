#pragma once

#include "gesture/ingest.hpp"
#include "gesture/skeleton.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace gesture {

struct DurationBounds
{
   double min_seconds = 1.0;
   double max_seconds = 3.0;
};

struct SynthParams
{
   double fps = kDefaultFps;
   std::array<DurationBounds, kNumClasses> durations = {{{1.5, 4.0}, {1.0, 3.0}, {1.0, 3.0}, {2.0, 5.0}}};
   double noise_sigma = 2.0; // pixels
   double confidence_min = 0.7;
   double confidence_max = 1.0;
   double body_height = 600.0; // pixels
   bool left_handed = true;    // gesturing arm

   void validate() const; // throws InvalidArgument
};

/// Default per-class sequence counts (stop, go, thank_greet, no_gesture).
inline constexpr std::array<std::size_t, kNumClasses> kDefaultCorpusCounts = {53, 28, 48, 51};

// Anthropometric ratios of the template skeleton, as fractions of body height.
namespace anthropometry {
inline constexpr double kShoulderWidth = 0.23;
inline constexpr double kHipWidth = 0.16;
inline constexpr double kUpperArm = 0.17;
inline constexpr double kForearm = 0.15;
inline constexpr double kShoulderHeight = 0.82;
inline constexpr double kHipHeight = 0.53;
} // namespace anthropometry

// Wave frequencies in Hz.
inline constexpr double kThankGreetWaveHz = 2.0;
inline constexpr double kGoSwingHz = 1.0;
inline constexpr double kStopVerticalWaveHz = 0.7;

enum class Primitive : std::uint8_t {
   OverheadRaise, // stop: raise a hand overhead and hold
   ChestExtend,   // stop: arm extended towards the viewer at chest level
   VerticalWave,  // stop: extended arm waved slowly up and down
   SideSwing,     // go: arm swung side to side at chest/hip level
   HeadRaise,     // thank & greet: hand raised to head level
   NearHeadWave,  // thank & greet: quick wave next to the head
   ThumbsUp,      // thank & greet: chest-level thumbs up
   IdleSway,      // no gesture
};

std::string_view primitive_name(Primitive p) noexcept;
GestureClass primitive_class(Primitive p) noexcept;
std::span<const Primitive> class_primitives(GestureClass c) noexcept;

/// Renders one sequence of the given primitive. Deterministic in (primitive, params, seed).
KeypointSequence generate_sequence(Primitive primitive, const SynthParams& params, std::uint64_t seed);

/// Picks one of the class's primitives from the seed, then renders it.
KeypointSequence generate_sequence(GestureClass cls, const SynthParams& params, std::uint64_t seed);

struct SyntheticCorpus
{
   std::vector<KeypointSequence> sequences; // class-major order
   DatasetManifest manifest;                // paths "sequences/<source_id>.json"
};

/// counts[c] sequences per class; sequence k of class c uses seed mix(seed, c, k).
SyntheticCorpus generate_corpus(const SynthParams& params, std::span<const std::size_t, kNumClasses> counts,
                                std::uint64_t seed);

/// Writes every sequence file plus manifest.json under `out_dir` and returns
/// the manifest path. Throws Io.
std::filesystem::path write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& out_dir);

} // namespace gesture
