#pragma once

#include "gesture/error.hpp"
#include "gesture/skeleton.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gesture {

inline constexpr int kSequenceSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;
inline constexpr double kDefaultFps = 60.0;
inline constexpr double kDefaultConfidenceThreshold = 0.3;

// ----------------------------------------------------------------- sequence file
//
/// Parses a sequence document (see docs/file-formats.md). Unknown top-level
/// fields are skipped and reported through `warnings` when given.
/// Throws MalformedFile, SchemaViolation, VersionUnsupported.
KeypointSequence parse_sequence_file(std::string_view content, std::vector<std::string>* warnings = nullptr,
                                     double default_fps = kDefaultFps);

/// Label and gesture range are manifest metadata and are not written.
std::string serialize_sequence(const KeypointSequence& seq);

// ---------------------------------------------------------------------- manifest
//
struct ManifestEntry
{
   std::string path; // relative to the manifest's directory unless absolute
   GestureClass label = GestureClass::NoGesture;
   std::optional<FrameRange> gesture_range;

   friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest
{
   int schema_version = kManifestSchemaVersion;
   double fps_default = kDefaultFps;
   std::vector<ManifestEntry> entries;
   nlohmann::json generator; // free-form provenance, null when absent

   std::array<std::size_t, kNumClasses> class_counts() const;
};

/// Throws MalformedFile, SchemaViolation (bad label, duplicate path,
/// half-specified or empty range), VersionUnsupported.
DatasetManifest parse_manifest(std::string_view content);
std::string serialize_manifest(const DatasetManifest& manifest);

// -------------------------------------------------------------------- cleaning
//
/// Replaces keypoints whose confidence is below `threshold` by linear
/// interpolation between the nearest valid detections of the same keypoint
/// (nearest valid value at the edges) and sets their confidence to
/// `threshold`. Throws TorsoUnrecoverable when a shoulder or hip is never
/// valid, KeypointNeverValid for any other keypoint.
KeypointSequence repair_low_confidence(const KeypointSequence& seq, double threshold);

/// Keeps frames inside gesture_range and clears the range.
/// Throws MissingRange, RangeOutOfBounds.
KeypointSequence trim_gesture_positive(const KeypointSequence& seq);

// ---------------------------------------------------------------------- loading
//
struct LoadOptions
{
   double confidence_threshold = kDefaultConfidenceThreshold;
   bool fail_fast = false;
};

struct EntryError
{
   std::size_t entry = 0;
   std::string path;
   ErrorKind kind = ErrorKind::Io;
   std::string message;
};

struct LoadedCorpus
{
   std::vector<KeypointSequence> sequences; // manifest order, failed entries skipped
   std::vector<EntryError> errors;
   std::array<std::size_t, kNumClasses> class_counts{};
   std::vector<std::string> warnings;
};

/// Loads, repairs and trims (when a range is given) every entry. Entry
/// failures are collected, or rethrown immediately with `fail_fast`.
LoadedCorpus load_manifest(std::string_view content, const std::filesystem::path& base_dir,
                           const LoadOptions& options = {});

LoadedCorpus load_manifest_file(const std::filesystem::path& manifest_path, const LoadOptions& options = {});

// ---------------------------------------------------------------------- file io
//
/// Throws Io naming the path.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a digest as 16 lowercase hex digits; identifies a corpus.
std::string content_digest(std::string_view content);

} // namespace gesture
