#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace gesture {

enum class ErrorKind {
   DegenerateTorso,
   EmptySequence,
   TooFewFrames,
   ClassTooSmall,
   EmptyTrainingSet,
   EmptyTestSet,
   DimensionMismatch,
   TooFewSamples,
   NonFiniteInput,
   SingleCluster,
   MalformedFile,
   SchemaViolation,
   VersionUnsupported,
   KeypointNeverValid,
   TorsoUnrecoverable,
   MissingRange,
   RangeOutOfBounds,
   InvalidData, // aggregated per-entry failures
   InvalidArgument,
   Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure in the library surfaces as this exception. `index` carries
// the offending frame, keypoint, or class code when the error has one.
class Error : public std::runtime_error
{
 public:
   Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index = std::nullopt)
       : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), index_(index)
   {}

   ErrorKind kind() const noexcept { return kind_; }
   std::optional<std::size_t> index() const noexcept { return index_; }

 private:
   ErrorKind kind_;
   std::optional<std::size_t> index_;
};

} // namespace gesture
