#include "gesture/error.hpp"

namespace gesture {

const char* to_string(ErrorKind kind) noexcept
{
   switch(kind) {
   case ErrorKind::DegenerateTorso: return "DegenerateTorso";
   case ErrorKind::EmptySequence: return "EmptySequence";
   case ErrorKind::TooFewFrames: return "TooFewFrames";
   case ErrorKind::ClassTooSmall: return "ClassTooSmall";
   case ErrorKind::EmptyTrainingSet: return "EmptyTrainingSet";
   case ErrorKind::EmptyTestSet: return "EmptyTestSet";
   case ErrorKind::DimensionMismatch: return "DimensionMismatch";
   case ErrorKind::TooFewSamples: return "TooFewSamples";
   case ErrorKind::NonFiniteInput: return "NonFiniteInput";
   case ErrorKind::SingleCluster: return "SingleCluster";
   case ErrorKind::MalformedFile: return "MalformedFile";
   case ErrorKind::SchemaViolation: return "SchemaViolation";
   case ErrorKind::VersionUnsupported: return "VersionUnsupported";
   case ErrorKind::KeypointNeverValid: return "KeypointNeverValid";
   case ErrorKind::TorsoUnrecoverable: return "TorsoUnrecoverable";
   case ErrorKind::MissingRange: return "MissingRange";
   case ErrorKind::RangeOutOfBounds: return "RangeOutOfBounds";
   case ErrorKind::InvalidData: return "InvalidData";
   case ErrorKind::InvalidArgument: return "InvalidArgument";
   case ErrorKind::Io: return "Io";
   }
   return "Unknown";
}

} // namespace gesture
