#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gesture {

// ------------------------------------------------------------ COCO-17 keypoints
//
enum class Keypoint : std::uint8_t {
   Nose = 0,
   LeftEye,       // 1
   RightEye,      // 2
   LeftEar,       // 3
   RightEar,      // 4
   LeftShoulder,  // 5
   RightShoulder, // 6
   LeftElbow,     // 7
   RightElbow,    // 8
   LeftWrist,     // 9
   RightWrist,    // 10
   LeftHip,       // 11
   RightHip,      // 12
   LeftKnee,      // 13
   RightKnee,     // 14
   LeftAnkle,     // 15
   RightAnkle     // 16
};

inline constexpr std::size_t kNumKeypoints = 17;

namespace kp {
inline constexpr std::size_t LS = std::size_t(Keypoint::LeftShoulder);
inline constexpr std::size_t RS = std::size_t(Keypoint::RightShoulder);
inline constexpr std::size_t LH = std::size_t(Keypoint::LeftHip);
inline constexpr std::size_t RH = std::size_t(Keypoint::RightHip);
inline constexpr std::size_t LW = std::size_t(Keypoint::LeftWrist);
inline constexpr std::size_t RW = std::size_t(Keypoint::RightWrist);
} // namespace kp

constexpr std::size_t index(Keypoint k) noexcept { return static_cast<std::size_t>(k); }

/// snake_case name, e.g. "left_wrist".
std::string_view keypoint_name(std::size_t index);

// ---------------------------------------------------------------- gesture class
//
enum class GestureClass : std::uint8_t { Stop = 0, Go = 1, ThankGreet = 2, NoGesture = 3 };

inline constexpr std::size_t kNumClasses = 4;
inline constexpr std::array<GestureClass, kNumClasses> kAllClasses
    = {GestureClass::Stop, GestureClass::Go, GestureClass::ThankGreet, GestureClass::NoGesture};

constexpr std::size_t code(GestureClass c) noexcept { return static_cast<std::size_t>(c); }

/// "stop", "go", "thank_greet", "no_gesture".
std::string_view class_name(GestureClass c) noexcept;
std::optional<GestureClass> parse_class(std::string_view name) noexcept;
GestureClass class_from_code(std::size_t code);

// -------------------------------------------------------------------- geometry
//
struct Point2
{
   double x = 0.0;
   double y = 0.0;

   friend Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
   friend Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
   friend Point2 operator*(double s, Point2 a) noexcept { return {s * a.x, s * a.y}; }
   friend bool operator==(const Point2&, const Point2&) = default;
};

double norm(Point2 p) noexcept;
double distance(Point2 a, Point2 b) noexcept;

// ------------------------------------------------------------------- sequences
//
/// One detected skeleton in image pixels (y grows downward).
struct RawFrame
{
   std::array<Point2, kNumKeypoints> points{};
   std::array<double, kNumKeypoints> confidence{};

   void validate() const; // throws NonFiniteInput / SchemaViolation
   friend bool operator==(const RawFrame&, const RawFrame&) = default;
};

/// Half-open frame interval [start, end).
struct FrameRange
{
   std::size_t start = 0;
   std::size_t end = 0;

   std::size_t size() const noexcept { return end - start; }
   friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

struct KeypointSequence
{
   std::vector<RawFrame> frames;
   double fps = 60.0;
   std::string source_id;
   std::optional<GestureClass> label;
   std::optional<FrameRange> gesture_range;

   void validate() const;
   friend bool operator==(const KeypointSequence&, const KeypointSequence&) = default;
};

/// Torso-normalized frame: mid-hip at the origin, unit = torso size, y up.
struct NormalizedFrame
{
   std::array<Point2, kNumKeypoints> points{};
   double torso_size = 0.0;
   Point2 center{};
};

struct NormalizedSequence
{
   std::vector<NormalizedFrame> frames;
   double fps = 60.0;
   std::string source_id;
   std::optional<GestureClass> label;
};

/// Frames whose torso is smaller than this (pixels) cannot be normalized.
inline constexpr double kMinTorsoSize = 1e-3;

/// Mean of the four shoulder-to-hip distances (two straight, two crossed).
/// Throws DegenerateTorso when the result is below kMinTorsoSize.
double torso_size(const RawFrame& frame);

/// Mid-hip point.
Point2 center_point(const RawFrame& frame) noexcept;

/// Maps every keypoint to ((x - cx) / ts, (cy - y) / ts). The y flip makes
/// "up" positive so that a raised hand has a larger normalized y.
NormalizedFrame normalize_frame(const RawFrame& frame);

/// Per-frame normalization. DegenerateTorso errors carry the frame index.
NormalizedSequence normalize_sequence(const KeypointSequence& seq);

} // namespace gesture
