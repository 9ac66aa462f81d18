#include "gesture/skeleton.hpp"

#include "gesture/error.hpp"

#include <cmath>

namespace gesture {

namespace {

constexpr std::array<std::string_view, kNumKeypoints> kKeypointNames = {
    "nose",       "left_eye",       "right_eye",      "left_ear",    "right_ear",   "left_shoulder",
    "right_shoulder", "left_elbow", "right_elbow",    "left_wrist",  "right_wrist", "left_hip",
    "right_hip",  "left_knee",      "right_knee",     "left_ankle",  "right_ankle"};

constexpr std::array<std::string_view, kNumClasses> kClassNames
    = {"stop", "go", "thank_greet", "no_gesture"};

} // namespace

std::string_view keypoint_name(std::size_t i)
{
   if(i >= kNumKeypoints)
      throw Error(ErrorKind::InvalidArgument, "keypoint index out of range", i);
   return kKeypointNames[i];
}

std::string_view class_name(GestureClass c) noexcept { return kClassNames[code(c)]; }

std::optional<GestureClass> parse_class(std::string_view name) noexcept
{
   for(std::size_t i = 0; i < kNumClasses; ++i)
      if(kClassNames[i] == name) return static_cast<GestureClass>(i);
   return std::nullopt;
}

GestureClass class_from_code(std::size_t c)
{
   if(c >= kNumClasses) throw Error(ErrorKind::InvalidArgument, "gesture class code out of range", c);
   return static_cast<GestureClass>(c);
}

double norm(Point2 p) noexcept { return std::hypot(p.x, p.y); }
double distance(Point2 a, Point2 b) noexcept { return norm(a - b); }

void RawFrame::validate() const
{
   for(std::size_t i = 0; i < kNumKeypoints; ++i) {
      if(!std::isfinite(points[i].x) || !std::isfinite(points[i].y))
         throw Error(ErrorKind::NonFiniteInput, "non-finite coordinate", i);
      if(!(confidence[i] >= 0.0 && confidence[i] <= 1.0))
         throw Error(ErrorKind::SchemaViolation, "confidence outside [0, 1]", i);
   }
}

void KeypointSequence::validate() const
{
   if(frames.empty()) throw Error(ErrorKind::EmptySequence, "sequence '" + source_id + "' has no frames");
   if(!(fps > 0.0) || !std::isfinite(fps))
      throw Error(ErrorKind::SchemaViolation, "fps must be positive in '" + source_id + "'");
   for(std::size_t t = 0; t < frames.size(); ++t) {
      try {
         frames[t].validate();
      } catch(const Error& e) {
         throw Error(e.kind(), "frame " + std::to_string(t) + " of '" + source_id + "': " + e.what(), t);
      }
   }
   if(gesture_range) {
      const auto& r = *gesture_range;
      if(!(r.start < r.end && r.end <= frames.size()))
         throw Error(ErrorKind::RangeOutOfBounds,
                     "gesture range [" + std::to_string(r.start) + ", " + std::to_string(r.end)
                         + ") invalid for " + std::to_string(frames.size()) + " frames");
   }
}

double torso_size(const RawFrame& f)
{
   const auto& p = f.points;
   const double ts = (distance(p[kp::LS], p[kp::LH]) + distance(p[kp::LS], p[kp::RH])
                      + distance(p[kp::RS], p[kp::LH]) + distance(p[kp::RS], p[kp::RH]))
                     / 4.0;
   if(!(ts >= kMinTorsoSize))
      throw Error(ErrorKind::DegenerateTorso, "torso size " + std::to_string(ts) + " px below threshold");
   return ts;
}

Point2 center_point(const RawFrame& f) noexcept
{
   return {(f.points[kp::LH].x + f.points[kp::RH].x) / 2.0,
           (f.points[kp::LH].y + f.points[kp::RH].y) / 2.0};
}

NormalizedFrame normalize_frame(const RawFrame& f)
{
   NormalizedFrame out;
   out.torso_size = torso_size(f);
   out.center = center_point(f);
   for(std::size_t i = 0; i < kNumKeypoints; ++i) {
      out.points[i].x = (f.points[i].x - out.center.x) / out.torso_size;
      out.points[i].y = (out.center.y - f.points[i].y) / out.torso_size;
   }
   return out;
}

NormalizedSequence normalize_sequence(const KeypointSequence& seq)
{
   NormalizedSequence out;
   out.fps = seq.fps;
   out.source_id = seq.source_id;
   out.label = seq.label;
   out.frames.reserve(seq.frames.size());
   for(std::size_t t = 0; t < seq.frames.size(); ++t) {
      try {
         out.frames.push_back(normalize_frame(seq.frames[t]));
      } catch(const Error& e) {
         if(e.kind() != ErrorKind::DegenerateTorso) throw;
         throw Error(ErrorKind::DegenerateTorso,
                     "frame " + std::to_string(t) + " of '" + seq.source_id + "' has a degenerate torso",
                     t);
      }
   }
   return out;
}

} // namespace gesture
