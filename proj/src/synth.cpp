#include "gesture/synth.hpp"

#include "gesture/error.hpp"
#include "gesture/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gesture {

namespace {

using std::numbers::pi;

constexpr std::array<Primitive, 3> kStopPrimitives = {Primitive::OverheadRaise, Primitive::ChestExtend,
                                                      Primitive::VerticalWave};
constexpr std::array<Primitive, 1> kGoPrimitives = {Primitive::SideSwing};
constexpr std::array<Primitive, 3> kThankGreetPrimitives = {Primitive::HeadRaise, Primitive::NearHeadWave,
                                                            Primitive::ThumbsUp};
constexpr std::array<Primitive, 1> kNoGesturePrimitives = {Primitive::IdleSway};

// Fraction of the clip spent raising (and lowering) the arm.
constexpr double kRampFraction = 0.12;
constexpr double kIdleSwayHz = 0.25;
constexpr double kHoldDriftHz = 0.3;

// Per-sequence randomization of body, placement and motion.
struct Variation
{
   double height = 600.0;
   double center_x = 960.0;
   double ground_y = 950.0;
   double arm_scale = 1.0;
   double amplitude = 1.0;
   double frequency = 1.0;
   double phase = 0.0;
   double idle_phase = 0.0;
   double rest_upper = 0.06; // resting arm angles of this subject
   double rest_fore = 0.10;
   double ramp_start = 0.0; // envelope level at the first frame
   double ramp_end = 0.0;   // envelope level at the last frame
   double pose_offset = 0.0; // radians added to the held arm angles
};

// Arm configuration. Angles are measured from hanging straight down,
// positive away from the body's midline and upwards; `reach` < 1
// foreshortens an arm pointing towards the camera.
struct ArmPose
{
   double upper = 0.06;
   double fore = 0.10;
   double reach = 1.0;
};

double smoothstep(double x)
{
   x = std::clamp(x, 0.0, 1.0);
   return x * x * (3.0 - 2.0 * x);
}

// Raise-hold-lower envelope over normalized time u in [0, 1]. A clip holds
// only the gesture-positive frames, so it opens and closes with the arm
// already part of the way up (`start`, `end`).
double envelope(double u, double start, double end)
{
   const double rise = start + (1.0 - start) * smoothstep(u / kRampFraction);
   const double fall = end + (1.0 - end) * smoothstep((1.0 - u) / kRampFraction);
   return std::min(rise, fall);
}

ArmPose idle_arm(double t, const Variation& v)
{
   const double sway = 0.03 * std::sin(2.0 * pi * kIdleSwayHz * t + v.idle_phase);
   return {v.rest_upper + sway, v.rest_fore + sway, 1.0};
}


ArmPose gesture_arm(Primitive p, double u, double t, const Variation& v)
{
   const double e = envelope(u, v.ramp_start, v.ramp_end);
   const double a = v.amplitude;
   const double o = v.pose_offset;
   auto wave = [&](double hz) { return std::sin(2.0 * pi * hz * v.frequency * t + v.phase); };
   const ArmPose rest = idle_arm(t, v);
   auto blend = [&](ArmPose target) {
      return ArmPose{rest.upper + e * (target.upper - rest.upper), rest.fore + e * (target.fore - rest.fore),
                     1.0 + e * (target.reach - 1.0)};
   };

   switch(p) {
   case Primitive::OverheadRaise: {
      // A held hand drifts slowly.
      const double drift = 0.55 * a * wave(kHoldDriftHz);
      return blend({2.75 + o, 2.95 + o + drift, 1.0});
   }
   case Primitive::ChestExtend: {
      // Palm pushed towards the viewer in slow repeated thrusts.
      const double push = 0.35 * a * wave(kStopVerticalWaveHz);
      return blend({1.45 + o + 0.5 * push, 1.65 + o + push, 0.40 + push});
   }
   case Primitive::VerticalWave: {
      const double swing = 0.60 * a * wave(kStopVerticalWaveHz);
      return blend({1.45 + o + swing, 1.55 + o + swing, 1.0});
   }
   case Primitive::SideSwing: {
      const double swing = 0.60 * a * wave(kGoSwingHz);
      return blend({0.55 + o + swing, 0.90 + o + swing, 1.0});
   }
   case Primitive::HeadRaise: return blend({2.60 + o, 2.85 + o + 0.55 * a * wave(kThankGreetWaveHz), 1.0});
   case Primitive::NearHeadWave: return blend({2.10 + o, 2.60 + o + 0.70 * a * wave(kThankGreetWaveHz), 1.0});
   case Primitive::ThumbsUp: {
      // Fist held in front of the chest, pumped briskly.
      const double pump = 0.90 * a * wave(kThankGreetWaveHz);
      return blend({0.15 + o, -2.00 + o + pump, 0.8});
   }
   case Primitive::IdleSway: return rest;
   }
   return rest;
}

Variation draw_variation(const SynthParams& params, Rng& rng)
{
   Variation v;
   v.height = params.body_height * rng.uniform(0.85, 1.15);
   v.center_x = rng.uniform(760.0, 1160.0);
   v.ground_y = rng.uniform(900.0, 1000.0);
   v.arm_scale = rng.uniform(0.95, 1.05);
   v.amplitude = rng.uniform(0.8, 1.2);
   v.frequency = rng.uniform(0.85, 1.15);
   v.phase = rng.uniform(0.0, 2.0 * pi);
   v.idle_phase = rng.uniform(0.0, 2.0 * pi);
   v.rest_upper = rng.uniform(0.0, 0.6);
   v.rest_fore = rng.uniform(-1.6, 0.3);
   v.ramp_start = rng.uniform(0.4, 0.7);
   v.ramp_end = rng.uniform(0.4, 0.7);
   v.pose_offset = rng.uniform(-0.25, 0.25);
   return v;
}

// Body-frame coordinates: x towards the subject's left (image right for a
// subject facing the camera), y up from the ground, in pixels.
RawFrame render(const Variation& v, ArmPose left, ArmPose right, double t, bool idle)
{
   namespace A = anthropometry;
   const double h = v.height;
   const double sway = (idle ? 0.015 : 0.003) * h * std::sin(2.0 * pi * kIdleSwayHz * t + v.idle_phase);

   std::array<Point2, kNumKeypoints> b{};
   const double sw = A::kShoulderWidth * h / 2.0;
   const double hw = A::kHipWidth * h / 2.0;
   b[index(Keypoint::Nose)] = {0.0, 0.925 * h};
   b[index(Keypoint::LeftEye)] = {0.02 * h, 0.94 * h};
   b[index(Keypoint::RightEye)] = {-0.02 * h, 0.94 * h};
   b[index(Keypoint::LeftEar)] = {0.045 * h, 0.93 * h};
   b[index(Keypoint::RightEar)] = {-0.045 * h, 0.93 * h};
   b[kp::LS] = {sw, A::kShoulderHeight * h};
   b[kp::RS] = {-sw, A::kShoulderHeight * h};
   b[kp::LH] = {hw, A::kHipHeight * h};
   b[kp::RH] = {-hw, A::kHipHeight * h};
   b[index(Keypoint::LeftKnee)] = {hw * 1.05, 0.285 * h};
   b[index(Keypoint::RightKnee)] = {-hw * 1.05, 0.285 * h};
   b[index(Keypoint::LeftAnkle)] = {hw * 1.1, 0.04 * h};
   b[index(Keypoint::RightAnkle)] = {-hw * 1.1, 0.04 * h};

   // Raising an arm above shoulder level lifts that shoulder a little.
   auto lift = [&](const ArmPose& arm) { return 0.03 * h * std::clamp((arm.upper - pi / 2) / (pi / 2), 0.0, 1.0); };
   b[kp::LS].y += lift(left);
   b[kp::RS].y += lift(right);

   auto place_arm = [&](std::size_t shoulder, std::size_t elbow, std::size_t wrist, const ArmPose& arm, double side) {
      const double upper = A::kUpperArm * v.arm_scale * h * arm.reach;
      const double fore = A::kForearm * v.arm_scale * h * arm.reach;
      b[elbow] = b[shoulder] + upper * Point2{side * std::sin(arm.upper), -std::cos(arm.upper)};
      b[wrist] = b[elbow] + fore * Point2{side * std::sin(arm.fore), -std::cos(arm.fore)};
   };
   place_arm(kp::LS, index(Keypoint::LeftElbow), kp::LW, left, +1.0);
   place_arm(kp::RS, index(Keypoint::RightElbow), kp::RW, right, -1.0);


   RawFrame f;
   for(std::size_t i = 0; i < kNumKeypoints; ++i) {
      // Upper body sways more than the feet.
      const double weight = std::clamp(b[i].y / h, 0.0, 1.0);
      f.points[i] = {v.center_x + b[i].x + sway * weight, v.ground_y - b[i].y};
   }
   return f;
}

} // namespace

void SynthParams::validate() const
{
   if(!(fps > 0.0)) throw Error(ErrorKind::InvalidArgument, "fps must be positive");
   for(const auto& d : durations)
      if(!(d.min_seconds > 0.0 && d.min_seconds <= d.max_seconds))
         throw Error(ErrorKind::InvalidArgument, "duration bounds must be positive and ordered");
   if(!(noise_sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise sigma must be non-negative");
   if(!(0.0 <= confidence_min && confidence_min <= confidence_max && confidence_max <= 1.0))
      throw Error(ErrorKind::InvalidArgument, "confidence range must lie within [0, 1]");
   if(!(body_height > 0.0)) throw Error(ErrorKind::InvalidArgument, "body height must be positive");
}

std::string_view primitive_name(Primitive p) noexcept
{
   switch(p) {
   case Primitive::OverheadRaise: return "overhead_raise";
   case Primitive::ChestExtend: return "chest_extend";
   case Primitive::VerticalWave: return "vertical_wave";
   case Primitive::SideSwing: return "side_swing";
   case Primitive::HeadRaise: return "head_raise";
   case Primitive::NearHeadWave: return "near_head_wave";
   case Primitive::ThumbsUp: return "thumbs_up";
   case Primitive::IdleSway: return "idle_sway";
   }
   return "idle_sway";
}

GestureClass primitive_class(Primitive p) noexcept
{
   switch(p) {
   case Primitive::OverheadRaise:
   case Primitive::ChestExtend:
   case Primitive::VerticalWave: return GestureClass::Stop;
   case Primitive::SideSwing: return GestureClass::Go;
   case Primitive::HeadRaise:
   case Primitive::NearHeadWave:
   case Primitive::ThumbsUp: return GestureClass::ThankGreet;
   case Primitive::IdleSway: return GestureClass::NoGesture;
   }
   return GestureClass::NoGesture;
}

std::span<const Primitive> class_primitives(GestureClass c) noexcept
{
   switch(c) {
   case GestureClass::Stop: return kStopPrimitives;
   case GestureClass::Go: return kGoPrimitives;
   case GestureClass::ThankGreet: return kThankGreetPrimitives;
   case GestureClass::NoGesture: return kNoGesturePrimitives;
   }
   return kNoGesturePrimitives;
}

KeypointSequence generate_sequence(Primitive primitive, const SynthParams& params, std::uint64_t seed)
{
   params.validate();
   const GestureClass cls = primitive_class(primitive);
   Rng rng(seed);

   const auto& bounds = params.durations[code(cls)];
   const double duration = rng.uniform(bounds.min_seconds, bounds.max_seconds);
   const auto lo = static_cast<std::size_t>(std::ceil(bounds.min_seconds * params.fps));
   const auto hi = static_cast<std::size_t>(std::floor(bounds.max_seconds * params.fps));
   auto n_frames = static_cast<std::size_t>(std::llround(duration * params.fps));
   n_frames = std::max<std::size_t>(std::clamp(n_frames, lo, std::max(lo, hi)), 3);

   const Variation v = draw_variation(params, rng);
   const bool idle = primitive == Primitive::IdleSway;

   KeypointSequence seq;
   seq.fps = params.fps;
   seq.label = cls;
   seq.frames.reserve(n_frames);
   for(std::size_t k = 0; k < n_frames; ++k) {
      const double t = static_cast<double>(k) / params.fps;
      const double u = n_frames > 1 ? static_cast<double>(k) / static_cast<double>(n_frames - 1) : 0.0;
      const ArmPose active = gesture_arm(primitive, u, t, v);
      const ArmPose passive = idle_arm(t + 0.5, v);
      RawFrame f = params.left_handed ? render(v, active, passive, t, idle) : render(v, passive, active, t, idle);
      for(std::size_t i = 0; i < kNumKeypoints; ++i) {
         if(params.noise_sigma > 0.0) {
            f.points[i].x += rng.normal(0.0, params.noise_sigma);
            f.points[i].y += rng.normal(0.0, params.noise_sigma);
         }
         f.confidence[i] = rng.uniform(params.confidence_min, params.confidence_max);
      }
      seq.frames.push_back(f);
   }
   return seq;
}

KeypointSequence generate_sequence(GestureClass cls, const SynthParams& params, std::uint64_t seed)
{
   const auto options = class_primitives(cls);
   Rng pick(mix_seed(seed, 0x5EEDull));
   const Primitive p = options[static_cast<std::size_t>(pick.below(options.size()))];
   return generate_sequence(p, params, seed);
}

SyntheticCorpus generate_corpus(const SynthParams& params, std::span<const std::size_t, kNumClasses> counts,
                                std::uint64_t seed)
{
   params.validate();
   SyntheticCorpus corpus;
   corpus.manifest.fps_default = params.fps;
   for(auto cls : kAllClasses) {
      for(std::size_t k = 0; k < counts[code(cls)]; ++k) {
         KeypointSequence seq = generate_sequence(cls, params, mix_seed(seed, code(cls), k));
         char id[64];
         std::snprintf(id, sizeof id, "%s_%04zu", std::string(class_name(cls)).c_str(), k);
         seq.source_id = id;
         seq.gesture_range = FrameRange{0, seq.frames.size()};
         corpus.manifest.entries.push_back({"sequences/" + seq.source_id + ".json", cls, seq.gesture_range});
         corpus.sequences.push_back(std::move(seq));
      }
   }

   nlohmann::json gen;
   gen["seed"] = seed;
   gen["counts"] = {counts[0], counts[1], counts[2], counts[3]};
   gen["fps"] = params.fps;
   gen["noise_sigma"] = params.noise_sigma;
   gen["confidence_range"] = {params.confidence_min, params.confidence_max};
   gen["body_height"] = params.body_height;
   gen["left_handed"] = params.left_handed;
   nlohmann::json durations = nlohmann::json::object();
   for(auto cls : kAllClasses)
      durations[std::string(class_name(cls))]
          = {params.durations[code(cls)].min_seconds, params.durations[code(cls)].max_seconds};
   gen["durations_seconds"] = durations;
   corpus.manifest.generator = gen;
   return corpus;
}

std::filesystem::path write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& out_dir)
{
   std::error_code ec;
   std::filesystem::create_directories(out_dir / "sequences", ec);
   if(ec) throw Error(ErrorKind::Io, "cannot create '" + (out_dir / "sequences").string() + "': " + ec.message());
   for(std::size_t k = 0; k < corpus.sequences.size(); ++k)
      write_text_file(out_dir / corpus.manifest.entries[k].path, serialize_sequence(corpus.sequences[k]));
   const auto manifest_path = out_dir / "manifest.json";
   write_text_file(manifest_path, serialize_manifest(corpus.manifest));
   return manifest_path;
}

} // namespace gesture
