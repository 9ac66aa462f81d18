#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "feature_oracle.hpp"
#include "gesture/error.hpp"
#include "gesture/features.hpp"
#include "gesture/random.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace gesture;
using namespace gesture::testing;

namespace {

NormalizedSequence random_normalized(Rng& rng, std::size_t n_frames)
{
   NormalizedSequence seq;
   for(std::size_t t = 0; t < n_frames; ++t) {
      NormalizedFrame f;
      f.torso_size = 1.0;
      for(auto& p : f.points) p = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
      seq.frames.push_back(f);
   }
   return seq;
}

std::vector<double> combined(const NormalizedSequence& seq)
{
   return extract_feature_vector(seq, FeatureSubset::Combined).values;
}

} // namespace

TEST_CASE("subset cardinalities")
{
   CHECK(kNumStaticFeatures == 71);
   CHECK(kNumDynamicFeatures == 5);
   CHECK(kNumFeatures == 76);
   CHECK(subset_size(FeatureSubset::Static) == 71);
   CHECK(subset_size(FeatureSubset::Dynamic) == 5);
   CHECK(subset_size(FeatureSubset::Combined) == 76);

   Rng rng(3);
   const auto seq = random_normalized(rng, 5);
   CHECK(static_features(seq).values().size() == 71);
   CHECK(dynamic_features(seq).values().size() == 5);
   CHECK(extract_feature_vector(seq, FeatureSubset::Static).size() == 71);
   CHECK(extract_feature_vector(seq, FeatureSubset::Dynamic).size() == 5);
   CHECK(extract_feature_vector(seq, FeatureSubset::Combined).size() == 76);
}

TEST_CASE("canonical feature names and indices")
{
   const auto names = feature_names(FeatureSubset::Combined);
   REQUIRE(names.size() == 76);
   CHECK(names[0] == "mean_x_nose");
   CHECK(names[9] == "mean_x_left_wrist");
   CHECK(names[17] == "mean_y_nose");
   CHECK(names[34] == "max_x_nose");
   CHECK(names[51] == "max_y_nose");
   CHECK(names[68] == "dist_lw_ls");
   CHECK(names[69] == "dist_rw_rs");
   CHECK(names[70] == "dist_lw_rw");
   CHECK(names[71] == "vel_lw");
   CHECK(names[72] == "vel_rw");
   CHECK(names[73] == "vel_ratio");
   CHECK(names[74] == "acc_lw");
   CHECK(names[75] == "acc_rw");
   for(std::size_t i = 0; i < names.size(); ++i) CHECK(feature_index(names[i]) == i);
   CHECK_THROWS_AS(feature_index("no_such_feature"), Error);

   const auto st = feature_names(FeatureSubset::Static);
   const auto dy = feature_names(FeatureSubset::Dynamic);
   CHECK(std::equal(st.begin(), st.end(), names.begin()));
   CHECK(std::equal(dy.begin(), dy.end(), names.begin() + 71));
}

TEST_CASE("subset names parse")
{
   for(auto s : {FeatureSubset::Static, FeatureSubset::Dynamic, FeatureSubset::Combined})
      CHECK(parse_subset(subset_name(s)) == s);
   CHECK_FALSE(parse_subset("everything").has_value());
}

TEST_CASE("constant sequence statistics")
{
   Rng rng(11);
   auto seq = random_normalized(rng, 1);
   const auto frame = seq.frames[0];
   for(int k = 0; k < 4; ++k) seq.frames.push_back(frame);
   const auto s = static_features(seq);
   for(std::size_t i = 0; i < kNumKeypoints; ++i) {
      CHECK(s.mean_x[i] == doctest::Approx(frame.points[i].x).epsilon(1e-15));
      CHECK(s.max_x[i] == frame.points[i].x);
      CHECK(s.mean_y[i] == doctest::Approx(frame.points[i].y).epsilon(1e-15));
      CHECK(s.max_y[i] == frame.points[i].y);
   }
   CHECK(s.dist_lw_ls == doctest::Approx(distance(frame.points[9], frame.points[5])));
   CHECK(s.dist_rw_rs == doctest::Approx(distance(frame.points[10], frame.points[6])));
   CHECK(s.dist_lw_rw == doctest::Approx(distance(frame.points[9], frame.points[10])));

   const auto d = dynamic_features(seq);
   CHECK(d.vel_lw == 0.0);
   CHECK(d.vel_rw == 0.0);
   CHECK(d.acc_lw == 0.0);
   CHECK(d.acc_rw == 0.0);
   CHECK(d.vel_ratio == 0.0);
}

TEST_CASE("two-frame static example")
{
   auto seq = zero_sequence(2);
   seq.frames[0].points[9] = {0, 0};
   seq.frames[1].points[9] = {1, 0};
   seq.frames[0].points[5] = {0, 1};
   seq.frames[1].points[5] = {0, 1};
   const auto s = static_features(seq);
   CHECK(s.mean_x[9] == 0.5);
   CHECK(s.max_x[9] == 1.0);
   CHECK(s.dist_lw_ls == doctest::Approx((1.0 + std::sqrt(2.0)) / 2.0).epsilon(1e-15));
   CHECK(s.dist_lw_ls == doctest::Approx(1.207107).epsilon(1e-6));
}

TEST_CASE("three-frame wrist example")
{
   const auto d = dynamic_features(three_frame_example());
   CHECK(d.vel_lw == 1.5);
   CHECK(d.acc_lw == 1.0);
   CHECK(d.vel_rw == 0.5);
   CHECK(d.acc_rw == 0.0);
   CHECK(d.vel_ratio == doctest::Approx(3.0).epsilon(1e-5));
   CHECK(d.vel_ratio == 1.5 / (0.5 + kVelocityRatioEpsilon));
}

TEST_CASE("constant velocity has zero acceleration")
{
   auto seq = zero_sequence(8);
   for(std::size_t t = 0; t < 8; ++t) seq.frames[t].points[9] = {0.25 * double(t), -0.5 * double(t)};
   const auto d = dynamic_features(seq);
   CHECK(d.acc_lw == doctest::Approx(0.0));
   CHECK(d.vel_lw == doctest::Approx(std::sqrt(0.25 * 0.25 + 0.5 * 0.5)));
}

TEST_CASE("length preconditions")
{
   CHECK_THROWS_AS(static_features(NormalizedSequence{}), Error);
   try {
      static_features(NormalizedSequence{});
   } catch(const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptySequence);
   }
   Rng rng(5);
   const auto two = random_normalized(rng, 2);
   CHECK_NOTHROW(static_features(two));
   try {
      dynamic_features(two);
      FAIL("expected TooFewFrames");
   } catch(const Error& e) {
      CHECK(e.kind() == ErrorKind::TooFewFrames);
   }
   CHECK_NOTHROW(extract_feature_vector(two, FeatureSubset::Static));
   CHECK_THROWS_AS(extract_feature_vector(two, FeatureSubset::Combined), Error);
}

TEST_CASE("extraction propagates degenerate torso")
{
   Rng rng(8);
   auto seq = random_sequence(rng, 4);
   for(auto k : {kp::LS, kp::RS, kp::LH, kp::RH}) seq.frames[1].points[k] = {10.0, 10.0};
   try {
      extract_feature_vector(seq, FeatureSubset::Combined);
      FAIL("expected DegenerateTorso");
   } catch(const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateTorso);
      CHECK(e.index() == std::optional<std::size_t>(1));
   }
}

TEST_CASE("property: every feature matches the naive oracle")
{
   Rng rng(20240601);
   for(int trial = 0; trial < 100; ++trial) {
      const auto raw = random_sequence(rng, 3 + rng.below(6));
      const auto seq = normalize_sequence(raw);
      const auto got = combined(seq);
      const auto want = oracle_features(seq);
      REQUIRE(got.size() == want.size());
      for(std::size_t j = 0; j < got.size(); ++j) CHECK(std::abs(got[j] - want[j]) <= 1e-12);
   }
}

TEST_CASE("property: combined equals static then dynamic")
{
   Rng rng(77);
   for(int trial = 0; trial < 25; ++trial) {
      const auto seq = random_normalized(rng, 3 + rng.below(10));
      auto st = extract_feature_vector(seq, FeatureSubset::Static).values;
      const auto dy = extract_feature_vector(seq, FeatureSubset::Dynamic).values;
      st.insert(st.end(), dy.begin(), dy.end());
      CHECK(st == combined(seq));
   }
}

TEST_CASE("property: maxima dominate means and magnitudes are non-negative")
{
   Rng rng(91);
   for(int trial = 0; trial < 50; ++trial) {
      const auto seq = random_normalized(rng, 3 + rng.below(20));
      const auto s = static_features(seq);
      for(std::size_t i = 0; i < kNumKeypoints; ++i) {
         CHECK(s.max_x[i] >= s.mean_x[i]);
         CHECK(s.max_y[i] >= s.mean_y[i]);
      }
      CHECK(s.dist_lw_ls >= 0.0);
      CHECK(s.dist_rw_rs >= 0.0);
      CHECK(s.dist_lw_rw >= 0.0);
      for(double v : dynamic_features(seq).values()) CHECK(v >= 0.0);
   }
}

TEST_CASE("property: static features ignore frame order")
{
   Rng rng(101);
   for(int trial = 0; trial < 30; ++trial) {
      auto seq = random_normalized(rng, 3 + rng.below(12));
      const auto before = static_features(seq).values();
      rng.shuffle(seq.frames.begin(), seq.frames.end());
      const auto after = static_features(seq).values();
      for(std::size_t j = 0; j < before.size(); ++j) CHECK(after[j] == doctest::Approx(before[j]).epsilon(1e-12));
   }
}

TEST_CASE("property: dynamic magnitudes survive time reversal")
{
   Rng rng(202);
   for(int trial = 0; trial < 30; ++trial) {
      auto seq = random_normalized(rng, 3 + rng.below(12));
      const auto before = dynamic_features(seq);
      std::reverse(seq.frames.begin(), seq.frames.end());
      const auto after = dynamic_features(seq);
      CHECK(after.vel_lw == doctest::Approx(before.vel_lw).epsilon(1e-12));
      CHECK(after.vel_rw == doctest::Approx(before.vel_rw).epsilon(1e-12));
      CHECK(after.acc_lw == doctest::Approx(before.acc_lw).epsilon(1e-12));
      CHECK(after.acc_rw == doctest::Approx(before.acc_rw).epsilon(1e-12));
   }
}

TEST_CASE("property: features are invariant to pixel similarity transforms")
{
   Rng rng(303);
   for(int trial = 0; trial < 30; ++trial) {
      const auto seq = random_sequence(rng, 5);
      const auto base = extract_feature_vector(seq, FeatureSubset::Combined).values;
      const double s = rng.uniform(0.3, 4.0);
      const Point2 offset{rng.uniform(-500.0, 500.0), rng.uniform(-500.0, 500.0)};
      auto moved = seq;
      for(auto& f : moved.frames) f = transformed(f, s, offset);
      const auto got = extract_feature_vector(moved, FeatureSubset::Combined).values;
      for(std::size_t j = 0; j < base.size(); ++j) CHECK(std::abs(got[j] - base[j]) <= 1e-9);
   }
}
