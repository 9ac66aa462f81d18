// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "feature_oracle.hpp"
#include "gesture/clustering.hpp"
#include "gesture/features.hpp"
#include "gesture/forest.hpp"
#include "gesture/ingest.hpp"
#include "gesture/model_io.hpp"
#include "gesture/pipeline.hpp"
#include "gesture/random.hpp"
#include "gesture/synth.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

using namespace gesture;
using namespace gesture::testing;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kNormalizeTol = 1e-9;
constexpr double kNormalizeSeconds = 1.0;
constexpr double kOracleTol = 1e-12;
constexpr double kMinCombinedAccuracy = 0.85;
constexpr double kDirectionalSeconds = 60.0;
constexpr double kMinNoGestureRecall = 0.95;
constexpr std::size_t kVelLwTopRank = 3;
constexpr double kImportanceSumTol = 1e-9;
constexpr double kFiniteDiffStep = 1e-5;
constexpr double kGradientRelTol = 1e-4;
constexpr double kPerplexityTol = 1e-3;
constexpr double kSilhouetteValue = 0.89975;
constexpr double kSilhouetteTol = 1e-5;
constexpr std::size_t kSeedsRequired = 4;
constexpr std::uint64_t kCorpusSeeds[] = {1, 2, 3, 4, 5};

int failures = 0;

void verdict(int number, const char* title, bool ok, const std::string& detail)
{
   std::printf("%s  %2d. %s: %s\n", ok ? "PASS" : "FAIL", number, title, detail.c_str());
   std::fflush(stdout);
   if(!ok) ++failures;
}

std::string fmt(const char* f, auto... args)
{
   char buf[512];
   std::snprintf(buf, sizeof buf, f, args...);
   return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
   return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------------ 1
void normalization_invariance()
{
   const auto t0 = std::chrono::steady_clock::now();
   Rng rng(101);
   double worst = 0.0;
   const double scales[] = {0.5, 1.0, 3.0};
   const Point2 offsets[] = {{0.0, 0.0}, {250.0, -80.0}};
   for(int k = 0; k < 100; ++k) {
      const auto frame = random_frame(rng);
      const auto base = normalize_frame(frame);
      for(double s : scales)
         for(auto o : offsets) {
            const auto moved = normalize_frame(transformed(frame, s, o));
            for(std::size_t i = 0; i < kNumKeypoints; ++i) {
               worst = std::max(worst, std::abs(moved.points[i].x - base.points[i].x));
               worst = std::max(worst, std::abs(moved.points[i].y - base.points[i].y));
            }
         }
   }
   const double elapsed = seconds_since(t0);
   verdict(1, "normalization invariance", worst <= kNormalizeTol && elapsed < kNormalizeSeconds,
           fmt("max deviation %.2e (tol %.0e) over 100 frames x 6 transforms, %.3f s (limit %.0f s)", worst,
               kNormalizeTol, elapsed, kNormalizeSeconds));
}

// ------------------------------------------------------------------ 2
void feature_oracle()
{
   Rng rng(202);
   double worst = 0.0;
   for(int k = 0; k < 100; ++k) {
      const auto seq = normalize_sequence(random_sequence(rng, 5));
      const auto got = extract_feature_vector(seq, FeatureSubset::Combined).values;
      const auto want = oracle_features(seq);
      for(std::size_t j = 0; j < got.size(); ++j) worst = std::max(worst, std::abs(got[j] - want[j]));
   }
   const auto d = dynamic_features(three_frame_example());
   const bool example = d.vel_lw == 1.5 && d.acc_lw == 1.0 && d.vel_rw == 0.5 && std::abs(d.vel_ratio - 3.0) < 1e-5;
   verdict(2, "feature oracle equivalence", worst <= kOracleTol && example,
           fmt("max |lib - oracle| %.2e over 100 x 76 (tol %.0e); 3-frame example vel_lw=%g acc_lw=%g vel_rw=%g "
               "vel_ratio=%.7f",
               worst, kOracleTol, d.vel_lw, d.acc_lw, d.vel_rw, d.vel_ratio));
}

// ------------------------------------------------------------------ 3
void feature_cardinality(const SyntheticCorpus& corpus)
{
   const auto st = build_dataset(corpus.sequences, FeatureSubset::Static);
   const auto dy = build_dataset(corpus.sequences, FeatureSubset::Dynamic);
   const auto co = build_dataset(corpus.sequences, FeatureSubset::Combined);
   const auto csv = feature_matrix_csv(co);
   const auto header = csv.substr(0, csv.find('\n'));
   const auto header_cols = std::size_t(std::count(header.begin(), header.end(), ',')) + 1 - 2;
   const bool ok = st.dims() == 71 && dy.dims() == 5 && co.dims() == 76 && header_cols == 76 && co.size() == 180;
   verdict(3, "feature cardinality", ok,
           fmt("static %zu, dynamic %zu, combined %zu columns (csv header %zu), %zu rows", st.dims(), dy.dims(),
               co.dims(), header_cols, co.size()));
}

// ------------------------------------------------------------- 4 to 7, 9c
struct SeedRun
{
   std::uint64_t seed = 0;
   double acc[3] = {};
   double sil[3] = {};
   double nog[3] = {};
   std::size_t vel_lw_rank = 0;
   double initial_kl = 0.0;
   double final_kl = 0.0;
};

struct DirectionalResults
{
   std::vector<SeedRun> runs;
   double seconds = 0.0;
   Eigen::MatrixXd combined_features; // first seed, for the perplexity check
};

DirectionalResults directional_runs()
{
   DirectionalResults out;
   const auto t0 = std::chrono::steady_clock::now();
   for(auto seed : kCorpusSeeds) {
      SeedRun run;
      run.seed = seed;
      const auto corpus = generate_corpus(SynthParams{}, kDefaultCorpusCounts, seed);
      int k = 0;
      for(auto subset : {FeatureSubset::Static, FeatureSubset::Dynamic, FeatureSubset::Combined}) {
         const auto data = build_dataset(corpus.sequences, subset);
         PipelineConfig config;
         config.seed = seed;
         config.threads = 0;
         const auto result = analyze(data, config, "acceptance");
         const auto& r = result.report;
         run.acc[k] = r.accuracy();
         run.sil[k] = r.silhouette;
         run.nog[k] = r.confusion.recall(GestureClass::NoGesture).value_or(0.0);
         if(subset == FeatureSubset::Combined) {
            for(std::size_t i = 0; i < r.ranking.size(); ++i)
               if(r.ranking[i].name == "vel_lw") run.vel_lw_rank = i + 1;
            run.initial_kl = r.embedding.initial_kl;
            run.final_kl = r.embedding.final_kl;
            if(out.combined_features.size() == 0) out.combined_features = data.features;
         }
         ++k;
      }
      std::printf("      seed %llu: acc S %.4f D %.4f C %.4f | silhouette S %.4f D %.4f C %.4f | no_gesture recall "
                  "S %.3f D %.3f C %.3f | vel_lw rank %zu\n",
                  (unsigned long long)seed, run.acc[0], run.acc[1], run.acc[2], run.sil[0], run.sil[1], run.sil[2],
                  run.nog[0], run.nog[1], run.nog[2], run.vel_lw_rank);
      out.runs.push_back(run);
   }
   out.seconds = seconds_since(t0);
   return out;
}

void directional_verdicts(const DirectionalResults& d)
{
   std::size_t acc_ok = 0, sil_ok = 0, rank_ok = 0;
   double min_recall = 1.0;
   std::string acc_seeds, sil_seeds, rank_seeds;
   for(const auto& r : d.runs) {
      const bool a = r.acc[2] >= r.acc[0] && r.acc[0] >= r.acc[1] && r.acc[2] >= kMinCombinedAccuracy;
      const bool s = r.sil[2] >= r.sil[0] && r.sil[0] >= r.sil[1];
      const bool v = r.vel_lw_rank >= 1 && r.vel_lw_rank <= kVelLwTopRank;
      acc_ok += a;
      sil_ok += s;
      rank_ok += v;
      acc_seeds += a ? "+" : "-";
      sil_seeds += s ? "+" : "-";
      rank_seeds += v ? "+" : "-";
      for(double n : r.nog) min_recall = std::min(min_recall, n);
   }
   const auto n = d.runs.size();
   verdict(4, "accuracy ordering", acc_ok >= kSeedsRequired && d.seconds < kDirectionalSeconds,
           fmt("combined >= static >= dynamic and combined >= %.2f in %zu/%zu seeds [%s] (need %zu); %.1f s for all "
               "runs (limit %.0f s)",
               kMinCombinedAccuracy, acc_ok, n, acc_seeds.c_str(), kSeedsRequired, d.seconds, kDirectionalSeconds));
   verdict(5, "silhouette ordering", sil_ok >= kSeedsRequired,
           fmt("combined >= static >= dynamic in %zu/%zu seeds [%s] (need %zu)", sil_ok, n, sil_seeds.c_str(),
               kSeedsRequired));
   verdict(6, "no_gesture recall", min_recall >= kMinNoGestureRecall,
           fmt("minimum over %zu runs %.4f (need >= %.2f)", 3 * n, min_recall, kMinNoGestureRecall));
   verdict(7, "left-wrist dominance", rank_ok >= kSeedsRequired,
           fmt("vel_lw in combined top %zu in %zu/%zu seeds [%s] (need %zu)", kVelLwTopRank, rank_ok, n,
               rank_seeds.c_str(), kSeedsRequired));
}

// ------------------------------------------------------------------ 8
std::vector<double> row_of(const LabeledDataset& d, std::size_t i)
{
   std::vector<double> x(d.dims());
   for(std::size_t j = 0; j < d.dims(); ++j) x[j] = d.features(Eigen::Index(i), Eigen::Index(j));
   return x;
}

void forest_properties()
{
   const auto corpus = generate_corpus(SynthParams{}, kDefaultCorpusCounts, 1);
   const auto data = build_dataset(corpus.sequences, FeatureSubset::Combined);
   const auto [train, test] = stratified_split(data, 0.3, 11);

   ForestParams params;
   params.seed = 2024;
   const auto a = train_forest(train, params, 1);
   const auto b = train_forest(train, params, 1);
   const auto c = train_forest(train, params, 0);
   const bool deterministic = serialize_model(a) == serialize_model(b) && serialize_model(a) == serialize_model(c);

   double sum = 0.0;
   bool non_negative = true;
   for(double w : a.importances) {
      sum += w;
      non_negative = non_negative && w >= 0.0;
   }
   const bool sums = std::abs(sum - 1.0) <= kImportanceSumTol && non_negative;

   // Strictly increasing warp of vel_lw. The probe rows are training rows,
   // since a forest's decisions only stay fixed where its split samples are.
   auto warped = train;
   const auto col = Eigen::Index(feature_index("vel_lw"));
   for(Eigen::Index i = 0; i < warped.features.rows(); ++i) {
      const double v = warped.features(i, col);
      warped.features(i, col) = std::log1p(v) + v * v * v;
   }
   ForestParams mono = params;
   mono.bootstrap = false;
   const auto plain = train_forest(train, mono, 0);
   const auto bent = train_forest(warped, mono, 0);
   std::size_t agree = 0;
   const std::size_t probe = 50;
   for(std::size_t i = 0; i < probe; ++i)
      agree += predict(plain, row_of(train, i)).votes == predict(bent, row_of(warped, i)).votes;

   ForestParams single;
   single.n_trees = 1;
   single.bootstrap = false;
   single.seed = 5;
   const auto tree = train_forest(train, single, 1);
   const double train_acc = evaluate(tree, train).accuracy;

   const bool ok = deterministic && sums && agree == probe && train_acc == 1.0;
   verdict(8, "random forest properties", ok,
           fmt("bit-identical serial/serial/parallel %s; importance sum %.12f; monotone probe %zu/%zu votes equal; "
               "single full tree training accuracy %.4f",
               deterministic ? "yes" : "no", sum, agree, probe, train_acc));
}

// ------------------------------------------------------------------ 9
void tsne_numerics(const DirectionalResults& d)
{
   Rng rng(909);
   Eigen::MatrixXd x(10, 4);
   for(Eigen::Index i = 0; i < 10; ++i)
      for(Eigen::Index j = 0; j < 4; ++j) x(i, j) = rng.normal();
   const auto p = joint_affinities(conditional_affinities(squared_distances(x), 3.0));
   Eigen::MatrixXd y(10, 2);
   for(Eigen::Index i = 0; i < 10; ++i) y.row(i) << rng.normal(), rng.normal();
   const auto g = tsne_gradient(p, y);
   Eigen::MatrixXd fd(10, 2);
   for(Eigen::Index i = 0; i < 10; ++i)
      for(Eigen::Index k = 0; k < 2; ++k) {
         Eigen::MatrixXd up = y, down = y;
         up(i, k) += kFiniteDiffStep;
         down(i, k) -= kFiniteDiffStep;
         fd(i, k) = (tsne_kl_divergence(p, up) - tsne_kl_divergence(p, down)) / (2.0 * kFiniteDiffStep);
      }
   const double grad_err = (g - fd).norm() / fd.norm();

   const double target = TsneParams{}.perplexity;
   const auto cond = conditional_affinities(squared_distances(standardize_columns(d.combined_features)), target);
   double perp_err = 0.0;
   for(Eigen::Index i = 0; i < cond.p.rows(); ++i) {
      double h = 0.0;
      for(Eigen::Index j = 0; j < cond.p.cols(); ++j)
         if(cond.p(i, j) > 0.0) h -= cond.p(i, j) * std::log2(cond.p(i, j));
      perp_err = std::max(perp_err, std::abs(std::pow(2.0, h) - target));
   }

   std::size_t kl_drops = 0;
   for(const auto& r : d.runs) kl_drops += r.final_kl < r.initial_kl;

   // Same sample count as the default corpus. At N = 100 the fixed learning
   // rate of 200 can make the post-exaggeration descent oscillate and fling
   // points out of their blob.
   const Eigen::Index per_blob = 90, dims = 10;
   Eigen::MatrixXd blobs(2 * per_blob, dims);
   std::vector<int> labels(static_cast<std::size_t>(2 * per_blob));
   const double shift = 20.0 / std::sqrt(double(dims));
   for(Eigen::Index i = 0; i < 2 * per_blob; ++i) {
      const bool second = i >= per_blob;
      labels[std::size_t(i)] = second;
      for(Eigen::Index j = 0; j < dims; ++j) blobs(i, j) = rng.normal() + (second ? shift : 0.0);
   }
   TsneParams tp;
   tp.seed = 77;
   const auto emb = tsne_embed(blobs, tp);
   std::size_t pure = 0;
   for(Eigen::Index i = 0; i < emb.points.rows(); ++i) {
      Eigen::Index best = -1;
      double best_d = INFINITY;
      for(Eigen::Index j = 0; j < emb.points.rows(); ++j) {
         if(j == i) continue;
         const double dd = (emb.points.row(i) - emb.points.row(j)).squaredNorm();
         if(dd < best_d) best_d = dd, best = j;
      }
      pure += labels[std::size_t(i)] == labels[std::size_t(best)];
   }

   const bool ok = grad_err <= kGradientRelTol && perp_err <= kPerplexityTol && kl_drops == d.runs.size()
                && pure == std::size_t(emb.points.rows());
   verdict(9, "t-SNE numerics", ok,
           fmt("gradient rel. error %.2e (tol %.0e); max perplexity error %.2e (tol %.0e); final < initial KL in "
               "%zu/%zu combined runs; blob NN purity %zu/%zu",
               grad_err, kGradientRelTol, perp_err, kPerplexityTol, kl_drops, d.runs.size(), pure,
               std::size_t(emb.points.rows())));
}

// ------------------------------------------------------------------ 10
void silhouette_value()
{
   Eigen::MatrixXd x(4, 1);
   x << 0, 1, 10, 11;
   const double s = silhouette_score(x, std::vector<int>{0, 0, 1, 1});
   verdict(10, "silhouette hand value", std::abs(s - kSilhouetteValue) <= kSilhouetteTol,
           fmt("%.8f (expected %.5f +- %.0e)", s, kSilhouetteValue, kSilhouetteTol));
}

// ------------------------------------------------------------------ 11
int run_cli(const std::string& args)
{
   const std::string cmd = std::string(GESTURE_CLI) + " " + args + " >/dev/null 2>&1";
   const int status = std::system(cmd.c_str());
   return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void end_to_end_determinism()
{
   const auto base = fs::temp_directory_path() / ("gesture_acceptance_" + std::to_string(::getpid()));
   fs::remove_all(base);
   const int rc_a = run_cli("pipeline --seed 42 --out " + (base / "a").string());
   const int rc_b = run_cli("pipeline --seed 42 --out " + (base / "b").string());
   std::size_t compared = 0, identical = 0;
   if(rc_a == 0 && rc_b == 0) {
      for(const auto& e : fs::directory_iterator(base / "a")) {
         const auto name = e.path().filename().string();
         const bool tracked = name.rfind("report_", 0) == 0 || name.rfind("ranking_", 0) == 0
                           || name.rfind("embedding_", 0) == 0;
         if(!tracked) continue;
         ++compared;
         identical += fs::exists(base / "b" / name) && read_text_file(e.path()) == read_text_file(base / "b" / name);
      }
   }
   fs::remove_all(base);
   verdict(11, "end-to-end determinism", rc_a == 0 && rc_b == 0 && compared == 9 && identical == compared,
           fmt("exit codes %d/%d; %zu/%zu report, ranking and embedding files byte-identical", rc_a, rc_b, identical,
               compared));
}

} // namespace

int main()
{
   normalization_invariance();
   feature_oracle();
   feature_cardinality(generate_corpus(SynthParams{}, kDefaultCorpusCounts, kCorpusSeeds[0]));
   const auto directional = directional_runs();
   directional_verdicts(directional);
   forest_properties();
   tsne_numerics(directional);
   silhouette_value();
   end_to_end_determinism();
   std::printf("%d of 11 criteria failed\n", failures);
   return failures == 0 ? 0 : 1;
}
