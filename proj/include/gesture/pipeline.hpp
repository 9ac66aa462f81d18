#pragma once

#include "gesture/clustering.hpp"
#include "gesture/features.hpp"
#include "gesture/forest.hpp"
#include "gesture/ingest.hpp"
#include "gesture/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gesture {

inline constexpr int kReportSchemaVersion = 1;
std::string_view tool_version() noexcept;

/// Seeds of every stochastic stage, derived from one global seed.
struct PipelineSeeds
{
   std::uint64_t global = 0;
   std::uint64_t split = 0;
   std::uint64_t forest = 0;
   std::uint64_t tsne = 0;

   static PipelineSeeds derive(std::uint64_t global) noexcept;
};

struct PipelineConfig
{
   std::filesystem::path manifest;
   std::filesystem::path out_dir;
   std::vector<FeatureSubset> subsets = {FeatureSubset::Combined};
   double test_fraction = 0.3;
   ForestParams forest;  // seed is overwritten from `seed`
   TsneParams tsne;      // seed is overwritten from `seed`
   std::uint64_t seed = 42;
   double confidence_threshold = kDefaultConfidenceThreshold;
   std::size_t top_k = 10;
   unsigned threads = 0; // forest training; never changes results

   void validate() const; // throws InvalidArgument
};

/// One row per sequence. Sequences that fail extraction are skipped and
/// listed in `failures`.
LabeledDataset build_dataset(const std::vector<KeypointSequence>& sequences, FeatureSubset subset,
                             std::vector<EntryError>* failures = nullptr);

/// Delimited table: id, label, then one column per feature in canonical order.
std::string feature_matrix_csv(const LabeledDataset& data);

struct AnalysisReport
{
   FeatureSubset subset = FeatureSubset::Combined;
   std::string manifest_digest;
   PipelineSeeds seeds;
   double test_fraction = 0.3;
   double confidence_threshold = kDefaultConfidenceThreshold;
   ForestParams forest;
   TsneParams tsne;
   std::size_t top_k = 10;
   std::size_t n_train = 0;
   std::size_t n_test = 0;
   ConfusionMatrix confusion;
   double silhouette = 0.0;
   std::vector<RankedFeature> ranking; // full ranking; reports print top_k
   Embedding2D embedding;
   std::vector<ClassGaussian> gaussians;

   double accuracy() const noexcept { return confusion.accuracy; }
};

struct AnalysisResult
{
   AnalysisReport report;
   ForestModel model;
};

/// Stratified split, forest training and evaluation, t-SNE of the full
/// dataset, silhouette by class label and class Gaussians.
AnalysisResult analyze(const LabeledDataset& data, const PipelineConfig& config, std::string manifest_digest);

nlohmann::json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& j);
std::string serialize_report(const AnalysisReport& report);

std::string ranking_csv(const std::vector<RankedFeature>& ranking);
std::string embedding_csv(const Embedding2D& embedding);
nlohmann::json gaussians_to_json(const std::vector<ClassGaussian>& gaussians);

/// Side-by-side table (accuracy, silhouette, top-5 features).
/// Throws InvalidArgument when the reports come from different corpora.
std::string comparison_markdown(const std::vector<AnalysisReport>& reports);
nlohmann::json comparison_json(const std::vector<AnalysisReport>& reports);

/// Scatter plot of the embedding with each class's 2-sigma ellipse. Ellipse
/// parameters are also written verbatim as data-* attributes.
std::string scatter_svg(const AnalysisReport& report);

// ------------------------------------------------------------------- commands
//
// Each command writes its outputs under config.out_dir and returns the paths
// it wrote.

struct SynthCommand
{
   std::filesystem::path out_dir;
   SynthParams params;
   std::array<std::size_t, kNumClasses> counts = kDefaultCorpusCounts;
   std::uint64_t seed = 42;
};

std::filesystem::path run_synth(const SynthCommand& cmd);

/// Throws InvalidData listing every failing file when any sequence fails.
std::filesystem::path run_extract(const std::filesystem::path& manifest, FeatureSubset subset,
                                  const std::filesystem::path& out_file, double confidence_threshold);

struct LoadedFeatures
{
   LabeledDataset data;
   std::string manifest_digest;
};

LoadedFeatures load_features(const std::filesystem::path& manifest, FeatureSubset subset,
                             double confidence_threshold);

std::vector<std::filesystem::path> run_train(const PipelineConfig& config);
std::vector<std::filesystem::path> run_evaluate(const PipelineConfig& config);
std::vector<std::filesystem::path> run_rank(const PipelineConfig& config);
std::vector<std::filesystem::path> run_embed(const PipelineConfig& config);
std::vector<std::filesystem::path> run_report(const std::vector<std::filesystem::path>& reports,
                                              const std::filesystem::path& out_dir);

/// synth -> extract -> train -> evaluate -> rank -> embed -> report, all under
/// config.out_dir (the corpus goes to out_dir/corpus). With config.manifest
/// set, that corpus is analyzed and the synth step is skipped.
std::vector<std::filesystem::path> run_pipeline(PipelineConfig config, const SynthCommand& synth);

} // namespace gesture
