#include "gesture/pipeline.hpp"

#include "gesture/error.hpp"
#include "gesture/model_io.hpp"
#include "gesture/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#ifndef GESTURE_VERSION
#define GESTURE_VERSION "0.0.0"
#endif

namespace gesture {

using nlohmann::json;

namespace {

// Shortest representation that parses back to the same double.
std::string fmt(double v) { return json(v).dump(); }

json tsne_params_to_json(const TsneParams& p)
{
   return {{"perplexity", p.perplexity},
           {"iterations", p.iterations},
           {"learning_rate", p.learning_rate},
           {"early_exaggeration", p.early_exaggeration},
           {"exaggeration_iterations", p.exaggeration_iterations},
           {"initial_momentum", p.initial_momentum},
           {"final_momentum", p.final_momentum},
           {"momentum_switch_iteration", p.momentum_switch_iteration},
           {"init_stdev", p.init_stdev},
           {"seed", p.seed}};
}

TsneParams tsne_params_from_json(const json& j)
{
   TsneParams p;
   p.perplexity = j.at("perplexity").get<double>();
   p.iterations = j.at("iterations").get<std::size_t>();
   p.learning_rate = j.at("learning_rate").get<double>();
   p.early_exaggeration = j.at("early_exaggeration").get<double>();
   p.exaggeration_iterations = j.at("exaggeration_iterations").get<std::size_t>();
   p.initial_momentum = j.at("initial_momentum").get<double>();
   p.final_momentum = j.at("final_momentum").get<double>();
   p.momentum_switch_iteration = j.at("momentum_switch_iteration").get<std::size_t>();
   p.init_stdev = j.at("init_stdev").get<double>();
   p.seed = j.at("seed").get<std::uint64_t>();
   return p;
}

GestureClass class_from_json(const json& j)
{
   const auto c = parse_class(j.get<std::string>());
   if(!c) throw Error(ErrorKind::SchemaViolation, "unknown class " + j.dump());
   return *c;
}

std::string class_label(GestureClass c) { return std::string(class_name(c)); }

std::filesystem::path ensure_dir(const std::filesystem::path& dir)
{
   std::error_code ec;
   std::filesystem::create_directories(dir, ec);
   if(ec || !std::filesystem::is_directory(dir))
      throw Error(ErrorKind::Io, "cannot create directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
   return dir;
}

std::string failure_list(const std::vector<EntryError>& errors)
{
   std::string msg = std::to_string(errors.size()) + " input(s) failed:";
   for(const auto& e : errors) msg += "\n  " + e.path + ": " + e.message;
   return msg;
}

std::filesystem::path out_file(const PipelineConfig& c, std::string_view stem, FeatureSubset s, std::string_view ext)
{
   return c.out_dir / (std::string(stem) + "_" + std::string(subset_name(s)) + std::string(ext));
}

struct TrainStage
{
   PipelineSeeds seeds;
   ForestModel model;
   ConfusionMatrix confusion;
   std::size_t n_train = 0;
   std::size_t n_test = 0;
};

TrainStage train_stage(const LabeledDataset& data, const PipelineConfig& config)
{
   TrainStage st;
   st.seeds = PipelineSeeds::derive(config.seed);
   auto [train, test] = stratified_split(data, config.test_fraction, st.seeds.split);
   ForestParams fp = config.forest;
   fp.seed = st.seeds.forest;
   st.model = train_forest(train, fp, config.threads);
   st.confusion = evaluate(st.model, test);
   st.n_train = train.size();
   st.n_test = test.size();
   return st;
}

Embedding2D embed_stage(const LabeledDataset& data, const PipelineConfig& config)
{
   TsneParams tp = config.tsne;
   tp.seed = PipelineSeeds::derive(config.seed).tsne;
   return tsne_embed(data, tp);
}

} // namespace

std::string_view tool_version() noexcept { return GESTURE_VERSION; }

PipelineSeeds PipelineSeeds::derive(std::uint64_t global) noexcept
{
   return {global, mix_seed(global, 1), mix_seed(global, 2), mix_seed(global, 3)};
}

void PipelineConfig::validate() const
{
   if(!(test_fraction > 0.0 && test_fraction < 1.0))
      throw Error(ErrorKind::InvalidArgument, "--test-fraction must lie in (0, 1)");
   if(subsets.empty()) throw Error(ErrorKind::InvalidArgument, "no feature subset selected");
   if(forest.n_trees < 1) throw Error(ErrorKind::InvalidArgument, "--trees must be at least 1");
   if(!(tsne.perplexity > 0.0)) throw Error(ErrorKind::InvalidArgument, "--perplexity must be positive");
   if(!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0))
      throw Error(ErrorKind::InvalidArgument, "--confidence-threshold must lie in [0, 1]");
}

LabeledDataset build_dataset(const std::vector<KeypointSequence>& sequences, FeatureSubset subset,
                             std::vector<EntryError>* failures)
{
   LabeledDataset data;
   data.feature_names = feature_names(subset);
   std::vector<std::vector<double>> rows;
   for(std::size_t k = 0; k < sequences.size(); ++k) {
      const auto& seq = sequences[k];
      try {
         if(!seq.label) throw Error(ErrorKind::SchemaViolation, "sequence has no label");
         rows.push_back(extract_feature_vector(seq, subset).values);
         data.labels.push_back(*seq.label);
         data.ids.push_back(seq.source_id);
      } catch(const Error& e) {
         if(!failures) throw;
         failures->push_back({k, seq.source_id, e.kind(), e.what()});
      }
   }
   data.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(subset_size(subset)));
   for(std::size_t i = 0; i < rows.size(); ++i)
      for(std::size_t j = 0; j < rows[i].size(); ++j)
         data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
   return data;
}

std::string feature_matrix_csv(const LabeledDataset& data)
{
   std::ostringstream out;
   out << "id,label";
   for(const auto& n : data.feature_names) out << ',' << n;
   out << '\n';
   for(std::size_t i = 0; i < data.size(); ++i) {
      out << data.ids[i] << ',' << class_name(data.labels[i]);
      for(std::size_t j = 0; j < data.dims(); ++j)
         out << ',' << fmt(data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      out << '\n';
   }
   return out.str();
}

AnalysisResult analyze(const LabeledDataset& data, const PipelineConfig& config, std::string manifest_digest)
{
   config.validate();
   TrainStage st = train_stage(data, config);

   AnalysisResult result;
   auto& r = result.report;
   r.subset = data.dims() == kNumStaticFeatures    ? FeatureSubset::Static
              : data.dims() == kNumDynamicFeatures ? FeatureSubset::Dynamic
                                                   : FeatureSubset::Combined;
   r.manifest_digest = std::move(manifest_digest);
   r.seeds = st.seeds;
   r.test_fraction = config.test_fraction;
   r.confidence_threshold = config.confidence_threshold;
   r.forest = st.model.params;
   r.tsne = config.tsne;
   r.tsne.seed = st.seeds.tsne;
   r.top_k = config.top_k;
   r.n_train = st.n_train;
   r.n_test = st.n_test;
   r.confusion = st.confusion;
   r.ranking = gini_importance(st.model);
   r.embedding = embed_stage(data, config);
   r.silhouette = silhouette_score(r.embedding.points, r.embedding.labels);
   r.gaussians = fit_class_gaussians(r.embedding);
   result.model = std::move(st.model);
   return result;
}

json gaussians_to_json(const std::vector<ClassGaussian>& gaussians)
{
   json out = json::array();
   for(const auto& g : gaussians) {
      out.push_back({{"class", class_label(g.label)},
                     {"count", g.count},
                     {"mean", {g.mean.x(), g.mean.y()}},
                     {"covariance", {{g.covariance(0, 0), g.covariance(0, 1)}, {g.covariance(1, 0), g.covariance(1, 1)}}},
                     {"ellipse",
                      {{"center", {g.ellipse.center.x(), g.ellipse.center.y()}},
                       {"semi_major", g.ellipse.semi_major},
                       {"semi_minor", g.ellipse.semi_minor},
                       {"angle", g.ellipse.angle},
                       {"sigmas", kEllipseSigmas}}}});
   }
   return out;
}

namespace {

std::string ellipses_file(const std::vector<ClassGaussian>& gaussians, FeatureSubset subset,
                          const std::string& manifest_digest, std::uint64_t global_seed, const TsneParams& tsne)
{
   json doc;
   doc["schema"] = "gesture-ellipses";
   doc["schema_version"] = kReportSchemaVersion;
   doc["tool_version"] = std::string(tool_version());
   doc["subset"] = std::string(subset_name(subset));
   doc["manifest_digest"] = manifest_digest;
   doc["seeds"] = {{"global", global_seed}, {"tsne", tsne.seed}};
   doc["tsne"] = tsne_params_to_json(tsne);
   doc["class_gaussians"] = gaussians_to_json(gaussians);
   return doc.dump(2) + "\n";
}

std::vector<ClassGaussian> gaussians_from_json(const json& j)
{
   std::vector<ClassGaussian> out;
   for(const auto& e : j) {
      ClassGaussian g;
      g.label = class_from_json(e.at("class"));
      g.count = e.at("count").get<std::size_t>();
      g.mean = {e.at("mean")[0].get<double>(), e.at("mean")[1].get<double>()};
      for(int a = 0; a < 2; ++a)
         for(int b = 0; b < 2; ++b) g.covariance(a, b) = e.at("covariance")[a][b].get<double>();
      const auto& el = e.at("ellipse");
      g.ellipse.center = {el.at("center")[0].get<double>(), el.at("center")[1].get<double>()};
      g.ellipse.semi_major = el.at("semi_major").get<double>();
      g.ellipse.semi_minor = el.at("semi_minor").get<double>();
      g.ellipse.angle = el.at("angle").get<double>();
      out.push_back(g);
   }
   return out;
}

} // namespace

json report_to_json(const AnalysisReport& r)
{
   json doc;
   doc["schema"] = "gesture-report";
   doc["schema_version"] = kReportSchemaVersion;
   doc["tool_version"] = std::string(tool_version());
   doc["subset"] = std::string(subset_name(r.subset));
   doc["feature_count"] = subset_size(r.subset);
   doc["manifest_digest"] = r.manifest_digest;
   doc["seeds"] = {{"global", r.seeds.global}, {"split", r.seeds.split}, {"forest", r.seeds.forest}, {"tsne", r.seeds.tsne}};
   doc["params"] = {{"test_fraction", r.test_fraction},
                    {"confidence_threshold", r.confidence_threshold},
                    {"top_k", r.top_k},
                    {"forest", forest_params_to_json(r.forest)},
                    {"tsne", tsne_params_to_json(r.tsne)}};
   doc["samples"] = {{"train", r.n_train}, {"test", r.n_test}};
   doc["accuracy"] = r.confusion.accuracy;

   json classes = json::array();
   for(auto c : kAllClasses) classes.push_back(class_label(c));
   doc["confusion_matrix"] = {{"classes", classes},
                              {"counts", r.confusion.counts},
                              {"row_normalized", r.confusion.row_normalized()},
                              {"trace", r.confusion.trace()},
                              {"total", r.confusion.total()}};
   doc["silhouette"] = r.silhouette;

   json top = json::array();
   for(std::size_t k = 0; k < std::min(r.top_k, r.ranking.size()); ++k)
      top.push_back({{"rank", k + 1}, {"name", r.ranking[k].name}, {"index", r.ranking[k].index}, {"score", r.ranking[k].score}});
   doc["top_features"] = std::move(top);

   doc["tsne"] = {{"initial_kl", r.embedding.initial_kl},
                  {"final_kl", r.embedding.final_kl},
                  {"iterations", r.embedding.iterations}};
   doc["class_gaussians"] = gaussians_to_json(r.gaussians);
   json points = json::array();
   for(Eigen::Index i = 0; i < r.embedding.points.rows(); ++i)
      points.push_back({{"id", r.embedding.ids[static_cast<std::size_t>(i)]},
                        {"label", class_label(r.embedding.labels[static_cast<std::size_t>(i)])},
                        {"x", r.embedding.points(i, 0)},
                        {"y", r.embedding.points(i, 1)}});
   doc["embedding"] = std::move(points);
   return doc;
}

AnalysisReport report_from_json(const json& doc)
{
   try {
      if(doc.at("schema").get<std::string>() != "gesture-report")
         throw Error(ErrorKind::SchemaViolation, "not a gesture-report document");
      if(doc.at("schema_version").get<int>() != kReportSchemaVersion)
         throw Error(ErrorKind::VersionUnsupported, "report schema_version " + doc["schema_version"].dump());

      AnalysisReport r;
      const auto subset = parse_subset(doc.at("subset").get<std::string>());
      if(!subset) throw Error(ErrorKind::SchemaViolation, "unknown subset " + doc["subset"].dump());
      r.subset = *subset;
      r.manifest_digest = doc.at("manifest_digest").get<std::string>();
      const auto& s = doc.at("seeds");
      r.seeds = {s.at("global").get<std::uint64_t>(), s.at("split").get<std::uint64_t>(),
                 s.at("forest").get<std::uint64_t>(), s.at("tsne").get<std::uint64_t>()};
      const auto& p = doc.at("params");
      r.test_fraction = p.at("test_fraction").get<double>();
      r.confidence_threshold = p.at("confidence_threshold").get<double>();
      r.top_k = p.at("top_k").get<std::size_t>();
      r.forest = forest_params_from_json(p.at("forest"));
      r.tsne = tsne_params_from_json(p.at("tsne"));
      r.n_train = doc.at("samples").at("train").get<std::size_t>();
      r.n_test = doc.at("samples").at("test").get<std::size_t>();
      r.confusion.counts = doc.at("confusion_matrix").at("counts").get<decltype(r.confusion.counts)>();
      r.confusion.accuracy = doc.at("accuracy").get<double>();
      r.silhouette = doc.at("silhouette").get<double>();
      for(const auto& f : doc.at("top_features"))
         r.ranking.push_back({f.at("name").get<std::string>(), f.at("index").get<std::size_t>(), f.at("score").get<double>()});
      r.embedding.initial_kl = doc.at("tsne").at("initial_kl").get<double>();
      r.embedding.final_kl = doc.at("tsne").at("final_kl").get<double>();
      r.embedding.iterations = doc.at("tsne").at("iterations").get<std::size_t>();
      r.embedding.seed = r.tsne.seed;
      r.gaussians = gaussians_from_json(doc.at("class_gaussians"));
      const auto& pts = doc.at("embedding");
      r.embedding.points.resize(static_cast<Eigen::Index>(pts.size()), 2);
      for(std::size_t i = 0; i < pts.size(); ++i) {
         r.embedding.ids.push_back(pts[i].at("id").get<std::string>());
         r.embedding.labels.push_back(class_from_json(pts[i].at("label")));
         r.embedding.points(static_cast<Eigen::Index>(i), 0) = pts[i].at("x").get<double>();
         r.embedding.points(static_cast<Eigen::Index>(i), 1) = pts[i].at("y").get<double>();
      }
      return r;
   } catch(const json::exception& e) {
      throw Error(ErrorKind::SchemaViolation, std::string("report: ") + e.what());
   }
}

std::string serialize_report(const AnalysisReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::string ranking_csv(const std::vector<RankedFeature>& ranking)
{
   std::ostringstream out;
   out << "rank,feature,index,score\n";
   for(std::size_t k = 0; k < ranking.size(); ++k)
      out << k + 1 << ',' << ranking[k].name << ',' << ranking[k].index << ',' << fmt(ranking[k].score) << '\n';
   return out.str();
}

std::string embedding_csv(const Embedding2D& e)
{
   std::ostringstream out;
   out << "id,x,y,label\n";
   for(Eigen::Index i = 0; i < e.points.rows(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      out << (k < e.ids.size() ? e.ids[k] : std::to_string(k)) << ',' << fmt(e.points(i, 0)) << ','
          << fmt(e.points(i, 1)) << ',' << (k < e.labels.size() ? class_label(e.labels[k]) : "") << '\n';
   }
   return out.str();
}

namespace {

void check_same_corpus(const std::vector<AnalysisReport>& reports)
{
   for(const auto& r : reports)
      if(r.manifest_digest != reports.front().manifest_digest)
         throw Error(ErrorKind::InvalidArgument, "reports come from different corpora (manifest digests "
                                                     + reports.front().manifest_digest + " and " + r.manifest_digest
                                                     + ")");
}

std::string top_names(const AnalysisReport& r, std::size_t k)
{
   std::string s;
   for(std::size_t i = 0; i < std::min(k, r.ranking.size()); ++i) s += (i ? ", " : "") + r.ranking[i].name;
   return s;
}

} // namespace

std::string comparison_markdown(const std::vector<AnalysisReport>& reports)
{
   check_same_corpus(reports);
   std::ostringstream out;
   out << "# Feature subset comparison\n\n";
   if(!reports.empty())
      out << "corpus `" << reports.front().manifest_digest << "`, seed " << reports.front().seeds.global
          << ", tool " << tool_version() << "\n\n";
   out << "| subset | features | accuracy | silhouette | top-5 features |\n";
   out << "|---|---|---|---|---|\n";
   for(const auto& r : reports) {
      char acc[32], sil[32];
      std::snprintf(acc, sizeof acc, "%.2f%%", 100.0 * r.accuracy());
      std::snprintf(sil, sizeof sil, "%.3f", r.silhouette);
      out << "| " << subset_name(r.subset) << " | " << subset_size(r.subset) << " | " << acc << " | " << sil
          << " | " << top_names(r, 5) << " |\n";
   }
   return out.str();
}

json comparison_json(const std::vector<AnalysisReport>& reports)
{
   check_same_corpus(reports);
   json rows = json::array();
   for(const auto& r : reports) {
      json top = json::array();
      for(std::size_t i = 0; i < std::min<std::size_t>(5, r.ranking.size()); ++i)
         top.push_back({{"name", r.ranking[i].name}, {"score", r.ranking[i].score}});
      rows.push_back({{"subset", std::string(subset_name(r.subset))},
                      {"accuracy", r.accuracy()},
                      {"silhouette", r.silhouette},
                      {"top_features", top}});
   }
   return {{"schema", "gesture-comparison"},
           {"schema_version", kReportSchemaVersion},
           {"tool_version", std::string(tool_version())},
           {"manifest_digest", reports.empty() ? std::string() : reports.front().manifest_digest},
           {"rows", rows}};
}

std::string scatter_svg(const AnalysisReport& r)
{
   constexpr double kSize = 640.0;
   constexpr double kMargin = 40.0;
   constexpr std::array<const char*, kNumClasses> kColors = {"#d62728", "#2ca02c", "#1f77b4", "#7f7f7f"};

   double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
   bool first = true;
   auto grow = [&](double x, double y) {
      if(first) {
         xmin = xmax = x;
         ymin = ymax = y;
         first = false;
      }
      xmin = std::min(xmin, x), xmax = std::max(xmax, x);
      ymin = std::min(ymin, y), ymax = std::max(ymax, y);
   };
   for(Eigen::Index i = 0; i < r.embedding.points.rows(); ++i) grow(r.embedding.points(i, 0), r.embedding.points(i, 1));
   for(const auto& g : r.gaussians) {
      const double ext = g.ellipse.semi_major;
      grow(g.ellipse.center.x() - ext, g.ellipse.center.y() - ext);
      grow(g.ellipse.center.x() + ext, g.ellipse.center.y() + ext);
   }
   const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
   const double scale = (kSize - 2 * kMargin) / span;
   const double tx = kMargin - xmin * scale + ((kSize - 2 * kMargin) - (xmax - xmin) * scale) / 2;
   const double ty = kSize - kMargin + ymin * scale - ((kSize - 2 * kMargin) - (ymax - ymin) * scale) / 2;

   std::ostringstream out;
   out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize + 40
       << "\" viewBox=\"0 0 " << kSize << ' ' << kSize + 40 << "\">\n";
   out << "<!-- gesture-report " << subset_name(r.subset) << " seed=" << r.seeds.global << " tsne_seed=" << r.seeds.tsne
       << " tool=" << tool_version() << " -->\n";
   out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
   out << "<text x=\"" << kMargin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">t-SNE ("
       << subset_name(r.subset) << "), silhouette " << fmt(r.silhouette) << "</text>\n";
   // Data coordinates, y up.
   out << "<g transform=\"matrix(" << fmt(scale) << " 0 0 " << fmt(-scale) << ' ' << fmt(tx) << ' ' << fmt(ty)
       << ")\">\n";
   for(Eigen::Index i = 0; i < r.embedding.points.rows(); ++i) {
      const auto c = code(r.embedding.labels[static_cast<std::size_t>(i)]);
      out << "<circle cx=\"" << fmt(r.embedding.points(i, 0)) << "\" cy=\"" << fmt(r.embedding.points(i, 1))
          << "\" r=\"" << fmt(3.0 / scale) << "\" fill=\"" << kColors[c] << "\" fill-opacity=\"0.8\"/>\n";
   }
   for(const auto& g : r.gaussians) {
      const auto& e = g.ellipse;
      out << "<ellipse class=\"class-gaussian\" data-class=\"" << class_name(g.label) << "\" data-cx=\""
          << fmt(e.center.x()) << "\" data-cy=\"" << fmt(e.center.y()) << "\" data-semi-major=\"" << fmt(e.semi_major)
          << "\" data-semi-minor=\"" << fmt(e.semi_minor) << "\" data-angle=\"" << fmt(e.angle) << "\" cx=\""
          << fmt(e.center.x()) << "\" cy=\"" << fmt(e.center.y()) << "\" rx=\"" << fmt(e.semi_major) << "\" ry=\""
          << fmt(e.semi_minor) << "\" transform=\"rotate(" << fmt(e.angle * 180.0 / std::numbers::pi) << ' '
          << fmt(e.center.x()) << ' ' << fmt(e.center.y()) << ")\" fill=\"none\" stroke=\"" << kColors[code(g.label)]
          << "\" stroke-width=\"2\" vector-effect=\"non-scaling-stroke\"/>\n";
   }
   out << "</g>\n";
   for(std::size_t c = 0; c < kNumClasses; ++c) {
      const double x = kMargin + static_cast<double>(c) * 140.0;
      out << "<circle cx=\"" << x << "\" cy=\"" << kSize + 20 << "\" r=\"5\" fill=\"" << kColors[c] << "\"/>"
          << "<text x=\"" << x + 10 << "\" y=\"" << kSize + 25
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << class_name(static_cast<GestureClass>(c))
          << "</text>\n";
   }
   out << "</svg>\n";
   return out.str();
}

// ------------------------------------------------------------------- commands

std::filesystem::path run_synth(const SynthCommand& cmd)
{
   const auto corpus = generate_corpus(cmd.params, cmd.counts, cmd.seed);
   ensure_dir(cmd.out_dir);
   return write_corpus(corpus, cmd.out_dir);
}

LoadedFeatures load_features(const std::filesystem::path& manifest, FeatureSubset subset, double confidence_threshold)
{
   const std::string content = read_text_file(manifest);
   LoadOptions opts;
   opts.confidence_threshold = confidence_threshold;
   LoadedCorpus corpus = load_manifest(content, manifest.parent_path(), opts);
   std::vector<EntryError> failures = corpus.errors;
   LoadedFeatures out;
   out.data = build_dataset(corpus.sequences, subset, &failures);
   out.manifest_digest = content_digest(content);
   if(!failures.empty()) throw Error(ErrorKind::InvalidData, failure_list(failures));
   return out;
}

std::filesystem::path run_extract(const std::filesystem::path& manifest, FeatureSubset subset,
                                  const std::filesystem::path& out, double confidence_threshold)
{
   const auto loaded = load_features(manifest, subset, confidence_threshold);
   if(out.has_parent_path()) ensure_dir(out.parent_path());
   write_text_file(out, feature_matrix_csv(loaded.data));
   return out;
}

std::vector<std::filesystem::path> run_train(const PipelineConfig& config)
{
   config.validate();
   ensure_dir(config.out_dir);
   std::vector<std::filesystem::path> written;
   for(auto s : config.subsets) {
      const auto loaded = load_features(config.manifest, s, config.confidence_threshold);
      const auto st = train_stage(loaded.data, config);
      written.push_back(out_file(config, "model", s, ".json"));
      write_text_file(written.back(), serialize_model(st.model));
   }
   return written;
}

std::vector<std::filesystem::path> run_evaluate(const PipelineConfig& config)
{
   config.validate();
   ensure_dir(config.out_dir);
   std::vector<std::filesystem::path> written;
   for(auto s : config.subsets) {
      const auto loaded = load_features(config.manifest, s, config.confidence_threshold);
      const auto result = analyze(loaded.data, config, loaded.manifest_digest);
      written.push_back(out_file(config, "report", s, ".json"));
      write_text_file(written.back(), serialize_report(result.report));
   }
   return written;
}

std::vector<std::filesystem::path> run_rank(const PipelineConfig& config)
{
   config.validate();
   ensure_dir(config.out_dir);
   std::vector<std::filesystem::path> written;
   for(auto s : config.subsets) {
      const auto loaded = load_features(config.manifest, s, config.confidence_threshold);
      const auto st = train_stage(loaded.data, config);
      written.push_back(out_file(config, "ranking", s, ".csv"));
      write_text_file(written.back(), ranking_csv(gini_importance(st.model)));
   }
   return written;
}

std::vector<std::filesystem::path> run_embed(const PipelineConfig& config)
{
   config.validate();
   ensure_dir(config.out_dir);
   std::vector<std::filesystem::path> written;
   for(auto s : config.subsets) {
      const auto loaded = load_features(config.manifest, s, config.confidence_threshold);
      const auto emb = embed_stage(loaded.data, config);
      written.push_back(out_file(config, "embedding", s, ".csv"));
      write_text_file(written.back(), embedding_csv(emb));
      TsneParams tp = config.tsne;
      tp.seed = PipelineSeeds::derive(config.seed).tsne;
      written.push_back(out_file(config, "ellipses", s, ".json"));
      write_text_file(written.back(),
                      ellipses_file(fit_class_gaussians(emb), s, loaded.manifest_digest, config.seed, tp));
   }
   return written;
}

std::vector<std::filesystem::path> run_report(const std::vector<std::filesystem::path>& report_files,
                                              const std::filesystem::path& out_dir)
{
   if(report_files.empty()) throw Error(ErrorKind::InvalidArgument, "no reports given");
   std::vector<AnalysisReport> reports;
   for(const auto& f : report_files) {
      json doc;
      try {
         doc = json::parse(read_text_file(f));
      } catch(const json::parse_error& e) {
         throw Error(ErrorKind::MalformedFile, f.string() + ": " + e.what());
      }
      reports.push_back(report_from_json(doc));
   }
   const std::string table = comparison_markdown(reports); // rejects mixed corpora before writing
   ensure_dir(out_dir);

   std::vector<std::filesystem::path> written;
   written.push_back(out_dir / "comparison.md");
   write_text_file(written.back(), table);
   written.push_back(out_dir / "comparison.json");
   write_text_file(written.back(), comparison_json(reports).dump(2) + "\n");

   std::map<std::string, int> used;
   for(const auto& r : reports) {
      std::string stem = "scatter_" + std::string(subset_name(r.subset));
      if(const int n = used[stem]++; n > 0) stem += "_" + std::to_string(n);
      written.push_back(out_dir / (stem + ".svg"));
      write_text_file(written.back(), scatter_svg(r));
   }
   return written;
}

std::vector<std::filesystem::path> run_pipeline(PipelineConfig config, const SynthCommand& synth)
{
   config.validate();
   ensure_dir(config.out_dir);
   std::vector<std::filesystem::path> written;
   if(config.manifest.empty()) {
      SynthCommand sc = synth;
      sc.out_dir = config.out_dir / "corpus";
      config.manifest = run_synth(sc);
      written.push_back(config.manifest);
   }
   std::vector<std::filesystem::path> reports;
   for(auto s : config.subsets) {
      const auto loaded = load_features(config.manifest, s, config.confidence_threshold);
      written.push_back(out_file(config, "features", s, ".csv"));
      write_text_file(written.back(), feature_matrix_csv(loaded.data));

      const auto result = analyze(loaded.data, config, loaded.manifest_digest);
      written.push_back(out_file(config, "model", s, ".json"));
      write_text_file(written.back(), serialize_model(result.model));
      written.push_back(out_file(config, "ranking", s, ".csv"));
      write_text_file(written.back(), ranking_csv(result.report.ranking));
      written.push_back(out_file(config, "embedding", s, ".csv"));
      write_text_file(written.back(), embedding_csv(result.report.embedding));
      written.push_back(out_file(config, "ellipses", s, ".json"));
      write_text_file(written.back(), ellipses_file(result.report.gaussians, s, loaded.manifest_digest, config.seed,
                                                    result.report.tsne));
      written.push_back(out_file(config, "report", s, ".json"));
      write_text_file(written.back(), serialize_report(result.report));
      reports.push_back(written.back());
   }
   const auto summary = run_report(reports, config.out_dir);
   written.insert(written.end(), summary.begin(), summary.end());
   return written;
}

} // namespace gesture
