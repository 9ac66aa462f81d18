// gesture-cli: synthesize corpora, extract features, train and evaluate
// forests, embed, rank and report.
//
// Exit codes: 0 success, 2 I/O failure, 3 data validation failure,
// 4 bad arguments.

#include "gesture/error.hpp"
#include "gesture/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using gesture::ErrorKind;

constexpr int kExitIo = 2;
constexpr int kExitData = 3;
constexpr int kExitArgs = 4;

int exit_code(ErrorKind kind)
{
   switch(kind) {
   case ErrorKind::Io: return kExitIo;
   case ErrorKind::InvalidArgument: return kExitArgs;
   default: return kExitData;
   }
}

std::vector<gesture::FeatureSubset> parse_subsets(const std::string& s)
{
   if(s == "all") return {gesture::FeatureSubset::Static, gesture::FeatureSubset::Dynamic, gesture::FeatureSubset::Combined};
   const auto subset = gesture::parse_subset(s);
   if(!subset) throw gesture::Error(ErrorKind::InvalidArgument, "unknown subset '" + s + "'");
   return {*subset};
}

struct AnalysisArgs
{
   std::string manifest;
   std::string out;
   std::string subset = "combined";
   std::uint64_t seed = 42;
   double test_fraction = 0.3;
   std::size_t trees = 200;
   double perplexity = 30.0;
   std::size_t tsne_iterations = 1000;
   double confidence_threshold = gesture::kDefaultConfidenceThreshold;
   std::size_t top_k = 10;
   unsigned threads = 0;

   void add_to(CLI::App* cmd, bool needs_manifest)
   {
      auto* m = cmd->add_option("--manifest", manifest, "Dataset manifest (JSON)");
      if(needs_manifest) m->required();
      cmd->add_option("--out", out, "Output directory")->required();
      cmd->add_option("--subset", subset, "static|dynamic|combined|all")->capture_default_str();
      cmd->add_option("--seed", seed, "Global seed")->capture_default_str();
      cmd->add_option("--test-fraction", test_fraction, "Held-out fraction per class")->capture_default_str();
      cmd->add_option("--trees", trees, "Number of trees")->capture_default_str();
      cmd->add_option("--perplexity", perplexity, "t-SNE perplexity")->capture_default_str();
      cmd->add_option("--tsne-iterations", tsne_iterations, "t-SNE iterations")->capture_default_str();
      cmd->add_option("--confidence-threshold", confidence_threshold, "Keypoint repair threshold")
          ->capture_default_str();
      cmd->add_option("--top-k", top_k, "Ranked features kept in reports")->capture_default_str();
      cmd->add_option("--threads", threads, "Forest training threads (0 = all cores)")->capture_default_str();
   }

   gesture::PipelineConfig config() const
   {
      gesture::PipelineConfig c;
      c.manifest = manifest;
      c.out_dir = out;
      c.subsets = parse_subsets(subset);
      c.seed = seed;
      c.test_fraction = test_fraction;
      c.forest.n_trees = trees;
      c.tsne.perplexity = perplexity;
      c.tsne.iterations = tsne_iterations;
      c.confidence_threshold = confidence_threshold;
      c.top_k = top_k;
      c.threads = threads;
      return c;
   }
};

struct SynthArgs
{
   std::uint64_t seed = 42;
   double noise_sigma = 2.0;
   std::vector<std::size_t> counts{gesture::kDefaultCorpusCounts.begin(), gesture::kDefaultCorpusCounts.end()};
   bool right_handed = false;

   void add_to(CLI::App* cmd)
   {
      cmd->add_option("--noise-sigma", noise_sigma, "Keypoint noise (pixels)")->capture_default_str();
      cmd->add_option("--counts", counts, "Sequences per class: stop go thank_greet no_gesture")
          ->expected(4)
          ->delimiter(',');
      cmd->add_flag("--right-handed", right_handed, "Gesture with the right arm");
   }

   gesture::SynthCommand command(const std::string& out) const
   {
      gesture::SynthCommand c;
      c.out_dir = out;
      c.seed = seed;
      c.params.noise_sigma = noise_sigma;
      c.params.left_handed = !right_handed;
      std::copy(counts.begin(), counts.end(), c.counts.begin());
      return c;
   }
};

void print_paths(const std::vector<std::filesystem::path>& paths)
{
   for(const auto& p : paths) std::cout << p.string() << '\n';
}

} // namespace

int main(int argc, char** argv)
{
   CLI::App app{"Pedestrian gesture recognition from 2D skeleton sequences"};
   app.require_subcommand(1);
   app.set_version_flag("--version", std::string(gesture::tool_version()));

   SynthArgs synth_args;
   std::string synth_out;
   auto* synth = app.add_subcommand("synth", "Generate a synthetic four-class corpus and manifest");
   synth->add_option("--out", synth_out, "Output directory")->required();
   synth->add_option("--seed", synth_args.seed, "Corpus seed")->capture_default_str();
   synth_args.add_to(synth);

   std::string extract_manifest, extract_subset = "combined", extract_out;
   double extract_threshold = gesture::kDefaultConfidenceThreshold;
   auto* extract = app.add_subcommand("extract", "Write the feature matrix of a corpus as CSV");
   extract->add_option("--manifest", extract_manifest, "Dataset manifest (JSON)")->required();
   extract->add_option("--subset", extract_subset, "static|dynamic|combined")->capture_default_str();
   extract->add_option("--out", extract_out, "Output CSV file")->required();
   extract->add_option("--confidence-threshold", extract_threshold, "Keypoint repair threshold")
       ->capture_default_str();

   AnalysisArgs train_args, eval_args, rank_args, embed_args, pipe_args;
   auto* train = app.add_subcommand("train", "Train a forest per subset and write model_<subset>.json");
   train_args.add_to(train, true);
   auto* evaluate = app.add_subcommand("evaluate", "Full analysis per subset, written as report_<subset>.json");
   eval_args.add_to(evaluate, true);
   auto* rank = app.add_subcommand("rank", "Gini importance ranking per subset (ranking_<subset>.csv)");
   rank_args.add_to(rank, true);
   auto* embed = app.add_subcommand("embed", "t-SNE embedding and class ellipses per subset");
   embed_args.add_to(embed, true);

   std::vector<std::string> report_inputs;
   std::string report_out;
   auto* report = app.add_subcommand("report", "Compare subset reports; write table and scatter plots");
   report->add_option("reports", report_inputs, "report_<subset>.json files")->required();
   report->add_option("--out", report_out, "Output directory")->required();

   SynthArgs pipe_synth;
   pipe_args.subset = "all";
   auto* pipeline = app.add_subcommand("pipeline", "synth, extract, train, evaluate, embed, rank and report");
   pipe_args.add_to(pipeline, false);
   pipe_synth.add_to(pipeline);

   try {
      app.parse(argc, argv);
   } catch(const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : kExitArgs;
   }

   try {
      if(*synth) {
         if(synth_args.counts.size() != gesture::kNumClasses)
            throw gesture::Error(ErrorKind::InvalidArgument, "--counts needs four values");
         std::cout << gesture::run_synth(synth_args.command(synth_out)).string() << '\n';
      } else if(*extract) {
         const auto subsets = parse_subsets(extract_subset);
         if(subsets.size() != 1)
            throw gesture::Error(ErrorKind::InvalidArgument, "extract takes a single subset");
         std::cout << gesture::run_extract(extract_manifest, subsets.front(), extract_out, extract_threshold).string()
                   << '\n';
      } else if(*train) {
         print_paths(gesture::run_train(train_args.config()));
      } else if(*evaluate) {
         print_paths(gesture::run_evaluate(eval_args.config()));
      } else if(*rank) {
         print_paths(gesture::run_rank(rank_args.config()));
      } else if(*embed) {
         print_paths(gesture::run_embed(embed_args.config()));
      } else if(*report) {
         std::vector<std::filesystem::path> inputs(report_inputs.begin(), report_inputs.end());
         print_paths(gesture::run_report(inputs, report_out));
      } else if(*pipeline) {
         pipe_synth.seed = pipe_args.seed;
         print_paths(gesture::run_pipeline(pipe_args.config(), pipe_synth.command(pipe_args.out)));
      }
   } catch(const gesture::Error& e) {
      std::cerr << "gesture-cli: " << e.what() << '\n';
      return exit_code(e.kind());
   } catch(const std::exception& e) {
      std::cerr << "gesture-cli: " << e.what() << '\n';
      return 1;
   }
   return 0;
}
