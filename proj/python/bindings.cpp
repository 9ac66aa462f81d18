#include "gesture/clustering.hpp"
#include "gesture/error.hpp"
#include "gesture/features.hpp"
#include "gesture/forest.hpp"
#include "gesture/ingest.hpp"
#include "gesture/model_io.hpp"
#include "gesture/pipeline.hpp"
#include "gesture/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/gil_safe_call_once.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace gesture;

namespace {

using FrameArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

RawFrame frame_from_array(const FrameArray& a)
{
   if(a.ndim() != 2 || a.shape(0) != kNumKeypoints || (a.shape(1) != 2 && a.shape(1) != 3))
      throw py::value_error("frame must have shape (17, 2) or (17, 3)");
   const auto r = a.unchecked<2>();
   RawFrame f;
   for(py::ssize_t i = 0; i < 17; ++i) {
      f.points[i] = {r(i, 0), r(i, 1)};
      f.confidence[i] = a.shape(1) == 3 ? r(i, 2) : 1.0;
   }
   return f;
}

KeypointSequence sequence_from_array(const FrameArray& a, double fps)
{
   if(a.ndim() != 3 || a.shape(1) != kNumKeypoints || (a.shape(2) != 2 && a.shape(2) != 3))
      throw py::value_error("frames must have shape (T, 17, 2) or (T, 17, 3)");
   const auto r = a.unchecked<3>();
   KeypointSequence seq;
   seq.fps = fps;
   for(py::ssize_t t = 0; t < a.shape(0); ++t) {
      RawFrame f;
      for(py::ssize_t i = 0; i < 17; ++i) {
         f.points[i] = {r(t, i, 0), r(t, i, 1)};
         f.confidence[i] = a.shape(2) == 3 ? r(t, i, 2) : 1.0;
      }
      seq.frames.push_back(f);
   }
   return seq;
}

py::array_t<double> sequence_to_array(const KeypointSequence& seq)
{
   py::array_t<double> out({static_cast<py::ssize_t>(seq.frames.size()), py::ssize_t{17}, py::ssize_t{3}});
   auto w = out.mutable_unchecked<3>();
   for(std::size_t t = 0; t < seq.frames.size(); ++t)
      for(std::size_t i = 0; i < kNumKeypoints; ++i) {
         w(t, i, 0) = seq.frames[t].points[i].x;
         w(t, i, 1) = seq.frames[t].points[i].y;
         w(t, i, 2) = seq.frames[t].confidence[i];
      }
   return out;
}

FeatureSubset subset_arg(const std::string& s)
{
   const auto subset = parse_subset(s);
   if(!subset) throw py::value_error("subset must be 'static', 'dynamic' or 'combined'");
   return *subset;
}

GestureClass class_arg(const std::string& s)
{
   const auto c = parse_class(s);
   if(!c) throw py::value_error("unknown gesture class '" + s + "'");
   return *c;
}

LabeledDataset dataset_from(const Eigen::MatrixXd& x, const std::vector<int>& y)
{
   LabeledDataset d;
   d.features = x;
   for(std::size_t i = 0; i < y.size(); ++i) {
      d.labels.push_back(class_from_code(static_cast<std::size_t>(y[i])));
      d.ids.push_back(std::to_string(i));
   }
   d.validate();
   return d;
}

std::vector<int> codes_of(const std::vector<GestureClass>& labels)
{
   std::vector<int> out;
   for(auto l : labels) out.push_back(static_cast<int>(code(l)));
   return out;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
   m.doc() = "Pedestrian gesture recognition from 2D COCO-17 skeleton sequences";
   m.attr("__version__") = std::string(tool_version());
   m.attr("NUM_KEYPOINTS") = kNumKeypoints;
   m.attr("CLASSES") = std::vector<std::string>{"stop", "go", "thank_greet", "no_gesture"};

   PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> gesture_error;
   gesture_error.call_once_and_store_result(
       [&]() { return py::exception<Error>(m, "GestureError", PyExc_ValueError); });
   py::register_exception_translator([](std::exception_ptr p) {
      try {
         if(p) std::rethrow_exception(p);
      } catch(const Error& e) {
         py::set_error(gesture_error.get_stored(), e.what());
      }
   });

   // skeleton
   m.def("torso_size", [](const FrameArray& f) { return torso_size(frame_from_array(f)); }, py::arg("frame"));
   m.def(
       "center_point",
       [](const FrameArray& f) {
          const auto c = center_point(frame_from_array(f));
          return std::make_pair(c.x, c.y);
       },
       py::arg("frame"));
   m.def(
       "normalize_frame",
       [](const FrameArray& f) {
          const auto n = normalize_frame(frame_from_array(f));
          Eigen::Matrix<double, 17, 2, Eigen::RowMajor> out;
          for(std::size_t i = 0; i < kNumKeypoints; ++i) out.row(static_cast<Eigen::Index>(i)) << n.points[i].x, n.points[i].y;
          return out;
       },
       py::arg("frame"), "Torso-normalized (17, 2) keypoints, mid-hip at the origin, y up.");

   // features
   m.def("feature_names", [](const std::string& s) { return feature_names(subset_arg(s)); },
         py::arg("subset") = "combined");
   m.def(
       "extract_features",
       [](const FrameArray& frames, const std::string& subset, double fps) {
          const auto fv = extract_feature_vector(sequence_from_array(frames, fps), subset_arg(subset));
          return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(fv.values.data(), static_cast<Eigen::Index>(fv.values.size())));
       },
       py::arg("frames"), py::arg("subset") = "combined", py::arg("fps") = kDefaultFps,
       "Feature vector of a (T, 17, 2|3) pixel-space sequence in canonical order.");

   // synth + ingest
   m.def(
       "generate_sequence",
       [](const std::string& cls, std::uint64_t seed, double noise_sigma, bool left_handed) {
          SynthParams p;
          p.noise_sigma = noise_sigma;
          p.left_handed = left_handed;
          return sequence_to_array(generate_sequence(class_arg(cls), p, seed));
       },
       py::arg("gesture_class"), py::arg("seed"), py::arg("noise_sigma") = 2.0, py::arg("left_handed") = true,
       "Synthetic (T, 17, 3) sequence of x, y, confidence.");
   m.def(
       "synthetic_dataset",
       [](const std::string& subset, std::uint64_t seed, double noise_sigma, std::vector<std::size_t> counts) {
          if(counts.size() != kNumClasses) throw py::value_error("counts needs four values");
          SynthParams p;
          p.noise_sigma = noise_sigma;
          std::array<std::size_t, kNumClasses> c{};
          std::copy(counts.begin(), counts.end(), c.begin());
          const auto corpus = generate_corpus(p, c, seed);
          const auto data = build_dataset(corpus.sequences, subset_arg(subset));
          return py::make_tuple(data.features, codes_of(data.labels), data.ids);
       },
       py::arg("subset") = "combined", py::arg("seed") = 42, py::arg("noise_sigma") = 2.0,
       py::arg("counts") = std::vector<std::size_t>(kDefaultCorpusCounts.begin(), kDefaultCorpusCounts.end()),
       "(X, y, ids) for a synthetic corpus.");
   m.def(
       "parse_sequence",
       [](const std::string& content) {
          std::vector<std::string> warnings;
          const auto seq = parse_sequence_file(content, &warnings);
          return py::make_tuple(sequence_to_array(seq), seq.fps, seq.source_id, warnings);
       },
       py::arg("content"));
   m.def(
       "serialize_sequence",
       [](const FrameArray& frames, double fps, const std::string& source_id) {
          auto seq = sequence_from_array(frames, fps);
          seq.source_id = source_id;
          return serialize_sequence(seq);
       },
       py::arg("frames"), py::arg("fps") = kDefaultFps, py::arg("source_id") = "");

   // classifier
   m.def(
       "stratified_split",
       [](const Eigen::MatrixXd& x, const std::vector<int>& y, double fraction, std::uint64_t seed) {
          auto d = dataset_from(x, y);
          for(std::size_t i = 0; i < d.ids.size(); ++i) {
             char buf[32];
             std::snprintf(buf, sizeof buf, "%08zu", i);
             d.ids[i] = buf;
          }
          auto [train, test] = stratified_split(d, fraction, seed);
          return py::make_tuple(train.features, codes_of(train.labels), test.features, codes_of(test.labels));
       },
       py::arg("X"), py::arg("y"), py::arg("test_fraction") = 0.3, py::arg("seed") = 0);

   py::class_<ForestModel>(m, "Forest")
       .def_property_readonly("n_trees", [](const ForestModel& f) { return f.trees.size(); })
       .def_property_readonly("importances", [](const ForestModel& f) { return f.importances; })
       .def_property_readonly("feature_names", [](const ForestModel& f) { return f.feature_names; })
       .def(
           "predict",
           [](const ForestModel& f, const std::vector<double>& x) {
              const auto p = predict(f, x);
              return py::make_tuple(static_cast<int>(code(p.label)), p.votes);
           },
           py::arg("x"), "(class code, votes[4]) for one feature vector.")
       .def(
           "predict_many",
           [](const ForestModel& f, const Eigen::MatrixXd& x) {
              std::vector<int> out;
              std::vector<double> row(static_cast<std::size_t>(x.cols()));
              for(Eigen::Index i = 0; i < x.rows(); ++i) {
                 for(Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
                 out.push_back(static_cast<int>(code(predict(f, row).label)));
              }
              return out;
           },
           py::arg("X"))
       .def(
           "evaluate",
           [](const ForestModel& f, const Eigen::MatrixXd& x, const std::vector<int>& y) {
              const auto cm = evaluate(f, dataset_from(x, y));
              return py::make_tuple(cm.counts, cm.accuracy);
           },
           py::arg("X"), py::arg("y"), "(confusion counts [true][predicted], accuracy).")
       .def("ranking",
            [](const ForestModel& f) {
               std::vector<std::pair<std::string, double>> out;
               for(const auto& r : gini_importance(f)) out.emplace_back(r.name, r.score);
               return out;
            })
       .def("to_json", [](const ForestModel& f) { return serialize_model(f); })
       .def_static("from_json", [](const std::string& s) { return parse_model(s); }, py::arg("content"));

   m.def(
       "train_forest",
       [](const Eigen::MatrixXd& x, const std::vector<int>& y, std::size_t n_trees, std::uint64_t seed,
          std::optional<std::size_t> mtry, std::optional<std::size_t> max_depth, std::size_t min_samples_leaf,
          bool bootstrap, std::optional<std::vector<std::string>> names, unsigned threads) {
          auto d = dataset_from(x, y);
          if(names) d.feature_names = *names;
          ForestParams p;
          p.n_trees = n_trees;
          p.seed = seed;
          p.mtry = mtry;
          p.max_depth = max_depth;
          p.min_samples_leaf = min_samples_leaf;
          p.bootstrap = bootstrap;
          py::gil_scoped_release release;
          return train_forest(d, p, threads);
       },
       py::arg("X"), py::arg("y"), py::arg("n_trees") = 200, py::arg("seed") = 0, py::arg("mtry") = py::none(),
       py::arg("max_depth") = py::none(), py::arg("min_samples_leaf") = 1, py::arg("bootstrap") = true,
       py::arg("feature_names") = py::none(), py::arg("threads") = 1);

   // clustering
   m.def(
       "tsne_embed",
       [](const Eigen::MatrixXd& x, double perplexity, std::uint64_t seed, std::size_t iterations) {
          TsneParams p;
          p.perplexity = perplexity;
          p.seed = seed;
          p.iterations = iterations;
          Embedding2D e;
          {
             py::gil_scoped_release release;
             e = tsne_embed(x, p);
          }
          py::dict out;
          out["points"] = e.points;
          out["initial_kl"] = e.initial_kl;
          out["final_kl"] = e.final_kl;
          return out;
       },
       py::arg("X"), py::arg("perplexity") = 30.0, py::arg("seed") = 0, py::arg("iterations") = 1000);
   m.def(
       "silhouette_score",
       [](const Eigen::MatrixXd& points, const std::vector<int>& labels) { return silhouette_score(points, labels); },
       py::arg("points"), py::arg("labels"));
   m.def(
       "fit_class_gaussians",
       [](const Eigen::MatrixXd& points, const std::vector<int>& labels) {
          Embedding2D e;
          e.points = points;
          for(int l : labels) e.labels.push_back(class_from_code(static_cast<std::size_t>(l)));
          py::list out;
          for(const auto& g : fit_class_gaussians(e)) {
             py::dict d;
             d["class"] = static_cast<int>(code(g.label));
             d["mean"] = Eigen::Vector2d(g.mean);
             d["covariance"] = Eigen::Matrix2d(g.covariance);
             d["semi_major"] = g.ellipse.semi_major;
             d["semi_minor"] = g.ellipse.semi_minor;
             d["angle"] = g.ellipse.angle;
             out.append(d);
          }
          return out;
       },
       py::arg("points"), py::arg("labels"));
}
