#include "gesture/model_io.hpp"

#include "gesture/error.hpp"

namespace gesture {

using nlohmann::json;

json forest_params_to_json(const ForestParams& p)
{
   json j;
   j["n_trees"] = p.n_trees;
   j["max_depth"] = p.max_depth ? json(*p.max_depth) : json(nullptr);
   j["min_samples_leaf"] = p.min_samples_leaf;
   j["mtry"] = p.mtry ? json(*p.mtry) : json(nullptr);
   j["bootstrap"] = p.bootstrap;
   j["seed"] = p.seed;
   return j;
}

ForestParams forest_params_from_json(const json& j)
{
   ForestParams p;
   p.n_trees = j.at("n_trees").get<std::size_t>();
   if(!j.at("max_depth").is_null()) p.max_depth = j["max_depth"].get<std::size_t>();
   p.min_samples_leaf = j.at("min_samples_leaf").get<std::size_t>();
   if(!j.at("mtry").is_null()) p.mtry = j["mtry"].get<std::size_t>();
   p.bootstrap = j.at("bootstrap").get<bool>();
   p.seed = j.at("seed").get<std::uint64_t>();
   return p;
}

std::string serialize_model(const ForestModel& model)
{
   json doc;
   doc["schema"] = "gesture-forest";
   doc["schema_version"] = kModelSchemaVersion;
   doc["params"] = forest_params_to_json(model.params);
   doc["feature_names"] = model.feature_names;
   doc["importances"] = model.importances;
   json trees = json::array();
   for(const auto& tree : model.trees) {
      json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
           counts = json::array(), decrease = json::array();
      for(const auto& n : tree.nodes) {
         feature.push_back(n.feature);
         threshold.push_back(n.threshold);
         left.push_back(n.left);
         right.push_back(n.right);
         counts.push_back(n.counts);
         decrease.push_back(n.impurity_decrease);
      }
      trees.push_back({{"feature", feature},
                       {"threshold", threshold},
                       {"left", left},
                       {"right", right},
                       {"counts", counts},
                       {"impurity_decrease", decrease}});
   }
   doc["trees"] = std::move(trees);
   return doc.dump() + "\n";
}

ForestModel parse_model(std::string_view content)
{
   json doc;
   try {
      doc = json::parse(content);
   } catch(const json::parse_error& e) {
      throw Error(ErrorKind::MalformedFile, std::string("model file: ") + e.what());
   }
   try {
      if(doc.at("schema").get<std::string>() != "gesture-forest")
         throw Error(ErrorKind::SchemaViolation, "not a gesture-forest document");
      if(doc.at("schema_version").get<int>() != kModelSchemaVersion)
         throw Error(ErrorKind::VersionUnsupported, "model schema_version " + doc["schema_version"].dump());

      ForestModel m;
      m.params = forest_params_from_json(doc.at("params"));
      m.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
      m.importances = doc.at("importances").get<std::vector<double>>();
      if(m.importances.size() != m.feature_names.size())
         throw Error(ErrorKind::SchemaViolation, "importance count does not match feature count");

      for(const auto& t : doc.at("trees")) {
         const auto feature = t.at("feature").get<std::vector<std::int32_t>>();
         const auto threshold = t.at("threshold").get<std::vector<double>>();
         const auto left = t.at("left").get<std::vector<std::int32_t>>();
         const auto right = t.at("right").get<std::vector<std::int32_t>>();
         const auto counts = t.at("counts").get<std::vector<std::array<std::uint32_t, kNumClasses>>>();
         const auto decrease = t.at("impurity_decrease").get<std::vector<double>>();
         const std::size_t n = feature.size();
         if(n == 0 || threshold.size() != n || left.size() != n || right.size() != n || counts.size() != n
            || decrease.size() != n)
            throw Error(ErrorKind::SchemaViolation, "tree node arrays have inconsistent lengths");

         DecisionTree tree;
         tree.nodes.resize(n);
         for(std::size_t i = 0; i < n; ++i) {
            auto& node = tree.nodes[i];
            node = {feature[i], threshold[i], left[i], right[i], counts[i], decrease[i]};
            if(node.is_leaf()) continue;
            const auto valid_child = [&](std::int32_t c) { return c > static_cast<std::int32_t>(i) && c < static_cast<std::int32_t>(n); };
            if(static_cast<std::size_t>(node.feature) >= m.feature_names.size() || !valid_child(node.left)
               || !valid_child(node.right))
               throw Error(ErrorKind::SchemaViolation, "tree node " + std::to_string(i) + " is malformed");
         }
         m.trees.push_back(std::move(tree));
      }
      return m;
   } catch(const json::exception& e) {
      throw Error(ErrorKind::SchemaViolation, std::string("model file: ") + e.what());
   }
}

} // namespace gesture
