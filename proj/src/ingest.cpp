#include "gesture/ingest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gesture {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 4> kSequenceFields = {"schema_version", "source_id", "fps", "frames"};
constexpr std::array<std::string_view, 4> kManifestFields = {"schema_version", "fps_default", "entries", "generator"};

json parse_json(std::string_view content, std::string_view what)
{
   try {
      return json::parse(content);
   } catch(const json::parse_error& e) {
      throw Error(ErrorKind::MalformedFile, std::string(what) + ": " + e.what());
   }
}

void check_version(const json& doc, int supported, std::string_view what)
{
   if(!doc.contains("schema_version"))
      throw Error(ErrorKind::SchemaViolation, std::string(what) + " lacks schema_version");
   const auto& v = doc.at("schema_version");
   if(!v.is_number_integer())
      throw Error(ErrorKind::SchemaViolation, std::string(what) + " schema_version must be an integer");
   if(v.get<int>() != supported)
      throw Error(ErrorKind::VersionUnsupported,
                  std::string(what) + " schema_version " + v.dump() + " (supported: " + std::to_string(supported)
                      + ")");
}

double number(const json& v, std::string_view what)
{
   if(!v.is_number()) throw Error(ErrorKind::SchemaViolation, std::string(what) + " must be a number");
   return v.get<double>();
}

} // namespace

KeypointSequence parse_sequence_file(std::string_view content, std::vector<std::string>* warnings, double default_fps)
{
   const json doc = parse_json(content, "sequence file");
   if(!doc.is_object()) throw Error(ErrorKind::MalformedFile, "sequence file must be a JSON object");
   check_version(doc, kSequenceSchemaVersion, "sequence file");

   for(const auto& [key, _] : doc.items())
      if(std::find(kSequenceFields.begin(), kSequenceFields.end(), key) == kSequenceFields.end() && warnings)
         warnings->push_back("sequence file: ignoring unknown field '" + key + "'");

   KeypointSequence seq;
   if(doc.contains("source_id")) {
      if(!doc["source_id"].is_string()) throw Error(ErrorKind::SchemaViolation, "source_id must be a string");
      seq.source_id = doc["source_id"].get<std::string>();
   }
   seq.fps = doc.contains("fps") ? number(doc["fps"], "fps") : default_fps;
   if(!(seq.fps > 0.0)) throw Error(ErrorKind::SchemaViolation, "fps must be positive");

   if(!doc.contains("frames") || !doc["frames"].is_array())
      throw Error(ErrorKind::SchemaViolation, "sequence file needs a frames array");
   const auto& frames = doc["frames"];
   seq.frames.reserve(frames.size());
   for(std::size_t t = 0; t < frames.size(); ++t) {
      const auto& fr = frames[t];
      if(!fr.is_array() || fr.size() != kNumKeypoints)
         throw Error(ErrorKind::SchemaViolation,
                     "frame " + std::to_string(t) + " has "
                         + (fr.is_array() ? std::to_string(fr.size()) : std::string("no")) + " keypoints, expected 17",
                     t);
      RawFrame f;
      for(std::size_t i = 0; i < kNumKeypoints; ++i) {
         const auto& k = fr[i];
         if(!k.is_array() || k.size() != 3)
            throw Error(ErrorKind::SchemaViolation,
                        "frame " + std::to_string(t) + " keypoint " + std::to_string(i) + " is not [x, y, confidence]",
                        t);
         f.points[i] = {number(k[0], "x"), number(k[1], "y")};
         f.confidence[i] = number(k[2], "confidence");
      }
      seq.frames.push_back(f);
   }
   try {
      seq.validate();
   } catch(const Error& e) {
      if(e.kind() == ErrorKind::EmptySequence) throw Error(ErrorKind::SchemaViolation, e.what());
      throw Error(ErrorKind::SchemaViolation, e.what(), e.index());
   }
   return seq;
}

std::string serialize_sequence(const KeypointSequence& seq)
{
   // Written by hand so each frame sits on one line; numbers use the
   // library's shortest round-trip formatting.
   std::ostringstream out;
   out << "{\n";
   out << "  \"schema_version\": " << kSequenceSchemaVersion << ",\n";
   out << "  \"source_id\": " << json(seq.source_id).dump() << ",\n";
   out << "  \"fps\": " << json(seq.fps).dump() << ",\n";
   out << "  \"frames\": [";
   for(std::size_t t = 0; t < seq.frames.size(); ++t) {
      const auto& f = seq.frames[t];
      out << (t ? ",\n    [" : "\n    [");
      for(std::size_t i = 0; i < kNumKeypoints; ++i) {
         out << (i ? "," : "") << '[' << json(f.points[i].x).dump() << ',' << json(f.points[i].y).dump() << ','
             << json(f.confidence[i]).dump() << ']';
      }
      out << ']';
   }
   out << (seq.frames.empty() ? "]\n" : "\n  ]\n");
   out << "}\n";
   return out.str();
}

std::array<std::size_t, kNumClasses> DatasetManifest::class_counts() const
{
   std::array<std::size_t, kNumClasses> c{};
   for(const auto& e : entries) ++c[code(e.label)];
   return c;
}

DatasetManifest parse_manifest(std::string_view content)
{
   const json doc = parse_json(content, "manifest");
   if(!doc.is_object()) throw Error(ErrorKind::MalformedFile, "manifest must be a JSON object");
   check_version(doc, kManifestSchemaVersion, "manifest");

   DatasetManifest m;
   if(doc.contains("fps_default")) m.fps_default = number(doc["fps_default"], "fps_default");
   if(!(m.fps_default > 0.0)) throw Error(ErrorKind::SchemaViolation, "fps_default must be positive");
   if(doc.contains("generator")) m.generator = doc["generator"];
   if(!doc.contains("entries") || !doc["entries"].is_array())
      throw Error(ErrorKind::SchemaViolation, "manifest needs an entries array");

   std::set<std::string> seen;
   const auto& entries = doc["entries"];
   for(std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      const std::string where = "manifest entry " + std::to_string(k);
      if(!e.is_object() || !e.contains("path") || !e["path"].is_string() || !e.contains("label")
         || !e["label"].is_string())
         throw Error(ErrorKind::SchemaViolation, where + " needs string path and label", k);

      ManifestEntry entry;
      entry.path = e["path"].get<std::string>();
      const auto label = parse_class(e["label"].get<std::string>());
      if(!label) throw Error(ErrorKind::SchemaViolation, where + " has unknown label " + e["label"].dump(), k);
      entry.label = *label;

      const bool has_start = e.contains("gesture_start") && !e["gesture_start"].is_null();
      const bool has_end = e.contains("gesture_end") && !e["gesture_end"].is_null();
      if(has_start != has_end)
         throw Error(ErrorKind::SchemaViolation, where + " must give both gesture_start and gesture_end", k);
      if(has_start) {
         if(!e["gesture_start"].is_number_unsigned() || !e["gesture_end"].is_number_unsigned())
            throw Error(ErrorKind::SchemaViolation, where + " gesture bounds must be non-negative integers", k);
         entry.gesture_range = FrameRange{e["gesture_start"].get<std::size_t>(), e["gesture_end"].get<std::size_t>()};
         if(entry.gesture_range->start >= entry.gesture_range->end)
            throw Error(ErrorKind::SchemaViolation, where + " has an empty gesture range", k);
      }
      if(!seen.insert(entry.path).second)
         throw Error(ErrorKind::SchemaViolation, where + " repeats path '" + entry.path + "'", k);
      m.entries.push_back(std::move(entry));
   }
   return m;
}

std::string serialize_manifest(const DatasetManifest& m)
{
   json doc;
   doc["schema_version"] = m.schema_version;
   doc["fps_default"] = m.fps_default;
   json entries = json::array();
   for(const auto& e : m.entries) {
      json j;
      j["path"] = e.path;
      j["label"] = std::string(class_name(e.label));
      if(e.gesture_range) {
         j["gesture_start"] = e.gesture_range->start;
         j["gesture_end"] = e.gesture_range->end;
      }
      entries.push_back(std::move(j));
   }
   doc["entries"] = std::move(entries);
   if(!m.generator.is_null()) doc["generator"] = m.generator;
   return doc.dump(2) + "\n";
}

KeypointSequence repair_low_confidence(const KeypointSequence& seq, double threshold)
{
   if(!(threshold >= 0.0 && threshold <= 1.0))
      throw Error(ErrorKind::InvalidArgument, "confidence threshold must lie in [0, 1]");
   KeypointSequence out = seq;
   const std::size_t n = seq.frames.size();

   for(std::size_t i = 0; i < kNumKeypoints; ++i) {
      std::vector<std::size_t> valid;
      for(std::size_t t = 0; t < n; ++t)
         if(seq.frames[t].confidence[i] >= threshold) valid.push_back(t);
      if(valid.size() == n) continue;
      if(valid.empty()) {
         const bool torso = i == kp::LS || i == kp::RS || i == kp::LH || i == kp::RH;
         throw Error(torso ? ErrorKind::TorsoUnrecoverable : ErrorKind::KeypointNeverValid,
                     std::string(keypoint_name(i)) + " is below confidence " + std::to_string(threshold)
                         + " in every frame of '" + seq.source_id + "'",
                     i);
      }

      std::size_t next = 0; // first entry of `valid` at or after t
      for(std::size_t t = 0; t < n; ++t) {
         while(next < valid.size() && valid[next] < t) ++next;
         if(next < valid.size() && valid[next] == t) continue;

         Point2 p;
         if(next == 0) {
            p = seq.frames[valid.front()].points[i];
         } else if(next == valid.size()) {
            p = seq.frames[valid.back()].points[i];
         } else {
            const std::size_t a = valid[next - 1];
            const std::size_t b = valid[next];
            const double w = static_cast<double>(t - a) / static_cast<double>(b - a);
            const Point2 pa = seq.frames[a].points[i];
            const Point2 pb = seq.frames[b].points[i];
            p = {pa.x + w * (pb.x - pa.x), pa.y + w * (pb.y - pa.y)};
         }
         out.frames[t].points[i] = p;
         out.frames[t].confidence[i] = threshold;
      }
   }
   return out;
}

KeypointSequence trim_gesture_positive(const KeypointSequence& seq)
{
   if(!seq.gesture_range) throw Error(ErrorKind::MissingRange, "'" + seq.source_id + "' has no gesture range");
   const auto r = *seq.gesture_range;
   if(!(r.start < r.end && r.end <= seq.frames.size()))
      throw Error(ErrorKind::RangeOutOfBounds,
                  "gesture range [" + std::to_string(r.start) + ", " + std::to_string(r.end) + ") exceeds "
                      + std::to_string(seq.frames.size()) + " frames of '" + seq.source_id + "'");
   KeypointSequence out;
   out.fps = seq.fps;
   out.source_id = seq.source_id;
   out.label = seq.label;
   out.frames.assign(seq.frames.begin() + static_cast<std::ptrdiff_t>(r.start),
                     seq.frames.begin() + static_cast<std::ptrdiff_t>(r.end));
   return out;
}

LoadedCorpus load_manifest(std::string_view content, const std::filesystem::path& base_dir, const LoadOptions& options)
{
   const DatasetManifest manifest = parse_manifest(content);
   LoadedCorpus corpus;

   for(std::size_t k = 0; k < manifest.entries.size(); ++k) {
      const auto& entry = manifest.entries[k];
      const std::filesystem::path path = std::filesystem::path(entry.path).is_absolute()
                                             ? std::filesystem::path(entry.path)
                                             : base_dir / entry.path;
      try {
         std::vector<std::string> warnings;
         KeypointSequence seq = parse_sequence_file(read_text_file(path), &warnings, manifest.fps_default);
         for(auto& w : warnings) corpus.warnings.push_back(entry.path + ": " + w);
         if(seq.source_id.empty()) seq.source_id = entry.path;
         seq.label = entry.label;
         seq.gesture_range = entry.gesture_range;
         seq = repair_low_confidence(seq, options.confidence_threshold);
         if(seq.gesture_range) seq = trim_gesture_positive(seq);
         ++corpus.class_counts[code(entry.label)];
         corpus.sequences.push_back(std::move(seq));
      } catch(const Error& e) {
         if(options.fail_fast) throw Error(e.kind(), entry.path + ": " + e.what(), k);
         corpus.errors.push_back({k, entry.path, e.kind(), e.what()});
      }
   }
   return corpus;
}

LoadedCorpus load_manifest_file(const std::filesystem::path& manifest_path, const LoadOptions& options)
{
   return load_manifest(read_text_file(manifest_path), manifest_path.parent_path(), options);
}

std::string read_text_file(const std::filesystem::path& path)
{
   std::ifstream in(path, std::ios::binary);
   if(!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
   std::ostringstream ss;
   ss << in.rdbuf();
   if(in.bad()) throw Error(ErrorKind::Io, "failed reading '" + path.string() + "'");
   return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content)
{
   std::ofstream out(path, std::ios::binary | std::ios::trunc);
   if(!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
   out.write(content.data(), static_cast<std::streamsize>(content.size()));
   if(!out) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

std::string content_digest(std::string_view content)
{
   std::uint64_t h = 0xcbf29ce484222325ull;
   for(unsigned char c : content) {
      h ^= c;
      h *= 0x100000001b3ull;
   }
   char buf[17];
   std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
   return buf;
}

} // namespace gesture
