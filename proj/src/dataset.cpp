#include "sjhdr/sim/dataset.hpp"

#include <nlohmann/json.hpp>

#include <set>

#include "sjhdr/io.hpp"

namespace sjhdr::sim {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "sjhdr-dataset-v1";

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json frame_entry(const fs::path& dir, const std::string& file, const Tensor& px) {
  io::write_f32(dir / file, px.data(), px.size());
  json e;
  e["file"] = file;
  e["hash"] = hex64(io::fnv1a(px.data(), px.size() * sizeof(float)));
  return e;
}

Tensor read_frame(const fs::path& dir, const json& entry, const std::vector<int>& shape,
                  const std::string& what) {
  const auto file = entry.at("file").get<std::string>();
  Tensor t(shape);
  auto vals = io::read_f32(dir / file, t.size(), what);
  std::copy(vals.begin(), vals.end(), t.data());
  const auto expect = entry.at("hash").get<std::string>();
  const auto got = hex64(io::fnv1a(t.data(), t.size() * sizeof(float)));
  if (got != expect)
    throw ParseError(what + ": pixel file " + file + " hash mismatch (corrupt?)");
  return t;
}

}  // namespace

std::vector<const DatasetSample*> Dataset::split(bool train) const {
  const auto& ids = train ? train_ids : test_ids;
  std::vector<const DatasetSample*> out;
  for (const auto& id : ids) out.push_back(&by_id(id));
  return out;
}

const DatasetSample& Dataset::by_id(const std::string& id) const {
  for (const auto& s : samples)
    if (s.id == id) return s;
  throw DataError("no sample with id '" + id + "'");
}

void write_dataset(const Dataset& ds, const fs::path& root) {
  fs::create_directories(root);
  std::set<std::string> seen;
  json manifest;
  manifest["format"] = kFormat;
  manifest["samples"] = json::array();
  for (const auto& s : ds.samples) {
    if (s.id.empty() || !seen.insert(s.id).second)
      throw ConfigError("duplicate or empty sample id '" + s.id + "'");
    const fs::path dir = root / s.id;
    fs::create_directories(dir);

    json meta;
    meta["id"] = s.id;
    meta["ref"] = static_cast<int>(s.ref);
    meta["ceiling"] = s.ceiling;
    meta["exposure_times"] = s.exposure_times;
    meta["iso"] = s.iso;
    meta["gamma"] = s.gamma;
    meta["bit_depth"] = s.bit_depth;
    meta["occlusion"] = s.occlusion;
    meta["shape"] = s.ground_truth.pixels.shape();
    const auto& pr = s.bracket().priors;
    meta["priors"] = {{"brightness", pr.brightness},
                      {"iso", pr.iso},
                      {"ev_steps", pr.ev_steps}};
    meta["gt"] = frame_entry(dir, "gt.f32", s.ground_truth.pixels);
    json stat = json::array(), dyn = json::array();
    for (int i = 0; i < 3; ++i) {
      // Variant i holds the static capture at position i; any other variant
      // holds the displaced capture at that position.
      const Tensor& st = s.reference_variants[i].frames[i].pixels;
      const Tensor& dn = s.reference_variants[(i + 1) % 3].frames[i].pixels;
      stat.push_back(frame_entry(dir, "static_" + std::to_string(i) + ".f32", st));
      dyn.push_back(frame_entry(dir, "dynamic_" + std::to_string(i) + ".f32", dn));
    }
    meta["static"] = stat;
    meta["dynamic"] = dyn;

    const std::string meta_str = meta.dump(2) + "\n";
    io::write_text(dir / "meta.json", meta_str);
    json ms;
    ms["id"] = s.id;
    ms["meta_hash"] = hex64(io::fnv1a(meta_str.data(), meta_str.size()));
    manifest["samples"].push_back(ms);
  }
  manifest["train"] = ds.train_ids;
  manifest["test"] = ds.test_ids;
  io::write_text(root / "manifest.json", manifest.dump(2) + "\n");
}

Dataset read_dataset(const fs::path& root) {
  json manifest;
  try {
    manifest = json::parse(io::read_text(root / "manifest.json"));
  } catch (const json::exception& e) {
    throw ParseError("manifest " + (root / "manifest.json").string() + ": " + e.what());
  }

  Dataset ds;
  try {
    if (manifest.at("format") != kFormat)
      throw ParseError("manifest: unsupported format");
    ds.train_ids = manifest.at("train").get<std::vector<std::string>>();
    ds.test_ids = manifest.at("test").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }

  std::size_t index = 0;
  for (const auto& entry : manifest.at("samples")) {
    std::string id;
    try {
      id = entry.at("id").get<std::string>();
      const fs::path dir = root / id;
      const std::string meta_str = io::read_text(dir / "meta.json");
      const auto expect = entry.at("meta_hash").get<std::string>();
      if (hex64(io::fnv1a(meta_str.data(), meta_str.size())) != expect)
        throw ParseError("meta.json hash mismatch (corrupt?)");
      const json meta = json::parse(meta_str);

      DatasetSample s;
      s.id = meta.at("id").get<std::string>();
      s.ref = static_cast<ReferenceChoice>(meta.at("ref").get<int>());
      s.ceiling = meta.at("ceiling").get<double>();
      s.exposure_times = meta.at("exposure_times").get<std::array<double, 3>>();
      s.iso = meta.at("iso").get<double>();
      s.gamma = meta.at("gamma").get<double>();
      s.bit_depth = meta.at("bit_depth").get<int>();
      s.occlusion = meta.at("occlusion").get<bool>();
      const auto shape = meta.at("shape").get<std::vector<int>>();

      ScenePriors priors;
      priors.brightness = meta.at("priors").at("brightness").get<double>();
      priors.iso = meta.at("priors").at("iso").get<double>();
      priors.ev_steps = meta.at("priors").at("ev_steps").get<std::array<double, 3>>();

      s.ground_truth.pixels = read_frame(dir, meta.at("gt"), shape, "sample " + id);
      std::array<Tensor, 3> stat, dyn;
      for (int i = 0; i < 3; ++i) {
        stat[i] = read_frame(dir, meta.at("static").at(i), shape, "sample " + id);
        dyn[i] = read_frame(dir, meta.at("dynamic").at(i), shape, "sample " + id);
      }
      for (int r = 0; r < 3; ++r) {
        ExposureBracket& b = s.reference_variants[r];
        b.priors = priors;
        for (int i = 0; i < 3; ++i) {
          LdrImage& f = b.frames[i];
          f.pixels = (i == r) ? stat[i] : dyn[i];
          f.exposure_time = s.exposure_times[i];
          f.iso = s.iso;
          f.gamma = s.gamma;
          f.ev = priors.ev_steps[i];
        }
      }
      ds.samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw ParseError("sample " + std::to_string(index) + " (" + id + "): " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("sample " + std::to_string(index) + " (" + id + "): " + e.what());
    }
    ++index;
  }
  return ds;
}

}  // namespace sjhdr::sim
