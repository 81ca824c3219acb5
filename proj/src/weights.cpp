#include "sjhdr/nn/weights.hpp"

#include <nlohmann/json.hpp>

#include <cstring>

#include "sjhdr/io.hpp"

namespace sjhdr::nn {

using nlohmann::json;

void save_weights(const ModelWeights& w, const std::filesystem::path& stem) {
  json meta;
  meta["format"] = "sjhdr-weights-v1";
  meta["arch_tag"] = w.arch_tag;
  meta["seed"] = w.seed;
  json entries = json::array();
  std::vector<float> blob;
  for (const auto& [name, t] : w.params) {
    json e;
    e["name"] = name;
    e["shape"] = t.shape();
    e["offset"] = blob.size();
    entries.push_back(e);
    blob.insert(blob.end(), t.vec().begin(), t.vec().end());
  }
  meta["entries"] = entries;
  meta["total"] = blob.size();
  io::write_text(stem.string() + ".json", meta.dump(2) + "\n");
  io::write_f32(stem.string() + ".f32", blob.data(), blob.size());
}

ModelWeights load_weights(const std::filesystem::path& stem) {
  const auto meta_path = stem.string() + ".json";
  json meta;
  try {
    meta = json::parse(io::read_text(meta_path));
  } catch (const json::exception& e) {
    throw ParseError("weights meta " + meta_path + ": " + e.what());
  }
  try {
    if (meta.at("format") != "sjhdr-weights-v1")
      throw ParseError("weights meta " + meta_path + ": unsupported format");
    ModelWeights w;
    w.arch_tag = meta.at("arch_tag").get<std::string>();
    w.seed = meta.at("seed").get<std::uint64_t>();
    const std::size_t total = meta.at("total").get<std::size_t>();
    auto blob = io::read_f32(stem.string() + ".f32", total, "weights blob");
    for (const auto& e : meta.at("entries")) {
      const auto name = e.at("name").get<std::string>();
      const auto shape = e.at("shape").get<std::vector<int>>();
      const auto offset = e.at("offset").get<std::size_t>();
      Tensor t(shape);
      if (offset + t.size() > blob.size())
        throw ParseError("weights blob overrun for '" + name + "'");
      std::memcpy(t.data(), blob.data() + offset, t.size() * sizeof(float));
      w.params.emplace(name, std::move(t));
    }
    return w;
  } catch (const json::exception& e) {
    throw ParseError("weights meta " + meta_path + ": " + e.what());
  }
}

}  // namespace sjhdr::nn
