#include "sjhdr/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <chrono>

#include "sjhdr/compose.hpp"
#include "sjhdr/io.hpp"
#include "sjhdr/models/pcfnet.hpp"
#include "sjhdr/models/ranet.hpp"

namespace sjhdr {

using nlohmann::json;
namespace fs = std::filesystem;

const char* TrainedPipeline::path_stem(ReferenceChoice r) {
  switch (r) {
    case ReferenceChoice::kUnder: return "pcf_under";
    case ReferenceChoice::kMedium: return "pcf_medium";
    case ReferenceChoice::kOver: return "pcf_over";
  }
  return "?";
}

void TrainedPipeline::set_path(ReferenceChoice r, nn::ModelWeights w) {
  paths_[static_cast<int>(r)] = std::move(w);
}

bool TrainedPipeline::path_loaded(ReferenceChoice r) const {
  std::lock_guard lock(*mutex_);
  return paths_[static_cast<int>(r)].has_value();
}

const nn::ModelWeights& TrainedPipeline::path_weights(ReferenceChoice r) const {
  std::lock_guard lock(*mutex_);
  auto& slot = paths_[static_cast<int>(r)];
  if (!slot) {
    if (bundle_dir_.empty())
      throw ConfigError(std::string("fusion path '") + to_string(r) + "' not loaded");
    slot = nn::load_weights(bundle_dir_ / path_stem(r));
  }
  return *slot;
}

void TrainedPipeline::validate() const {
  std::string tag;
  for (auto r : kAllReferences) {
    const auto& w = path_weights(r);
    if (tag.empty())
      tag = w.arch_tag;
    else if (w.arch_tag != tag)
      throw DataError("fusion path architecture tags disagree: '" + tag + "' vs '" +
                      w.arch_tag + "'");
  }
  models::PcfConfig::from_tag(tag);
  models::PreDnConfig::from_tag(predn.arch_tag);
  models::RanetConfig::from_tag(ranet.arch_tag);
}

ReferenceChoice select_reference(const TrainedPipeline& pipe,
                                 const ExposureBracket& bracket) {
  if (pipe.ranet.params.empty()) throw ConfigError("pipeline has no advisor weights");
  const Tensor input = make_ranet_input(bracket, pipe.tmo);
  const Tensor logits = models::ranet_forward(pipe.ranet, input, bracket.priors);
  return models::ranet_choice(logits);
}

InferenceResult run_sjhdr(const TrainedPipeline& pipe, const ExposureBracket& bracket,
                          std::optional<ReferenceChoice> override_ref) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_bracket(bracket);

  InferenceResult result;
  if (override_ref) {
    result.chosen = *override_ref;
  } else {
    if (pipe.ranet.params.empty()) throw ConfigError("pipeline has no advisor weights");
    const Tensor input = make_ranet_input(bracket, pipe.tmo);
    result.ranet_logits = models::ranet_forward(pipe.ranet, input, bracket.priors);
    result.chosen = models::ranet_choice(result.ranet_logits);
  }

  const auto stacks = make_pcf_stacks(bracket, pipe.predn, pipe.tmo, pipe.ceiling);
  result.hdr_tm.pixels =
      models::pcf_forward(pipe.path_weights(result.chosen), stacks, result.chosen);
  result.hdr_tm.operator_kind = pipe.tmo.kind;
  result.hdr_tm.mu = pipe.tmo.mu;
  result.hdr_linear.pixels = pipe.tmo.invert(result.hdr_tm);
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

void save_pipeline(const TrainedPipeline& pipe, const fs::path& dir) {
  pipe.validate();
  fs::create_directories(dir);
  nn::save_weights(pipe.predn, dir / "predn");
  nn::save_weights(pipe.ranet, dir / "ranet");
  for (auto r : kAllReferences)
    nn::save_weights(pipe.path_weights(r), dir / TrainedPipeline::path_stem(r));
  json j;
  j["format"] = "sjhdr-pipeline-v1";
  j["tmo"] = to_string(pipe.tmo.kind);
  j["mu"] = pipe.tmo.mu;
  j["ceiling"] = pipe.ceiling;
  j["predn_tag"] = pipe.predn.arch_tag;
  j["ranet_tag"] = pipe.ranet.arch_tag;
  j["pcf_tag"] = pipe.path_weights(ReferenceChoice::kUnder).arch_tag;
  io::write_text(dir / "pipeline.json", j.dump(2) + "\n");
}

TrainedPipeline load_pipeline(const fs::path& dir, bool eager) {
  json j;
  try {
    j = json::parse(io::read_text(dir / "pipeline.json"));
  } catch (const json::exception& e) {
    throw ParseError("pipeline manifest: " + std::string(e.what()));
  }
  TrainedPipeline pipe;
  try {
    if (j.at("format") != "sjhdr-pipeline-v1")
      throw ParseError("pipeline manifest: unsupported format '" +
                       j.at("format").get<std::string>() + "'");
    pipe.tmo.kind = tmo_kind_from_string(j.at("tmo").get<std::string>());
    pipe.tmo.mu = j.at("mu").get<double>();
    pipe.ceiling = j.at("ceiling").get<double>();
  } catch (const json::exception& e) {
    throw ParseError("pipeline manifest: " + std::string(e.what()));
  }
  pipe.predn = nn::load_weights(dir / "predn");
  pipe.ranet = nn::load_weights(dir / "ranet");
  pipe.bundle_dir_ = dir;
  if (j.at("predn_tag") != pipe.predn.arch_tag || j.at("ranet_tag") != pipe.ranet.arch_tag)
    throw DataError("pipeline manifest tags disagree with component checkpoints");
  for (auto r : kAllReferences) {
    const auto stem = dir / TrainedPipeline::path_stem(r);
    if (!fs::exists(stem.string() + ".json"))
      throw DataError(std::string("missing fusion path '") + to_string(r) + "' (" +
                      stem.string() + ".json)");
    if (eager) pipe.set_path(r, nn::load_weights(stem));
  }
  if (eager) {
    pipe.validate();
    for (auto r : kAllReferences)
      if (pipe.path_weights(r).arch_tag != j.at("pcf_tag").get<std::string>())
        throw DataError("pipeline manifest pcf tag disagrees with checkpoints");
  }
  return pipe;
}

std::map<std::string, MetricReport> evaluate(
    const TrainedPipeline& pipe, const std::vector<const sim::DatasetSample*>& eval_set,
    const EvalOptions& opts) {
  const auto metric = opts.metric ? opts.metric : train::psnr_mu_metric(pipe.tmo.mu);
  std::map<std::string, MetricReport> reports;
  const std::array<std::string, 3> fixed_names = {"U_ref", "M_ref", "O_ref"};

  for (const auto* s : eval_set) {
    std::array<Tensor, 3> outputs;
    std::array<double, 3> scores;
    for (int r = 0; r < 3; ++r) {
      const auto ref = static_cast<ReferenceChoice>(r);
      const auto result = run_sjhdr(pipe, s->variant(ref), ref);
      outputs[r] = result.hdr_linear.pixels;
      scores[r] = metric(outputs[r], s->ground_truth.pixels);
      reports[fixed_names[r]].add(s->id, outputs[r], s->ground_truth.pixels, pipe.tmo.mu);
    }
    if (opts.selective) {
      const auto chosen =
          select_reference(pipe, s->variant(ReferenceChoice::kMedium));
      reports["S_ref"].add(s->id, outputs[static_cast<int>(chosen)],
                           s->ground_truth.pixels, pipe.tmo.mu);
    }
    if (opts.oracle) {
      const auto best = train::label_winner(scores);
      reports["oracle"].add(s->id, outputs[static_cast<int>(best)],
                            s->ground_truth.pixels, pipe.tmo.mu);
    }
  }
  return reports;
}

}  // namespace sjhdr
