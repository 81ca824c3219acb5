#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "sjhdr/image.hpp"
#include "sjhdr/metrics.hpp"
#include "sjhdr/nn/weights.hpp"
#include "sjhdr/sim/dataset.hpp"
#include "sjhdr/tmo.hpp"
#include "sjhdr/train/trainer.hpp"

namespace sjhdr {

// The trained bundle: denoiser, one fusion model per reference path, the
// advisor, the tone-mapping operator and the normalization ceiling. Paths can
// be loaded lazily from the bundle directory (only the selected path resident)
// or eagerly for evaluation sweeps.
class TrainedPipeline {
 public:
  nn::ModelWeights predn;
  nn::ModelWeights ranet;
  TmoOperator tmo;
  double ceiling = sim::kRadianceCeiling;

  void set_path(ReferenceChoice r, nn::ModelWeights w);
  const nn::ModelWeights& path_weights(ReferenceChoice r) const;
  bool path_loaded(ReferenceChoice r) const;

  // Consistency across components (all three paths share one architecture).
  void validate() const;

  static const char* path_stem(ReferenceChoice r);

 private:
  friend TrainedPipeline load_pipeline(const std::filesystem::path&, bool);
  mutable std::array<std::optional<nn::ModelWeights>, 3> paths_;
  // Guards lazy path loading; boxed so the pipeline stays movable.
  mutable std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
  std::filesystem::path bundle_dir_;  // set by lazy load
};

struct InferenceResult {
  TonemappedImage hdr_tm;      // fused output in tone-mapped domain
  HdrDomainImage hdr_linear;   // exact inverse, ceiling-normalized radiance
  ReferenceChoice chosen = ReferenceChoice::kUnder;
  Tensor ranet_logits;         // empty when an override skipped the advisor
  double seconds = 0.0;
};

// Advisor stage: resize to 224 (area average), tonemap, assemble priors, run
// the classifier, argmax with ties toward the smaller index.
ReferenceChoice select_reference(const TrainedPipeline& pipe,
                                 const ExposureBracket& bracket);

// Full composition: gamma expansion + exposure alignment, tone mapping of
// both streams, per-frame pre-denoising, path-specific fusion, inverse tone
// mapping. An override forces the path without touching any other stage.
InferenceResult run_sjhdr(const TrainedPipeline& pipe, const ExposureBracket& bracket,
                          std::optional<ReferenceChoice> override_ref = {});

// Bundle layout: manifest.json + predn/ranet/pcf_{under,medium,over} weight
// containers. Round trips bit-exactly.
void save_pipeline(const TrainedPipeline& pipe, const std::filesystem::path& dir);
TrainedPipeline load_pipeline(const std::filesystem::path& dir, bool eager = true);

struct EvalOptions {
  bool selective = true;          // advisor-driven path per sample
  bool oracle = true;             // per-sample best path by the selection metric
  train::SelectionMetric metric;  // defaults to PSNR-mu
};

// Per-variant metric reports over an evaluation set carrying all reference
// variants: U_ref / M_ref / O_ref fixed paths plus selective and oracle rows.
std::map<std::string, MetricReport> evaluate(
    const TrainedPipeline& pipe, const std::vector<const sim::DatasetSample*>& eval_set,
    const EvalOptions& opts = {});

}  // namespace sjhdr
