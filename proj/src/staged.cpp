#include "sjhdr/train/staged.hpp"

#include <ostream>

namespace sjhdr::train {

StagedConfig StagedConfig::toy(std::uint64_t seed) {
  StagedConfig c;
  c.predn_cfg = models::PreDnConfig::toy();
  c.pcf_cfg = models::PcfConfig::toy();
  c.ranet_cfg = models::RanetConfig::toy();

  c.predn_train = TrainConfig::fusion_toy();
  c.predn_train.epochs = 30;
  c.predn_train.patch_size = 32;
  c.predn_train.lr0 = 1e-3;
  c.predn_train.seed = Rng::mix(seed, 1);

  c.pcf_train = TrainConfig::fusion_toy();
  c.pcf_train.epochs = 60;
  c.pcf_train.patch_size = 32;
  c.pcf_train.lr0 = 1e-3;
  c.pcf_train.seed = Rng::mix(seed, 2);

  c.ranet_train = TrainConfig::advisor_toy();
  c.ranet_train.epochs = 100;
  c.ranet_train.lr0 = 1e-3;
  c.ranet_train.seed = Rng::mix(seed, 3);
  return c;
}

StagedConfig StagedConfig::defaults(std::uint64_t seed) {
  StagedConfig c;
  c.predn_train = TrainConfig::fusion_default();
  c.predn_train.seed = Rng::mix(seed, 1);
  c.pcf_train = TrainConfig::fusion_default();
  c.pcf_train.seed = Rng::mix(seed, 2);
  c.ranet_train = TrainConfig::advisor_default();
  c.ranet_train.seed = Rng::mix(seed, 3);
  return c;
}

StagedResult train_staged(const StagedConfig& cfg, const sim::Dataset& dataset,
                          const std::optional<std::filesystem::path>& checkpoint_dir,
                          std::ostream* progress) {
  const auto train_set = dataset.split(true);
  const auto test_set = dataset.split(false);
  if (train_set.empty()) throw DataError("dataset has no training split");

  auto sink = [&](const char* stage) -> std::optional<CheckpointSink> {
    if (!checkpoint_dir) return std::nullopt;
    return CheckpointSink{*checkpoint_dir, stage};
  };
  auto note = [&](const std::string& msg) {
    if (progress) (*progress) << msg << "\n" << std::flush;
  };

  StagedResult out;
  out.pipeline.tmo = cfg.tmo;
  out.pipeline.ceiling = dataset.samples.front().ceiling;

  note("stage 1/4: denoiser (" + std::to_string(cfg.predn_train.epochs) + " epochs, " +
       std::to_string(train_set.size()) + " samples)");
  auto predn = train_predn(cfg.predn_train, cfg.predn_cfg, train_set, cfg.tmo,
                           sink("predn"));
  out.predn_log = std::move(predn.log);
  out.pipeline.predn = std::move(predn.weights);

  for (auto ref : kAllReferences) {
    note(std::string("stage 2/4: fusion path '") + to_string(ref) + "' (" +
         std::to_string(cfg.pcf_train.epochs) + " epochs)");
    TrainConfig path_cfg = cfg.pcf_train;
    path_cfg.seed = Rng::mix(cfg.pcf_train.seed, static_cast<std::uint64_t>(ref));
    auto res = train_pcf(path_cfg, cfg.pcf_cfg, train_set, ref, out.pipeline.predn,
                         cfg.tmo, sink((std::string("pcf_") + to_string(ref)).c_str()));
    out.pcf_logs[static_cast<int>(ref)] = std::move(res.log);
    out.pipeline.set_path(ref, std::move(res.weights));
  }

  note("stage 3/4: path labels (" + std::to_string(train_set.size()) + "+" +
       std::to_string(test_set.size()) + " samples)");
  const std::array<nn::ModelWeights, 3> paths = {
      out.pipeline.path_weights(ReferenceChoice::kUnder),
      out.pipeline.path_weights(ReferenceChoice::kMedium),
      out.pipeline.path_weights(ReferenceChoice::kOver)};
  out.train_labels = label_paths(out.pipeline.predn, paths, train_set, cfg.tmo);
  out.test_labels = label_paths(out.pipeline.predn, paths, test_set, cfg.tmo);

  note("stage 4/4: advisor (" + std::to_string(cfg.ranet_train.epochs) + " epochs)");
  auto ranet = train_ranet(cfg.ranet_train, cfg.ranet_cfg, train_set, out.train_labels,
                           test_set, out.test_labels, cfg.tmo);
  out.ranet_holdout_accuracy = ranet.held_out_accuracy;
  out.ranet_degenerate = ranet.degenerate;
  out.pipeline.ranet = std::move(ranet.weights);
  if (out.ranet_degenerate)
    note("warning: advisor labels are single-class (degenerate accuracy)");
  note("held-out advisor accuracy: " + std::to_string(out.ranet_holdout_accuracy));
  return out;
}

}  // namespace sjhdr::train
