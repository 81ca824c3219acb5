#pragma once

#include <iosfwd>
#include <optional>

#include "sjhdr/pipeline.hpp"
#include "sjhdr/train/trainer.hpp"

namespace sjhdr::train {

// Whole-pipeline staged training: denoiser, the three fusion paths, winner
// labels over the training split, advisor. Stages checkpoint independently;
// re-running with the same checkpoint directory resumes (completed stages are
// skipped).
struct StagedConfig {
  models::PreDnConfig predn_cfg;
  models::PcfConfig pcf_cfg;
  models::RanetConfig ranet_cfg;
  TrainConfig predn_train;
  TrainConfig pcf_train;
  TrainConfig ranet_train;
  TmoOperator tmo{TmoKind::kMuLaw, 5000.0};

  static StagedConfig toy(std::uint64_t seed);
  static StagedConfig defaults(std::uint64_t seed);
};

struct StagedResult {
  TrainedPipeline pipeline;
  std::vector<PathLabel> train_labels;
  std::vector<PathLabel> test_labels;
  double ranet_holdout_accuracy = 0.0;
  bool ranet_degenerate = false;
  std::vector<TrainLogEntry> predn_log;
  std::array<std::vector<TrainLogEntry>, 3> pcf_logs;
};

StagedResult train_staged(const StagedConfig& cfg, const sim::Dataset& dataset,
                          const std::optional<std::filesystem::path>& checkpoint_dir,
                          std::ostream* progress = nullptr);

}  // namespace sjhdr::train
