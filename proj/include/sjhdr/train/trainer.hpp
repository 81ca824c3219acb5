#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "sjhdr/models/pcfnet.hpp"
#include "sjhdr/models/prednnet.hpp"
#include "sjhdr/models/ranet.hpp"
#include "sjhdr/sim/dataset.hpp"
#include "sjhdr/tmo.hpp"
#include "sjhdr/train/config.hpp"

namespace sjhdr::train {

struct TrainLogEntry {
  int step = 0;
  int epoch = 0;
  double lr = 0.0;
  double total = 0.0;
  double recon = 0.0;
  double sobel = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  nn::ModelWeights weights;
  std::vector<TrainLogEntry> log;
};

// Optional resumable-checkpoint sink. When set, every cfg.checkpoint_every
// epochs the full optimizer state (weights, Adam moments, RNG, log) is saved;
// a fresh call with the same directory resumes from the latest checkpoint and
// reproduces the uninterrupted run's loss trace in single-worker mode.
struct CheckpointSink {
  std::filesystem::path dir;
  std::string stage;  // file stem
};

// Denoiser training. Pairs are derived from the static captures of each
// bracket: input [T(L_s^i), ISO plane], target T(clamp(gt * t_i)). No extra
// denoising dataset is needed.
TrainResult train_predn(const TrainConfig& cfg, const models::PreDnConfig& model_cfg,
                        const std::vector<const sim::DatasetSample*>& data,
                        const TmoOperator& tmo,
                        const std::optional<CheckpointSink>& ckpt = {});

// Fusion training for one reference path; the denoiser is frozen and its
// outputs are precomputed per sample.
TrainResult train_pcf(const TrainConfig& cfg, const models::PcfConfig& model_cfg,
                      const std::vector<const sim::DatasetSample*>& data,
                      ReferenceChoice ref, const nn::ModelWeights& predn,
                      const TmoOperator& tmo,
                      const std::optional<CheckpointSink>& ckpt = {});

struct PathLabel {
  std::string sample_id;
  ReferenceChoice winner = ReferenceChoice::kUnder;
  std::array<double, 3> scores = {0.0, 0.0, 0.0};
};

using SelectionMetric = std::function<double(const Tensor& pred_linear,
                                             const Tensor& gt_linear)>;

// PSNR in the mu-law tone-mapped domain, the stand-in selection label.
SelectionMetric psnr_mu_metric(double mu = 5000.0);

// Scores every reference path on its matching variant against the shared
// ground truth; winner = argmax, ties toward the smaller index.
std::vector<PathLabel> label_paths(const nn::ModelWeights& predn,
                                   const std::array<nn::ModelWeights, 3>& paths,
                                   const std::vector<const sim::DatasetSample*>& eval_set,
                                   const TmoOperator& tmo,
                                   const SelectionMetric& metric = psnr_mu_metric());

// Pure argmax over precomputed scores (exposed for tests).
ReferenceChoice label_winner(const std::array<double, 3>& scores);

struct RanetTrainResult {
  nn::ModelWeights weights;
  double held_out_accuracy = 0.0;
  bool degenerate = false;  // training labels collapse to one class
  std::vector<TrainLogEntry> log;
};

// Cross-entropy classifier training on (bracket, winner) pairs.
RanetTrainResult train_ranet(const TrainConfig& cfg, const models::RanetConfig& model_cfg,
                             const std::vector<const sim::DatasetSample*>& train_set,
                             const std::vector<PathLabel>& train_labels,
                             const std::vector<const sim::DatasetSample*>& eval_set,
                             const std::vector<PathLabel>& eval_labels,
                             const TmoOperator& tmo);

// Throws DivergenceError on a non-finite loss.
void check_finite_loss(double loss, int step);

}  // namespace sjhdr::train
