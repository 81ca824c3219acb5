#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "sjhdr/errors.hpp"

namespace sjhdr::train {

enum class LrSchedule { kStepDecay, kCosine };

struct TrainConfig {
  int epochs = 100;
  int batch_size = 8;
  double lr0 = 5e-4;
  double decay_gamma = 0.7;
  int decay_every_epochs = 200;
  double lr_floor = 1e-6;
  LrSchedule schedule = LrSchedule::kStepDecay;
  int patch_size = 256;
  bool aug_crop = true;
  bool aug_rotate = true;
  bool aug_flip = true;
  std::uint64_t seed = 0;
  double lambda = 0.5;
  int checkpoint_every = 0;  // epochs; 0 disables

  void validate() const {
    if (!(lr0 > lr_floor) || !(lr_floor > 0.0))
      throw ConfigError("learning rates must satisfy lr0 > lr_floor > 0");
    if (epochs <= 0 || batch_size <= 0 || patch_size <= 0)
      throw ConfigError("epochs, batch size and patch size must be positive");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda outside [0,1]");
    if (decay_every_epochs <= 0) throw ConfigError("decay interval must be positive");
  }

  // Fusion/denoiser defaults: lr 5e-4 stepped by 0.7 every 200 epochs down to
  // 1e-6, batch 8, 256-crop with rotation and flips.
  static TrainConfig fusion_default() { return {}; }

  static TrainConfig fusion_toy() {
    TrainConfig c;
    c.epochs = 120;
    c.batch_size = 4;
    c.patch_size = 64;
    c.decay_every_epochs = 200;
    return c;
  }

  // Advisor defaults: 200 epochs, batch 16, lr 1e-4, cosine decay.
  static TrainConfig advisor_default() {
    TrainConfig c;
    c.epochs = 200;
    c.batch_size = 16;
    c.lr0 = 1e-4;
    c.schedule = LrSchedule::kCosine;
    c.aug_crop = false;
    c.aug_rotate = false;
    c.aug_flip = false;
    return c;
  }

  static TrainConfig advisor_toy() {
    TrainConfig c = advisor_default();
    c.epochs = 60;
    return c;
  }
};

// lr(epoch) = max(floor, lr0 * gamma^floor(epoch/decay_every)).
inline double step_decay_lr(const TrainConfig& c, int epoch) {
  const double lr = c.lr0 * std::pow(c.decay_gamma, epoch / c.decay_every_epochs);
  return std::max(c.lr_floor, lr);
}

// Half-cosine from lr0 to exactly lr_floor at the final epoch.
inline double cosine_lr(const TrainConfig& c, int epoch) {
  if (c.epochs <= 1) return c.lr_floor;
  const double t = static_cast<double>(epoch) / (c.epochs - 1);
  return c.lr_floor + (c.lr0 - c.lr_floor) * 0.5 * (1.0 + std::cos(3.14159265358979323846 * t));
}

inline double lr_at(const TrainConfig& c, int epoch) {
  return c.schedule == LrSchedule::kCosine ? cosine_lr(c, epoch) : step_decay_lr(c, epoch);
}

}  // namespace sjhdr::train
