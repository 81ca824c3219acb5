#pragma once

#include <array>
#include <cmath>

#include "sjhdr/tensor.hpp"

namespace sjhdr {

// Reference-frame index: which bracket position the fused output is
// structurally consistent with.
enum class ReferenceChoice : int { kUnder = 0, kMedium = 1, kOver = 2 };

inline const char* to_string(ReferenceChoice r) {
  switch (r) {
    case ReferenceChoice::kUnder: return "under";
    case ReferenceChoice::kMedium: return "medium";
    case ReferenceChoice::kOver: return "over";
  }
  return "?";
}

constexpr std::array<ReferenceChoice, 3> kAllReferences = {
    ReferenceChoice::kUnder, ReferenceChoice::kMedium, ReferenceChoice::kOver};

// Scene-level priors attached to a bracket: log2 scene brightness, sensor
// gain, and the EV offsets of the three frames relative to medium.
struct ScenePriors {
  double brightness = 0.0;             // B, log2 of mean scene radiance
  double iso = 100.0;                  // [50, 3200]
  std::array<double, 3> ev_steps = {-3.0, 0.0, 3.0};
};

// A quantized capture with non-linear encoding. Pixels {C,H,W} in [0,1].
struct LdrImage {
  Tensor pixels;
  double exposure_time = 1.0;  // seconds, > 0
  double iso = 100.0;
  double ev = 0.0;
  double gamma = 2.2;          // 2.2 for RGB mode, 1.0 for RAW mode
};

// Linear radiance-times-exposure, pixels >= 0.
struct LinearImage {
  Tensor pixels;
};

// Exposure-normalized radiance H = I^gamma / t, pixels >= 0.
struct HdrDomainImage {
  Tensor pixels;
};

// Ordered (under, medium, over) triple plus priors. Exposure times strictly
// increasing; frames share shape and gamma.
struct ExposureBracket {
  std::array<LdrImage, 3> frames;
  ScenePriors priors;

  const LdrImage& frame(ReferenceChoice r) const { return frames[static_cast<int>(r)]; }
  LdrImage& frame(ReferenceChoice r) { return frames[static_cast<int>(r)]; }
};

void validate_bracket(const ExposureBracket& b);

// I^gamma, elementwise. Pixel math in double, stored as float.
LinearImage gamma_expand(const LdrImage& img);

// lin / t. Throws ConfigError("invalid exposure") for t <= 0.
HdrDomainImage exposure_align(const LinearImage& lin, double t);

}  // namespace sjhdr
