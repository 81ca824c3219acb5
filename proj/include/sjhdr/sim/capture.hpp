#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "sjhdr/image.hpp"
#include "sjhdr/sim/scene.hpp"

namespace sjhdr::sim {

// Heteroscedastic Gaussian sensor noise, ISO-scaled: at gain g = iso/100 the
// per-pixel variance is shot_gain0*g*signal + (read_sigma0*g)^2.
struct NoiseSpec {
  double read_sigma0 = 1e-3;  // base read-noise std at ISO 100
  double shot_gain0 = 1e-4;   // base signal-dependent variance coefficient

  static NoiseSpec none() { return {0.0, 0.0}; }
};

struct CaptureOptions {
  int bit_depth = 8;
  bool quantize = true;
  std::uint64_t noise_seed = 0;
};

inline int default_bit_depth(double gamma) { return gamma == 1.0 ? 12 : 8; }

// clip(scene*t + n)^(1/gamma), quantized to bit_depth. Deterministic for a
// given noise seed.
LdrImage simulate_exposure(const LinearImage& scene, double t, double gamma,
                           const NoiseSpec& noise, double iso,
                           const CaptureOptions& opts = {});

// One generated pair: three reference variants that share a bit-identical
// ground truth (the static scene normalized by the radiance ceiling).
struct DatasetSample {
  std::string id;
  ReferenceChoice ref = ReferenceChoice::kUnder;
  HdrDomainImage ground_truth;
  std::array<ExposureBracket, 3> reference_variants;
  double ceiling = kRadianceCeiling;
  std::array<double, 3> exposure_times = {0.125, 1.0, 8.0};
  double iso = 100.0;
  double gamma = 2.2;
  int bit_depth = 8;
  bool occlusion = false;

  const ExposureBracket& bracket() const {
    return reference_variants[static_cast<int>(ref)];
  }
  const ExposureBracket& variant(ReferenceChoice r) const {
    return reference_variants[static_cast<int>(r)];
  }
};

struct SampleParams {
  std::array<double, 3> exposure_times = {0.125, 1.0, 8.0};  // strictly increasing
  double iso = 100.0;
  double gamma = 2.2;
  NoiseSpec noise;
  bool quantize = true;
  int bit_depth = 0;  // 0 = derive from gamma
};

// Captures the static scene at the reference position and the displaced scene
// at the other two, for every reference choice, from six captures total.
DatasetSample make_sample(const SceneSpec& scene_spec, const MotionSpec& motion,
                          const SampleParams& params, ReferenceChoice ref);

// Same protocol for an externally built scene (occlusion scenarios, tests).
DatasetSample make_sample_from_model(const SceneModel& model, const MotionSpec& motion,
                                     const SampleParams& params, ReferenceChoice ref,
                                     std::uint64_t capture_seed);

}  // namespace sjhdr::sim
