#include "sjhdr/sim/capture.hpp"

#include <cmath>

#include "sjhdr/rng.hpp"

namespace sjhdr::sim {

LdrImage simulate_exposure(const LinearImage& scene, double t, double gamma,
                           const NoiseSpec& noise, double iso,
                           const CaptureOptions& opts) {
  if (!(t > 0.0)) throw ConfigError("invalid exposure time " + std::to_string(t));
  if (iso < 50.0 || iso > 3200.0)
    throw ConfigError("iso " + std::to_string(iso) + " outside [50, 3200]");
  if (noise.read_sigma0 < 0.0 || noise.shot_gain0 < 0.0)
    throw ConfigError("negative noise coefficients");
  if (opts.bit_depth < 1 || opts.bit_depth > 16)
    throw ConfigError("bit depth " + std::to_string(opts.bit_depth) + " out of range");

  LdrImage out;
  out.exposure_time = t;
  out.iso = iso;
  out.gamma = gamma;
  out.pixels = Tensor(scene.pixels.shape());

  const double gain = iso / 100.0;
  const double read_var = (noise.read_sigma0 * gain) * (noise.read_sigma0 * gain);
  const double shot_coef = noise.shot_gain0 * gain;
  const bool noisy = read_var > 0.0 || shot_coef > 0.0;
  const double inv_gamma = 1.0 / gamma;
  const double levels = static_cast<double>((1 << opts.bit_depth) - 1);

  Rng rng(opts.noise_seed);
  for (std::size_t i = 0; i < scene.pixels.size(); ++i) {
    double s = static_cast<double>(scene.pixels[i]) * t;
    if (noisy) {
      const double var = shot_coef * std::max(s, 0.0) + read_var;
      s += rng.normal() * std::sqrt(var);
    }
    s = std::min(1.0, std::max(0.0, s));
    double e = gamma == 1.0 ? s : std::pow(s, inv_gamma);
    if (opts.quantize) e = std::round(e * levels) / levels;
    out.pixels[i] = static_cast<float>(e);
  }
  return out;
}

DatasetSample make_sample_from_model(const SceneModel& model, const MotionSpec& motion,
                                     const SampleParams& params, ReferenceChoice ref,
                                     std::uint64_t capture_seed) {
  if (!(params.exposure_times[0] < params.exposure_times[1] &&
        params.exposure_times[1] < params.exposure_times[2]))
    throw ConfigError("exposure times must be strictly increasing");

  const LinearImage static_scene = render_scene(model, MotionSpec::none());
  const LinearImage moved_scene = render_scene(model, motion);

  DatasetSample sample;
  sample.ref = ref;
  sample.ceiling = model.ceiling;
  sample.exposure_times = params.exposure_times;
  sample.iso = params.iso;
  sample.gamma = params.gamma;
  sample.bit_depth =
      params.bit_depth > 0 ? params.bit_depth : default_bit_depth(params.gamma);
  sample.occlusion = motion.occlusion_flag;

  // Ground truth: the clean static scene, normalized by the radiance ceiling.
  sample.ground_truth.pixels = Tensor(static_scene.pixels.shape());
  for (std::size_t i = 0; i < static_scene.pixels.size(); ++i)
    sample.ground_truth.pixels[i] =
        static_cast<float>(static_cast<double>(static_scene.pixels[i]) / model.ceiling);

  // Six captures: static and displaced, one per exposure, each with its own
  // deterministic noise stream.
  std::array<LdrImage, 3> stat, dyn;
  for (int i = 0; i < 3; ++i) {
    CaptureOptions opts;
    opts.bit_depth = sample.bit_depth;
    opts.quantize = params.quantize;
    opts.noise_seed = Rng::mix(capture_seed, static_cast<std::uint64_t>(i));
    stat[i] = simulate_exposure(static_scene, params.exposure_times[i], params.gamma,
                                params.noise, params.iso, opts);
    opts.noise_seed = Rng::mix(capture_seed, static_cast<std::uint64_t>(3 + i));
    dyn[i] = simulate_exposure(moved_scene, params.exposure_times[i], params.gamma,
                               params.noise, params.iso, opts);
  }

  // Scene priors shared by every variant.
  double mean = 0.0;
  for (std::size_t i = 0; i < static_scene.pixels.size(); ++i)
    mean += static_cast<double>(static_scene.pixels[i]);
  mean /= static_cast<double>(static_scene.pixels.size());
  ScenePriors priors;
  priors.brightness = std::log2(std::max(mean, 1e-12));
  priors.iso = params.iso;
  for (int i = 0; i < 3; ++i)
    priors.ev_steps[i] = std::log2(params.exposure_times[i] / params.exposure_times[1]);

  for (int r = 0; r < 3; ++r) {
    ExposureBracket& b = sample.reference_variants[r];
    b.priors = priors;
    for (int i = 0; i < 3; ++i) {
      b.frames[i] = (i == r) ? stat[i] : dyn[i];
      b.frames[i].ev = priors.ev_steps[i];
    }
    validate_bracket(b);
  }
  return sample;
}

DatasetSample make_sample(const SceneSpec& scene_spec, const MotionSpec& motion,
                          const SampleParams& params, ReferenceChoice ref) {
  const SceneModel model = synth_scene_model(scene_spec);
  auto sample = make_sample_from_model(model, motion, params, ref,
                                       Rng::mix(scene_spec.seed, 0x5eedcafe));
  sample.id = "sample_" + std::to_string(scene_spec.seed);
  return sample;
}

}  // namespace sjhdr::sim
