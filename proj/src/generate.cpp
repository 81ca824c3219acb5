#include "sjhdr/sim/generate.hpp"

#include <cstdio>

#include "sjhdr/rng.hpp"

namespace sjhdr::sim {

Dataset generate_dataset(const GenSpec& spec) {
  if (spec.train_count < 0 || spec.test_count < 0)
    throw ConfigError("negative sample counts");
  if (spec.occlusion_fraction < 0.0 || spec.occlusion_fraction > 1.0)
    throw ConfigError("occlusion fraction outside [0,1]");

  Dataset ds;
  const int total = spec.train_count + spec.test_count;
  for (int k = 0; k < total; ++k) {
    Rng rng(Rng::mix(spec.seed, static_cast<std::uint64_t>(k)));
    const bool occluded = rng.uniform() < spec.occlusion_fraction;

    SampleParams params;
    params.gamma = spec.gamma;
    params.exposure_times = spec.exposure_times;
    params.noise = NoiseSpec{1e-3, 2e-4};

    DatasetSample sample;
    if (occluded) {
      // Ghosting-in-highlight case: bright static scene, low gain.
      const double isos[] = {100.0, 200.0};
      params.iso = isos[rng.uniform_int(0, 1)];
      auto scene = make_occlusion_scene(Rng::mix(spec.seed, 7000 + k), spec.size,
                                        spec.size);
      sample = make_sample_from_model(scene.model, scene.motion, params,
                                      ReferenceChoice::kUnder,
                                      Rng::mix(spec.seed, 9000 + k));
    } else {
      // Plain dynamic scene; higher gain makes the dark-region noise regime.
      const double isos[] = {400.0, 800.0, 1600.0, 3200.0};
      params.iso = isos[rng.uniform_int(0, 3)];
      SceneSpec scene;
      scene.seed = Rng::mix(spec.seed, 3000 + k);
      scene.height = spec.size;
      scene.width = spec.size;
      scene.dynamic_range_stops = rng.uniform(10.0, 16.0);
      scene.texture_density = rng.uniform(0.6, 1.2);
      scene.n_foreground_objects = rng.uniform_int(1, 3);
      MotionSpec motion;
      motion.global_shift = {rng.uniform(1.0, 4.0), rng.uniform(-2.0, 2.0)};
      for (int o = 0; o < scene.n_foreground_objects; ++o)
        motion.object_shifts.emplace_back(rng.uniform(-5.0, 5.0),
                                          rng.uniform(-3.0, 3.0));
      sample = make_sample(scene, motion, params, ReferenceChoice::kUnder);
    }

    char id[32];
    std::snprintf(id, sizeof(id), "sample_%05d", k);
    sample.id = id;
    ds.samples.push_back(std::move(sample));
    if (k < spec.train_count)
      ds.train_ids.push_back(id);
    else
      ds.test_ids.push_back(id);
  }
  return ds;
}

}  // namespace sjhdr::sim
