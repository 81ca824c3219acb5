#pragma once

#include <vector>

#include "sjhdr/sim/dataset.hpp"

namespace sjhdr::testing {

// Small noiseless, unclipped-under dataset for fast training tests.
inline sim::Dataset tiny_dataset(int count, int size, bool noise, std::uint64_t seed0,
                                 double iso = 800.0) {
  sim::Dataset ds;
  for (int k = 0; k < count; ++k) {
    sim::SceneSpec spec;
    spec.seed = seed0 + k;
    spec.height = size;
    spec.width = size;
    spec.dynamic_range_stops = 10.0;
    spec.n_foreground_objects = 1;
    sim::MotionSpec motion;
    motion.global_shift = {2.0 + (k % 3), 1.0};
    sim::SampleParams params;
    params.iso = iso;
    params.noise = noise ? sim::NoiseSpec{1e-3, 2e-4} : sim::NoiseSpec::none();
    // Ceiling 16 with t_u = 1/20 keeps the under frame unclipped (16/20 < 1).
    params.exposure_times = {0.05, 0.4, 3.2};
    auto s = sim::make_sample(spec, motion, params, ReferenceChoice::kUnder);
    s.id = "t" + std::to_string(k);
    ds.samples.push_back(std::move(s));
  }
  for (const auto& s : ds.samples) ds.train_ids.push_back(s.id);
  return ds;
}

inline std::vector<const sim::DatasetSample*> all_samples(const sim::Dataset& ds) {
  std::vector<const sim::DatasetSample*> out;
  for (const auto& s : ds.samples) out.push_back(&s);
  return out;
}

}  // namespace sjhdr::testing
