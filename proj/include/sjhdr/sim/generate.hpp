#pragma once

#include "sjhdr/sim/dataset.hpp"

namespace sjhdr::sim {

// Paired-dataset generation protocol: a deterministic mix of plain dynamic
// scenes (varied ISO and dynamic range) and occluded-highlight scenes (low
// ISO, the under-reference failure case), with a train/test split.
struct GenSpec {
  std::uint64_t seed = 0;
  int train_count = 192;
  int test_count = 15;
  int size = 128;
  double gamma = 2.2;  // 1.0 selects RAW mode (12-bit)
  double occlusion_fraction = 0.25;
  std::array<double, 3> exposure_times = {0.05, 0.4, 3.2};
};

Dataset generate_dataset(const GenSpec& spec);

}  // namespace sjhdr::sim
