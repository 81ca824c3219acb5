#pragma once

#include <filesystem>
#include <vector>

#include "sjhdr/sim/capture.hpp"

namespace sjhdr::sim {

// On-disk dataset: one directory per sample holding a human-readable
// meta.json plus raw little-endian float32 planar pixel files (ground truth
// and the six static/dynamic captures). manifest.json lists samples, the
// train/test split, and meta-file hashes so corruption fails loudly.
struct Dataset {
  std::vector<DatasetSample> samples;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;

  std::vector<const DatasetSample*> split(bool train) const;
  const DatasetSample& by_id(const std::string& id) const;
};

void write_dataset(const Dataset& ds, const std::filesystem::path& root);
Dataset read_dataset(const std::filesystem::path& root);

}  // namespace sjhdr::sim
