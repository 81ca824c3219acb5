#pragma once

#include <iosfwd>
#include <vector>

#include "sjhdr/metrics.hpp"
#include "sjhdr/sim/dataset.hpp"
#include "sjhdr/train/trainer.hpp"

namespace sjhdr::train {

struct TmoAblationRow {
  std::string tmo;
  double psnr_mu = 0.0;
  double psnr_l = 0.0;
  double ssim_mu = 0.0;
  double ssim_l = 0.0;
};

// Equal-budget comparison of the five tone-mapping operators on the
// under-reference path: per operator, train the denoiser and one fusion path
// in that domain, then score the test split in the fixed mu-law/linear
// metric domains.
std::vector<TmoAblationRow> tmo_ablation(const sim::Dataset& dataset,
                                         const models::PreDnConfig& predn_cfg,
                                         const models::PcfConfig& pcf_cfg,
                                         const TrainConfig& predn_train,
                                         const TrainConfig& pcf_train, double mu,
                                         std::ostream* progress = nullptr);

std::string ablation_table(const std::vector<TmoAblationRow>& rows);

}  // namespace sjhdr::train
