#pragma once

#include <string>
#include <vector>

#include "sjhdr/tensor.hpp"

namespace sjhdr {

// Evaluation domain: linear radiance (normalized to [0,1]) or mu-law
// tone-mapped (mapped with mu=5000 before comparison).
enum class MetricDomain { kLinear, kMu };

// 10*log10(1/MSE) with unit peak; exact match reports +infinity.
double psnr(const Tensor& pred, const Tensor& gt, MetricDomain domain,
            double mu = 5000.0);

// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), C1=0.01^2, C2=0.03^2 on
// unit dynamic range, valid-region average, channels averaged.
double ssim(const Tensor& pred, const Tensor& gt, MetricDomain domain,
            double mu = 5000.0);

struct MetricRecord {
  std::string id;
  double psnr_mu = 0.0;
  double psnr_l = 0.0;
  double ssim_mu = 0.0;
  double ssim_l = 0.0;
};

// Per-image records plus their means.
struct MetricReport {
  std::vector<MetricRecord> per_image;

  MetricRecord means() const;
  void add(const std::string& id, const Tensor& pred_linear, const Tensor& gt_linear,
           double mu = 5000.0);
  std::string to_table(const std::string& title) const;
  std::string to_json() const;
};

}  // namespace sjhdr
