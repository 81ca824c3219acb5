#pragma once

#include <string>
#include <vector>

#include "sjhdr/image.hpp"
#include "sjhdr/nn/ops.hpp"
#include "sjhdr/nn/weights.hpp"
#include "sjhdr/tmo.hpp"

namespace sjhdr::models {

// Pre-denoising U-Net. Input is the tonemapped LDR plus a constant ISO plane
// (iso/3200); output is the denoised tonemapped LDR, clamped to [0,1].
struct PreDnConfig {
  int depth = 3;  // number of scales
  std::vector<int> widths = {32, 64, 128};
  int in_channels = 4;  // RGB + ISO plane

  static PreDnConfig toy() { return {3, {8, 12, 16}, 4}; }
  static PreDnConfig tiny_grad() { return {2, {3, 4}, 4}; }

  std::string arch_tag() const;
  static PreDnConfig from_tag(const std::string& tag);
};

nn::ModelWeights init_predn(const PreDnConfig& cfg, std::uint64_t seed);

// clamp_output: the published contract clamps to [0,1]. Training reads the
// pre-clamp head instead: a hard clamp zeroes gradients over saturated
// regions and stalls the sobel term, while for targets inside [0,1] the
// clamped error never exceeds the pre-clamp error.
template <typename T>
nn::VarT<T> predn_forward(const nn::ParamMap<T>& p, const PreDnConfig& cfg,
                          nn::VarT<T> input, bool clamp_output = true) {
  if (input->value.rank() != 3 || input->value.dim(0) != cfg.in_channels)
    throw ShapeError("predn expects {" + std::to_string(cfg.in_channels) + ",H,W}, got " +
                     input->value.shape_str());
  const int H = input->value.dim(1), W = input->value.dim(2);
  for (int k = 1; k < cfg.depth; ++k) {
    const int div = 1 << k;
    if (H % div || W % div)
      throw ShapeError("predn: " + std::to_string(H) + "x" + std::to_string(W) +
                       " not divisible by 2 at level " + std::to_string(k));
  }

  std::vector<nn::VarT<T>> enc(cfg.depth);
  nn::VarT<T> h = input;
  for (int k = 0; k < cfg.depth; ++k) {
    if (k > 0) h = nn::avg_pool2(h);
    h = nn::leaky_relu(nn::conv2d(h, p.at("enc" + std::to_string(k) + ".w"),
                            p.at("enc" + std::to_string(k) + ".b"),
                            {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate}));
    enc[k] = h;
  }
  h = nn::leaky_relu(nn::conv2d(h, p.at("mid.w"), p.at("mid.b"), {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate}));
  for (int k = cfg.depth - 1; k >= 1; --k) {
    const std::string ks = std::to_string(k);
    auto u = nn::leaky_relu(nn::conv2d(nn::upsample2_bilinear(h), p.at("up" + ks + ".w"),
                                 p.at("up" + ks + ".b"), {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate}));
    h = nn::leaky_relu(nn::conv2d(nn::concat0<T>({u, enc[k - 1]}), p.at("dec" + ks + ".w"),
                            p.at("dec" + ks + ".b"), {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate}));
  }
  auto head = nn::conv2d(h, p.at("head.w"), p.at("head.b"), {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate});
  return clamp_output ? nn::clamp01(head) : head;
}

// Contract-level wrapper: tonemapped LDR {3,H,W} + ISO plane {1,H,W}
// (constant-valued iso/3200) -> denoised tonemapped image.
TonemappedImage predn_forward(const nn::ModelWeights& w, const TonemappedImage& ldr_tm,
                              const Tensor& iso_plane);

// Builds the constant ISO plane for an image of the given size.
Tensor iso_plane(int h, int w, double iso);

}  // namespace sjhdr::models
