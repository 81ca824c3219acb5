#pragma once

#include <array>
#include <string>
#include <vector>

#include "sjhdr/image.hpp"
#include "sjhdr/models/blocks.hpp"
#include "sjhdr/nn/ops.hpp"
#include "sjhdr/nn/weights.hpp"

namespace sjhdr::models {

// Pyramid cascading fusion network. Per frame the input is a 6-channel stack
// [denoised tonemapped LDR, tonemapped HDR-domain image]; the encoder is
// shared across frames, attention gates the supporting frames against the
// reference at every scale, one DRDB merges per scale, and the cascade adds
// upsampled deeper features plus the reference feature before reconstruction.
struct PcfConfig {
  int levels = 3;
  std::vector<int> widths = {32, 64, 128};
  int drdb_growth = 32;
  int frame_channels = 6;

  static PcfConfig toy() { return {3, {8, 12, 16}, 8, 6}; }
  static PcfConfig tiny_grad() { return {2, {3, 4}, 2, 6}; }

  std::string arch_tag() const;
  static PcfConfig from_tag(const std::string& tag);
  DrdbConfig drdb_at(int level) const {
    return {widths[level], drdb_growth, 3, 2};
  }
};

nn::ModelWeights init_pcf(const PcfConfig& cfg, std::uint64_t seed);

// Feature pyramid for one frame: level k has widths[k] channels at H/2^k.
// Level-k features see both the x2 average-pooled image at that scale and the
// pooled features of level k-1.
template <typename T>
std::vector<nn::VarT<T>> pyramid_encode(const nn::ParamMap<T>& p, const PcfConfig& cfg,
                                        nn::VarT<T> stack) {
  if (stack->value.rank() != 3 || stack->value.dim(0) != cfg.frame_channels)
    throw ShapeError("pyramid_encode expects {" + std::to_string(cfg.frame_channels) +
                     ",H,W}, got " + stack->value.shape_str());
  const int H = stack->value.dim(1), W = stack->value.dim(2);
  const int div = 1 << (cfg.levels - 1);
  if (H % div || W % div)
    throw ShapeError("pyramid_encode: " + std::to_string(H) + "x" + std::to_string(W) +
                     " not divisible by " + std::to_string(div) + " for " +
                     std::to_string(cfg.levels) + " levels");
  std::vector<nn::VarT<T>> feats;
  nn::VarT<T> img = stack;
  for (int k = 0; k < cfg.levels; ++k) {
    nn::VarT<T> in;
    if (k == 0) {
      in = img;
    } else {
      img = nn::avg_pool2(img);
      in = nn::concat0<T>({img, nn::avg_pool2(feats.back())});
    }
    feats.push_back(nn::leaky_relu(nn::conv2d(in, p.at("enc" + std::to_string(k) + ".w"),
                                        p.at("enc" + std::to_string(k) + ".b"),
                                        {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate})));
  }
  return feats;
}

// clamp_output: published contract clamps to [0,1]; the trainer reads the
// pre-clamp head (see prednnet.hpp for the rationale).
template <typename T>
nn::VarT<T> pcf_forward(const nn::ParamMap<T>& p, const PcfConfig& cfg,
                        const std::array<nn::VarT<T>, 3>& stacks, ReferenceChoice ref,
                        bool clamp_output = true) {
  for (int i = 1; i < 3; ++i)
    require_same_shape(stacks[i]->value, stacks[0]->value, "pcf_forward frames");
  const int r = static_cast<int>(ref);

  std::array<std::vector<nn::VarT<T>>, 3> pyr;
  for (int i = 0; i < 3; ++i) pyr[i] = pyramid_encode(p, cfg, stacks[i]);

  // Per level: gate supporting frames, merge in frame order, one DRDB.
  std::vector<nn::VarT<T>> merged(cfg.levels);
  for (int k = 0; k < cfg.levels; ++k) {
    const std::string ks = std::to_string(k);
    std::vector<nn::VarT<T>> gathered(3);
    for (int i = 0; i < 3; ++i) {
      if (i == r)
        gathered[i] = pyr[i][k];
      else
        gathered[i] = msa_attention(pyr[r][k], pyr[i][k], p.at("msa" + ks + ".w"),
                                    p.at("msa" + ks + ".b"));
    }
    auto m = nn::leaky_relu(nn::conv2d(nn::concat0<T>(gathered), p.at("merge" + ks + ".w"),
                                 p.at("merge" + ks + ".b"), {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate}));
    merged[k] = drdb_forward(p, "drdb" + ks, m, cfg.drdb_at(k));
  }

  // Coarse-to-fine cascade with reference-feature residuals.
  nn::VarT<T> up = nn::add(merged[cfg.levels - 1], pyr[r][cfg.levels - 1]);
  for (int k = cfg.levels - 2; k >= 0; --k) {
    const std::string ks = std::to_string(k);
    auto lifted = nn::conv2d(nn::upsample2_bilinear(up), p.at("up" + ks + ".w"),
                             p.at("up" + ks + ".b"), {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate});
    up = nn::add(nn::add(merged[k], pyr[r][k]), lifted);
  }

  auto rec = nn::leaky_relu(nn::conv2d(up, p.at("rec.w"), p.at("rec.b"), {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate}));
  auto head = nn::conv2d(rec, p.at("head.w"), p.at("head.b"), {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate});
  return clamp_output ? nn::clamp01(head) : head;
}

// Inference wrapper over plain tensors.
Tensor pcf_forward(const nn::ModelWeights& w, const std::array<Tensor, 3>& stacks,
                   ReferenceChoice ref);

}  // namespace sjhdr::models
