#pragma once

#include <array>
#include <string>
#include <vector>

#include "sjhdr/image.hpp"
#include "sjhdr/nn/ops.hpp"
#include "sjhdr/nn/weights.hpp"

namespace sjhdr::models {

// Reference advisor: a compact classifier over the low-resolution bracket
// (three tonemapped frames, 224x224) and the scene priors. Five stride-2
// stages, global average pooling, priors concatenated before the head.
struct RanetConfig {
  std::vector<int> widths = {16, 32, 48, 64, 96};
  int fc = 64;
  int in_channels = 9;  // 3 frames x RGB
  static constexpr int kInputSize = 224;
  static constexpr int kPriorCount = 5;  // B, iso, ev x3 (normalized)

  static RanetConfig toy() { return {{6, 8, 12, 16, 24}, 16, 9}; }

  std::string arch_tag() const;
  static RanetConfig from_tag(const std::string& tag);
};

nn::ModelWeights init_ranet(const RanetConfig& cfg, std::uint64_t seed);

// Normalized prior vector fed to the head.
Tensor ranet_prior_vector(const ScenePriors& priors);

template <typename T>
nn::VarT<T> ranet_forward(const nn::ParamMap<T>& p, const RanetConfig& cfg,
                          nn::VarT<T> low_res_stack, nn::VarT<T> priors) {
  if (low_res_stack->value.rank() != 3 ||
      low_res_stack->value.dim(0) != cfg.in_channels ||
      low_res_stack->value.dim(1) != RanetConfig::kInputSize ||
      low_res_stack->value.dim(2) != RanetConfig::kInputSize)
    throw ShapeError("ranet expects {" + std::to_string(cfg.in_channels) + ",224,224}, got " +
                     low_res_stack->value.shape_str());
  if (priors->value.rank() != 1 || priors->value.dim(0) != RanetConfig::kPriorCount)
    throw ShapeError("ranet priors must be {5}, got " + priors->value.shape_str());

  nn::VarT<T> h = low_res_stack;
  for (std::size_t k = 0; k < cfg.widths.size(); ++k) {
    const std::string ks = std::to_string(k);
    h = nn::leaky_relu(nn::conv2d(h, p.at("stage" + ks + ".w"), p.at("stage" + ks + ".b"),
                            {.stride = 2, .pad = 1}));
  }
  auto pooled = nn::global_avg_pool(h);
  auto head_in = nn::concat0<T>({pooled, priors});
  auto fc1 = nn::leaky_relu(nn::linear(head_in, p.at("fc1.w"), p.at("fc1.b")));
  return nn::linear(fc1, p.at("fc2.w"), p.at("fc2.b"));
}

// Plain-tensor wrapper returning the three logits.
Tensor ranet_forward(const nn::ModelWeights& w, const Tensor& low_res_stack,
                     const ScenePriors& priors);

// Argmax with ties broken toward the smaller index.
ReferenceChoice ranet_choice(const Tensor& logits);

}  // namespace sjhdr::models
