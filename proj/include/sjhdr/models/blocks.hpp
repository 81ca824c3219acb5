#pragma once

#include <string>
#include <vector>

#include "sjhdr/nn/ops.hpp"
#include "sjhdr/nn/weights.hpp"

namespace sjhdr::models {

// Sigmoid-gated attention of a supporting-frame feature against the reference
// feature: a = sigmoid(conv([f_ref, f_i])), returns a (*) f_i. The attention
// map lives strictly inside (0,1).
template <typename T>
nn::VarT<T> msa_attention(nn::VarT<T> f_ref, nn::VarT<T> f_i, nn::VarT<T> w,
                          nn::VarT<T> b) {
  require_same_shape(f_ref->value, f_i->value, "msa_attention");
  auto a = nn::sigmoid(nn::conv2d(nn::concat0<T>({f_ref, f_i}), w, b,
                                  {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate}));
  return nn::mul(a, f_i);
}

// Attention map alone (for inspection and tests).
template <typename T>
nn::VarT<T> msa_attention_map(nn::VarT<T> f_ref, nn::VarT<T> f_i, nn::VarT<T> w,
                              nn::VarT<T> b) {
  require_same_shape(f_ref->value, f_i->value, "msa_attention");
  return nn::sigmoid(nn::conv2d(nn::concat0<T>({f_ref, f_i}), w, b,
                                {.stride = 1, .pad = 1, .dilation = 1, .pad_mode = nn::PadMode::kReplicate}));
}

struct DrdbConfig {
  int channels = 32;
  int growth = 16;
  int layers = 3;
  int dilation = 2;
};

// Dilated residual dense block: densely connected dilated 3x3 convolutions,
// a 1x1 fusion back to the input width, and a local residual add.
template <typename T>
nn::VarT<T> drdb_forward(const nn::ParamMap<T>& p, const std::string& prefix,
                         nn::VarT<T> x, const DrdbConfig& cfg) {
  if (x->value.dim(0) != cfg.channels)
    throw ShapeError("drdb '" + prefix + "' expects " + std::to_string(cfg.channels) +
                     " channels, got " + std::to_string(x->value.dim(0)));
  std::vector<nn::VarT<T>> dense = {x};
  for (int j = 0; j < cfg.layers; ++j) {
    auto in = dense.size() == 1 ? dense[0] : nn::concat0<T>(dense);
    auto d = nn::leaky_relu(nn::conv2d(in, p.at(prefix + ".d" + std::to_string(j) + ".w"),
                                 p.at(prefix + ".d" + std::to_string(j) + ".b"),
                                 {.stride = 1, .pad = cfg.dilation, .dilation = cfg.dilation,
                                  .pad_mode = nn::PadMode::kReplicate}));
    dense.push_back(d);
  }
  auto fused = nn::conv2d(nn::concat0<T>(dense), p.at(prefix + ".fuse.w"),
                          p.at(prefix + ".fuse.b"), {.stride = 1, .pad = 0});
  return nn::add(fused, x);
}

// Registers one DRDB's parameters.
void init_drdb(nn::ModelWeights& w, Rng& rng, const std::string& prefix,
               const DrdbConfig& cfg);

}  // namespace sjhdr::models
