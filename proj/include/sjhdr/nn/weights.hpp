#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "sjhdr/nn/graph.hpp"
#include "sjhdr/rng.hpp"
#include "sjhdr/tensor.hpp"

namespace sjhdr::nn {

// Named parameter collection with an architecture tag. The map is ordered so
// iteration (init, optimizer steps, serialization) is deterministic.
struct ModelWeights {
  std::string arch_tag;
  std::uint64_t seed = 0;
  std::map<std::string, Tensor> params;

  const Tensor& at(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw DataError("missing parameter '" + name + "'");
    return it->second;
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& [k, v] : params) n += v.size();
    return n;
  }

  void check_finite() const {
    for (const auto& [k, v] : params)
      for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
          throw DataError("non-finite value in parameter '" + k + "'");
  }
};

// Live training view: every parameter wrapped as an autodiff leaf.
template <typename T>
struct ParamMap {
  std::map<std::string, VarT<T>> vars;

  VarT<T> at(const std::string& name) const {
    auto it = vars.find(name);
    if (it == vars.end()) throw DataError("missing parameter '" + name + "'");
    return it->second;
  }

  void zero_grads() {
    for (auto& [k, v] : vars) v->clear_grad();
  }
};

template <typename T>
ParamMap<T> make_params(const ModelWeights& w, bool requires_grad) {
  ParamMap<T> pm;
  for (const auto& [name, tensor] : w.params)
    pm.vars.emplace(name, leaf(tensor.template cast<T>(), requires_grad));
  return pm;
}

inline ModelWeights collect_params(const ParamMap<float>& pm, const std::string& arch_tag,
                                   std::uint64_t seed) {
  ModelWeights w;
  w.arch_tag = arch_tag;
  w.seed = seed;
  for (const auto& [name, var] : pm.vars) w.params.emplace(name, var->value);
  return w;
}

// He-normal initialization helpers used by the model builders. The builder
// calls these in a fixed layer order with one RNG, so a (config, seed) pair
// fully determines the weights.
inline Tensor he_conv(Rng& rng, int cout, int cin, int kh, int kw) {
  Tensor t({cout, cin, kh, kw});
  const double std = std::sqrt(2.0 / (static_cast<double>(cin) * kh * kw));
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<float>(rng.normal(0.0, std));
  return t;
}

inline Tensor he_linear(Rng& rng, int out, int in) {
  Tensor t({out, in});
  const double std = std::sqrt(2.0 / static_cast<double>(in));
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<float>(rng.normal(0.0, std));
  return t;
}

inline Tensor zeros_bias(int n) { return Tensor({n}); }

inline Tensor const_bias(int n, float v) { return Tensor::full({n}, v); }

// Named-array checkpoint container: <stem>.json (tag, seed, entry table) +
// <stem>.f32 (raw little-endian float32, concatenated in table order).
void save_weights(const ModelWeights& w, const std::filesystem::path& stem);
ModelWeights load_weights(const std::filesystem::path& stem);

}  // namespace sjhdr::nn
