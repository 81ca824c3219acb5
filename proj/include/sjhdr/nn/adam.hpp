#pragma once

#include <cmath>
#include <map>
#include <string>

#include "sjhdr/nn/weights.hpp"

namespace sjhdr::nn {

// Adaptive moment estimation over a ParamMap<float>. Conventional defaults
// for the moment decays and epsilon.
class Adam {
 public:
  explicit Adam(double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ParamMap<float>& params, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, t_);
    const double c2 = 1.0 - std::pow(beta2_, t_);
    for (auto& [name, var] : params.vars) {
      if (var->grad.empty()) continue;  // parameter untouched by this loss
      auto& st = state_[name];
      if (st.m.empty()) {
        st.m = TensorD(var->value.shape());
        st.v = TensorD(var->value.shape());
      }
      for (std::size_t i = 0; i < var->value.size(); ++i) {
        const double g = var->grad[i];
        st.m[i] = beta1_ * st.m[i] + (1.0 - beta1_) * g;
        st.v[i] = beta2_ * st.v[i] + (1.0 - beta2_) * g * g;
        const double mh = st.m[i] / c1;
        const double vh = st.v[i] / c2;
        var->value[i] -= static_cast<float>(lr * mh / (std::sqrt(vh) + eps_));
      }
    }
  }

  long steps_taken() const { return t_; }

  // Checkpoint support: moments keyed by parameter name plus the step count.
  struct State {
    TensorD m, v;
  };
  const std::map<std::string, State>& state() const { return state_; }
  void restore(std::map<std::string, State> state, long t) {
    state_ = std::move(state);
    t_ = t;
  }

 private:
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::map<std::string, State> state_;
};

}  // namespace sjhdr::nn
