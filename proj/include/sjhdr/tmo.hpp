#pragma once

#include <string>

#include "sjhdr/image.hpp"
#include "sjhdr/tensor.hpp"

namespace sjhdr {

enum class TmoKind { kLinear, kGamma22, kReinhard, kHable, kMuLaw };

const char* to_string(TmoKind k);
TmoKind tmo_kind_from_string(const std::string& s);  // throws ConfigError

// Tone-mapped image: pixels in [0,1] plus the operator that produced them.
struct TonemappedImage {
  Tensor pixels;
  TmoKind operator_kind = TmoKind::kMuLaw;
  double mu = 5000.0;
};

// A strictly monotone [0,1] -> [0,1] compression curve with an exact analytic
// inverse. All scalar math is done in double.
//
// Kinds:
//   linear    f(x) = x
//   gamma22   f(x) = x^(1/2.2)
//   reinhard  f(x) = 2x/(1+x)                      (global operator, f(1)=1)
//   hable     f(x) = c(x)/c(1), filmic shoulder/toe curve with the published
//             constants A=.15 B=.50 C=.10 D=.20 E=.02 F=.30
//   mu_law    f(x) = log(1+mu*x)/log(1+mu)
struct TmoOperator {
  TmoKind kind = TmoKind::kMuLaw;
  double mu = 5000.0;  // used by mu_law only

  double forward(double x) const;     // throws DomainError for x < 0
  double inverse(double y) const;     // throws DomainError for y outside [0,1]
  double derivative(double x) const;  // analytic d forward / dx

  TonemappedImage apply(const Tensor& x) const;
  Tensor invert(const TonemappedImage& y) const;
};

// mu-law shortcuts (the default operator, mu=5000 unless overridden).
TonemappedImage tmo_mu_law(const Tensor& x, double mu = 5000.0);
Tensor inv_tmo_mu_law(const TonemappedImage& y);
Tensor inv_tmo_mu_law(const Tensor& y, double mu);

TonemappedImage tmo_apply(const Tensor& x, const TmoOperator& op);
Tensor inv_tmo_apply(const TonemappedImage& y, const TmoOperator& op);

}  // namespace sjhdr
