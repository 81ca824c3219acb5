#include "sjhdr/tmo.hpp"

#include <cmath>

namespace sjhdr {
namespace {

// Hable filmic curve constants (shoulder strength, linear strength, linear
// angle, toe strength, toe numerator, toe denominator).
constexpr double kHableA = 0.15;
constexpr double kHableB = 0.50;
constexpr double kHableC = 0.10;
constexpr double kHableD = 0.20;
constexpr double kHableE = 0.02;
constexpr double kHableF = 0.30;

double hable_curve(double x) {
  return ((x * (kHableA * x + kHableC * kHableB) + kHableD * kHableE) /
          (x * (kHableA * x + kHableB) + kHableD * kHableF)) -
         kHableE / kHableF;
}

double hable_curve_deriv(double x) {
  const double num = x * (kHableA * x + kHableC * kHableB) + kHableD * kHableE;
  const double den = x * (kHableA * x + kHableB) + kHableD * kHableF;
  const double dnum = 2.0 * kHableA * x + kHableC * kHableB;
  const double dden = 2.0 * kHableA * x + kHableB;
  return (dnum * den - num * dden) / (den * den);
}

// Solve hable_curve(x) = y on [0,1]. Rational curve -> quadratic in x.
double hable_curve_inverse(double y) {
  const double z = y + kHableE / kHableF;
  const double a = kHableA * (1.0 - z);
  const double b = kHableB * (kHableC - z);
  const double c = kHableD * (kHableE - z * kHableF);
  if (a == 0.0) return (b == 0.0) ? 0.0 : -c / b;
  const double disc = b * b - 4.0 * a * c;
  const double root = std::sqrt(std::max(disc, 0.0));
  // For y in [0, c(1)] the roots have opposite signs; take the positive one.
  const double q = (b >= 0.0) ? -0.5 * (b + root) : -0.5 * (b - root);
  const double r1 = q / a;
  const double r2 = (q != 0.0) ? c / q : 0.0;
  return (r1 >= 0.0) ? r1 : r2;
}

}  // namespace

const char* to_string(TmoKind k) {
  switch (k) {
    case TmoKind::kLinear: return "linear";
    case TmoKind::kGamma22: return "gamma22";
    case TmoKind::kReinhard: return "reinhard";
    case TmoKind::kHable: return "hable";
    case TmoKind::kMuLaw: return "mu_law";
  }
  return "?";
}

TmoKind tmo_kind_from_string(const std::string& s) {
  if (s == "linear") return TmoKind::kLinear;
  if (s == "gamma22") return TmoKind::kGamma22;
  if (s == "reinhard") return TmoKind::kReinhard;
  if (s == "hable") return TmoKind::kHable;
  if (s == "mu_law" || s == "mulaw" || s == "mu-law") return TmoKind::kMuLaw;
  throw ConfigError("unknown TMO kind '" + s + "'");
}

double TmoOperator::forward(double x) const {
  if (x < 0.0) throw DomainError("TMO input " + std::to_string(x) + " < 0");
  switch (kind) {
    case TmoKind::kLinear:
      return x;
    case TmoKind::kGamma22:
      return std::pow(x, 1.0 / 2.2);
    case TmoKind::kReinhard:
      return 2.0 * x / (1.0 + x);
    case TmoKind::kHable:
      return hable_curve(x) / hable_curve(1.0);
    case TmoKind::kMuLaw:
      if (!(mu > 0.0)) throw ConfigError("mu must be positive");
      return std::log1p(mu * x) / std::log1p(mu);
  }
  throw ConfigError("unknown TMO kind");
}

double TmoOperator::inverse(double y) const {
  if (y < 0.0 || y > 1.0)
    throw DomainError("TMO inverse input " + std::to_string(y) + " outside [0,1]");
  switch (kind) {
    case TmoKind::kLinear:
      return y;
    case TmoKind::kGamma22:
      return std::pow(y, 2.2);
    case TmoKind::kReinhard:
      return y / (2.0 - y);
    case TmoKind::kHable:
      return hable_curve_inverse(y * hable_curve(1.0));
    case TmoKind::kMuLaw: {
      if (!(mu > 0.0)) throw ConfigError("mu must be positive");
      return std::expm1(y * std::log1p(mu)) / mu;
    }
  }
  throw ConfigError("unknown TMO kind");
}

double TmoOperator::derivative(double x) const {
  switch (kind) {
    case TmoKind::kLinear:
      return 1.0;
    case TmoKind::kGamma22:
      return (1.0 / 2.2) * std::pow(x, 1.0 / 2.2 - 1.0);
    case TmoKind::kReinhard: {
      const double d = 1.0 + x;
      return 2.0 / (d * d);
    }
    case TmoKind::kHable:
      return hable_curve_deriv(x) / hable_curve(1.0);
    case TmoKind::kMuLaw:
      return mu / ((1.0 + mu * x) * std::log1p(mu));
  }
  throw ConfigError("unknown TMO kind");
}

TonemappedImage TmoOperator::apply(const Tensor& x) const {
  TonemappedImage out;
  out.operator_kind = kind;
  out.mu = mu;
  out.pixels = Tensor(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i)
    out.pixels[i] = static_cast<float>(forward(static_cast<double>(x[i])));
  return out;
}

Tensor TmoOperator::invert(const TonemappedImage& y) const {
  Tensor out(y.pixels.shape());
  for (std::size_t i = 0; i < y.pixels.size(); ++i)
    out[i] = static_cast<float>(inverse(static_cast<double>(y.pixels[i])));
  return out;
}

TonemappedImage tmo_mu_law(const Tensor& x, double mu) {
  return TmoOperator{TmoKind::kMuLaw, mu}.apply(x);
}

Tensor inv_tmo_mu_law(const TonemappedImage& y) {
  return TmoOperator{TmoKind::kMuLaw, y.mu}.invert(y);
}

Tensor inv_tmo_mu_law(const Tensor& y, double mu) {
  TonemappedImage t;
  t.pixels = y;
  t.mu = mu;
  return TmoOperator{TmoKind::kMuLaw, mu}.invert(t);
}

TonemappedImage tmo_apply(const Tensor& x, const TmoOperator& op) { return op.apply(x); }

Tensor inv_tmo_apply(const TonemappedImage& y, const TmoOperator& op) { return op.invert(y); }

}  // namespace sjhdr
