#include "sjhdr/image.hpp"

#include <cmath>

namespace sjhdr {

void validate_bracket(const ExposureBracket& b) {
  const auto& shape = b.frames[0].pixels.shape();
  double prev_t = 0.0;
  for (int i = 0; i < 3; ++i) {
    const LdrImage& f = b.frames[i];
    if (f.pixels.shape() != shape)
      throw ShapeError("bracket frames disagree on shape: " + f.pixels.shape_str() +
                       " vs " + Tensor::shape_str(shape));
    if (f.gamma != b.frames[0].gamma)
      throw ConfigError("bracket frames disagree on gamma");
    if (f.exposure_time <= prev_t)
      throw ConfigError("bracket exposure times must be strictly increasing");
    prev_t = f.exposure_time;
  }
}

LinearImage gamma_expand(const LdrImage& img) {
  LinearImage out;
  out.pixels = Tensor(img.pixels.shape());
  const double g = img.gamma;
  const float* src = img.pixels.data();
  float* dst = out.pixels.data();
  const std::size_t n = img.pixels.size();
  if (g == 1.0) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = src[i];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      dst[i] = static_cast<float>(std::pow(static_cast<double>(src[i]), g));
  }
  return out;
}

HdrDomainImage exposure_align(const LinearImage& lin, double t) {
  if (!(t > 0.0)) throw ConfigError("invalid exposure time " + std::to_string(t));
  HdrDomainImage out;
  out.pixels = Tensor(lin.pixels.shape());
  const double inv_t = 1.0 / t;
  const float* src = lin.pixels.data();
  float* dst = out.pixels.data();
  for (std::size_t i = 0; i < lin.pixels.size(); ++i)
    dst[i] = static_cast<float>(static_cast<double>(src[i]) * inv_t);
  return out;
}

}  // namespace sjhdr
