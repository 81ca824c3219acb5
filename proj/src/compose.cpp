#include "sjhdr/compose.hpp"

#include "sjhdr/models/prednnet.hpp"
#include "sjhdr/models/ranet.hpp"
#include "sjhdr/resize.hpp"

namespace sjhdr {

Tensor tonemap_normalized(const Tensor& hdr, const TmoOperator& tmo, double ceiling) {
  if (!(ceiling > 0.0)) throw ConfigError("normalization ceiling must be positive");
  Tensor clamped(hdr.shape());
  for (std::size_t i = 0; i < hdr.size(); ++i) {
    const double v = static_cast<double>(hdr[i]) / ceiling;
    clamped[i] = static_cast<float>(std::min(1.0, std::max(0.0, v)));
  }
  return tmo.apply(clamped).pixels;
}

FrameInputs make_frame_inputs(const LdrImage& frame, const TmoOperator& tmo,
                              double ceiling) {
  FrameInputs out;
  const LinearImage lin = gamma_expand(frame);
  out.ldr_tm = tmo.apply(lin.pixels).pixels;
  const HdrDomainImage hdr = exposure_align(lin, frame.exposure_time);
  out.hdr_tm = tonemap_normalized(hdr.pixels, tmo, ceiling);
  return out;
}

Tensor denoise_frame(const nn::ModelWeights& predn, const Tensor& ldr_tm, double iso) {
  TonemappedImage tm;
  tm.pixels = ldr_tm;
  return models::predn_forward(predn, tm,
                               models::iso_plane(ldr_tm.dim(1), ldr_tm.dim(2), iso))
      .pixels;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.rank() != 3 || b.rank() != 3 || a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2))
    throw ShapeError("concat_channels: " + a.shape_str() + " vs " + b.shape_str());
  Tensor out({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)});
  std::copy(a.data(), a.data() + a.size(), out.data());
  std::copy(b.data(), b.data() + b.size(), out.data() + a.size());
  return out;
}

std::array<Tensor, 3> make_pcf_stacks(const ExposureBracket& bracket,
                                      const nn::ModelWeights& predn,
                                      const TmoOperator& tmo, double ceiling) {
  validate_bracket(bracket);
  std::array<Tensor, 3> stacks;
  for (int i = 0; i < 3; ++i) {
    const FrameInputs f = make_frame_inputs(bracket.frames[i], tmo, ceiling);
    const Tensor den = denoise_frame(predn, f.ldr_tm, bracket.frames[i].iso);
    stacks[i] = concat_channels(den, f.hdr_tm);
  }
  return stacks;
}

Tensor make_ranet_input(const ExposureBracket& bracket, const TmoOperator& tmo) {
  validate_bracket(bracket);
  Tensor out({9, models::RanetConfig::kInputSize, models::RanetConfig::kInputSize});
  for (int i = 0; i < 3; ++i) {
    LdrImage small = bracket.frames[i];
    small.pixels = resize_area(small.pixels, models::RanetConfig::kInputSize,
                               models::RanetConfig::kInputSize);
    const Tensor tm = tmo.apply(gamma_expand(small).pixels).pixels;
    std::copy(tm.data(), tm.data() + tm.size(), out.data() + i * tm.size());
  }
  return out;
}

Tensor tonemap_gt(const HdrDomainImage& gt_normalized, const TmoOperator& tmo) {
  return tonemap_normalized(gt_normalized.pixels, tmo, 1.0);
}

}  // namespace sjhdr
