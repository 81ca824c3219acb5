#pragma once

#include <array>

#include "sjhdr/image.hpp"
#include "sjhdr/nn/weights.hpp"
#include "sjhdr/tmo.hpp"

namespace sjhdr {

// Per-frame intermediate products of the fusion input composition: the
// tonemapped linear LDR T(L) and the tonemapped, ceiling-normalized
// HDR-domain image T(clamp(H/ceiling)).
struct FrameInputs {
  Tensor ldr_tm;
  Tensor hdr_tm;
};

FrameInputs make_frame_inputs(const LdrImage& frame, const TmoOperator& tmo,
                              double ceiling);

// Runs the denoiser on a tonemapped LDR with its constant ISO plane.
Tensor denoise_frame(const nn::ModelWeights& predn, const Tensor& ldr_tm, double iso);

// Three 6-channel stacks [denoised tonemapped LDR, tonemapped HDR-domain
// image], the per-frame fusion input.
std::array<Tensor, 3> make_pcf_stacks(const ExposureBracket& bracket,
                                      const nn::ModelWeights& predn,
                                      const TmoOperator& tmo, double ceiling);

// Advisor input: the three frames area-resized to 224x224, gamma-expanded and
// tonemapped, concatenated to 9 channels.
Tensor make_ranet_input(const ExposureBracket& bracket, const TmoOperator& tmo);

// Tone-mapped target for a ceiling-normalized ground truth.
Tensor tonemap_gt(const HdrDomainImage& gt_normalized, const TmoOperator& tmo);

// T(clamp(H/ceiling, 0, 1)) for an arbitrary HDR-domain tensor.
Tensor tonemap_normalized(const Tensor& hdr, const TmoOperator& tmo, double ceiling);

Tensor concat_channels(const Tensor& a, const Tensor& b);

}  // namespace sjhdr
