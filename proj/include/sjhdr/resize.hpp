#pragma once

#include "sjhdr/tensor.hpp"

namespace sjhdr {

// Anti-aliased area-average resampling of a {C,H,W} tensor.
Tensor resize_area(const Tensor& src, int out_h, int out_w);

}  // namespace sjhdr
