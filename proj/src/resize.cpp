#include "sjhdr/resize.hpp"

#include <cmath>
#include <vector>

namespace sjhdr {
namespace {

struct Tap {
  int index;
  double weight;
};

// Box-integration taps: output cell o covers [o*scale, (o+1)*scale) in source
// coordinates; weights are the fractional overlaps, normalized to sum 1.
std::vector<std::vector<Tap>> area_taps(int in_size, int out_size) {
  std::vector<std::vector<Tap>> taps(out_size);
  const double scale = static_cast<double>(in_size) / out_size;
  for (int o = 0; o < out_size; ++o) {
    const double lo = o * scale, hi = (o + 1) * scale;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(static_cast<int>(std::ceil(hi)) - 1, in_size - 1);
    double total = 0.0;
    for (int i = first; i <= last; ++i) {
      const double cover = std::min(hi, static_cast<double>(i + 1)) -
                           std::max(lo, static_cast<double>(i));
      if (cover <= 0.0) continue;
      taps[o].push_back({i, cover});
      total += cover;
    }
    for (auto& t : taps[o]) t.weight /= total;
  }
  return taps;
}

}  // namespace

Tensor resize_area(const Tensor& src, int out_h, int out_w) {
  if (src.rank() != 3) throw ShapeError("resize_area needs {C,H,W}");
  if (out_h <= 0 || out_w <= 0) throw ConfigError("non-positive resize target");
  const int C = src.dim(0), H = src.dim(1), W = src.dim(2);
  const auto row_taps = area_taps(H, out_h);
  const auto col_taps = area_taps(W, out_w);

  Tensor tmp({C, H, out_w});
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (const auto& t : col_taps[x]) acc += t.weight * src.at(c, y, t.index);
        tmp.at(c, y, x) = static_cast<float>(acc);
      }
  Tensor out({C, out_h, out_w});
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < out_h; ++y)
      for (int x = 0; x < out_w; ++x) {
        double acc = 0.0;
        for (const auto& t : row_taps[y]) acc += t.weight * tmp.at(c, t.index, x);
        out.at(c, y, x) = static_cast<float>(acc);
      }
  return out;
}

}  // namespace sjhdr
