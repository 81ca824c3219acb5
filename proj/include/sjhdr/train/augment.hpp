#pragma once

#include "sjhdr/rng.hpp"
#include "sjhdr/tensor.hpp"
#include "sjhdr/train/config.hpp"

namespace sjhdr::train {

// One geometric transform, drawn once per training item and applied
// identically to every tensor of the (input, target) pair.
struct AugmentDraw {
  int y0 = 0, x0 = 0;     // crop origin
  int crop = 0;           // 0 = no crop
  int rot90 = 0;          // counter-clockwise quarter turns
  bool flip_h = false;
  bool flip_v = false;
};

inline AugmentDraw draw_augment(Rng& rng, const TrainConfig& cfg, int h, int w) {
  AugmentDraw d;
  if (cfg.aug_crop && (cfg.patch_size < h || cfg.patch_size < w)) {
    if (cfg.patch_size > h || cfg.patch_size > w)
      throw ConfigError("patch size " + std::to_string(cfg.patch_size) +
                        " exceeds image " + std::to_string(h) + "x" + std::to_string(w));
    d.crop = cfg.patch_size;
    d.y0 = rng.uniform_int(0, h - cfg.patch_size);
    d.x0 = rng.uniform_int(0, w - cfg.patch_size);
  }
  if (cfg.aug_rotate) d.rot90 = rng.uniform_int(0, 3);
  if (cfg.aug_flip) {
    d.flip_h = rng.uniform_int(0, 1) == 1;
    d.flip_v = rng.uniform_int(0, 1) == 1;
  }
  return d;
}

inline Tensor apply_augment(const Tensor& src, const AugmentDraw& d) {
  const int C = src.dim(0);
  Tensor cur = src;
  if (d.crop > 0) {
    Tensor t({C, d.crop, d.crop});
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < d.crop; ++y)
        for (int x = 0; x < d.crop; ++x)
          t.at(c, y, x) = cur.at(c, d.y0 + y, d.x0 + x);
    cur = std::move(t);
  }
  const int H = cur.dim(1), W = cur.dim(2);
  if (d.rot90 % 4 != 0) {
    if (H != W) throw ShapeError("rotation augmentation needs square patches");
    Tensor t(cur.shape());
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          int sy = y, sx = x;
          switch (d.rot90 % 4) {
            case 1: sy = x; sx = W - 1 - y; break;
            case 2: sy = H - 1 - y; sx = W - 1 - x; break;
            case 3: sy = H - 1 - x; sx = y; break;
          }
          t.at(c, y, x) = cur.at(c, sy, sx);
        }
    cur = std::move(t);
  }
  if (d.flip_h || d.flip_v) {
    Tensor t(cur.shape());
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
          t.at(c, y, x) = cur.at(c, d.flip_v ? H - 1 - y : y, d.flip_h ? W - 1 - x : x);
    cur = std::move(t);
  }
  return cur;
}

}  // namespace sjhdr::train
