#include "sjhdr/sim/scene.hpp"

#include <algorithm>
#include <cmath>

#include "sjhdr/rng.hpp"

namespace sjhdr::sim {
namespace {

// Bilinearly upsampled random grids, summed over octaves. Returns h*w values.
std::vector<double> value_noise(Rng& rng, int h, int w, double texture_density) {
  std::vector<double> field(static_cast<std::size_t>(h) * w, 0.0);
  const int octaves = 4;
  for (int o = 0; o < octaves; ++o) {
    const int g = 4 << o;  // grid cells per side
    std::vector<double> grid(static_cast<std::size_t>(g + 1) * (g + 1));
    for (auto& v : grid) v = rng.uniform();
    const double weight = o == 0 ? 1.0 : texture_density * std::pow(0.55, o);
    if (weight == 0.0) continue;
    for (int y = 0; y < h; ++y) {
      const double gy = static_cast<double>(y) / h * g;
      const int y0 = std::min(static_cast<int>(gy), g - 1);
      const double fy = gy - y0;
      for (int x = 0; x < w; ++x) {
        const double gx = static_cast<double>(x) / w * g;
        const int x0 = std::min(static_cast<int>(gx), g - 1);
        const double fx = gx - x0;
        const double v00 = grid[y0 * (g + 1) + x0];
        const double v01 = grid[y0 * (g + 1) + x0 + 1];
        const double v10 = grid[(y0 + 1) * (g + 1) + x0];
        const double v11 = grid[(y0 + 1) * (g + 1) + x0 + 1];
        field[y * static_cast<std::size_t>(w) + x] +=
            weight * ((1 - fy) * ((1 - fx) * v00 + fx * v01) +
                      fy * ((1 - fx) * v10 + fx * v11));
      }
    }
  }
  return field;
}

// Soft stamp: the exact value on a plateau of radius r, cosine falloff to the
// existing field over the next r+2 pixels (hard square edges are adversarial
// content that would dominate reconstruction error).
void stamp_patch(std::vector<double>& field, int h, int w, int cy, int cx, int r,
                 double value) {
  const double outer = r + r + 2.0;
  const int reach = static_cast<int>(outer) + 1;
  for (int y = std::max(0, cy - reach); y <= std::min(h - 1, cy + reach); ++y)
    for (int x = std::max(0, cx - reach); x <= std::min(w - 1, cx + reach); ++x) {
      const double d = std::hypot(y - cy, x - cx);
      double a;
      if (d <= r)
        a = 1.0;
      else if (d >= outer)
        a = 0.0;
      else
        a = 0.5 * (1.0 + std::cos(3.14159265358979323846 * (d - r) / (outer - r)));
      auto& v = field[y * static_cast<std::size_t>(w) + x];
      v = a * value + (1.0 - a) * v;
    }
}

double disk_alpha(const SceneObject& obj, double y, double x) {
  const double d = std::hypot(y - obj.cy, x - obj.cx);
  // 1px soft edge
  return std::clamp(obj.radius + 0.5 - d, 0.0, 1.0);
}

void composite_object(Tensor& px, const SceneObject& obj, double dy, double dx) {
  const int H = px.dim(1), W = px.dim(2);
  const double cy = obj.cy + dy, cx = obj.cx + dx;
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - obj.radius - 1)));
  const int y1 = std::min(H - 1, static_cast<int>(std::ceil(cy + obj.radius + 1)));
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - obj.radius - 1)));
  const int x1 = std::min(W - 1, static_cast<int>(std::ceil(cx + obj.radius + 1)));
  SceneObject moved = obj;
  moved.cy = cy;
  moved.cx = cx;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const double a = disk_alpha(moved, y, x);
      if (a <= 0.0) continue;
      for (int c = 0; c < 3; ++c)
        px.at(c, y, x) = static_cast<float>(
            a * obj.radiance[c] + (1.0 - a) * static_cast<double>(px.at(c, y, x)));
    }
}

void check_shift(double dx, double dy, int h, int w, const char* what) {
  const double bound = std::min(h, w) / 4.0;
  if (std::abs(dx) > bound || std::abs(dy) > bound)
    throw ConfigError(std::string(what) + " shift (" + std::to_string(dx) + "," +
                      std::to_string(dy) + ") exceeds min(H,W)/4 = " +
                      std::to_string(bound));
}

}  // namespace

SceneModel synth_scene_model(const SceneSpec& spec) {
  if (spec.height < 16 || spec.width < 16)
    throw ConfigError("scene size " + std::to_string(spec.height) + "x" +
                      std::to_string(spec.width) + " too small (min 16)");
  if (!(spec.dynamic_range_stops > 0.0))
    throw ConfigError("dynamic_range_stops must be positive");
  if (spec.n_foreground_objects < 0) throw ConfigError("negative object count");

  const int H = spec.height, W = spec.width;
  Rng rng(spec.seed);
  auto field = value_noise(rng, H, W, spec.texture_density);

  // Mild per-channel tint, then joint normalization to [0,1].
  std::vector<double> tint(field.size() * 3);
  auto tint_field = value_noise(rng, H, W, 0.5);
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double t = tint_field[i];
    tint[i] = field[i] * (0.92 + 0.08 * t);
    tint[field.size() + i] = field[i];
    tint[2 * field.size() + i] = field[i] * (1.0 - 0.08 * t);
  }
  const auto [mn_it, mx_it] = std::minmax_element(tint.begin(), tint.end());
  const double mn = *mn_it, span = std::max(*mx_it - mn, 1e-12);
  for (auto& v : tint) v = (v - mn) / span;

  // Protected extreme patches in the margins: a ceiling-level highlight and a
  // floor-level dark region that objects are kept away from.
  const int pr = std::max(2, std::min(H, W) / 32);
  for (int c = 0; c < 3; ++c) {
    auto* plane = tint.data() + c * field.size();
    std::vector<double> view(plane, plane + field.size());
    stamp_patch(view, H, W, pr + 1, pr + 1, pr, 1.0);
    stamp_patch(view, H, W, H - pr - 2, W - pr - 2, pr, 0.0);
    std::copy(view.begin(), view.end(), plane);
  }

  SceneModel model;
  model.ceiling = kRadianceCeiling;
  model.background.pixels = Tensor({3, H, W});
  const double stops = spec.dynamic_range_stops;
  for (std::size_t i = 0; i < tint.size(); ++i)
    model.background.pixels[i] =
        static_cast<float>(model.ceiling * std::exp2(stops * (tint[i] - 1.0)));

  // Foreground objects live in the central box, clear of the extreme patches,
  // with radiances clamped inside the scene's dynamic range.
  const double floor = model.ceiling * std::exp2(-stops);
  for (int k = 0; k < spec.n_foreground_objects; ++k) {
    SceneObject obj;
    obj.radius = std::min(H, W) * rng.uniform(0.04, 0.09);
    obj.cy = rng.uniform(0.25, 0.75) * H;
    obj.cx = rng.uniform(0.25, 0.75) * W;
    const double lum = model.ceiling * std::exp2(stops * (rng.uniform(0.1, 0.9) - 1.0));
    for (int c = 0; c < 3; ++c)
      obj.radiance[c] = std::clamp(lum * rng.uniform(0.85, 1.0), floor, model.ceiling);
    model.objects.push_back(obj);
  }
  return model;
}

LinearImage apply_motion(const LinearImage& background,
                         const std::vector<SceneObject>& objects,
                         const MotionSpec& motion) {
  const int H = background.pixels.dim(1), W = background.pixels.dim(2);
  const auto [gdx, gdy] = motion.global_shift;
  check_shift(gdx, gdy, H, W, "global");
  for (const auto& [dx, dy] : motion.object_shifts) check_shift(dx, dy, H, W, "object");

  LinearImage out;
  out.pixels = Tensor({3, H, W});
  if (gdx == 0.0 && gdy == 0.0) {
    out.pixels = background.pixels;
  } else {
    // out(y,x) = in(y-dy, x-dx), bilinear, edge replication.
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          const double sy = y - gdy, sx = x - gdx;
          const int y0 = static_cast<int>(std::floor(sy));
          const int x0 = static_cast<int>(std::floor(sx));
          const double fy = sy - y0, fx = sx - x0;
          auto cl = [](int v, int hi) { return std::min(std::max(v, 0), hi); };
          const float v00 = background.pixels.at(c, cl(y0, H - 1), cl(x0, W - 1));
          const float v01 = background.pixels.at(c, cl(y0, H - 1), cl(x0 + 1, W - 1));
          const float v10 = background.pixels.at(c, cl(y0 + 1, H - 1), cl(x0, W - 1));
          const float v11 = background.pixels.at(c, cl(y0 + 1, H - 1), cl(x0 + 1, W - 1));
          out.pixels.at(c, y, x) = static_cast<float>(
              (1 - fy) * ((1 - fx) * v00 + fx * v01) + fy * ((1 - fx) * v10 + fx * v11));
        }
  }
  for (std::size_t k = 0; k < objects.size(); ++k) {
    double dx = gdx, dy = gdy;
    if (k < motion.object_shifts.size()) {
      dx += motion.object_shifts[k].first;
      dy += motion.object_shifts[k].second;
    }
    composite_object(out.pixels, objects[k], dy, dx);
  }
  return out;
}

LinearImage render_scene(const SceneModel& model, const MotionSpec& motion) {
  return apply_motion(model.background, model.objects, motion);
}

LinearImage synth_hdr_scene(const SceneSpec& spec) {
  const SceneModel model = synth_scene_model(spec);
  return render_scene(model, MotionSpec::none());
}

OcclusionScene make_occlusion_scene(std::uint64_t seed, int height, int width) {
  SceneSpec spec;
  spec.seed = seed;
  spec.height = height;
  spec.width = width;
  spec.dynamic_range_stops = 14.0;
  spec.texture_density = 1.0;
  spec.n_foreground_objects = 0;

  OcclusionScene scene;
  scene.model = synth_scene_model(spec);

  // Highlight disk bright enough to saturate the medium and over exposures at
  // unit base exposure (radiance >= 4 > 1/t_m) but not the under frame
  // (max 7, 7/8 < 1). Sized so the occluder's travel stays within the
  // min(H,W)/4 shift bound even for small scenes.
  const double hy = 0.5 * height, hx = 0.58 * width;
  const double m = std::min(height, width);
  const double hr = std::min(m * 0.07, (m / 4.0 - 3.0) / 2.0 - 0.5);
  Tensor& px = scene.model.background.pixels;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double d = std::hypot(y - hy, x - hx);
      if (d <= hr) {
        // Texture inside the highlight so there is structure to recover.
        const double v = 5.5 + 1.5 * std::sin(0.55 * y) * std::cos(0.55 * x);
        for (int c = 0; c < 3; ++c)
          px.at(c, y, x) = static_cast<float>(v * (1.0 - 0.02 * c));
        if (d <= hr - 1.0) scene.highlight.emplace_back(y, x);
      }
    }

  // Dark occluder parked beside the highlight; its shift parks it on top of
  // the highlight in the displaced (supporting-frame) state.
  const double travel = std::min(2.0 * hr + 4.0, m / 4.0);
  SceneObject occluder;
  occluder.radius = hr + 1.0;
  occluder.cy = hy;
  occluder.cx = hx - travel;
  occluder.radiance = {0.02, 0.02, 0.02};
  scene.model.objects.push_back(occluder);

  scene.motion.global_shift = {0.0, 0.0};
  scene.motion.object_shifts = {{travel, 0.0}};
  scene.motion.occlusion_flag = true;
  return scene;
}

}  // namespace sjhdr::sim
