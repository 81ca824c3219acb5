#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sjhdr/image.hpp"

namespace sjhdr::sim {

// The simulator's fixed radiance ceiling: generated scenes never exceed this,
// and HDR-domain images are normalized by it before tone mapping.
inline constexpr double kRadianceCeiling = 16.0;

struct SceneSpec {
  std::uint64_t seed = 0;
  int height = 128;
  int width = 128;
  double dynamic_range_stops = 16.0;  // log2 luminance span
  double texture_density = 1.0;
  int n_foreground_objects = 2;
};

struct MotionSpec {
  std::pair<double, double> global_shift = {0.0, 0.0};  // (dx, dy) pixels
  std::vector<std::pair<double, double>> object_shifts;
  bool occlusion_flag = false;  // a moving object crosses a saturated region

  static MotionSpec none() { return {}; }
};

// Analytic foreground disk; shifting re-renders it exactly at any real offset.
struct SceneObject {
  double cx = 0.0, cy = 0.0;
  double radius = 8.0;
  std::array<double, 3> radiance = {0.1, 0.1, 0.1};
};

// Background layer plus analytic object layers. The static render composites
// the objects at rest; motion re-renders them displaced.
struct SceneModel {
  LinearImage background;  // {3,H,W}, spans the requested stops, max = ceiling
  std::vector<SceneObject> objects;
  double ceiling = kRadianceCeiling;
};

// Deterministic scene synthesis. The background attains the ceiling and the
// ceiling*2^-stops floor in protected margin patches so foreground objects
// cannot mask the dynamic-range extremes.
SceneModel synth_scene_model(const SceneSpec& spec);

// Static clean radiance render (objects at rest).
LinearImage synth_hdr_scene(const SceneSpec& spec);

LinearImage render_scene(const SceneModel& model, const MotionSpec& motion);

// Global shift with edge replication, then each object layer displaced by its
// own shift and composited over. Shifts are validated against min(H,W)/4.
LinearImage apply_motion(const LinearImage& background,
                         const std::vector<SceneObject>& objects,
                         const MotionSpec& motion);

// Fig-1(a)-style failure case: a highlight that saturates the medium and over
// exposures, and a dark object whose motion covers it in the displaced state.
struct OcclusionScene {
  SceneModel model;
  MotionSpec motion;
  // Pixels (y,x) of the saturated highlight in the static render.
  std::vector<std::pair<int, int>> highlight;
};
OcclusionScene make_occlusion_scene(std::uint64_t seed, int height, int width);

}  // namespace sjhdr::sim
