#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sjhdr/io.hpp"
#include "sjhdr/sim/dataset.hpp"

using namespace sjhdr;
using namespace sjhdr::sim;
namespace fs = std::filesystem;

namespace {

bool bit_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

SceneSpec small_spec(std::uint64_t seed, double stops = 12.0) {
  SceneSpec s;
  s.seed = seed;
  s.height = 48;
  s.width = 48;
  s.dynamic_range_stops = stops;
  s.n_foreground_objects = 1;
  return s;
}

}  // namespace

TEST_CASE("scene synthesis is deterministic and spans the requested stops") {
  const auto a = synth_hdr_scene(small_spec(42, 16.0));
  const auto b = synth_hdr_scene(small_spec(42, 16.0));
  CHECK(bit_equal(a.pixels, b.pixels));

  float mn = a.pixels[0], mx = a.pixels[0];
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    mn = std::min(mn, a.pixels[i]);
    mx = std::max(mx, a.pixels[i]);
  }
  CHECK(std::log2(static_cast<double>(mx) / mn) >= 16.0 - 1e-6);
  CHECK(mx == doctest::Approx(kRadianceCeiling).epsilon(1e-6));
  // Highlight region above the under frame's clip point (1/t_u = 8 at the
  // default triple), dark region near the floor.
  CHECK(mx >= 8.0f);
  CHECK(mn <= kRadianceCeiling * std::exp2(-16.0) * 1.01);
}

TEST_CASE("degenerate dynamic range collapses to near-constant") {
  const auto img = synth_hdr_scene(small_spec(1, 0.001));
  float mn = img.pixels[0], mx = img.pixels[0];
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    mn = std::min(mn, img.pixels[i]);
    mx = std::max(mx, img.pixels[i]);
  }
  CHECK(static_cast<double>(mx) / mn <= std::exp2(0.01));
}

TEST_CASE("degenerate scene size is rejected") {
  SceneSpec s = small_spec(3);
  s.height = 4;
  CHECK_THROWS_AS(synth_scene_model(s), ConfigError);
  s = small_spec(3);
  s.dynamic_range_stops = 0.0;
  CHECK_THROWS_AS(synth_scene_model(s), ConfigError);
}

TEST_CASE("noiseless capture round-trips within one quantization step") {
  const auto scene = synth_hdr_scene(small_spec(7, 4.0));  // values in [1, 16]
  const double t = 1.0 / 32.0;                             // keeps scene*t <= 0.5
  CaptureOptions opts;
  opts.bit_depth = 8;
  const auto ldr = simulate_exposure(scene, t, 2.2, NoiseSpec::none(), 100.0, opts);
  const auto rec = exposure_align(gamma_expand(ldr), t);
  const double bound = 2.2 / (2.0 * 255.0 * t) + 1e-6;
  for (std::size_t i = 0; i < scene.pixels.size(); ++i)
    CHECK(std::abs(rec.pixels[i] - scene.pixels[i]) <= bound);
}

TEST_CASE("saturated regions clip to exactly one") {
  LinearImage scene;
  scene.pixels = Tensor::full({1, 4, 4}, 3.0f);
  const auto ldr = simulate_exposure(scene, 1.0, 2.2, NoiseSpec::none(), 100.0);
  for (std::size_t i = 0; i < ldr.pixels.size(); ++i) CHECK(ldr.pixels[i] == 1.0f);
}

TEST_CASE("shot-noise variance scales linearly with ISO (64x from 50 to 3200)") {
  LinearImage scene;
  scene.pixels = Tensor::full({1, 320, 320}, 0.5f);  // 102400 pixels
  NoiseSpec noise;
  noise.read_sigma0 = 0.0;
  noise.shot_gain0 = 2e-4;
  CaptureOptions opts;
  opts.quantize = false;
  opts.noise_seed = 5;
  auto variance_at = [&](double iso) {
    const auto ldr = simulate_exposure(scene, 1.0, 1.0, noise, iso, opts);
    double acc = 0.0;
    for (std::size_t i = 0; i < ldr.pixels.size(); ++i) {
      const double d = static_cast<double>(ldr.pixels[i]) - 0.5;
      acc += d * d;
    }
    return acc / static_cast<double>(ldr.pixels.size());
  };
  opts.noise_seed = 5;
  const double v50 = variance_at(50.0);
  opts.noise_seed = 6;
  const double v3200 = variance_at(3200.0);
  const double ratio = v3200 / v50;
  CHECK(ratio >= 64.0 * 0.8);
  CHECK(ratio <= 64.0 * 1.2);
}

TEST_CASE("residual variance is affine in signal level (R^2 >= 0.95)") {
  // 12 constant bands, ~8500 px each (>= 1e5 total), RAW mode, no quantization.
  const int bands = 12, H = 320, W = 320;
  LinearImage scene;
  scene.pixels = Tensor({1, H, W});
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      scene.pixels.at(0, y, x) = 0.05f + 0.07f * (y * bands / H);
  NoiseSpec noise{5e-4, 3e-4};
  CaptureOptions opts;
  opts.quantize = false;
  opts.noise_seed = 11;
  const auto ldr = simulate_exposure(scene, 1.0, 1.0, noise, 1600.0, opts);

  std::vector<double> level(bands, 0.0), var(bands, 0.0), count(bands, 0.0);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const int b = y * bands / H;
      const double d = ldr.pixels.at(0, y, x) - scene.pixels.at(0, y, x);
      level[b] = scene.pixels.at(0, y, x);
      var[b] += d * d;
      count[b] += 1.0;
    }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int b = 0; b < bands; ++b) {
    var[b] /= count[b];
    sx += level[b];
    sy += var[b];
    sxx += level[b] * level[b];
    sxy += level[b] * var[b];
    syy += var[b] * var[b];
  }
  const double n = bands;
  const double num = n * sxy - sx * sy;
  const double r2 = num * num / ((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(r2 >= 0.95);
}

TEST_CASE("apply_motion: identity, translation, occlusion difference") {
  const auto model = synth_scene_model(small_spec(21));
  const auto still = render_scene(model, MotionSpec::none());
  CHECK(bit_equal(still.pixels, render_scene(model, MotionSpec::none()).pixels));

  // Pure integer translation of the background: the bright anchor patch (the
  // scene maximum) moves right by 5 columns.
  MotionSpec shift;
  shift.global_shift = {5.0, 0.0};
  const auto moved = apply_motion(model.background, {}, shift);
  auto argmax_col = [](const Tensor& px) {
    float best = -1.f;
    int col = -1;
    for (int y = 0; y < px.dim(1); ++y)
      for (int x = 0; x < px.dim(2); ++x)
        if (px.at(0, y, x) > best) {
          best = px.at(0, y, x);
          col = x;
        }
    return col;
  };
  CHECK(argmax_col(moved.pixels) == argmax_col(model.background.pixels) + 5);

  MotionSpec big;
  big.global_shift = {100.0, 0.0};
  CHECK_THROWS_AS(apply_motion(model.background, {}, big), ConfigError);

  const auto occ = make_occlusion_scene(3, 64, 64);
  const auto base = render_scene(occ.model, MotionSpec::none());
  const auto displaced = render_scene(occ.model, occ.motion);
  int diff = 0;
  for (const auto& [y, x] : occ.highlight)
    if (base.pixels.at(0, y, x) != displaced.pixels.at(0, y, x)) ++diff;
  CHECK(diff > static_cast<int>(occ.highlight.size()) / 2);
}

TEST_CASE("make_sample: exposure consistency, shared ground truth, motion breaks consistency") {
  SampleParams params;
  params.noise = NoiseSpec::none();
  params.quantize = false;
  params.exposure_times = {1.0 / 32.0, 1.0 / 4.0, 2.0};  // unclipped under frame

  SceneSpec spec = small_spec(31, 6.0);  // radiance in [0.25, 16]
  // Scale exposures so nothing clips: need scene*t <= 1 -> t <= 1/16.
  params.exposure_times = {1.0 / 256.0, 1.0 / 32.0, 1.0 / 20.0};

  const auto sample = make_sample(spec, MotionSpec::none(), params,
                                  ReferenceChoice::kUnder);
  // Noise-free, unclipped, static: all three frames align to the same HDR
  // image within 1e-6 (scaled by the ceiling for a relative comparison).
  const auto& b = sample.bracket();
  std::array<Tensor, 3> aligned;
  for (int i = 0; i < 3; ++i)
    aligned[i] =
        exposure_align(gamma_expand(b.frames[i]), b.frames[i].exposure_time).pixels;
  for (int i = 1; i < 3; ++i)
    for (std::size_t k = 0; k < aligned[0].size(); ++k)
      CHECK(std::abs(aligned[i][k] - aligned[0][k]) / sample.ceiling <= 1e-6);

  // Ground truth is bit-identical across reference variants by construction;
  // regenerating with a different ref must reproduce it bit-exactly.
  const auto sample_m = make_sample(spec, MotionSpec::none(), params,
                                    ReferenceChoice::kMedium);
  CHECK(bit_equal(sample.ground_truth.pixels, sample_m.ground_truth.pixels));

  // With motion, supporting frames disagree with the reference on >1% of px.
  MotionSpec motion;
  motion.global_shift = {6.0, 3.0};
  const auto moving = make_sample(spec, motion, params, ReferenceChoice::kUnder);
  const auto& mb = moving.bracket();
  const auto h_ref =
      exposure_align(gamma_expand(mb.frames[0]), mb.frames[0].exposure_time);
  const auto h_sup =
      exposure_align(gamma_expand(mb.frames[1]), mb.frames[1].exposure_time);
  int violations = 0;
  for (std::size_t k = 0; k < h_ref.pixels.size(); ++k)
    if (std::abs(h_ref.pixels[k] - h_sup.pixels[k]) / moving.ceiling > 1e-4)
      ++violations;
  CHECK(violations > static_cast<int>(h_ref.pixels.size() / 100));

  SampleParams bad = params;
  bad.exposure_times = {1.0, 1.0, 2.0};
  CHECK_THROWS_AS(make_sample(spec, MotionSpec::none(), bad, ReferenceChoice::kUnder),
                  ConfigError);
}

TEST_CASE("dataset container round trip and corruption detection") {
  const fs::path root = fs::temp_directory_path() / "sjhdr_ds_test";
  fs::remove_all(root);

  Dataset empty;
  write_dataset(empty, root / "empty");
  const auto back = read_dataset(root / "empty");
  CHECK(back.samples.empty());

  SampleParams params;
  params.noise = NoiseSpec{1e-3, 1e-4};
  Dataset ds;
  for (int k = 0; k < 2; ++k) {
    auto s = make_sample(small_spec(100 + k), MotionSpec::none(), params,
                         ReferenceChoice::kUnder);
    s.id = "sample_" + std::to_string(k);
    ds.samples.push_back(std::move(s));
  }
  ds.train_ids = {"sample_0"};
  ds.test_ids = {"sample_1"};
  write_dataset(ds, root / "ds");
  const auto rd = read_dataset(root / "ds");
  REQUIRE(rd.samples.size() == 2);
  CHECK(rd.train_ids == ds.train_ids);
  CHECK(rd.test_ids == ds.test_ids);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& a = ds.samples[i];
    const auto& b = rd.samples[i];
    CHECK(a.id == b.id);
    CHECK(a.iso == b.iso);
    CHECK(a.gamma == b.gamma);
    CHECK(a.ceiling == b.ceiling);
    CHECK(a.exposure_times == b.exposure_times);
    CHECK(bit_equal(a.ground_truth.pixels, b.ground_truth.pixels));
    for (int r = 0; r < 3; ++r) {
      const auto& va = a.reference_variants[r];
      const auto& vb = b.reference_variants[r];
      CHECK(va.priors.brightness == vb.priors.brightness);
      for (int f = 0; f < 3; ++f) {
        CHECK(bit_equal(va.frames[f].pixels, vb.frames[f].pixels));
        CHECK(va.frames[f].exposure_time == vb.frames[f].exposure_time);
      }
    }
  }

  // Writing the read-back dataset again produces identical bytes.
  write_dataset(rd, root / "ds2");
  for (const auto& entry : fs::recursive_directory_iterator(root / "ds")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root / "ds");
    CHECK(io::fnv1a_file(entry.path()) == io::fnv1a_file(root / "ds2" / rel));
  }

  // Corrupt one byte of a sample's meta.json: loud parse error, names sample.
  {
    const fs::path meta = root / "ds" / "sample_1" / "meta.json";
    auto text = io::read_text(meta);
    text[text.size() / 2] ^= 0x1;
    io::write_text(meta, text);
    try {
      read_dataset(root / "ds");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("sample_1") != std::string::npos);
    }
  }
  // Corrupt a pixel byte: loud error as well.
  {
    write_dataset(ds, root / "ds3");
    const fs::path px = root / "ds3" / "sample_0" / "gt.f32";
    auto bytes = io::read_bytes(px);
    bytes[bytes.size() / 3] ^= 0xFF;
    io::write_bytes(px, bytes.data(), bytes.size());
    CHECK_THROWS_AS(read_dataset(root / "ds3"), ParseError);
  }
  fs::remove_all(root);
}
