#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gradcheck.hpp"
#include "sjhdr/losses.hpp"
#include "sjhdr/metrics.hpp"
#include "sjhdr/rng.hpp"
#include "sjhdr/tmo.hpp"

using namespace sjhdr;

namespace {

Tensor rand_img(Rng& rng, std::vector<int> shape, double lo = 0.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<float>(rng.uniform(lo, hi));
  return t;
}

}  // namespace

TEST_CASE("recon_loss basics") {
  Tensor a = Tensor::full({1, 4, 4}, 0.0f);
  Tensor b = Tensor::full({1, 4, 4}, 1.0f);
  CHECK(recon_loss(a, a) == 0.0);
  CHECK(recon_loss(a, b) == doctest::Approx(1.0));
  Tensor c = Tensor::full({1, 4, 4}, 0.4f);
  Tensor d = Tensor::full({1, 4, 4}, 0.5f);
  CHECK(recon_loss(d, c) == doctest::Approx(0.1).epsilon(1e-6));
  CHECK_THROWS_AS(recon_loss(a, Tensor({1, 2, 2})), ShapeError);
}

TEST_CASE("sobel oracle: unit-slope ramp gives |grad_x| = 8 in the interior") {
  // Hand-convolution on a 5x5 ramp f(y,x) = x with kernel
  // [[-1,0,1],[-2,0,2],[-1,0,1]]: interior response (1+2+1)*((x+1)-(x-1)) = 8.
  Tensor ramp({1, 5, 5});
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) ramp.at(0, y, x) = static_cast<float>(x);
  const auto [gx, gy] = sobel_gradients(ramp);
  for (int y = 1; y < 4; ++y)
    for (int x = 1; x < 4; ++x) {
      CHECK(gx.at(0, y, x) == doctest::Approx(8.0));
      CHECK(gy.at(0, y, x) == doctest::Approx(0.0));
    }
  // Against a flat zero image the interior per-pixel |grad_x| difference is 8.
  Tensor flat({1, 5, 5});
  const auto [fx, fy] = sobel_gradients(flat);
  for (int y = 1; y < 4; ++y)
    for (int x = 1; x < 4; ++x)
      CHECK(std::abs(gx.at(0, y, x) - fx.at(0, y, x)) == doctest::Approx(8.0));
}

TEST_CASE("sobel_loss basics and size guard") {
  Tensor a = Tensor::full({1, 5, 5}, 0.3f);
  Tensor b = Tensor::full({1, 5, 5}, 0.9f);
  CHECK(sobel_loss(a, a) == 0.0);
  CHECK(sobel_loss(a, b) == doctest::Approx(0.0));  // both gradients vanish
  CHECK_THROWS_AS(sobel_loss(Tensor({1, 2, 2}), Tensor({1, 2, 2})), ShapeError);
}

TEST_CASE("sobel_loss is translation-covariant on the interior") {
  Rng rng(31);
  // Smooth random field, shifted by one pixel; compare interior crops.
  const int H = 12, W = 12;
  Tensor base({1, H + 1, W + 1});
  for (int y = 0; y <= H; ++y)
    for (int x = 0; x <= W; ++x)
      base.at(0, y, x) = static_cast<float>(
          0.5 + 0.3 * std::sin(0.7 * y) * std::cos(0.5 * x) + 0.05 * rng.uniform());
  auto crop = [&](int oy, int ox) {
    Tensor t({1, H, W});
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x) t.at(0, y, x) = base.at(0, y + oy, x + ox);
    return t;
  };
  Tensor pred0 = crop(0, 0), pred1 = crop(0, 1);
  Tensor gt0 = crop(0, 0), gt1 = crop(0, 1);
  for (std::size_t i = 0; i < gt0.size(); ++i) {
    gt0[i] += 0.01f;
    gt1[i] += 0.01f;
  }
  // Interior-only comparison: compute per-pixel |sobel diff| maps and compare
  // the shared interior region.
  const auto [p0x, p0y] = sobel_gradients(pred0);
  const auto [g0x, g0y] = sobel_gradients(gt0);
  const auto [p1x, p1y] = sobel_gradients(pred1);
  const auto [g1x, g1y] = sobel_gradients(gt1);
  double l0 = 0.0, l1 = 0.0;
  int n = 0;
  for (int y = 2; y < H - 2; ++y)
    for (int x = 2; x < W - 2; ++x) {
      l0 += std::abs(p0x.at(0, y, x + 1) - g0x.at(0, y, x + 1)) +
            std::abs(p0y.at(0, y, x + 1) - g0y.at(0, y, x + 1));
      l1 += std::abs(p1x.at(0, y, x) - g1x.at(0, y, x)) +
            std::abs(p1y.at(0, y, x) - g1y.at(0, y, x));
      ++n;
    }
  CHECK(std::abs(l0 - l1) / n <= 1e-6);
}

TEST_CASE("total_loss blending and errors") {
  Rng rng(7);
  Tensor a = rand_img(rng, {3, 8, 8});
  Tensor b = rand_img(rng, {3, 8, 8});
  const auto l0 = total_loss(a, b, 0.0);
  CHECK(l0.total == doctest::Approx(l0.recon).epsilon(1e-12));
  const auto l1 = total_loss(a, b, 1.0);
  CHECK(l1.total == doctest::Approx(l1.sobel).epsilon(1e-12));
  const auto lh = total_loss(a, b, 0.5);
  CHECK(lh.total ==
        doctest::Approx((1.0 - 0.5) * lh.recon + 0.5 * lh.sobel).epsilon(1e-7));
  // recon 0.2, sobel 0.4 -> 0.3 (constructed via the invariant)
  CHECK(std::abs(lh.total - (0.5 * lh.recon + 0.5 * lh.sobel)) <= 1e-7);
  CHECK_THROWS_AS(total_loss(a, b, -0.1), ConfigError);
  CHECK_THROWS_AS(total_loss(a, b, 1.1), ConfigError);
}

TEST_CASE("total_loss gradients match finite differences on 8x8 pairs") {
  Rng rng(41);
  auto pred = nn::leaf(rand_img(rng, {3, 8, 8}).cast<double>(), true);
  auto gt = nn::constant(rand_img(rng, {3, 8, 8}).cast<double>());
  auto res = testing::grad_check(
      {pred}, [&]() { return nn_loss::total_loss<double>(pred, gt, 0.5).total; });
  CHECK(res.pass_fraction() >= 0.999);
}

TEST_CASE("psnr: formula values, infinity sentinel, symmetry") {
  Tensor a = Tensor::full({1, 8, 8}, 0.5f);
  CHECK(std::isinf(psnr(a, a, MetricDomain::kLinear)));

  Tensor b = Tensor::full({1, 8, 8}, 0.6f);
  // MSE = 0.01 -> 20 dB
  CHECK(psnr(a, b, MetricDomain::kLinear) == doctest::Approx(20.0).epsilon(1e-5));
  CHECK(psnr(a, b, MetricDomain::kLinear) == psnr(b, a, MetricDomain::kLinear));

  Tensor z = Tensor::full({1, 8, 8}, 0.0f);
  Tensor o = Tensor::full({1, 8, 8}, 1.0f);
  // MSE = 1 -> 0 dB
  CHECK(psnr(z, o, MetricDomain::kLinear) == doctest::Approx(0.0).epsilon(1e-9));

  // mu domain maps first: psnr_mu(a,b) = psnr(T(a),T(b))
  TmoOperator op{TmoKind::kMuLaw, 5000.0};
  const double ta = op.forward(0.5), tb = op.forward(0.6);
  const double expect = 10.0 * std::log10(1.0 / ((ta - tb) * (ta - tb)));
  CHECK(psnr(a, b, MetricDomain::kMu) == doctest::Approx(expect).epsilon(1e-6));
  CHECK_THROWS_AS(psnr(a, Tensor({1, 2, 2}), MetricDomain::kLinear), ShapeError);
}

TEST_CASE("ssim: identity, constants, inversion, window guard, symmetry") {
  Rng rng(51);
  Tensor tex({3, 16, 16});
  for (std::size_t i = 0; i < tex.size(); ++i)
    tex[i] = static_cast<float>(0.35 + 0.3 * rng.uniform());
  CHECK(ssim(tex, tex, MetricDomain::kLinear) == doctest::Approx(1.0).epsilon(1e-9));

  Tensor c = Tensor::full({1, 16, 16}, 0.5f);
  CHECK(ssim(c, c, MetricDomain::kLinear) == doctest::Approx(1.0).epsilon(1e-9));

  Tensor inv(tex.shape());
  for (std::size_t i = 0; i < tex.size(); ++i) inv[i] = 1.0f - tex[i];
  CHECK(ssim(tex, inv, MetricDomain::kLinear) < 1.0);
  CHECK(ssim(tex, inv, MetricDomain::kLinear) ==
        doctest::Approx(ssim(inv, tex, MetricDomain::kLinear)).epsilon(1e-12));

  CHECK_THROWS_AS(ssim(Tensor({1, 8, 8}), Tensor({1, 8, 8}), MetricDomain::kLinear),
                  ShapeError);
}

TEST_CASE("metric report aggregates and serializes") {
  Rng rng(61);
  MetricReport rep;
  Tensor gt = rand_img(rng, {3, 16, 16});
  Tensor p1 = gt;
  Tensor p2 = rand_img(rng, {3, 16, 16});
  rep.add("a", p2, gt);
  rep.add("b", p2, gt);
  const auto m = rep.means();
  CHECK(m.psnr_mu == doctest::Approx(rep.per_image[0].psnr_mu));
  CHECK(rep.to_table("test").find("mean") != std::string::npos);
  CHECK(rep.to_json().find("per_image") != std::string::npos);
}
