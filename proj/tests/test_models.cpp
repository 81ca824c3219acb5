#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gradcheck.hpp"
#include "sjhdr/losses.hpp"
#include "sjhdr/models/pcfnet.hpp"
#include "sjhdr/models/prednnet.hpp"
#include "sjhdr/models/ranet.hpp"
#include "sjhdr/rng.hpp"

using namespace sjhdr;
using namespace sjhdr::models;

namespace {

template <typename T>
TensorT<T> rand_tensor(Rng& rng, std::vector<int> shape, double lo = 0.0,
                       double hi = 1.0) {
  TensorT<T> t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

template <typename T>
std::vector<nn::VarT<T>> grad_leaves(nn::ParamMap<T>& p) {
  std::vector<nn::VarT<T>> out;
  for (auto& [name, var] : p.vars) out.push_back(var);
  return out;
}

}  // namespace

TEST_CASE("predn untrained forward satisfies the shape/range contract") {
  const auto cfg = PreDnConfig::toy();
  const auto w = init_predn(cfg, 5);
  TonemappedImage in;
  Rng rng(1);
  in.pixels = rand_tensor<float>(rng, {3, 32, 48});
  const auto out = predn_forward(w, in, iso_plane(32, 48, 1600.0));
  CHECK(out.pixels.shape() == in.pixels.shape());
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    CHECK(out.pixels[i] >= 0.0f);
    CHECK(out.pixels[i] <= 1.0f);
  }
}

TEST_CASE("predn shape errors name the offending level") {
  const auto cfg = PreDnConfig::toy();  // depth 3 -> dims divisible by 4
  const auto w = init_predn(cfg, 5);
  TonemappedImage in;
  in.pixels = Tensor({3, 30, 32});
  try {
    predn_forward(w, in, iso_plane(30, 32, 100.0));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("level") != std::string::npos);
  }
  TonemappedImage ok;
  ok.pixels = Tensor({3, 32, 32});
  CHECK_THROWS_AS(predn_forward(w, ok, iso_plane(16, 32, 100.0)), ShapeError);
}

TEST_CASE("pyramid_encode level count, halving rule, constant pooling") {
  Rng rng(3);
  PcfConfig one;
  one.levels = 1;
  one.widths = {6};
  one.drdb_growth = 4;
  auto w1 = init_pcf(one, 7);
  auto p1 = nn::make_params<float>(w1, false);
  auto feats1 = pyramid_encode(p1, one, nn::constant(rand_tensor<float>(rng, {6, 16, 16})));
  REQUIRE(feats1.size() == 1);
  CHECK(feats1[0]->value.dim(1) == 16);

  PcfConfig three = PcfConfig::toy();
  auto w3 = init_pcf(three, 7);
  auto p3 = nn::make_params<float>(w3, false);
  auto feats3 =
      pyramid_encode(p3, three, nn::constant(rand_tensor<float>(rng, {6, 32, 64})));
  REQUIRE(feats3.size() == 3);
  CHECK(feats3[0]->value.shape() == std::vector<int>{8, 32, 64});
  CHECK(feats3[1]->value.shape() == std::vector<int>{12, 16, 32});
  CHECK(feats3[2]->value.shape() == std::vector<int>{16, 8, 16});

  CHECK_THROWS_AS(
      pyramid_encode(p3, three, nn::constant(Tensor({6, 30, 32}))), ShapeError);

  // The image-space branch of every level average-pools the input; a constant
  // image stays the same constant at each scale.
  auto c = nn::constant(Tensor::full({6, 16, 16}, 0.42f));
  auto pooled = nn::avg_pool2(nn::avg_pool2(c));
  for (std::size_t i = 0; i < pooled->value.size(); ++i)
    CHECK(pooled->value[i] == doctest::Approx(0.42f).epsilon(1e-6));
}

TEST_CASE("msa attention bounds and zero-weight midpoint") {
  Rng rng(5);
  const int C = 4;
  auto f_ref = nn::constant(rand_tensor<float>(rng, {C, 6, 6}, -1.0, 1.0));
  auto f_i = nn::constant(rand_tensor<float>(rng, {C, 6, 6}, -1.0, 1.0));
  auto w = nn::constant(rand_tensor<float>(rng, {C, 2 * C, 3, 3}, -0.3, 0.3));
  auto b = nn::constant(rand_tensor<float>(rng, {C}, -0.1, 0.1));

  const auto att = msa_attention_map(f_ref, f_i, w, b);
  for (std::size_t i = 0; i < att->value.size(); ++i) {
    CHECK(att->value[i] > 0.0f);
    CHECK(att->value[i] < 1.0f);
  }
  const auto out = msa_attention(f_ref, f_i, w, b);
  for (std::size_t i = 0; i < out->value.size(); ++i)
    CHECK(std::abs(out->value[i]) <= std::abs(f_i->value[i]));

  auto wz = nn::constant(Tensor({C, 2 * C, 3, 3}));
  auto bz = nn::constant(Tensor({C}));
  const auto half = msa_attention(f_ref, f_i, wz, bz);
  for (std::size_t i = 0; i < half->value.size(); ++i)
    CHECK(half->value[i] == doctest::Approx(f_i->value[i] / 2).epsilon(1e-6));

  CHECK_THROWS_AS(msa_attention(f_ref, nn::constant(Tensor({C, 4, 4})), w, b),
                  ShapeError);
}

TEST_CASE("msa attention gradients vs finite differences on a 4x4 feature") {
  Rng rng(7);
  const int C = 2;
  auto f_ref = nn::leaf(rand_tensor<double>(rng, {C, 4, 4}, -1.0, 1.0), true);
  auto f_i = nn::leaf(rand_tensor<double>(rng, {C, 4, 4}, -1.0, 1.0), true);
  auto w = nn::leaf(rand_tensor<double>(rng, {C, 2 * C, 3, 3}, -0.5, 0.5), true);
  auto b = nn::leaf(rand_tensor<double>(rng, {C}, -0.1, 0.1), true);
  auto res = testing::grad_check({f_ref, f_i, w, b}, [&]() {
    return nn::mean_sq(msa_attention(f_ref, f_i, w, b));
  });
  CHECK(res.failed == 0);
}

TEST_CASE("drdb residual identity, shape preservation, gradients") {
  Rng rng(9);
  DrdbConfig cfg{4, 3, 3, 2};
  nn::ModelWeights w;
  w.arch_tag = "drdb-test";
  Rng wrng(11);
  init_drdb(w, wrng, "blk", cfg);

  // All-zero internals -> pure residual path.
  nn::ModelWeights zeros = w;
  for (auto& [k, t] : zeros.params) std::fill(t.vec().begin(), t.vec().end(), 0.0f);
  auto pz = nn::make_params<float>(zeros, false);
  auto x = nn::constant(rand_tensor<float>(rng, {4, 7, 9}, -1.0, 1.0));
  auto out = drdb_forward(pz, "blk", x, cfg);
  REQUIRE(out->value.shape() == x->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i)
    CHECK(out->value[i] == x->value[i]);

  auto p = nn::make_params<float>(w, false);
  for (auto shape : {std::vector<int>{4, 5, 5}, std::vector<int>{4, 11, 6}}) {
    auto xin = nn::constant(rand_tensor<float>(rng, shape, -1.0, 1.0));
    CHECK(drdb_forward(p, "blk", xin, cfg)->value.shape() == shape);
  }
  CHECK_THROWS_AS(drdb_forward(p, "blk", nn::constant(Tensor({3, 5, 5})), cfg),
                  ShapeError);

  // Gradients, tiny config.
  DrdbConfig tiny{2, 2, 3, 2};
  nn::ModelWeights tw;
  Rng trng(13);
  init_drdb(tw, trng, "t", tiny);
  auto tp = nn::make_params<double>(tw, true);
  auto tx = nn::leaf(rand_tensor<double>(rng, {2, 4, 4}, -1.0, 1.0), true);
  auto leaves = grad_leaves(tp);
  leaves.push_back(tx);
  auto res = testing::grad_check(
      leaves, [&]() { return nn::mean_sq(drdb_forward(tp, "t", tx, tiny)); });
  CHECK(res.failed == 0);
}

TEST_CASE("pcf untrained forward: contract, determinism, path isolation") {
  Rng rng(15);
  const auto cfg = PcfConfig::toy();
  const auto w = init_pcf(cfg, 21);

  std::array<Tensor, 3> stacks;
  for (auto& s : stacks) s = rand_tensor<float>(rng, {6, 32, 32});
  const Tensor out = pcf_forward(w, stacks, ReferenceChoice::kMedium);
  CHECK(out.shape() == std::vector<int>{3, 32, 32});
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i] >= 0.0f);
    CHECK(out[i] <= 1.0f);
  }
  const Tensor out2 = pcf_forward(w, stacks, ReferenceChoice::kMedium);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == out2[i]);

  // Shape closure across sizes divisible by 2^(L-1).
  for (int size : {32, 64, 96}) {
    std::array<Tensor, 3> st;
    for (auto& s : st) s = rand_tensor<float>(rng, {6, size, size});
    CHECK(pcf_forward(w, st, ReferenceChoice::kUnder).shape() ==
          std::vector<int>{3, size, size});
  }

  // Gradients flow only through the selected path's weights.
  auto path0 = nn::make_params<float>(init_pcf(cfg, 100), true);
  auto path1 = nn::make_params<float>(init_pcf(cfg, 101), true);
  std::array<nn::Var, 3> vstacks;
  for (int i = 0; i < 3; ++i) vstacks[i] = nn::constant(stacks[i]);
  auto pred = pcf_forward(path0, cfg, vstacks, ReferenceChoice::kUnder);
  auto gt = nn::constant(rand_tensor<float>(rng, {3, 32, 32}));
  auto loss = nn_loss::total_loss(pred, gt, 0.5).total;
  nn::backward(loss);
  bool any_grad = false;
  for (auto& [name, var] : path0.vars)
    if (!var->grad.empty()) any_grad = true;
  CHECK(any_grad);
  for (auto& [name, var] : path1.vars) CHECK(var->grad.empty());
}

TEST_CASE("pcf gradient check at the tiny configuration") {
  Rng rng(17);
  const auto cfg = PcfConfig::tiny_grad();
  const auto w = init_pcf(cfg, 23);
  auto p = nn::make_params<double>(w, true);
  std::array<nn::VarT<double>, 3> stacks;
  for (auto& s : stacks) s = nn::constant(rand_tensor<double>(rng, {6, 8, 8}, 0.05, 0.95));
  auto gt = nn::constant(rand_tensor<double>(rng, {3, 8, 8}, 0.05, 0.95));
  auto res = testing::grad_check(grad_leaves(p), [&]() {
    return nn_loss::total_loss<double>(pcf_forward(p, cfg, stacks, ReferenceChoice::kUnder),
                                       gt, 0.5)
        .total;
  });
  INFO("params checked: ", res.total, ", failed: ", res.failed);
  CHECK(res.pass_fraction() >= 0.95);
}

TEST_CASE("predn gradient check at the tiny configuration") {
  Rng rng(19);
  const auto cfg = PreDnConfig::tiny_grad();
  const auto w = init_predn(cfg, 29);
  auto p = nn::make_params<double>(w, true);
  auto in = nn::constant(rand_tensor<double>(rng, {4, 8, 8}, 0.05, 0.95));
  auto gt = nn::constant(rand_tensor<double>(rng, {3, 8, 8}, 0.05, 0.95));
  auto res = testing::grad_check(grad_leaves(p), [&]() {
    return nn_loss::total_loss<double>(predn_forward(p, cfg, in), gt, 0.5).total;
  });
  INFO("params checked: ", res.total, ", failed: ", res.failed);
  CHECK(res.pass_fraction() >= 0.95);
}

TEST_CASE("ranet: membership, budget, resolution guard, tie-breaking") {
  const auto toy = RanetConfig::toy();
  const auto w = init_ranet(toy, 31);
  Rng rng(23);
  const Tensor input = rand_tensor<float>(rng, {9, 224, 224});
  ScenePriors priors;
  priors.iso = 1600.0;
  const Tensor logits = ranet_forward(w, input, priors);
  REQUIRE(logits.shape() == std::vector<int>{3});
  const int choice = static_cast<int>(ranet_choice(logits));
  CHECK(choice >= 0);
  CHECK(choice <= 2);

  // Default configuration stays within the compact-parameter budget.
  const RanetConfig def;
  CHECK(init_ranet(def, 1).param_count() <= 300000);

  Tensor bad = rand_tensor<float>(rng, {9, 128, 128});
  CHECK_THROWS_AS(ranet_forward(w, bad, priors), ShapeError);

  CHECK(ranet_choice(Tensor::from({3}, {1.f, 1.f, 1.f})) == ReferenceChoice::kUnder);
  CHECK(ranet_choice(Tensor::from({3}, {0.f, 2.f, 2.f})) == ReferenceChoice::kMedium);
  CHECK(ranet_choice(Tensor::from({3}, {0.f, 1.f, 2.f})) == ReferenceChoice::kOver);
}

TEST_CASE("init is deterministic in the seed and tags round-trip") {
  const auto cfg = PcfConfig::toy();
  const auto a = init_pcf(cfg, 77);
  const auto b = init_pcf(cfg, 77);
  const auto c = init_pcf(cfg, 78);
  bool all_equal = true, any_diff = false;
  for (const auto& [name, t] : a.params) {
    const auto& tb = b.at(name);
    const auto& tc = c.at(name);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] != tb[i]) all_equal = false;
      if (t[i] != tc[i]) any_diff = true;
    }
  }
  CHECK(all_equal);
  CHECK(any_diff);

  CHECK(PcfConfig::from_tag(cfg.arch_tag()).arch_tag() == cfg.arch_tag());
  const auto pd = PreDnConfig::toy();
  CHECK(PreDnConfig::from_tag(pd.arch_tag()).arch_tag() == pd.arch_tag());
  const auto rc = RanetConfig::toy();
  CHECK(RanetConfig::from_tag(rc.arch_tag()).arch_tag() == rc.arch_tag());
  CHECK_THROWS_AS(PcfConfig::from_tag("predn:d3:w1-2-3"), ParseError);
}
