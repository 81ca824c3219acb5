#include "sjhdr/train/trainer.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <numeric>

#include "sjhdr/compose.hpp"
#include "sjhdr/io.hpp"
#include "sjhdr/losses.hpp"
#include "sjhdr/metrics.hpp"
#include "sjhdr/nn/adam.hpp"
#include "sjhdr/train/augment.hpp"

namespace sjhdr::train {

using nlohmann::json;
namespace fs = std::filesystem;

void check_finite_loss(double loss, int step) {
  if (!std::isfinite(loss))
    throw DivergenceError("non-finite loss " + std::to_string(loss) + " at step " +
                          std::to_string(step));
}

namespace {

// The advisor and the labeling stage read the bracket of a fixed variant so
// their inputs do not depend on which path later runs. The medium variant is
// the conventional capture.
const ExposureBracket& advisor_bracket(const sim::DatasetSample& s) {
  return s.variant(ReferenceChoice::kMedium);
}

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
  for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
    std::swap(idx[i], idx[rng.uniform_int(0, i)]);
}

struct LoopState {
  int start_epoch = 0;
  int global_step = 0;
  Rng rng;
  nn::Adam adam;
  std::vector<TrainLogEntry> log;

  explicit LoopState(std::uint64_t seed) : rng(seed) {}
};

fs::path ckpt_json(const CheckpointSink& c) { return c.dir / (c.stage + "_ckpt.json"); }

void save_checkpoint(const CheckpointSink& c, const nn::ParamMap<float>& params,
                     const std::string& arch_tag, std::uint64_t seed,
                     const LoopState& st, int epoch_next) {
  fs::create_directories(c.dir);
  nn::save_weights(nn::collect_params(params, arch_tag, seed), c.dir / (c.stage + "_w"));

  // Adam moments, in parameter order.
  std::vector<double> moments;
  for (const auto& [name, var] : params.vars) {
    auto it = st.adam.state().find(name);
    if (it == st.adam.state().end()) {
      moments.insert(moments.end(), 2 * var->value.size(), 0.0);
    } else {
      moments.insert(moments.end(), it->second.m.vec().begin(), it->second.m.vec().end());
      moments.insert(moments.end(), it->second.v.vec().begin(), it->second.v.vec().end());
    }
  }
  io::write_f64(c.dir / (c.stage + "_adam.f64"), moments.data(), moments.size());

  json j;
  j["format"] = "sjhdr-ckpt-v1";
  j["epoch_next"] = epoch_next;
  j["global_step"] = st.global_step;
  j["adam_t"] = st.adam.steps_taken();
  j["rng_state"] = st.rng.save_state();
  json log = json::array();
  for (const auto& e : st.log) {
    log.push_back({{"step", e.step},
                   {"epoch", e.epoch},
                   {"lr", e.lr},
                   {"total", e.total},
                   {"recon", e.recon},
                   {"sobel", e.sobel},
                   {"wall_seconds", e.wall_seconds}});
  }
  j["log"] = log;
  io::write_text(ckpt_json(c), j.dump(2) + "\n");
}

bool try_resume(const CheckpointSink& c, nn::ParamMap<float>& params, LoopState& st) {
  if (!fs::exists(ckpt_json(c))) return false;
  json j;
  try {
    j = json::parse(io::read_text(ckpt_json(c)));
    if (j.at("format") != "sjhdr-ckpt-v1") throw ParseError("unsupported checkpoint");
    const auto w = nn::load_weights(c.dir / (c.stage + "_w"));
    for (auto& [name, var] : params.vars) var->value = w.at(name);

    std::size_t total = 0;
    for (const auto& [name, var] : params.vars) total += 2 * var->value.size();
    auto moments = io::read_f64(c.dir / (c.stage + "_adam.f64"), total, "adam state");
    std::map<std::string, nn::Adam::State> state;
    std::size_t off = 0;
    for (const auto& [name, var] : params.vars) {
      nn::Adam::State s;
      s.m = TensorD(var->value.shape());
      s.v = TensorD(var->value.shape());
      std::copy(moments.begin() + off, moments.begin() + off + var->value.size(),
                s.m.vec().begin());
      off += var->value.size();
      std::copy(moments.begin() + off, moments.begin() + off + var->value.size(),
                s.v.vec().begin());
      off += var->value.size();
      state.emplace(name, std::move(s));
    }
    st.adam.restore(std::move(state), j.at("adam_t").get<long>());
    st.rng.load_state(j.at("rng_state").get<std::string>());
    st.start_epoch = j.at("epoch_next").get<int>();
    st.global_step = j.at("global_step").get<int>();
    st.log.clear();
    for (const auto& e : j.at("log")) {
      TrainLogEntry le;
      le.step = e.at("step").get<int>();
      le.epoch = e.at("epoch").get<int>();
      le.lr = e.at("lr").get<double>();
      le.total = e.at("total").get<double>();
      le.recon = e.at("recon").get<double>();
      le.sobel = e.at("sobel").get<double>();
      le.wall_seconds = e.at("wall_seconds").get<double>();
      st.log.push_back(le);
    }
    return true;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + ckpt_json(c).string() + ": " + e.what());
  }
}

// One supervised item: the loss-builder returns the blended loss graph for
// item `index` using `rng` for its augmentation draws.
using ItemLoss = std::function<nn_loss::TotalLoss<float>(int index, Rng& rng)>;

TrainResult run_supervised_loop(const TrainConfig& cfg, nn::ParamMap<float>& params,
                                const std::string& arch_tag, std::uint64_t model_seed,
                                int n_items, const ItemLoss& item_loss,
                                const std::optional<CheckpointSink>& ckpt) {
  cfg.validate();
  if (n_items == 0) throw DataError("empty training set");
  LoopState st(cfg.seed);
  if (ckpt) try_resume(*ckpt, params, st);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<int> order(n_items);

  for (int epoch = st.start_epoch; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(cfg, epoch);
    // Rebuilt from scratch so the visit order is a pure function of the RNG
    // state (which checkpoints capture).
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, st.rng);
    for (int b = 0; b < n_items; b += cfg.batch_size) {
      const int n = std::min(cfg.batch_size, n_items - b);
      nn::Var total, recon, sobel;
      for (int i = 0; i < n; ++i) {
        auto l = item_loss(order[b + i], st.rng);
        total = total ? nn::add(total, l.total) : l.total;
        recon = recon ? nn::add(recon, l.recon) : l.recon;
        sobel = sobel ? nn::add(sobel, l.sobel) : l.sobel;
      }
      total = nn::scale(total, 1.0f / n);
      ++st.global_step;
      check_finite_loss(total->value[0], st.global_step);
      nn::backward(total);
      st.adam.step(params, lr);
      params.zero_grads();

      TrainLogEntry e;
      e.step = st.global_step;
      e.epoch = epoch;
      e.lr = lr;
      e.total = total->value[0];
      e.recon = recon->value[0] / n;
      e.sobel = sobel->value[0] / n;
      e.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      st.log.push_back(e);
    }
    if (ckpt && cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0)
      save_checkpoint(*ckpt, params, arch_tag, model_seed, st, epoch + 1);
  }
  if (ckpt) save_checkpoint(*ckpt, params, arch_tag, model_seed, st, cfg.epochs);

  TrainResult out;
  out.weights = nn::collect_params(params, arch_tag, model_seed);
  out.weights.check_finite();
  out.log = std::move(st.log);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// PreDNNet

TrainResult train_predn(const TrainConfig& cfg, const models::PreDnConfig& model_cfg,
                        const std::vector<const sim::DatasetSample*>& data,
                        const TmoOperator& tmo,
                        const std::optional<CheckpointSink>& ckpt) {
  const int div = 1 << (model_cfg.depth - 1);
  if (cfg.aug_crop && cfg.patch_size % div)
    throw ConfigError("patch size must be divisible by " + std::to_string(div));

  // Pairs from the static captures: [T(L_s^i), ISO], target T(clamp(gt*t_i)).
  struct Item {
    Tensor input;   // 4ch
    Tensor target;  // 3ch
  };
  std::vector<Item> items;
  for (const auto* s : data) {
    for (int i = 0; i < 3; ++i) {
      const LdrImage& frame = s->variant(static_cast<ReferenceChoice>(i)).frames[i];
      Item it;
      const Tensor ldr_tm = tmo.apply(gamma_expand(frame).pixels).pixels;
      it.input = concat_channels(
          ldr_tm, models::iso_plane(ldr_tm.dim(1), ldr_tm.dim(2), frame.iso));
      Tensor ideal(s->ground_truth.pixels.shape());
      for (std::size_t k = 0; k < ideal.size(); ++k) {
        const double v = static_cast<double>(s->ground_truth.pixels[k]) * s->ceiling *
                         s->exposure_times[i];
        ideal[k] = static_cast<float>(std::min(1.0, std::max(0.0, v)));
      }
      it.target = tmo.apply(ideal).pixels;
      items.push_back(std::move(it));
    }
  }

  auto weights = models::init_predn(model_cfg, cfg.seed);
  auto params = nn::make_params<float>(weights, true);
  auto item_loss = [&](int index, Rng& rng) {
    const Item& it = items[index];
    const auto draw = draw_augment(rng, cfg, it.input.dim(1), it.input.dim(2));
    auto in = nn::constant(apply_augment(it.input, draw));
    auto gt = nn::constant(apply_augment(it.target, draw));
    auto out = models::predn_forward(params, model_cfg, in, /*clamp_output=*/false);
    return nn_loss::total_loss(out, gt, cfg.lambda);
  };
  return run_supervised_loop(cfg, params, model_cfg.arch_tag(), cfg.seed,
                             static_cast<int>(items.size()), item_loss, ckpt);
}

// ---------------------------------------------------------------------------
// PCFNet

TrainResult train_pcf(const TrainConfig& cfg, const models::PcfConfig& model_cfg,
                      const std::vector<const sim::DatasetSample*>& data,
                      ReferenceChoice ref, const nn::ModelWeights& predn,
                      const TmoOperator& tmo,
                      const std::optional<CheckpointSink>& ckpt) {
  const int div = 1 << (model_cfg.levels - 1);
  if (cfg.aug_crop && cfg.patch_size % div)
    throw ConfigError("patch size must be divisible by " + std::to_string(div));

  struct Item {
    std::array<Tensor, 3> stacks;  // 6ch each, denoiser precomputed (frozen)
    Tensor target;                 // 3ch tone-mapped ground truth
  };
  std::vector<Item> items;
  for (const auto* s : data) {
    Item it;
    it.stacks = make_pcf_stacks(s->variant(ref), predn, tmo, s->ceiling);
    it.target = tonemap_gt(s->ground_truth, tmo);
    items.push_back(std::move(it));
  }

  auto weights = models::init_pcf(model_cfg, cfg.seed);
  auto params = nn::make_params<float>(weights, true);
  auto item_loss = [&](int index, Rng& rng) {
    const Item& it = items[index];
    const auto draw = draw_augment(rng, cfg, it.target.dim(1), it.target.dim(2));
    std::array<nn::Var, 3> stacks;
    for (int i = 0; i < 3; ++i)
      stacks[i] = nn::constant(apply_augment(it.stacks[i], draw));
    auto gt = nn::constant(apply_augment(it.target, draw));
    auto out = models::pcf_forward(params, model_cfg, stacks, ref,
                                   /*clamp_output=*/false);
    return nn_loss::total_loss(out, gt, cfg.lambda);
  };
  return run_supervised_loop(cfg, params, model_cfg.arch_tag(), cfg.seed,
                             static_cast<int>(items.size()), item_loss, ckpt);
}

// ---------------------------------------------------------------------------
// Path labels

SelectionMetric psnr_mu_metric(double mu) {
  return [mu](const Tensor& pred, const Tensor& gt) {
    return psnr(pred, gt, MetricDomain::kMu, mu);
  };
}

ReferenceChoice label_winner(const std::array<double, 3>& scores) {
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (scores[i] > scores[best]) best = i;
  return static_cast<ReferenceChoice>(best);
}

std::vector<PathLabel> label_paths(const nn::ModelWeights& predn,
                                   const std::array<nn::ModelWeights, 3>& paths,
                                   const std::vector<const sim::DatasetSample*>& eval_set,
                                   const TmoOperator& tmo, const SelectionMetric& metric) {
  std::vector<PathLabel> labels;
  for (const auto* s : eval_set) {
    PathLabel l;
    l.sample_id = s->id;
    for (int r = 0; r < 3; ++r) {
      const auto ref = static_cast<ReferenceChoice>(r);
      const auto stacks = make_pcf_stacks(s->variant(ref), predn, tmo, s->ceiling);
      const Tensor out_tm = models::pcf_forward(paths[r], stacks, ref);
      TonemappedImage tm;
      tm.pixels = out_tm;
      tm.operator_kind = tmo.kind;
      tm.mu = tmo.mu;
      const Tensor pred_linear = tmo.invert(tm);
      l.scores[r] = metric(pred_linear, s->ground_truth.pixels);
    }
    l.winner = label_winner(l.scores);
    labels.push_back(std::move(l));
  }
  return labels;
}

// ---------------------------------------------------------------------------
// RANet

RanetTrainResult train_ranet(const TrainConfig& cfg, const models::RanetConfig& model_cfg,
                             const std::vector<const sim::DatasetSample*>& train_set,
                             const std::vector<PathLabel>& train_labels,
                             const std::vector<const sim::DatasetSample*>& eval_set,
                             const std::vector<PathLabel>& eval_labels,
                             const TmoOperator& tmo) {
  cfg.validate();
  if (train_set.size() != train_labels.size() || eval_set.size() != eval_labels.size())
    throw DataError("label count does not match sample count");
  if (train_set.empty()) throw DataError("empty training set");

  struct Item {
    Tensor input;  // 9ch 224x224
    Tensor priors;
    int label;
  };
  auto build = [&](const std::vector<const sim::DatasetSample*>& set,
                   const std::vector<PathLabel>& labels) {
    std::vector<Item> items;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (labels[i].sample_id != set[i]->id)
        throw DataError("label/sample id mismatch: '" + labels[i].sample_id + "' vs '" +
                        set[i]->id + "'");
      Item it;
      it.input = make_ranet_input(advisor_bracket(*set[i]), tmo);
      it.priors = models::ranet_prior_vector(advisor_bracket(*set[i]).priors);
      it.label = static_cast<int>(labels[i].winner);
      items.push_back(std::move(it));
    }
    return items;
  };
  const auto train_items = build(train_set, train_labels);
  const auto eval_items = build(eval_set, eval_labels);

  bool degenerate = true;
  for (const auto& it : train_items)
    if (it.label != train_items[0].label) degenerate = false;

  auto weights = models::init_ranet(model_cfg, cfg.seed);
  auto params = nn::make_params<float>(weights, true);

  LoopState st(cfg.seed);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<int> order(train_items.size());
  nn::Adam& adam = st.adam;
  std::vector<TrainLogEntry> log;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(cfg, epoch);
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, st.rng);
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const int n = std::min<std::size_t>(cfg.batch_size, order.size() - b);
      nn::Var loss;
      for (int i = 0; i < n; ++i) {
        const Item& it = train_items[order[b + i]];
        auto logits = models::ranet_forward(params, model_cfg, nn::constant(it.input),
                                            nn::constant(it.priors));
        auto ce = nn::softmax_cross_entropy(logits, it.label);
        loss = loss ? nn::add(loss, ce) : ce;
      }
      loss = nn::scale(loss, 1.0f / n);
      ++st.global_step;
      check_finite_loss(loss->value[0], st.global_step);
      nn::backward(loss);
      adam.step(params, lr);
      params.zero_grads();

      TrainLogEntry e;
      e.step = st.global_step;
      e.epoch = epoch;
      e.lr = lr;
      e.total = loss->value[0];
      e.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      log.push_back(e);
    }
  }

  RanetTrainResult out;
  out.weights = nn::collect_params(params, model_cfg.arch_tag(), cfg.seed);
  out.weights.check_finite();
  out.degenerate = degenerate;
  out.log = std::move(log);
  int correct = 0;
  for (const auto& it : eval_items) {
    const Tensor logits =
        models::ranet_forward(params, model_cfg, nn::constant(it.input),
                              nn::constant(it.priors))
            ->value;
    if (static_cast<int>(models::ranet_choice(logits)) == it.label) ++correct;
  }
  out.held_out_accuracy =
      eval_items.empty() ? 0.0 : static_cast<double>(correct) / eval_items.size();
  return out;
}

}  // namespace sjhdr::train
