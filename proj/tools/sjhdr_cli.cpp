#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>

#include "sjhdr/compose.hpp"
#include "sjhdr/io.hpp"
#include "sjhdr/pipeline.hpp"
#include "sjhdr/sim/generate.hpp"
#include "sjhdr/train/ablation.hpp"
#include "sjhdr/train/staged.hpp"

namespace {

using namespace sjhdr;
using nlohmann::json;
namespace fs = std::filesystem;

// Exit codes: 0 success, 2 configuration error, 3 data/container error,
// 4 training divergence, 1 anything else.
enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kDivergence = 4 };

ReferenceChoice parse_ref(const std::string& s) {
  if (s == "under") return ReferenceChoice::kUnder;
  if (s == "medium") return ReferenceChoice::kMedium;
  if (s == "over") return ReferenceChoice::kOver;
  throw ConfigError("unknown reference '" + s + "'");
}

struct GenArgs {
  std::string out;
  std::uint64_t seed = 0;
  int count = 192;
  int test_count = 15;
  int size = 128;
  double gamma = 2.2;
  double occlusion_fraction = 0.25;
};

int run_gen(const GenArgs& a) {
  sim::GenSpec spec;
  spec.seed = a.seed;
  spec.train_count = a.count;
  spec.test_count = a.test_count;
  spec.size = a.size;
  spec.gamma = a.gamma;
  spec.occlusion_fraction = a.occlusion_fraction;
  std::cout << "generating " << spec.train_count << "+" << spec.test_count
            << " samples at " << spec.size << "x" << spec.size << " (gamma "
            << spec.gamma << ")\n";
  const auto ds = sim::generate_dataset(spec);
  sim::write_dataset(ds, a.out);
  std::cout << "wrote dataset to " << a.out << "\n";
  return kOk;
}

struct TrainArgs {
  std::string dataset;
  std::string out;
  std::string preset = "toy";
  std::uint64_t seed = 0;
  std::string tmo = "mu_law";
  double mu = 5000.0;
  double lambda = 0.5;
  int predn_epochs = 0;  // 0 = preset default
  int pcf_epochs = 0;
  int ranet_epochs = 0;
  int checkpoint_every = 10;
};

int run_train(const TrainArgs& a) {
  const auto ds = sim::read_dataset(a.dataset);
  train::StagedConfig cfg = a.preset == "default"
                                ? train::StagedConfig::defaults(a.seed)
                                : train::StagedConfig::toy(a.seed);
  cfg.tmo = TmoOperator{tmo_kind_from_string(a.tmo), a.mu};
  cfg.predn_train.lambda = cfg.pcf_train.lambda = a.lambda;
  if (a.predn_epochs > 0) cfg.predn_train.epochs = a.predn_epochs;
  if (a.pcf_epochs > 0) cfg.pcf_train.epochs = a.pcf_epochs;
  if (a.ranet_epochs > 0) cfg.ranet_train.epochs = a.ranet_epochs;
  cfg.predn_train.checkpoint_every = a.checkpoint_every;
  cfg.pcf_train.checkpoint_every = a.checkpoint_every;

  const fs::path out(a.out);
  fs::create_directories(out);
  const auto result =
      train::train_staged(cfg, ds, out / "checkpoints", &std::cout);
  save_pipeline(result.pipeline, out);

  json labels = json::array();
  for (const auto& l : result.train_labels)
    labels.push_back({{"id", l.sample_id},
                      {"winner", static_cast<int>(l.winner)},
                      {"scores", l.scores}});
  json report;
  report["train_labels"] = labels;
  report["ranet_holdout_accuracy"] = result.ranet_holdout_accuracy;
  report["ranet_degenerate"] = result.ranet_degenerate;
  io::write_text(out / "train_report.json", report.dump(2) + "\n");

  auto dump_log = [&](const std::string& name,
                      const std::vector<train::TrainLogEntry>& log) {
    std::string text;
    for (const auto& e : log) {
      json j = {{"step", e.step},     {"epoch", e.epoch}, {"lr", e.lr},
                {"total", e.total},   {"recon", e.recon}, {"sobel", e.sobel},
                {"wall_seconds", e.wall_seconds}};
      text += j.dump() + "\n";
    }
    io::write_text(out / (name + "_log.jsonl"), text);
  };
  dump_log("predn", result.predn_log);
  for (auto r : kAllReferences)
    dump_log(std::string("pcf_") + to_string(r),
             result.pcf_logs[static_cast<int>(r)]);

  std::cout << "pipeline bundle written to " << a.out << "\n";
  return kOk;
}

struct InferArgs {
  std::string pipeline;
  std::string dataset;
  std::string sample;  // empty = first test sample
  std::string ref = "auto";
  std::string out = "infer_out";
};

int run_infer(const InferArgs& a) {
  const auto pipe = load_pipeline(a.pipeline, /*eager=*/false);
  const auto ds = sim::read_dataset(a.dataset);
  std::string id = a.sample;
  if (id.empty()) {
    if (ds.test_ids.empty()) throw DataError("dataset has no test samples");
    id = ds.test_ids.front();
  }
  const auto& sample = ds.by_id(id);

  std::optional<ReferenceChoice> override_ref;
  if (a.ref != "auto") override_ref = parse_ref(a.ref);
  // The advisor reads the conventional medium-variant capture; the fusion
  // runs on the variant matching the (chosen or forced) reference.
  const ReferenceChoice chosen =
      override_ref ? *override_ref
                   : select_reference(pipe, sample.variant(ReferenceChoice::kMedium));
  const auto result = run_sjhdr(pipe, sample.variant(chosen), chosen);

  const fs::path out(a.out);
  fs::create_directories(out);
  io::write_f32(out / "hdr_tm.f32", result.hdr_tm.pixels.data(),
                result.hdr_tm.pixels.size());
  io::write_f32(out / "hdr_linear.f32", result.hdr_linear.pixels.data(),
                result.hdr_linear.pixels.size());
  io::write_ppm(out / "preview.ppm", result.hdr_tm.pixels);

  // The advisor's logits are reported even when the path was forced.
  Tensor logits = result.ranet_logits;
  if (override_ref && !pipe.ranet.params.empty())
    logits = models::ranet_forward(
        pipe.ranet, make_ranet_input(sample.variant(ReferenceChoice::kMedium), pipe.tmo),
        sample.variant(ReferenceChoice::kMedium).priors);

  json manifest;
  manifest["sample"] = id;
  manifest["chosen"] = to_string(chosen);
  manifest["forced"] = override_ref.has_value();
  manifest["logits"] = logits.empty()
                           ? json::array()
                           : json(std::vector<float>(logits.vec()));
  manifest["shape"] = result.hdr_tm.pixels.shape();
  manifest["tmo"] = to_string(pipe.tmo.kind);
  manifest["mu"] = pipe.tmo.mu;
  manifest["ceiling"] = pipe.ceiling;
  manifest["seconds"] = result.seconds;
  io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "chose '" << to_string(chosen) << "' for " << id << "; outputs in "
            << a.out << "\n";
  return kOk;
}

struct EvalArgs {
  std::string pipeline;
  std::string dataset;
  std::string split = "test";
  std::string out;
  std::string metric = "psnr_mu";
};

int run_eval(const EvalArgs& a) {
  const auto pipe = load_pipeline(a.pipeline, /*eager=*/true);
  const auto ds = sim::read_dataset(a.dataset);
  std::vector<const sim::DatasetSample*> set;
  if (a.split == "all")
    for (const auto& s : ds.samples) set.push_back(&s);
  else
    set = ds.split(a.split == "train");
  if (set.empty()) throw DataError("empty evaluation split '" + a.split + "'");
  if (a.metric != "psnr_mu")
    throw ConfigError("unknown selection metric '" + a.metric + "'");

  const auto reports = evaluate(pipe, set);
  json out;
  for (const auto& [name, report] : reports) {
    std::cout << report.to_table(name) << "\n";
    out[name] = json::parse(report.to_json());
  }
  if (!a.out.empty()) {
    io::write_text(a.out, out.dump(2) + "\n");
    std::cout << "wrote per-image records to " << a.out << "\n";
  }
  return kOk;
}

struct AblateArgs {
  std::string dataset;
  std::string out;
  std::uint64_t seed = 0;
  double mu = 5000.0;
  double lambda = 0.5;
  int predn_epochs = 20;
  int pcf_epochs = 40;
};

int run_ablate(const AblateArgs& a) {
  const auto ds = sim::read_dataset(a.dataset);
  auto staged = train::StagedConfig::toy(a.seed);
  staged.predn_train.epochs = a.predn_epochs;
  staged.pcf_train.epochs = a.pcf_epochs;
  staged.predn_train.lambda = staged.pcf_train.lambda = a.lambda;
  const auto rows =
      train::tmo_ablation(ds, staged.predn_cfg, staged.pcf_cfg, staged.predn_train,
                          staged.pcf_train, a.mu, &std::cout);
  std::cout << train::ablation_table(rows);
  if (!a.out.empty()) {
    json j = json::array();
    for (const auto& r : rows)
      j.push_back({{"tmo", r.tmo},
                   {"psnr_mu", r.psnr_mu},
                   {"psnr_l", r.psnr_l},
                   {"ssim_mu", r.ssim_mu},
                   {"ssim_l", r.ssim_l}});
    io::write_text(a.out, j.dump(2) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective joint HDR fusion and denoising toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Key-value config file (sections per subcommand); flags win");

  GenArgs gen;
  auto* cg = app.add_subcommand("gen-data", "Generate a paired bracket dataset");
  cg->add_option("--out", gen.out, "Output dataset directory")->required();
  cg->add_option("--seed", gen.seed, "Generator seed");
  cg->add_option("--count", gen.count, "Training sample count");
  cg->add_option("--test-count", gen.test_count, "Test sample count");
  cg->add_option("--size", gen.size, "Square image size");
  cg->add_option("--gamma", gen.gamma, "2.2 = RGB mode, 1.0 = RAW mode");
  cg->add_option("--occlusion-frac", gen.occlusion_fraction,
                 "Fraction of occluded-highlight scenes");

  TrainArgs tr;
  auto* ct = app.add_subcommand("train", "Staged training into a pipeline bundle");
  ct->add_option("--dataset", tr.dataset, "Dataset directory")->required();
  ct->add_option("--out,--pipeline", tr.out, "Output pipeline bundle directory")
      ->required();
  ct->add_option("--preset", tr.preset, "toy or default")
      ->check(CLI::IsMember({"toy", "default"}));
  ct->add_option("--seed", tr.seed, "Training seed");
  ct->add_option("--tmo", tr.tmo, "Tone-mapping operator");
  ct->add_option("--mu", tr.mu, "mu-law compression parameter");
  ct->add_option("--lambda", tr.lambda, "Sobel blend weight");
  ct->add_option("--predn-epochs", tr.predn_epochs, "Override denoiser epochs");
  ct->add_option("--pcf-epochs", tr.pcf_epochs, "Override fusion epochs");
  ct->add_option("--ranet-epochs", tr.ranet_epochs, "Override advisor epochs");
  ct->add_option("--checkpoint-every", tr.checkpoint_every, "Checkpoint interval");

  InferArgs in;
  auto* ci = app.add_subcommand("infer", "Fuse one bracket from a dataset");
  ci->add_option("--pipeline", in.pipeline, "Pipeline bundle directory")->required();
  ci->add_option("--dataset", in.dataset, "Dataset directory")->required();
  ci->add_option("--sample", in.sample, "Sample id (default: first test sample)");
  ci->add_option("--ref", in.ref, "under|medium|over|auto")
      ->check(CLI::IsMember({"under", "medium", "over", "auto"}));
  ci->add_option("--out", in.out, "Output directory");

  EvalArgs ev;
  auto* ce = app.add_subcommand("eval", "Per-variant metric tables");
  ce->add_option("--pipeline", ev.pipeline, "Pipeline bundle directory")->required();
  ce->add_option("--dataset", ev.dataset, "Dataset directory")->required();
  ce->add_option("--split", ev.split, "test|train|all")
      ->check(CLI::IsMember({"test", "train", "all"}));
  ce->add_option("--out", ev.out, "Write per-image records (JSON)");
  ce->add_option("--metric", ev.metric, "Selection metric");

  AblateArgs ab;
  auto* ca = app.add_subcommand("ablate-tmo", "Equal-budget TMO comparison");
  ca->add_option("--dataset", ab.dataset, "Dataset directory")->required();
  ca->add_option("--out", ab.out, "Write the table (JSON)");
  ca->add_option("--seed", ab.seed, "Training seed");
  ca->add_option("--mu", ab.mu, "mu-law compression parameter");
  ca->add_option("--lambda", ab.lambda, "Sobel blend weight");
  ca->add_option("--predn-epochs", ab.predn_epochs, "Denoiser budget");
  ca->add_option("--pcf-epochs", ab.pcf_epochs, "Fusion budget");

  CLI11_PARSE(app, argc, argv);
  try {
    if (cg->parsed()) return run_gen(gen);
    if (ct->parsed()) return run_train(tr);
    if (ci->parsed()) return run_infer(in);
    if (ce->parsed()) return run_eval(ev);
    if (ca->parsed()) return run_ablate(ab);
    std::cerr << "no subcommand\n";
    return kConfig;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfig;
  } catch (const DivergenceError& e) {
    std::cerr << e.what() << "\n";
    return kDivergence;
  } catch (const DataError& e) {
    std::cerr << e.what() << "\n";
    return kData;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
}
