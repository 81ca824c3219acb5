#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>

#include "sjhdr/io.hpp"
#include "sjhdr/sim/dataset.hpp"
#include "sjhdr/tmo.hpp"

using namespace sjhdr;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = fs::temp_directory_path() / "sjhdr_cli_test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SJHDR_CLI_PATH) + " " + args + " >> " +
                          (kWork / "cli.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::uint64_t dir_fingerprint(const fs::path& dir) {
  std::uint64_t h = 0;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) h ^= io::fnv1a_file(f) * 0x9e3779b97f4a7c15ULL;
  return h;
}

}  // namespace

TEST_CASE("cli end-to-end surface") {
  fs::remove_all(kWork);
  fs::create_directories(kWork);
  const auto ds_dir = kWork / "ds";

  SUBCASE("gen-data honors counts and is seed-deterministic") {
    REQUIRE(run_cli("gen-data --out " + (ds_dir).string() +
                    " --seed 7 --count 5 --test-count 2 --size 32") == 0);
    const auto ds = sim::read_dataset(ds_dir);
    CHECK(ds.samples.size() == 7);
    CHECK(ds.train_ids.size() == 5);
    CHECK(ds.test_ids.size() == 2);

    REQUIRE(run_cli("gen-data --out " + (kWork / "ds_b").string() +
                    " --seed 7 --count 5 --test-count 2 --size 32") == 0);
    CHECK(dir_fingerprint(ds_dir) == dir_fingerprint(kWork / "ds_b"));

    REQUIRE(run_cli("gen-data --out " + (kWork / "ds_c").string() +
                    " --seed 8 --count 5 --test-count 2 --size 32") == 0);
    CHECK(dir_fingerprint(ds_dir) != dir_fingerprint(kWork / "ds_c"));
  }

  SUBCASE("default counts follow the dataset protocol (192+15)") {
    REQUIRE(run_cli("gen-data --out " + (kWork / "ds_default").string() +
                    " --seed 2 --size 32") == 0);
    const auto ds = sim::read_dataset(kWork / "ds_default");
    CHECK(ds.train_ids.size() == 192);
    CHECK(ds.test_ids.size() == 15);
  }

  SUBCASE("exit codes distinguish config and data errors") {
    CHECK(run_cli("train --dataset " + (kWork / "missing").string() + " --out " +
                  (kWork / "p").string()) == 3);
    CHECK(run_cli("gen-data --out " + (kWork / "x").string() +
                  " --occlusion-frac 3.0") == 2);
    CHECK(run_cli("bogus-subcommand") != 0);
  }

  SUBCASE("train, infer, eval, idempotent retrain") {
    REQUIRE(run_cli("gen-data --out " + ds_dir.string() +
                    " --seed 11 --count 4 --test-count 2 --size 32") == 0);
    const auto pipe_dir = kWork / "pipe";
    const std::string train_args =
        "train --dataset " + ds_dir.string() + " --out " + pipe_dir.string() +
        " --preset toy --seed 3 --predn-epochs 2 --pcf-epochs 2 --ranet-epochs 2";
    REQUIRE(run_cli(train_args) == 0);
    REQUIRE(fs::exists(pipe_dir / "pipeline.json"));
    REQUIRE(fs::exists(pipe_dir / "train_report.json"));

    // Weight containers are untouched by a resumed re-run (stages complete).
    std::map<std::string, std::uint64_t> before;
    for (const char* f : {"predn.f32", "ranet.f32", "pcf_under.f32", "pcf_medium.f32",
                          "pcf_over.f32"})
      before[f] = io::fnv1a_file(pipe_dir / f);
    REQUIRE(run_cli(train_args) == 0);
    for (const auto& [f, h] : before) CHECK(io::fnv1a_file(pipe_dir / f) == h);

    // Forced-reference inference records the choice and the logits, and the
    // emitted domains satisfy the inverse pair.
    const auto infer_dir = kWork / "out_under";
    REQUIRE(run_cli("infer --pipeline " + pipe_dir.string() + " --dataset " +
                    ds_dir.string() + " --ref under --out " + infer_dir.string()) == 0);
    const json manifest = json::parse(io::read_text(infer_dir / "manifest.json"));
    CHECK(manifest.at("chosen") == "under");
    CHECK(manifest.at("forced") == true);
    CHECK(manifest.at("logits").size() == 3);
    const auto shape = manifest.at("shape").get<std::vector<int>>();
    std::size_t n = 1;
    for (int d : shape) n *= d;
    const auto tm = io::read_f32(infer_dir / "hdr_tm.f32", n, "tm");
    const auto lin = io::read_f32(infer_dir / "hdr_linear.f32", n, "linear");
    const TmoOperator op{tmo_kind_from_string(manifest.at("tmo")), manifest.at("mu")};
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(op.forward(lin[i]) - tm[i]) <= 1e-6);
    CHECK(fs::exists(infer_dir / "preview.ppm"));

    // Auto selection runs the advisor.
    REQUIRE(run_cli("infer --pipeline " + pipe_dir.string() + " --dataset " +
                    ds_dir.string() + " --ref auto --out " +
                    (kWork / "out_auto").string()) == 0);
    const json m2 = json::parse(io::read_text(kWork / "out_auto" / "manifest.json"));
    CHECK(m2.at("forced") == false);

    // Eval emits the variant tables and per-image records consistent with
    // their means.
    const auto eval_json = kWork / "eval.json";
    REQUIRE(run_cli("eval --pipeline " + pipe_dir.string() + " --dataset " +
                    ds_dir.string() + " --split test --out " + eval_json.string()) == 0);
    const json ev = json::parse(io::read_text(eval_json));
    for (const char* variant : {"U_ref", "M_ref", "O_ref", "S_ref", "oracle"}) {
      REQUIRE(ev.contains(variant));
      const auto& rows = ev.at(variant).at("per_image");
      CHECK(rows.size() == 2);
      double acc = 0.0;
      for (const auto& r : rows) acc += r.at("psnr_mu").get<double>();
      CHECK(ev.at(variant).at("mean").at("psnr_mu").get<double>() ==
            doctest::Approx(acc / rows.size()).epsilon(1e-12));
    }
  }

  SUBCASE("config file values are overridden by flags") {
    io::write_text(kWork / "cfg.ini",
                   "[gen-data]\nout=\"" + (kWork / "cfg_ds").string() +
                       "\"\nseed=7\ncount=3\ntest-count=1\nsize=32\n");
    REQUIRE(run_cli("--config " + (kWork / "cfg.ini").string() +
                    " gen-data --count 2") == 0);
    const auto ds = sim::read_dataset(kWork / "cfg_ds");
    CHECK(ds.train_ids.size() == 2);  // flag beat the config file
    CHECK(ds.test_ids.size() == 1);
  }
}
