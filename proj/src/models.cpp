#include <sstream>

#include "sjhdr/models/pcfnet.hpp"
#include "sjhdr/models/prednnet.hpp"
#include "sjhdr/models/ranet.hpp"

namespace sjhdr::models {
namespace {

std::string join_widths(const std::vector<int>& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "-" : "") << w[i];
  return os.str();
}

std::vector<int> parse_widths(const std::string& s) {
  std::vector<int> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, '-')) out.push_back(std::stoi(tok));
  return out;
}

// Splits "name:k1v:k2v" into fields.
std::vector<std::string> split_tag(const std::string& tag) {
  std::vector<std::string> out;
  std::istringstream is(tag);
  std::string tok;
  while (std::getline(is, tok, ':')) out.push_back(tok);
  return out;
}

[[noreturn]] void bad_tag(const std::string& tag) {
  throw ParseError("unrecognized architecture tag '" + tag + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// DRDB

void init_drdb(nn::ModelWeights& w, Rng& rng, const std::string& prefix,
               const DrdbConfig& cfg) {
  for (int j = 0; j < cfg.layers; ++j) {
    const std::string name = prefix + ".d" + std::to_string(j);
    w.params.emplace(name + ".w",
                     nn::he_conv(rng, cfg.growth, cfg.channels + j * cfg.growth, 3, 3));
    w.params.emplace(name + ".b", nn::zeros_bias(cfg.growth));
  }
  w.params.emplace(prefix + ".fuse.w",
                   nn::he_conv(rng, cfg.channels, cfg.channels + cfg.layers * cfg.growth, 1, 1));
  w.params.emplace(prefix + ".fuse.b", nn::zeros_bias(cfg.channels));
}

// ---------------------------------------------------------------------------
// PCFNet

std::string PcfConfig::arch_tag() const {
  return "pcf:L" + std::to_string(levels) + ":w" + join_widths(widths) + ":g" +
         std::to_string(drdb_growth);
}

PcfConfig PcfConfig::from_tag(const std::string& tag) {
  auto f = split_tag(tag);
  if (f.size() != 4 || f[0] != "pcf" || f[1].empty() || f[1][0] != 'L' ||
      f[2].empty() || f[2][0] != 'w' || f[3].empty() || f[3][0] != 'g')
    bad_tag(tag);
  PcfConfig cfg;
  cfg.levels = std::stoi(f[1].substr(1));
  cfg.widths = parse_widths(f[2].substr(1));
  cfg.drdb_growth = std::stoi(f[3].substr(1));
  if (static_cast<int>(cfg.widths.size()) != cfg.levels) bad_tag(tag);
  return cfg;
}

nn::ModelWeights init_pcf(const PcfConfig& cfg, std::uint64_t seed) {
  if (static_cast<int>(cfg.widths.size()) != cfg.levels)
    throw ConfigError("pcf widths must list one width per level");
  nn::ModelWeights w;
  w.arch_tag = cfg.arch_tag();
  w.seed = seed;
  Rng rng(seed);
  for (int k = 0; k < cfg.levels; ++k) {
    const std::string ks = std::to_string(k);
    const int cin = k == 0 ? cfg.frame_channels : cfg.frame_channels + cfg.widths[k - 1];
    w.params.emplace("enc" + ks + ".w", nn::he_conv(rng, cfg.widths[k], cin, 3, 3));
    w.params.emplace("enc" + ks + ".b", nn::zeros_bias(cfg.widths[k]));
    w.params.emplace("msa" + ks + ".w", nn::he_conv(rng, cfg.widths[k], 2 * cfg.widths[k], 3, 3));
    w.params.emplace("msa" + ks + ".b", nn::zeros_bias(cfg.widths[k]));
    w.params.emplace("merge" + ks + ".w", nn::he_conv(rng, cfg.widths[k], 3 * cfg.widths[k], 3, 3));
    w.params.emplace("merge" + ks + ".b", nn::zeros_bias(cfg.widths[k]));
    init_drdb(w, rng, "drdb" + ks, cfg.drdb_at(k));
  }
  for (int k = 0; k + 1 < cfg.levels; ++k) {
    const std::string ks = std::to_string(k);
    w.params.emplace("up" + ks + ".w", nn::he_conv(rng, cfg.widths[k], cfg.widths[k + 1], 3, 3));
    w.params.emplace("up" + ks + ".b", nn::zeros_bias(cfg.widths[k]));
  }
  w.params.emplace("rec.w", nn::he_conv(rng, cfg.widths[0], cfg.widths[0], 3, 3));
  w.params.emplace("rec.b", nn::zeros_bias(cfg.widths[0]));
  w.params.emplace("head.w", nn::he_conv(rng, 3, cfg.widths[0], 3, 3));
  // Mid-range head bias keeps every output pixel inside the clamp at init.
  w.params.emplace("head.b", nn::const_bias(3, 0.5f));
  return w;
}

Tensor pcf_forward(const nn::ModelWeights& w, const std::array<Tensor, 3>& stacks,
                   ReferenceChoice ref) {
  const PcfConfig cfg = PcfConfig::from_tag(w.arch_tag);
  auto p = nn::make_params<float>(w, false);
  std::array<nn::VarT<float>, 3> vars;
  for (int i = 0; i < 3; ++i) vars[i] = nn::constant(stacks[i]);
  return pcf_forward(p, cfg, vars, ref)->value;
}

// ---------------------------------------------------------------------------
// PreDNNet

std::string PreDnConfig::arch_tag() const {
  return "predn:d" + std::to_string(depth) + ":w" + join_widths(widths);
}

PreDnConfig PreDnConfig::from_tag(const std::string& tag) {
  auto f = split_tag(tag);
  if (f.size() != 3 || f[0] != "predn" || f[1].empty() || f[1][0] != 'd' ||
      f[2].empty() || f[2][0] != 'w')
    bad_tag(tag);
  PreDnConfig cfg;
  cfg.depth = std::stoi(f[1].substr(1));
  cfg.widths = parse_widths(f[2].substr(1));
  if (static_cast<int>(cfg.widths.size()) != cfg.depth) bad_tag(tag);
  return cfg;
}

nn::ModelWeights init_predn(const PreDnConfig& cfg, std::uint64_t seed) {
  if (static_cast<int>(cfg.widths.size()) != cfg.depth)
    throw ConfigError("predn widths must list one width per scale");
  nn::ModelWeights w;
  w.arch_tag = cfg.arch_tag();
  w.seed = seed;
  Rng rng(seed);
  for (int k = 0; k < cfg.depth; ++k) {
    const std::string ks = std::to_string(k);
    const int cin = k == 0 ? cfg.in_channels : cfg.widths[k - 1];
    w.params.emplace("enc" + ks + ".w", nn::he_conv(rng, cfg.widths[k], cin, 3, 3));
    w.params.emplace("enc" + ks + ".b", nn::zeros_bias(cfg.widths[k]));
  }
  const int deepest = cfg.widths[cfg.depth - 1];
  w.params.emplace("mid.w", nn::he_conv(rng, deepest, deepest, 3, 3));
  w.params.emplace("mid.b", nn::zeros_bias(deepest));
  for (int k = cfg.depth - 1; k >= 1; --k) {
    const std::string ks = std::to_string(k);
    w.params.emplace("up" + ks + ".w", nn::he_conv(rng, cfg.widths[k - 1], cfg.widths[k], 3, 3));
    w.params.emplace("up" + ks + ".b", nn::zeros_bias(cfg.widths[k - 1]));
    w.params.emplace("dec" + ks + ".w",
                     nn::he_conv(rng, cfg.widths[k - 1], 2 * cfg.widths[k - 1], 3, 3));
    w.params.emplace("dec" + ks + ".b", nn::zeros_bias(cfg.widths[k - 1]));
  }
  w.params.emplace("head.w", nn::he_conv(rng, 3, cfg.widths[0], 3, 3));
  w.params.emplace("head.b", nn::const_bias(3, 0.5f));
  return w;
}

Tensor iso_plane(int h, int w, double iso) {
  return Tensor::full({1, h, w}, static_cast<float>(iso / 3200.0));
}

TonemappedImage predn_forward(const nn::ModelWeights& w, const TonemappedImage& ldr_tm,
                              const Tensor& iso) {
  const PreDnConfig cfg = PreDnConfig::from_tag(w.arch_tag);
  if (iso.rank() != 3 || iso.dim(0) != 1 || iso.dim(1) != ldr_tm.pixels.dim(1) ||
      iso.dim(2) != ldr_tm.pixels.dim(2))
    throw ShapeError("iso plane " + iso.shape_str() + " does not match image " +
                     ldr_tm.pixels.shape_str());
  auto p = nn::make_params<float>(w, false);
  auto in = nn::concat0<float>({nn::constant(ldr_tm.pixels), nn::constant(iso)});
  TonemappedImage out;
  out.operator_kind = ldr_tm.operator_kind;
  out.mu = ldr_tm.mu;
  out.pixels = predn_forward(p, cfg, in)->value;
  return out;
}

// ---------------------------------------------------------------------------
// RANet

std::string RanetConfig::arch_tag() const {
  return "ranet:w" + join_widths(widths) + ":fc" + std::to_string(fc);
}

RanetConfig RanetConfig::from_tag(const std::string& tag) {
  auto f = split_tag(tag);
  if (f.size() != 3 || f[0] != "ranet" || f[1].empty() || f[1][0] != 'w' ||
      f[2].size() < 3 || f[2].substr(0, 2) != "fc")
    bad_tag(tag);
  RanetConfig cfg;
  cfg.widths = parse_widths(f[1].substr(1));
  cfg.fc = std::stoi(f[2].substr(2));
  return cfg;
}

nn::ModelWeights init_ranet(const RanetConfig& cfg, std::uint64_t seed) {
  nn::ModelWeights w;
  w.arch_tag = cfg.arch_tag();
  w.seed = seed;
  Rng rng(seed);
  int cin = cfg.in_channels;
  for (std::size_t k = 0; k < cfg.widths.size(); ++k) {
    const std::string ks = std::to_string(k);
    w.params.emplace("stage" + ks + ".w", nn::he_conv(rng, cfg.widths[k], cin, 3, 3));
    w.params.emplace("stage" + ks + ".b", nn::zeros_bias(cfg.widths[k]));
    cin = cfg.widths[k];
  }
  w.params.emplace("fc1.w", nn::he_linear(rng, cfg.fc, cin + RanetConfig::kPriorCount));
  w.params.emplace("fc1.b", nn::zeros_bias(cfg.fc));
  w.params.emplace("fc2.w", nn::he_linear(rng, 3, cfg.fc));
  w.params.emplace("fc2.b", nn::zeros_bias(3));
  return w;
}

Tensor ranet_prior_vector(const ScenePriors& priors) {
  Tensor t({RanetConfig::kPriorCount});
  t[0] = static_cast<float>(priors.brightness / 10.0);
  t[1] = static_cast<float>(priors.iso / 3200.0);
  for (int i = 0; i < 3; ++i) t[2 + i] = static_cast<float>(priors.ev_steps[i] / 10.0);
  return t;
}

Tensor ranet_forward(const nn::ModelWeights& w, const Tensor& low_res_stack,
                     const ScenePriors& priors) {
  const RanetConfig cfg = RanetConfig::from_tag(w.arch_tag);
  auto p = nn::make_params<float>(w, false);
  return ranet_forward(p, cfg, nn::constant(low_res_stack),
                       nn::constant(ranet_prior_vector(priors)))
      ->value;
}

ReferenceChoice ranet_choice(const Tensor& logits) {
  if (logits.rank() != 1 || logits.dim(0) != 3)
    throw ShapeError("expected 3 logits, got " + logits.shape_str());
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (logits[i] > logits[best]) best = i;
  return static_cast<ReferenceChoice>(best);
}

}  // namespace sjhdr::models
