#include "sjhdr/train/ablation.hpp"

#include <ostream>
#include <sstream>

#include "sjhdr/compose.hpp"
#include "sjhdr/models/pcfnet.hpp"

namespace sjhdr::train {

std::vector<TmoAblationRow> tmo_ablation(const sim::Dataset& dataset,
                                         const models::PreDnConfig& predn_cfg,
                                         const models::PcfConfig& pcf_cfg,
                                         const TrainConfig& predn_train,
                                         const TrainConfig& pcf_train, double mu,
                                         std::ostream* progress) {
  const auto train_set = dataset.split(true);
  const auto test_set = dataset.split(false);
  if (train_set.empty() || test_set.empty())
    throw DataError("TMO ablation needs both train and test splits");

  const TmoKind kinds[] = {TmoKind::kLinear, TmoKind::kGamma22, TmoKind::kReinhard,
                           TmoKind::kHable, TmoKind::kMuLaw};
  std::vector<TmoAblationRow> rows;
  for (TmoKind kind : kinds) {
    const TmoOperator tmo{kind, mu};
    if (progress)
      (*progress) << "ablation: training with TMO '" << to_string(kind) << "'\n"
                  << std::flush;
    const auto predn = train_predn(predn_train, predn_cfg, train_set, tmo);
    const auto pcf = train_pcf(pcf_train, pcf_cfg, train_set, ReferenceChoice::kUnder,
                               predn.weights, tmo);

    MetricReport report;
    for (const auto* s : test_set) {
      const auto stacks = make_pcf_stacks(s->variant(ReferenceChoice::kUnder),
                                          predn.weights, tmo, s->ceiling);
      const Tensor out_tm =
          models::pcf_forward(pcf.weights, stacks, ReferenceChoice::kUnder);
      TonemappedImage tm;
      tm.pixels = out_tm;
      tm.operator_kind = kind;
      tm.mu = mu;
      const Tensor pred_linear = tmo.invert(tm);
      report.add(s->id, pred_linear, s->ground_truth.pixels, mu);
    }
    const auto m = report.means();
    rows.push_back({to_string(kind), m.psnr_mu, m.psnr_l, m.ssim_mu, m.ssim_l});
  }
  return rows;
}

std::string ablation_table(const std::vector<TmoAblationRow>& rows) {
  std::ostringstream os;
  os << "  TMO         P-mu     P-L     S-mu     S-L\n";
  for (const auto& r : rows) {
    char buf[120];
    std::snprintf(buf, sizeof(buf), "  %-9s %7.2f %7.2f  %7.4f %7.4f\n", r.tmo.c_str(),
                  r.psnr_mu, r.psnr_l, r.ssim_mu, r.ssim_l);
    os << buf;
  }
  return os.str();
}

}  // namespace sjhdr::train
