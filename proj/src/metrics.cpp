#include "sjhdr/metrics.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "sjhdr/tmo.hpp"

namespace sjhdr {
namespace {

// Map into the comparison domain (double precision, input clamped to [0,1]).
std::vector<double> to_domain(const Tensor& t, MetricDomain d, double mu) {
  std::vector<double> out(t.size());
  const double log1p_mu = std::log1p(mu);
  for (std::size_t i = 0; i < t.size(); ++i) {
    double v = std::min(1.0, std::max(0.0, static_cast<double>(t[i])));
    out[i] = d == MetricDomain::kMu ? std::log1p(mu * v) / log1p_mu : v;
  }
  return out;
}

struct Gaussian11 {
  double w[11];
  Gaussian11() {
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
      const double x = i - 5;
      w[i] = std::exp(-x * x / (2.0 * 1.5 * 1.5));
      sum += w[i];
    }
    for (double& v : w) v /= sum;
  }
};

// Separable valid-region Gaussian filter on one plane.
std::vector<double> gauss_filter(const std::vector<double>& img, int h, int w, int& vh,
                                 int& vw) {
  static const Gaussian11 g;
  vh = h - 10;
  vw = w - 10;
  std::vector<double> tmp(static_cast<std::size_t>(h) * vw);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < vw; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 11; ++k) acc += g.w[k] * img[y * w + x + k];
      tmp[y * vw + x] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(vh) * vw);
  for (int y = 0; y < vh; ++y)
    for (int x = 0; x < vw; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 11; ++k) acc += g.w[k] * tmp[(y + k) * vw + x];
      out[y * vw + x] = acc;
    }
  return out;
}

}  // namespace

double psnr(const Tensor& pred, const Tensor& gt, MetricDomain domain, double mu) {
  require_same_shape(pred, gt, "psnr");
  const auto a = to_domain(pred, domain, mu);
  const auto b = to_domain(gt, domain, mu);
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Tensor& pred, const Tensor& gt, MetricDomain domain, double mu) {
  require_same_shape(pred, gt, "ssim");
  if (pred.rank() != 3) throw ShapeError("ssim needs {C,H,W}");
  const int C = pred.dim(0), H = pred.dim(1), W = pred.dim(2);
  if (H < 11 || W < 11)
    throw ShapeError("ssim: image " + pred.shape_str() + " smaller than 11x11 window");
  constexpr double kC1 = 0.01 * 0.01;
  constexpr double kC2 = 0.03 * 0.03;
  const auto a = to_domain(pred, domain, mu);
  const auto b = to_domain(gt, domain, mu);
  const std::size_t plane = static_cast<std::size_t>(H) * W;
  double total = 0.0;
  for (int c = 0; c < C; ++c) {
    std::vector<double> x(a.begin() + c * plane, a.begin() + (c + 1) * plane);
    std::vector<double> y(b.begin() + c * plane, b.begin() + (c + 1) * plane);
    std::vector<double> xx(plane), yy(plane), xy(plane);
    for (std::size_t i = 0; i < plane; ++i) {
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    int vh = 0, vw = 0;
    const auto mx = gauss_filter(x, H, W, vh, vw);
    const auto my = gauss_filter(y, H, W, vh, vw);
    const auto mxx = gauss_filter(xx, H, W, vh, vw);
    const auto myy = gauss_filter(yy, H, W, vh, vw);
    const auto mxy = gauss_filter(xy, H, W, vh, vw);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = mxx[i] - mx[i] * mx[i];
      const double vy = myy[i] - my[i] * my[i];
      const double cov = mxy[i] - mx[i] * my[i];
      acc += ((2.0 * mx[i] * my[i] + kC1) * (2.0 * cov + kC2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + kC1) * (vx + vy + kC2));
    }
    total += acc / static_cast<double>(mx.size());
  }
  return total / C;
}

MetricRecord MetricReport::means() const {
  MetricRecord m;
  m.id = "mean";
  if (per_image.empty()) return m;
  for (const auto& r : per_image) {
    m.psnr_mu += r.psnr_mu;
    m.psnr_l += r.psnr_l;
    m.ssim_mu += r.ssim_mu;
    m.ssim_l += r.ssim_l;
  }
  const double n = static_cast<double>(per_image.size());
  m.psnr_mu /= n;
  m.psnr_l /= n;
  m.ssim_mu /= n;
  m.ssim_l /= n;
  return m;
}

void MetricReport::add(const std::string& id, const Tensor& pred_linear,
                       const Tensor& gt_linear, double mu) {
  MetricRecord r;
  r.id = id;
  r.psnr_mu = psnr(pred_linear, gt_linear, MetricDomain::kMu, mu);
  r.psnr_l = psnr(pred_linear, gt_linear, MetricDomain::kLinear, mu);
  r.ssim_mu = ssim(pred_linear, gt_linear, MetricDomain::kMu, mu);
  r.ssim_l = ssim(pred_linear, gt_linear, MetricDomain::kLinear, mu);
  per_image.push_back(r);
}

std::string MetricReport::to_table(const std::string& title) const {
  std::ostringstream os;
  os << title << "\n";
  os << "  image                 P-mu     P-L     S-mu     S-L\n";
  auto row = [&os](const MetricRecord& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-18s %7.2f %7.2f  %7.4f %7.4f\n", r.id.c_str(),
                  r.psnr_mu, r.psnr_l, r.ssim_mu, r.ssim_l);
    os << buf;
  };
  for (const auto& r : per_image) row(r);
  row(means());
  return os.str();
}

std::string MetricReport::to_json() const {
  nlohmann::json j;
  auto num = [](double v) {
    // JSON has no infinity literal; flag exact matches explicitly.
    return std::isinf(v) ? nlohmann::json("inf") : nlohmann::json(v);
  };
  auto rec = [&num](const MetricRecord& r) {
    nlohmann::json e;
    e["id"] = r.id;
    e["psnr_mu"] = num(r.psnr_mu);
    e["psnr_l"] = num(r.psnr_l);
    e["ssim_mu"] = num(r.ssim_mu);
    e["ssim_l"] = num(r.ssim_l);
    return e;
  };
  j["per_image"] = nlohmann::json::array();
  for (const auto& r : per_image) j["per_image"].push_back(rec(r));
  j["mean"] = rec(means());
  return j.dump(2);
}

}  // namespace sjhdr
