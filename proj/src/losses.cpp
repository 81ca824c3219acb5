#include "sjhdr/losses.hpp"

namespace sjhdr {

double recon_loss(const Tensor& pred, const Tensor& gt) {
  return nn_loss::recon_loss(nn::constant(pred), nn::constant(gt))->value[0];
}

double sobel_loss(const Tensor& pred, const Tensor& gt) {
  return nn_loss::sobel_loss(nn::constant(pred), nn::constant(gt))->value[0];
}

LossValue total_loss(const Tensor& pred, const Tensor& gt, double lambda) {
  LossValue v;
  v.lambda = lambda;
  if (lambda < 0.0 || lambda > 1.0)
    throw ConfigError("lambda " + std::to_string(lambda) + " outside [0,1]");
  v.recon = recon_loss(pred, gt);
  v.sobel = sobel_loss(pred, gt);
  v.total = (1.0 - lambda) * v.recon + lambda * v.sobel;
  return v;
}

std::pair<Tensor, Tensor> sobel_gradients(const Tensor& img) {
  auto gx = nn_loss::sobel_filter(nn::constant(img), true);
  auto gy = nn_loss::sobel_filter(nn::constant(img), false);
  return {gx->value, gy->value};
}

}  // namespace sjhdr
