#pragma once

#include "sjhdr/nn/ops.hpp"
#include "sjhdr/tensor.hpp"

namespace sjhdr {

// Blended training loss: total = (1-lambda)*recon + lambda*sobel.
struct LossValue {
  double total = 0.0;
  double recon = 0.0;
  double sobel = 0.0;
  double lambda = 0.5;
};

namespace nn_loss {

// Mean absolute difference.
template <typename T>
nn::VarT<T> recon_loss(nn::VarT<T> pred, nn::VarT<T> gt) {
  require_same_shape(pred->value, gt->value, "recon_loss");
  return nn::mean_abs(nn::sub(pred, gt));
}

// Depthwise Sobel filter bank (unnormalized classical kernels), replicate
// padding. horizontal=true gives the x-direction kernel.
template <typename T>
TensorT<T> sobel_kernel(int channels, bool horizontal) {
  const T kx[9] = {-1, 0, 1, -2, 0, 2, -1, 0, 1};
  const T ky[9] = {-1, -2, -1, 0, 0, 0, 1, 2, 1};
  TensorT<T> w({channels, channels, 3, 3});
  for (int c = 0; c < channels; ++c) {
    T* dst = w.data() + ((static_cast<std::size_t>(c) * channels + c) * 9);
    for (int i = 0; i < 9; ++i) dst[i] = horizontal ? kx[i] : ky[i];
  }
  return w;
}

template <typename T>
nn::VarT<T> sobel_filter(nn::VarT<T> img, bool horizontal) {
  const auto& s = img->value.shape();
  if (s.size() != 3 || s[1] < 3 || s[2] < 3)
    throw ShapeError("sobel needs {C,H>=3,W>=3}, got " + img->value.shape_str());
  auto w = nn::constant(sobel_kernel<T>(s[0], horizontal));
  return nn::conv2d(img, w, nn::VarT<T>{},
                    {.stride = 1, .pad = 1, .dilation = 1,
                     .pad_mode = nn::PadMode::kReplicate});
}

template <typename T>
nn::VarT<T> sobel_loss(nn::VarT<T> pred, nn::VarT<T> gt) {
  require_same_shape(pred->value, gt->value, "sobel_loss");
  auto lx = nn::mean_abs(nn::sub(sobel_filter(pred, true), sobel_filter(gt, true)));
  auto ly = nn::mean_abs(nn::sub(sobel_filter(pred, false), sobel_filter(gt, false)));
  return nn::add(lx, ly);
}

template <typename T>
struct TotalLoss {
  nn::VarT<T> total, recon, sobel;
};

template <typename T>
TotalLoss<T> total_loss(nn::VarT<T> pred, nn::VarT<T> gt, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw ConfigError("lambda " + std::to_string(lambda) + " outside [0,1]");
  TotalLoss<T> out;
  out.recon = recon_loss(pred, gt);
  out.sobel = sobel_loss(pred, gt);
  out.total = nn::add(nn::scale(out.recon, static_cast<T>(1.0 - lambda)),
                      nn::scale(out.sobel, static_cast<T>(lambda)));
  return out;
}

}  // namespace nn_loss

// Plain-tensor entry points (single code path through the graph ops).
double recon_loss(const Tensor& pred, const Tensor& gt);
double sobel_loss(const Tensor& pred, const Tensor& gt);
LossValue total_loss(const Tensor& pred, const Tensor& gt, double lambda);

// Sobel response maps for oracle tests: (grad_x, grad_y).
std::pair<Tensor, Tensor> sobel_gradients(const Tensor& img);

}  // namespace sjhdr
