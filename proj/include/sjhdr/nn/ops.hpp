#pragma once

#include <Eigen/Core>

#include <cmath>
#include <vector>

#include "sjhdr/nn/graph.hpp"

namespace sjhdr::nn {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using CMatMap = Eigen::Map<const RowMat<T>>;

// ---------------------------------------------------------------------------
// GEMM wrappers (row-major).

template <typename T>
void matmul_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  CMatMap<T> A(a, m, k), B(b, k, n);
  MatMap<T> C(c, m, n);
  if (accumulate)
    C.noalias() += A * B;
  else
    C.noalias() = A * B;
}

// C[m,n] = A[m,k] * B[n,k]^T
template <typename T>
void matmul_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  CMatMap<T> A(a, m, k), B(b, n, k);
  MatMap<T> C(c, m, n);
  if (accumulate)
    C.noalias() += A * B.transpose();
  else
    C.noalias() = A * B.transpose();
}

// C[m,n] = A[k,m]^T * B[k,n]
template <typename T>
void matmul_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate) {
  CMatMap<T> A(a, k, m), B(b, k, n);
  MatMap<T> C(c, m, n);
  if (accumulate)
    C.noalias() += A.transpose() * B;
  else
    C.noalias() = A.transpose() * B;
}

// ---------------------------------------------------------------------------
// Elementwise / pointwise ops.

template <typename T>
VarT<T> add(VarT<T> a, VarT<T> b) {
  require_same_shape(a->value, b->value, "add");
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(a->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i)
    out->value[i] = a->value[i] + b->value[i];
  out->inputs = {a, b};
  out->requires_grad = a->requires_grad || b->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a, b]() {
    for (auto& in : {a, b}) {
      if (!in->requires_grad) continue;
      in->ensure_grad();
      for (std::size_t i = 0; i < o->grad.size(); ++i) in->grad[i] += o->grad[i];
    }
  };
  return out;
}

template <typename T>
VarT<T> sub(VarT<T> a, VarT<T> b) {
  require_same_shape(a->value, b->value, "sub");
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(a->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i)
    out->value[i] = a->value[i] - b->value[i];
  out->inputs = {a, b};
  out->requires_grad = a->requires_grad || b->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a, b]() {
    if (a->requires_grad) {
      a->ensure_grad();
      for (std::size_t i = 0; i < o->grad.size(); ++i) a->grad[i] += o->grad[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (std::size_t i = 0; i < o->grad.size(); ++i) b->grad[i] -= o->grad[i];
    }
  };
  return out;
}

template <typename T>
VarT<T> mul(VarT<T> a, VarT<T> b) {
  require_same_shape(a->value, b->value, "mul");
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(a->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i)
    out->value[i] = a->value[i] * b->value[i];
  out->inputs = {a, b};
  out->requires_grad = a->requires_grad || b->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a, b]() {
    if (a->requires_grad) {
      a->ensure_grad();
      for (std::size_t i = 0; i < o->grad.size(); ++i)
        a->grad[i] += o->grad[i] * b->value[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (std::size_t i = 0; i < o->grad.size(); ++i)
        b->grad[i] += o->grad[i] * a->value[i];
    }
  };
  return out;
}

template <typename T>
VarT<T> scale(VarT<T> a, T s) {
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(a->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] = a->value[i] * s;
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a, s]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    for (std::size_t i = 0; i < o->grad.size(); ++i) a->grad[i] += o->grad[i] * s;
  };
  return out;
}

template <typename T>
VarT<T> relu(VarT<T> a) {
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(a->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i)
    out->value[i] = a->value[i] > T(0) ? a->value[i] : T(0);
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    for (std::size_t i = 0; i < o->grad.size(); ++i)
      if (a->value[i] > T(0)) a->grad[i] += o->grad[i];
  };
  return out;
}

// max(x, slope*x) with 0 < slope < 1; keeps units trainable under the
// sign-gradient regime of l1 losses.
template <typename T>
VarT<T> leaky_relu(VarT<T> a, T slope = T(0.1)) {
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(a->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i)
    out->value[i] = a->value[i] > T(0) ? a->value[i] : slope * a->value[i];
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a, slope]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    for (std::size_t i = 0; i < o->grad.size(); ++i)
      a->grad[i] += a->value[i] > T(0) ? o->grad[i] : slope * o->grad[i];
  };
  return out;
}

template <typename T>
VarT<T> sigmoid(VarT<T> a) {
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(a->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i)
    out->value[i] = T(1) / (T(1) + std::exp(-a->value[i]));
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    for (std::size_t i = 0; i < o->grad.size(); ++i) {
      const T s = o->value[i];
      a->grad[i] += o->grad[i] * s * (T(1) - s);
    }
  };
  return out;
}

// Clamp to [0,1]; gradient passes on the closed interval.
template <typename T>
VarT<T> clamp01(VarT<T> a) {
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(a->value.shape());
  for (std::size_t i = 0; i < out->value.size(); ++i)
    out->value[i] = std::min(T(1), std::max(T(0), a->value[i]));
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    for (std::size_t i = 0; i < o->grad.size(); ++i)
      if (a->value[i] >= T(0) && a->value[i] <= T(1)) a->grad[i] += o->grad[i];
  };
  return out;
}

// ---------------------------------------------------------------------------
// Structural ops.

// Concatenate along dimension 0 ({C,H,W} channel concat, or rank-1 vectors).
template <typename T>
VarT<T> concat0(std::vector<VarT<T>> parts) {
  if (parts.empty()) throw ShapeError("concat0 of zero tensors");
  std::vector<int> shape = parts[0]->value.shape();
  int total = 0;
  for (const auto& p : parts) {
    const auto& s = p->value.shape();
    if (s.size() != shape.size() ||
        !std::equal(s.begin() + 1, s.end(), shape.begin() + 1))
      throw ShapeError("concat0 trailing-dim mismatch: " + p->value.shape_str() +
                       " vs " + parts[0]->value.shape_str());
    total += s[0];
  }
  shape[0] = total;
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>(shape);
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p->value.data(), p->value.data() + p->value.size(),
              out->value.data() + off);
    off += p->value.size();
  }
  out->inputs = parts;
  out->requires_grad = any_requires_grad(parts);
  Node<T>* o = out.get();
  out->backward_fn = [o, parts]() {
    std::size_t off = 0;
    for (const auto& p : parts) {
      if (p->requires_grad) {
        p->ensure_grad();
        for (std::size_t i = 0; i < p->grad.size(); ++i)
          p->grad[i] += o->grad[off + i];
      }
      off += p->value.size();
    }
  };
  return out;
}

// 2x2 average pooling; spatial dims must be even.
template <typename T>
VarT<T> avg_pool2(VarT<T> a) {
  const auto& s = a->value.shape();
  if (s.size() != 3 || s[1] % 2 || s[2] % 2)
    throw ShapeError("avg_pool2 needs {C,even,even}, got " + a->value.shape_str());
  const int C = s[0], H = s[1], W = s[2], Ho = H / 2, Wo = W / 2;
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>({C, Ho, Wo});
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < Ho; ++y)
      for (int x = 0; x < Wo; ++x)
        out->value.at(c, y, x) =
            (a->value.at(c, 2 * y, 2 * x) + a->value.at(c, 2 * y, 2 * x + 1) +
             a->value.at(c, 2 * y + 1, 2 * x) + a->value.at(c, 2 * y + 1, 2 * x + 1)) /
            T(4);
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a, C, Ho, Wo]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < Ho; ++y)
        for (int x = 0; x < Wo; ++x) {
          const T g = o->grad.at(c, y, x) / T(4);
          a->grad.at(c, 2 * y, 2 * x) += g;
          a->grad.at(c, 2 * y, 2 * x + 1) += g;
          a->grad.at(c, 2 * y + 1, 2 * x) += g;
          a->grad.at(c, 2 * y + 1, 2 * x + 1) += g;
        }
  };
  return out;
}

namespace detail {
// Sample positions for x2 bilinear upsampling (half-pixel centers).
inline void up2_taps(int out_size, int in_size, std::vector<int>& i0,
                     std::vector<int>& i1, std::vector<double>& f) {
  i0.resize(out_size);
  i1.resize(out_size);
  f.resize(out_size);
  for (int o = 0; o < out_size; ++o) {
    double src = (o + 0.5) / 2.0 - 0.5;
    double fl = std::floor(src);
    int a = static_cast<int>(fl);
    double frac = src - fl;
    i0[o] = std::min(std::max(a, 0), in_size - 1);
    i1[o] = std::min(std::max(a + 1, 0), in_size - 1);
    f[o] = frac;
  }
}
}  // namespace detail

// x2 bilinear upsampling.
template <typename T>
VarT<T> upsample2_bilinear(VarT<T> a) {
  const auto& s = a->value.shape();
  if (s.size() != 3) throw ShapeError("upsample2 needs {C,H,W}");
  const int C = s[0], H = s[1], W = s[2], Ho = 2 * H, Wo = 2 * W;
  std::vector<int> y0, y1, x0, x1;
  std::vector<double> fy, fx;
  detail::up2_taps(Ho, H, y0, y1, fy);
  detail::up2_taps(Wo, W, x0, x1, fx);
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>({C, Ho, Wo});
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < Ho; ++y)
      for (int x = 0; x < Wo; ++x) {
        const T wy = static_cast<T>(fy[y]), wx = static_cast<T>(fx[x]);
        out->value.at(c, y, x) =
            (T(1) - wy) * ((T(1) - wx) * a->value.at(c, y0[y], x0[x]) +
                           wx * a->value.at(c, y0[y], x1[x])) +
            wy * ((T(1) - wx) * a->value.at(c, y1[y], x0[x]) +
                  wx * a->value.at(c, y1[y], x1[x]));
      }
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a, C, Ho, Wo, y0, y1, x0, x1, fy, fx]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    for (int c = 0; c < C; ++c)
      for (int y = 0; y < Ho; ++y)
        for (int x = 0; x < Wo; ++x) {
          const T g = o->grad.at(c, y, x);
          const T wy = static_cast<T>(fy[y]), wx = static_cast<T>(fx[x]);
          a->grad.at(c, y0[y], x0[x]) += (T(1) - wy) * (T(1) - wx) * g;
          a->grad.at(c, y0[y], x1[x]) += (T(1) - wy) * wx * g;
          a->grad.at(c, y1[y], x0[x]) += wy * (T(1) - wx) * g;
          a->grad.at(c, y1[y], x1[x]) += wy * wx * g;
        }
  };
  return out;
}

// {C,H,W} -> {C}, mean over the spatial plane.
template <typename T>
VarT<T> global_avg_pool(VarT<T> a) {
  const auto& s = a->value.shape();
  if (s.size() != 3) throw ShapeError("global_avg_pool needs {C,H,W}");
  const int C = s[0];
  const std::size_t plane = static_cast<std::size_t>(s[1]) * s[2];
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>({C});
  for (int c = 0; c < C; ++c) {
    T acc = T(0);
    const T* p = a->value.data() + c * plane;
    for (std::size_t i = 0; i < plane; ++i) acc += p[i];
    out->value[c] = acc / static_cast<T>(plane);
  }
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a, C, plane]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    for (int c = 0; c < C; ++c) {
      const T g = o->grad[c] / static_cast<T>(plane);
      T* p = a->grad.data() + c * plane;
      for (std::size_t i = 0; i < plane; ++i) p[i] += g;
    }
  };
  return out;
}

// y = W x + b with x {N}, W {M,N}, b {M}.
template <typename T>
VarT<T> linear(VarT<T> x, VarT<T> w, VarT<T> b) {
  const auto& xs = x->value.shape();
  const auto& ws = w->value.shape();
  if (xs.size() != 1 || ws.size() != 2 || ws[1] != xs[0])
    throw ShapeError("linear: x " + x->value.shape_str() + " w " + w->value.shape_str());
  const int M = ws[0], N = ws[1];
  if (b && (b->value.rank() != 1 || b->value.dim(0) != M))
    throw ShapeError("linear: bias shape " + b->value.shape_str());
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>({M});
  for (int m = 0; m < M; ++m) {
    T acc = b ? b->value[m] : T(0);
    const T* row = w->value.data() + static_cast<std::size_t>(m) * N;
    for (int n = 0; n < N; ++n) acc += row[n] * x->value[n];
    out->value[m] = acc;
  }
  out->inputs = b ? std::vector<VarT<T>>{x, w, b} : std::vector<VarT<T>>{x, w};
  out->requires_grad = any_requires_grad(out->inputs);
  Node<T>* o = out.get();
  out->backward_fn = [o, x, w, b, M, N]() {
    if (x->requires_grad) {
      x->ensure_grad();
      for (int m = 0; m < M; ++m) {
        const T g = o->grad[m];
        const T* row = w->value.data() + static_cast<std::size_t>(m) * N;
        for (int n = 0; n < N; ++n) x->grad[n] += g * row[n];
      }
    }
    if (w->requires_grad) {
      w->ensure_grad();
      for (int m = 0; m < M; ++m) {
        const T g = o->grad[m];
        T* row = w->grad.data() + static_cast<std::size_t>(m) * N;
        for (int n = 0; n < N; ++n) row[n] += g * x->value[n];
      }
    }
    if (b && b->requires_grad) {
      b->ensure_grad();
      for (int m = 0; m < M; ++m) b->grad[m] += o->grad[m];
    }
  };
  return out;
}

// ---------------------------------------------------------------------------
// Convolution.

enum class PadMode { kZero, kReplicate };

struct Conv2dOpts {
  int stride = 1;
  int pad = 0;
  int dilation = 1;
  PadMode pad_mode = PadMode::kZero;
};

namespace detail {

// col is {Cin*Kh*Kw, Ho*Wo}. Out-of-range samples read 0 (zero pad) or the
// clamped border pixel (replicate pad).
template <typename T>
void im2col(const TensorT<T>& x, int kh, int kw, const Conv2dOpts& o, int ho, int wo,
            std::vector<T>& col) {
  const int C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const std::size_t npix = static_cast<std::size_t>(ho) * wo;
  col.assign(static_cast<std::size_t>(C) * kh * kw * npix, T(0));
  std::size_t row = 0;
  for (int c = 0; c < C; ++c)
    for (int ky = 0; ky < kh; ++ky)
      for (int kx = 0; kx < kw; ++kx, ++row) {
        T* dst = col.data() + row * npix;
        for (int oy = 0; oy < ho; ++oy) {
          int iy = oy * o.stride - o.pad + ky * o.dilation;
          if (o.pad_mode == PadMode::kReplicate) iy = std::min(std::max(iy, 0), H - 1);
          const bool yok = iy >= 0 && iy < H;
          for (int ox = 0; ox < wo; ++ox) {
            int ix = ox * o.stride - o.pad + kx * o.dilation;
            if (o.pad_mode == PadMode::kReplicate) ix = std::min(std::max(ix, 0), W - 1);
            dst[oy * wo + ox] =
                (yok && ix >= 0 && ix < W) ? x.at(c, iy, ix) : T(0);
          }
        }
      }
}

template <typename T>
void col2im_add(const std::vector<T>& dcol, int kh, int kw, const Conv2dOpts& o, int ho,
                int wo, TensorT<T>& dx) {
  const int C = dx.dim(0), H = dx.dim(1), W = dx.dim(2);
  const std::size_t npix = static_cast<std::size_t>(ho) * wo;
  std::size_t row = 0;
  for (int c = 0; c < C; ++c)
    for (int ky = 0; ky < kh; ++ky)
      for (int kx = 0; kx < kw; ++kx, ++row) {
        const T* src = dcol.data() + row * npix;
        for (int oy = 0; oy < ho; ++oy) {
          int iy = oy * o.stride - o.pad + ky * o.dilation;
          if (o.pad_mode == PadMode::kReplicate) iy = std::min(std::max(iy, 0), H - 1);
          if (iy < 0 || iy >= H) continue;
          for (int ox = 0; ox < wo; ++ox) {
            int ix = ox * o.stride - o.pad + kx * o.dilation;
            if (o.pad_mode == PadMode::kReplicate) ix = std::min(std::max(ix, 0), W - 1);
            if (ix < 0 || ix >= W) continue;
            dx.at(c, iy, ix) += src[oy * wo + ox];
          }
        }
      }
}

}  // namespace detail

// x {Cin,H,W}, w {Cout,Cin,Kh,Kw}, optional b {Cout}.
template <typename T>
VarT<T> conv2d(VarT<T> x, VarT<T> w, VarT<T> b, Conv2dOpts o = {}) {
  const auto& xs = x->value.shape();
  const auto& ws = w->value.shape();
  if (xs.size() != 3 || ws.size() != 4)
    throw ShapeError("conv2d: x " + x->value.shape_str() + " w " + w->value.shape_str());
  if (ws[1] != xs[0])
    throw ShapeError("conv2d channel mismatch: input has " + std::to_string(xs[0]) +
                     ", weight expects " + std::to_string(ws[1]));
  const int Cout = ws[0], Cin = ws[1], Kh = ws[2], Kw = ws[3];
  const int H = xs[1], W = xs[2];
  const int Ho = (H + 2 * o.pad - o.dilation * (Kh - 1) - 1) / o.stride + 1;
  const int Wo = (W + 2 * o.pad - o.dilation * (Kw - 1) - 1) / o.stride + 1;
  if (Ho <= 0 || Wo <= 0)
    throw ShapeError("conv2d: kernel larger than padded input");
  if (b && (b->value.rank() != 1 || b->value.dim(0) != Cout))
    throw ShapeError("conv2d bias shape " + b->value.shape_str());

  const int K = Cin * Kh * Kw;
  const std::size_t npix = static_cast<std::size_t>(Ho) * Wo;
  std::vector<T> col;
  detail::im2col(x->value, Kh, Kw, o, Ho, Wo, col);

  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>({Cout, Ho, Wo});
  matmul_nn(w->value.data(), col.data(), out->value.data(), Cout, K,
            static_cast<int>(npix), false);
  if (b) {
    for (int c = 0; c < Cout; ++c) {
      T* p = out->value.data() + c * npix;
      const T bv = b->value[c];
      for (std::size_t i = 0; i < npix; ++i) p[i] += bv;
    }
  }
  out->inputs = b ? std::vector<VarT<T>>{x, w, b} : std::vector<VarT<T>>{x, w};
  out->requires_grad = any_requires_grad(out->inputs);
  Node<T>* op = out.get();
  out->backward_fn = [op, x, w, b, o, Cout, K, Kh, Kw, Ho, Wo, npix]() {
    // col is rebuilt here rather than kept alive on the tape.
    if (w->requires_grad) {
      std::vector<T> col;
      detail::im2col(x->value, Kh, Kw, o, Ho, Wo, col);
      w->ensure_grad();
      matmul_nt(op->grad.data(), col.data(), w->grad.data(), Cout,
                static_cast<int>(npix), K, true);
    }
    if (x->requires_grad) {
      // dcol {K, npix} = W^T {K, Cout} * dOut {Cout, npix}
      std::vector<T> dcol(static_cast<std::size_t>(K) * npix);
      matmul_tn(w->value.data(), op->grad.data(), dcol.data(), K, Cout,
                static_cast<int>(npix), false);
      x->ensure_grad();
      detail::col2im_add(dcol, Kh, Kw, o, Ho, Wo, x->grad);
    }
    if (b && b->requires_grad) {
      b->ensure_grad();
      for (int c = 0; c < Cout; ++c) {
        T acc = T(0);
        const T* p = op->grad.data() + c * npix;
        for (std::size_t i = 0; i < npix; ++i) acc += p[i];
        b->grad[c] += acc;
      }
    }
  };
  return out;
}

// ---------------------------------------------------------------------------
// Reductions / losses.

template <typename T>
VarT<T> mean_abs(VarT<T> a) {
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>({1});
  T acc = T(0);
  for (std::size_t i = 0; i < a->value.size(); ++i) acc += std::abs(a->value[i]);
  out->value[0] = acc / static_cast<T>(a->value.size());
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    const T g = o->grad[0] / static_cast<T>(a->value.size());
    for (std::size_t i = 0; i < a->value.size(); ++i) {
      if (a->value[i] > T(0))
        a->grad[i] += g;
      else if (a->value[i] < T(0))
        a->grad[i] -= g;
    }
  };
  return out;
}

template <typename T>
VarT<T> mean_sq(VarT<T> a) {
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>({1});
  T acc = T(0);
  for (std::size_t i = 0; i < a->value.size(); ++i) acc += a->value[i] * a->value[i];
  out->value[0] = acc / static_cast<T>(a->value.size());
  out->inputs = {a};
  out->requires_grad = a->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, a]() {
    if (!a->requires_grad) return;
    a->ensure_grad();
    const T g = T(2) * o->grad[0] / static_cast<T>(a->value.size());
    for (std::size_t i = 0; i < a->value.size(); ++i) a->grad[i] += g * a->value[i];
  };
  return out;
}

// Numerically stable cross-entropy of logits {K} against an integer label.
template <typename T>
VarT<T> softmax_cross_entropy(VarT<T> logits, int label) {
  const int K = logits->value.dim(0);
  if (label < 0 || label >= K) throw ConfigError("cross-entropy label out of range");
  T mx = logits->value[0];
  for (int i = 1; i < K; ++i) mx = std::max(mx, logits->value[i]);
  T lse = T(0);
  for (int i = 0; i < K; ++i) lse += std::exp(logits->value[i] - mx);
  lse = mx + std::log(lse);
  auto out = std::make_shared<Node<T>>();
  out->value = TensorT<T>({1});
  out->value[0] = lse - logits->value[label];
  out->inputs = {logits};
  out->requires_grad = logits->requires_grad;
  Node<T>* o = out.get();
  out->backward_fn = [o, logits, label, K, mx, lse]() {
    if (!logits->requires_grad) return;
    logits->ensure_grad();
    const T g = o->grad[0];
    for (int i = 0; i < K; ++i) {
      T p = std::exp(logits->value[i] - lse);
      logits->grad[i] += g * (p - (i == label ? T(1) : T(0)));
    }
  };
  return out;
}

}  // namespace sjhdr::nn
