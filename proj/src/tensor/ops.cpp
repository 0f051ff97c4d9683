// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/ops.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace strokenet {

namespace {

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
  T lanes[8] = {};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (std::size_t j = 0; j < 8; ++j) lanes[j] += a[i + j] * b[i + j];
  }
  T tail = T(0);
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) +
         ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7])) + tail;
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void require_rank(const Shape& shape, std::size_t rank, const char* op, const char* what) {
  if (shape.size() != rank) {
    throw std::invalid_argument(std::string(op) + ": " + what + " must have rank " +
                                std::to_string(rank) + ", got " + shape_string(shape));
  }
}

void require_same_shape(const Shape& a, const Shape& b, const char* op) {
  if (a != b) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " +
                                shape_string(b));
  }
}

struct ConvGeometry {
  std::size_t n, ci, t, h, w;
  std::size_t co, kt, kh, kw;
  std::size_t pt, ph, pw;
  std::size_t to, ho, wo;
  std::size_t in_plane() const { return t * h * w; }
  std::size_t out_plane() const { return to * ho * wo; }
  std::size_t kvol() const { return kt * kh * kw; }
};

// Output columns computed per inner tile; fixed so the tile loops vectorize.
constexpr std::size_t kTile = 16;

// A stack of zero-padded planes. Rows are read a full tile past their end, so
// the buffer carries zeroed slack behind the last plane.
template <typename T>
struct PaddedPlanes {
  std::size_t t, h, w;
  std::vector<T> data;
  std::size_t plane() const { return t * h * w; }
  const T* at(std::size_t i) const { return data.data() + i * plane(); }
};

template <typename T>
PaddedPlanes<T> pad_planes(const T* src, std::size_t count, std::size_t t, std::size_t h, std::size_t w,
                           std::size_t pt, std::size_t ph, std::size_t pw) {
  PaddedPlanes<T> out{t + 2 * pt, h + 2 * ph, w + 2 * pw, {}};
  out.data.assign(count * out.plane() + out.w + 2 * kTile, T(0));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t a = 0; a < t; ++a) {
      for (std::size_t b = 0; b < h; ++b) {
        const T* row = src + ((i * t + a) * h + b) * w;
        std::copy(row, row + w, out.data.data() + i * out.plane() + ((a + pt) * out.h + b + ph) * out.w + pw);
      }
    }
  }
  return out;
}

// dst[c] += valid cross-correlation of `src` with kernel[c] for CB channels,
// over a to×ho×wo output grid. Per element the taps are added in kernel order.
template <typename T, std::size_t CB>
void correlate_block(const PaddedPlanes<T>& pad, const T* src, const T* const* kernel, T* const* dst,
                     std::size_t to, std::size_t ho, std::size_t wo, std::size_t kt, std::size_t kh,
                     std::size_t kw) {
  for (std::size_t a = 0; a < to; ++a) {
    for (std::size_t b = 0; b < ho; ++b) {
      const std::size_t row = (a * ho + b) * wo;
      for (std::size_t x0 = 0; x0 < wo; x0 += kTile) {
        const std::size_t width = std::min(kTile, wo - x0);
        T acc[CB][kTile];
        for (std::size_t c = 0; c < CB; ++c) {
          for (std::size_t x = 0; x < kTile; ++x) acc[c][x] = x < width ? dst[c][row + x0 + x] : T(0);
        }
        std::size_t tap = 0;
        for (std::size_t i = 0; i < kt; ++i) {
          for (std::size_t j = 0; j < kh; ++j) {
            const T* s = src + ((a + i) * pad.h + b + j) * pad.w + x0;
            for (std::size_t k = 0; k < kw; ++k, ++tap) {
              for (std::size_t c = 0; c < CB; ++c) {
                const T wv = kernel[c][tap];
#pragma omp simd
                for (std::size_t x = 0; x < kTile; ++x) acc[c][x] += wv * s[k + x];
              }
            }
          }
        }
        for (std::size_t c = 0; c < CB; ++c) {
          for (std::size_t x = 0; x < width; ++x) dst[c][row + x0 + x] = acc[c][x];
        }
      }
    }
  }
}

// out[n][o] += sum_i correlate(src[n][i], kernel(o, i)) for every sample n and
// output channel o. Jobs own (n, block of output channels), so the summation
// order does not depend on the thread count.
template <typename T, typename KernelAt>
void correlate_channels(const PaddedPlanes<T>& pad, std::size_t n, std::size_t in_ch, std::size_t out_ch,
                        KernelAt kernel_at, T* out, std::size_t to, std::size_t ho, std::size_t wo,
                        std::size_t kt, std::size_t kh, std::size_t kw) {
  constexpr std::size_t kBlock = 4;
  const std::size_t blocks = (out_ch + kBlock - 1) / kBlock;
  const std::size_t out_plane = to * ho * wo;
  const auto jobs = static_cast<std::ptrdiff_t>(n * blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t job = 0; job < jobs; ++job) {
    const std::size_t s = static_cast<std::size_t>(job) / blocks;
    const std::size_t o0 = static_cast<std::size_t>(job) % blocks * kBlock;
    const std::size_t count = std::min(kBlock, out_ch - o0);
    for (std::size_t i = 0; i < in_ch; ++i) {
      const T* src = pad.at(s * in_ch + i);
      const T* kernel[kBlock];
      T* dst[kBlock];
      for (std::size_t c = 0; c < count; ++c) {
        kernel[c] = kernel_at(o0 + c, i);
        dst[c] = out + (s * out_ch + o0 + c) * out_plane;
      }
      if (count == kBlock) {
        correlate_block<T, kBlock>(pad, src, kernel, dst, to, ho, wo, kt, kh, kw);
      } else {
        for (std::size_t c = 0; c < count; ++c) {
          correlate_block<T, 1>(pad, src, kernel + c, dst + c, to, ho, wo, kt, kh, kw);
        }
      }
    }
  }
}

template <typename T>
void conv_forward(const ConvGeometry& g, const T* x, const T* wt, const T* b, T* y) {
  for (std::size_t s = 0; s < g.n; ++s) {
    for (std::size_t co = 0; co < g.co; ++co) {
      T* plane = y + (s * g.co + co) * g.out_plane();
      std::fill(plane, plane + g.out_plane(), b[co]);
    }
  }
  const auto pad = pad_planes(x, g.n * g.ci, g.t, g.h, g.w, g.pt, g.ph, g.pw);
  correlate_channels(
      pad, g.n, g.ci, g.co, [&](std::size_t co, std::size_t ci) { return wt + (co * g.ci + ci) * g.kvol(); }, y,
      g.to, g.ho, g.wo, g.kt, g.kh, g.kw);
}

// The input gradient is the output gradient, padded by k-1-p, correlated with
// the spatially flipped kernel.
template <typename T>
void conv_backward_input(const ConvGeometry& g, const T* gy, const T* wt, T* gx) {
  std::vector<T> flipped(g.ci * g.co * g.kvol());
  for (std::size_t ci = 0; ci < g.ci; ++ci) {
    for (std::size_t co = 0; co < g.co; ++co) {
      const T* k = wt + (co * g.ci + ci) * g.kvol();
      std::reverse_copy(k, k + g.kvol(), flipped.begin() + (ci * g.co + co) * g.kvol());
    }
  }
  const auto pad = pad_planes(gy, g.n * g.co, g.to, g.ho, g.wo, g.kt - 1 - g.pt, g.kh - 1 - g.ph, g.kw - 1 - g.pw);
  correlate_channels(
      pad, g.n, g.co, g.ci,
      [&](std::size_t ci, std::size_t co) { return flipped.data() + (ci * g.co + co) * g.kvol(); }, gx, g.t, g.h,
      g.w, g.kt, g.kh, g.kw);
}

// Weight gradient of one (co, ci) kernel in a single sweep over the output
// gradient: every tap keeps kTile partial sums. KT/KH/KW of 0 read the
// extents from the geometry (slower, used for uncommon kernels).
template <typename T, std::size_t KT, std::size_t KH, std::size_t KW>
void weight_taps(const ConvGeometry& g, const PaddedPlanes<T>& pad, const T* gy, std::size_t co, std::size_t ci,
                 T* lanes) {
  constexpr bool kFixed = KT != 0;
  const std::size_t kt = kFixed ? KT : g.kt;
  const std::size_t kh = kFixed ? KH : g.kh;
  const std::size_t kw = kFixed ? KW : g.kw;
  T fixed_acc[kFixed ? KT * KH * KW : 1][kTile] = {};
  T* acc = kFixed ? &fixed_acc[0][0] : lanes;
  for (std::size_t n = 0; n < g.n; ++n) {
    const T* gout = gy + (n * g.co + co) * g.out_plane();
    const T* in = pad.at(n * g.ci + ci);
    for (std::size_t a = 0; a < g.to; ++a) {
      for (std::size_t b = 0; b < g.ho; ++b) {
        const T* grow = gout + (a * g.ho + b) * g.wo;
        for (std::size_t x0 = 0; x0 < g.wo; x0 += kTile) {
          const std::size_t width = std::min(kTile, g.wo - x0);
          T gv[kTile];
          for (std::size_t l = 0; l < kTile; ++l) gv[l] = l < width ? grow[x0 + l] : T(0);
          for (std::size_t i = 0; i < kt; ++i) {
            for (std::size_t j = 0; j < kh; ++j) {
              const T* s = in + ((a + i) * pad.h + b + j) * pad.w + x0;
              for (std::size_t k = 0; k < kw; ++k) {
                T* dst = acc + ((i * kh + j) * kw + k) * kTile;
#pragma omp simd
                for (std::size_t l = 0; l < kTile; ++l) dst[l] += gv[l] * s[k + l];
              }
            }
          }
        }
      }
    }
  }
  if constexpr (kFixed) {
    for (std::size_t i = 0; i < KT * KH * KW * kTile; ++i) lanes[i] += acc[i];
  }
}

template <typename T>
void conv_backward_weight(const ConvGeometry& g, const T* gy, const T* x, T* gw) {
  const auto pad = pad_planes(x, g.n * g.ci, g.t, g.h, g.w, g.pt, g.ph, g.pw);
  const auto jobs = static_cast<std::ptrdiff_t>(g.co * g.ci);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t job = 0; job < jobs; ++job) {
    const std::size_t co = static_cast<std::size_t>(job) / g.ci;
    const std::size_t ci = static_cast<std::size_t>(job) % g.ci;
    std::vector<T> lanes(g.kvol() * kTile, T(0));
    if (g.kt == 3 && g.kh == 3 && g.kw == 3) {
      weight_taps<T, 3, 3, 3>(g, pad, gy, co, ci, lanes.data());
    } else if (g.kvol() == 1) {
      weight_taps<T, 1, 1, 1>(g, pad, gy, co, ci, lanes.data());
    } else {
      weight_taps<T, 0, 0, 0>(g, pad, gy, co, ci, lanes.data());
    }
    T* dst = gw + static_cast<std::size_t>(job) * g.kvol();
    for (std::size_t tap = 0; tap < g.kvol(); ++tap) {
      const T* l = lanes.data() + tap * kTile;
      T s = T(0);
      for (std::size_t k = 0; k < kTile; k += 2) s += l[k] + l[k + 1];
      dst[tap] += s;
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> conv3d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 Extent3 padding) {
  require_rank(input.shape(), 5, "conv3d", "input");
  require_rank(weight.shape(), 5, "conv3d", "weight");
  require_rank(bias.shape(), 1, "conv3d", "bias");
  const auto& xs = input.shape();
  const auto& ws = weight.shape();
  if (xs[1] != ws[1]) {
    throw std::invalid_argument("conv3d: input " + shape_string(xs) + " has " +
                                std::to_string(xs[1]) + " channels but weight " +
                                shape_string(ws) + " expects " + std::to_string(ws[1]));
  }
  if (bias.dim(0) != ws[0]) {
    throw std::invalid_argument("conv3d: bias " + shape_string(bias.shape()) +
                                " does not match weight " + shape_string(ws));
  }
  if (ws[2] % 2 == 0 || ws[3] % 2 == 0 || ws[4] % 2 == 0) {
    throw std::invalid_argument("conv3d: kernel extents must be odd, got " + shape_string(ws));
  }
  if (padding.t >= ws[2] || padding.h >= ws[3] || padding.w >= ws[4]) {
    throw std::invalid_argument("conv3d: padding must be smaller than the kernel " + shape_string(ws));
  }
  ConvGeometry g{xs[0], xs[1], xs[2], xs[3], xs[4], ws[0], ws[2], ws[3], ws[4],
                 padding.t, padding.h, padding.w, 0, 0, 0};
  const auto out_extent = [](std::size_t in, std::size_t k, std::size_t pad) -> std::size_t {
    return in + 2 * pad + 1 > k ? in + 2 * pad + 1 - k : 0;
  };
  g.to = out_extent(g.t, g.kt, g.pt);
  g.ho = out_extent(g.h, g.kh, g.ph);
  g.wo = out_extent(g.w, g.kw, g.pw);
  if (g.to == 0 || g.ho == 0 || g.wo == 0) {
    throw std::invalid_argument("conv3d: kernel " + shape_string(ws) +
                                " larger than padded input " + shape_string(xs));
  }

  std::vector<T> out(g.n * g.co * g.out_plane());
  conv_forward(g, input.data().data(), weight.data().data(), bias.data().data(), out.data());

  return Tensor<T>::from_op(
      Shape{g.n, g.co, g.to, g.ho, g.wo}, std::move(out), {input, weight, bias},
      [g](TensorNode<T>& self) {
        auto& x = *self.inputs[0];
        auto& w = *self.inputs[1];
        auto& b = *self.inputs[2];
        const T* gy = self.grad.data();
        if (x.requires_grad) conv_backward_input(g, gy, w.value.data(), x.grad_buffer().data());
        if (w.requires_grad) conv_backward_weight(g, gy, x.value.data(), w.grad_buffer().data());
        if (b.requires_grad) {
          auto& gb = b.grad_buffer();
          for (std::size_t co = 0; co < g.co; ++co) {
            T s = T(0);
            for (std::size_t n = 0; n < g.n; ++n) {
              const T* plane = gy + (n * g.co + co) * g.out_plane();
              for (std::size_t i = 0; i < g.out_plane(); ++i) s += plane[i];
            }
            gb[co] += s;
          }
        }
      });
}

std::size_t ceil_pool_extent(std::size_t in, std::size_t pool) {
  if (pool == 0) throw std::invalid_argument("pool extent must be at least 1");
  return (in + pool - 1) / pool;
}

template <typename T>
Tensor<T> maxpool3d(const Tensor<T>& input, Extent3 pool) {
  require_rank(input.shape(), 5, "maxpool3d", "input");
  if (pool.t == 0 || pool.h == 0 || pool.w == 0) {
    throw std::invalid_argument("maxpool3d: pool extents must be >= 1");
  }
  const auto& s = input.shape();
  const std::size_t planes = s[0] * s[1];
  const std::size_t t = s[2], h = s[3], w = s[4];
  const std::size_t to = ceil_pool_extent(t, pool.t);
  const std::size_t ho = ceil_pool_extent(h, pool.h);
  const std::size_t wo = ceil_pool_extent(w, pool.w);
  const std::size_t out_plane = to * ho * wo;
  const std::size_t in_plane = t * h * w;

  std::vector<T> out(planes * out_plane);
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  const T* x = input.data().data();
  const auto jobs = static_cast<std::ptrdiff_t>(planes);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < jobs; ++p) {
    const std::size_t base = static_cast<std::size_t>(p) * in_plane;
    std::size_t o = static_cast<std::size_t>(p) * out_plane;
    for (std::size_t a = 0; a < to; ++a) {
      for (std::size_t bb = 0; bb < ho; ++bb) {
        for (std::size_t c = 0; c < wo; ++c, ++o) {
          std::size_t best = base + ((a * pool.t) * h + bb * pool.h) * w + c * pool.w;
          for (std::size_t i = a * pool.t; i < std::min(t, (a + 1) * pool.t); ++i) {
            for (std::size_t j = bb * pool.h; j < std::min(h, (bb + 1) * pool.h); ++j) {
              for (std::size_t k = c * pool.w; k < std::min(w, (c + 1) * pool.w); ++k) {
                const std::size_t idx = base + (i * h + j) * w + k;
                if (x[idx] > x[best]) best = idx;
              }
            }
          }
          out[o] = x[best];
          (*argmax)[o] = best;
        }
      }
    }
  }

  return Tensor<T>::from_op(Shape{s[0], s[1], to, ho, wo}, std::move(out), {input},
                            [argmax](TensorNode<T>& self) {
                              auto& gx = self.inputs[0]->grad_buffer();
                              for (std::size_t o = 0; o < self.grad.size(); ++o) {
                                gx[(*argmax)[o]] += self.grad[o];
                              }
                            });
}

template <typename T>
Tensor<T> relu(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
  return Tensor<T>::from_op(x.shape(), std::move(out), {x}, [](TensorNode<T>& self) {
    auto& src = *self.inputs[0];
    auto& gx = src.grad_buffer();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += src.value[i] > T(0) ? self.grad[i] : T(0);
  });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
  std::vector<T> out(x.numel());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (in[i] >= T(0)) {
      out[i] = T(1) / (T(1) + std::exp(-in[i]));
    } else {
      const T e = std::exp(in[i]);
      out[i] = e / (T(1) + e);
    }
  }
  return Tensor<T>::from_op(x.shape(), std::move(out), {x}, [](TensorNode<T>& self) {
    auto& gx = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const T y = self.value[i];
      gx[i] += self.grad[i] * y * (T(1) - y);
    }
  });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  require_rank(x.shape(), 2, "linear", "input");
  require_rank(weight.shape(), 2, "linear", "weight");
  require_rank(bias.shape(), 1, "linear", "bias");
  const std::size_t n = x.dim(0), f = x.dim(1), k = weight.dim(0);
  if (weight.dim(1) != f || bias.dim(0) != k) {
    throw std::invalid_argument("linear: input " + shape_string(x.shape()) + ", weight " +
                                shape_string(weight.shape()) + " and bias " +
                                shape_string(bias.shape()) + " are incompatible");
  }
  std::vector<T> out(n * k);
  const T* xv = x.data().data();
  const T* wv = weight.data().data();
  const T* bv = bias.data().data();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) out[r * k + c] = bv[c] + dot(xv + r * f, wv + c * f, f);
  }
  return Tensor<T>::from_op(Shape{n, k}, std::move(out), {x, weight, bias},
                            [n, f, k](TensorNode<T>& self) {
                              auto& xi = *self.inputs[0];
                              auto& wi = *self.inputs[1];
                              auto& bi = *self.inputs[2];
                              const T* gy = self.grad.data();
                              if (xi.requires_grad) {
                                T* gx = xi.grad_buffer().data();
                                for (std::size_t r = 0; r < n; ++r) {
                                  for (std::size_t c = 0; c < k; ++c) {
                                    axpy(gy[r * k + c], wi.value.data() + c * f, gx + r * f, f);
                                  }
                                }
                              }
                              if (wi.requires_grad) {
                                T* gw = wi.grad_buffer().data();
                                for (std::size_t r = 0; r < n; ++r) {
                                  for (std::size_t c = 0; c < k; ++c) {
                                    axpy(gy[r * k + c], xi.value.data() + r * f, gw + c * f, f);
                                  }
                                }
                              }
                              if (bi.requires_grad) {
                                T* gb = bi.grad_buffer().data();
                                for (std::size_t r = 0; r < n; ++r) {
                                  for (std::size_t c = 0; c < k; ++c) gb[c] += gy[r * k + c];
                                }
                              }
                            });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x) {
  require_rank(x.shape(), 2, "softmax", "input");
  const std::size_t n = x.dim(0), k = x.dim(1);
  if (k == 0) throw std::invalid_argument("softmax: need at least one class");
  std::vector<T> out(n * k);
  const T* xv = x.data().data();
  for (std::size_t r = 0; r < n; ++r) {
    const T* row = xv + r * k;
    T* dst = out.data() + r * k;
    const T m = *std::max_element(row, row + k);
    T s = T(0);
    for (std::size_t c = 0; c < k; ++c) {
      dst[c] = std::exp(row[c] - m);
      s += dst[c];
    }
    for (std::size_t c = 0; c < k; ++c) dst[c] /= s;
  }
  return Tensor<T>::from_op(x.shape(), std::move(out), {x}, [n, k](TensorNode<T>& self) {
    T* gx = self.inputs[0]->grad_buffer().data();
    for (std::size_t r = 0; r < n; ++r) {
      const T* y = self.value.data() + r * k;
      const T* gy = self.grad.data() + r * k;
      T inner = T(0);
      for (std::size_t c = 0; c < k; ++c) inner += gy[c] * y[c];
      for (std::size_t c = 0; c < k; ++c) gx[r * k + c] += y[c] * (gy[c] - inner);
    }
  });
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& probs, std::span<const std::size_t> targets) {
  require_rank(probs.shape(), 2, "cross_entropy", "probs");
  const std::size_t n = probs.dim(0), k = probs.dim(1);
  if (targets.size() != n) {
    throw std::invalid_argument("cross_entropy: " + std::to_string(targets.size()) +
                                " targets for " + std::to_string(n) + " rows");
  }
  std::vector<std::size_t> tgt(targets.begin(), targets.end());
  for (std::size_t r = 0; r < n; ++r) {
    if (tgt[r] >= k) {
      throw std::invalid_argument("cross_entropy: target " + std::to_string(tgt[r]) + " at row " +
                                  std::to_string(r) + " outside [0," + std::to_string(k) + ")");
    }
  }
  const T floor = static_cast<T>(kProbabilityFloor);
  const T* p = probs.data().data();
  T loss = T(0);
  for (std::size_t r = 0; r < n; ++r) loss -= std::log(std::max(p[r * k + tgt[r]], floor));
  loss /= static_cast<T>(n);
  return Tensor<T>::from_op(Shape{}, std::vector<T>{loss}, {probs},
                            [tgt = std::move(tgt), n, k, floor](TensorNode<T>& self) {
                              auto& src = *self.inputs[0];
                              auto& gp = src.grad_buffer();
                              const T g = self.grad[0] / static_cast<T>(n);
                              for (std::size_t r = 0; r < n; ++r) {
                                const std::size_t i = r * k + tgt[r];
                                if (src.value[i] > floor) gp[i] -= g / src.value[i];
                              }
                            });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "add");
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return Tensor<T>::from_op(a.shape(), std::move(out), {a, b}, [](TensorNode<T>& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      auto& g = in->grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape(a.shape(), b.shape(), "mul");
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return Tensor<T>::from_op(a.shape(), std::move(out), {a, b}, [](TensorNode<T>& self) {
    auto& x = *self.inputs[0];
    auto& y = *self.inputs[1];
    if (x.requires_grad) {
      auto& g = x.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y.value[i];
    }
    if (y.requires_grad) {
      auto& g = y.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x.value[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = factor * a.data()[i];
  return Tensor<T>::from_op(a.shape(), std::move(out), {a}, [factor](TensorNode<T>& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += factor * self.grad[i];
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T s = T(0);
  for (auto v : a.data()) s += v;
  return Tensor<T>::from_op(Shape{}, std::vector<T>{s}, {a}, [](TensorNode<T>& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (auto& v : g) v += self.grad[0];
  });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw std::invalid_argument("reshape: cannot view " + shape_string(a.shape()) + " as " +
                                shape_string(shape));
  }
  std::vector<T> out(a.data().begin(), a.data().end());
  return Tensor<T>::from_op(std::move(shape), std::move(out), {a}, [](TensorNode<T>& self) {
    auto& g = self.inputs[0]->grad_buffer();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

template <typename T>
Tensor<T> concat_columns(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a.shape(), 2, "concat_columns", "left");
  require_same_shape(a.shape(), b.shape(), "concat_columns");
  const std::size_t n = a.dim(0), k = a.dim(1);
  std::vector<T> out(n * 2 * k);
  for (std::size_t r = 0; r < n; ++r) {
    std::copy_n(a.data().data() + r * k, k, out.data() + r * 2 * k);
    std::copy_n(b.data().data() + r * k, k, out.data() + r * 2 * k + k);
  }
  return Tensor<T>::from_op(Shape{n, 2 * k}, std::move(out), {a, b},
                            [n, k](TensorNode<T>& self) {
                              for (std::size_t side = 0; side < 2; ++side) {
                                auto& in = *self.inputs[side];
                                if (!in.requires_grad) continue;
                                auto& g = in.grad_buffer();
                                for (std::size_t r = 0; r < n; ++r) {
                                  for (std::size_t c = 0; c < k; ++c) {
                                    g[r * k + c] += self.grad[r * 2 * k + side * k + c];
                                  }
                                }
                              }
                            });
}

#define STROKENET_INSTANTIATE_OPS(T)                                                     \
  template Tensor<T> conv3d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Extent3); \
  template Tensor<T> maxpool3d(const Tensor<T>&, Extent3);                               \
  template Tensor<T> relu(const Tensor<T>&);                                             \
  template Tensor<T> sigmoid(const Tensor<T>&);                                          \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);       \
  template Tensor<T> softmax(const Tensor<T>&);                                          \
  template Tensor<T> cross_entropy(const Tensor<T>&, std::span<const std::size_t>);      \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                            \
  template Tensor<T> scale(const Tensor<T>&, T);                                         \
  template Tensor<T> sum(const Tensor<T>&);                                              \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                   \
  template Tensor<T> concat_columns(const Tensor<T>&, const Tensor<T>&);

STROKENET_INSTANTIATE_OPS(float)
STROKENET_INSTANTIATE_OPS(double)

}  // namespace strokenet
