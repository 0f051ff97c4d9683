// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "strokenet/tensor.hpp"

namespace strokenet {

// Extents over the (T, H, W) axes of an N×C×T×H×W volume.
struct Extent3 {
  std::size_t t = 1;
  std::size_t h = 1;
  std::size_t w = 1;
  friend bool operator==(const Extent3&, const Extent3&) = default;
};

/// Stride-1 3D cross-correlation.
///
/// input  N×C_in×T×H×W, weight C_out×C_in×kT×kH×kW, bias C_out.
/// Output extent per axis is in + 2·pad − k + 1; kernel extents must be odd.
/// The batch and channel loops are parallelized so that every output element
/// is owned by one thread, which keeps results bitwise independent of the
/// thread count.
template <typename T>
Tensor<T> conv3d(const Tensor<T>& input, const Tensor<T>& weight, const Tensor<T>& bias,
                 Extent3 padding);

// Ceil-mode max pooling with stride equal to the pool extent. Trailing
// partial windows pool over the elements that remain. Gradient goes to the
// first (lowest linear index) maximum of each window.
template <typename T>
Tensor<T> maxpool3d(const Tensor<T>& input, Extent3 pool);

std::size_t ceil_pool_extent(std::size_t in, std::size_t pool);

template <typename T>
Tensor<T> relu(const Tensor<T>& x);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x);

// x N×F, weight K×F, bias K → N×K.
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

// Row-wise softmax over the last axis of an N×K tensor.
template <typename T>
Tensor<T> softmax(const Tensor<T>& x);

inline constexpr double kProbabilityFloor = 1e-12;

// Mean over rows of −ln(max(p[target], 1e-12)). Inputs are probabilities.
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& probs, std::span<const std::size_t> targets);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);

template <typename T>
Tensor<T> sum(const Tensor<T>& a);

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape);

// [a ; b] along the last axis of two N×K tensors → N×2K.
template <typename T>
Tensor<T> concat_columns(const Tensor<T>& a, const Tensor<T>& b);

}  // namespace strokenet
