// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "strokenet/tensor.hpp"

namespace strokenet {

// Raw tensor record:
//   "TTEN" | version u8 (=1) | dtype u8 (1=f32, 2=f64) | rank u8 |
//   rank × u32 LE extents | row-major LE payload.
inline constexpr unsigned char kTtenVersion = 1;

template <typename T>
void write_tten(std::ostream& out, const Tensor<T>& tensor);

using AnyTensor = std::variant<Tensor<float>, Tensor<double>>;

// Throws InputError on bad magic, version, dtype, or a short read.
AnyTensor read_tten_any(std::istream& in);

// Rejects a record whose dtype differs from T.
template <typename T>
Tensor<T> read_tten(std::istream& in);

template <typename T>
void save_tten(const std::filesystem::path& path, const Tensor<T>& tensor);

template <typename T>
Tensor<T> load_tten(const std::filesystem::path& path);

}  // namespace strokenet
