// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/tten.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "strokenet/errors.hpp"

namespace strokenet {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw InputError("TTEN: truncated record");
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

template <typename T>
using Bits = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;

template <typename T>
Tensor<T> read_payload(std::istream& in, Shape shape) {
  const std::size_t n = shape_numel(shape);
  std::vector<T> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = std::bit_cast<T>(get_le<Bits<T>>(in));
  return Tensor<T>(std::move(shape), std::move(values));
}

}  // namespace

template <typename T>
void write_tten(std::ostream& out, const Tensor<T>& tensor) {
  if (tensor.rank() > 255) throw std::invalid_argument("TTEN: rank above 255");
  out.write("TTEN", 4);
  put_le<std::uint8_t>(out, kTtenVersion);
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(dtype_of<T>()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(tensor.rank()));
  for (auto e : tensor.shape()) {
    if (e > UINT32_MAX) throw std::invalid_argument("TTEN: extent exceeds u32");
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e));
  }
  for (T v : tensor.data()) put_le<Bits<T>>(out, std::bit_cast<Bits<T>>(v));
}

AnyTensor read_tten_any(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw InputError("TTEN: truncated header");
  if (std::memcmp(magic, "TTEN", 4) != 0) throw InputError("TTEN: bad magic");
  const auto version = get_le<std::uint8_t>(in);
  if (version != kTtenVersion) {
    throw InputError("TTEN: unsupported version " + std::to_string(version));
  }
  const auto dtype = get_le<std::uint8_t>(in);
  const auto rank = get_le<std::uint8_t>(in);
  Shape shape(rank);
  for (auto& e : shape) e = get_le<std::uint32_t>(in);
  switch (static_cast<DType>(dtype)) {
    case DType::f32:
      return read_payload<float>(in, std::move(shape));
    case DType::f64:
      return read_payload<double>(in, std::move(shape));
  }
  throw InputError("TTEN: unknown dtype byte " + std::to_string(dtype));
}

template <typename T>
Tensor<T> read_tten(std::istream& in) {
  auto any = read_tten_any(in);
  if (auto* t = std::get_if<Tensor<T>>(&any)) return *t;
  throw InputError("TTEN: dtype does not match the requested element type");
}

template <typename T>
void save_tten(const std::filesystem::path& path, const Tensor<T>& tensor) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_tten(out, tensor);
  if (!out) throw InputError("failed writing " + path.string());
}

template <typename T>
Tensor<T> load_tten(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_tten<T>(in);
}

template void write_tten(std::ostream&, const Tensor<float>&);
template void write_tten(std::ostream&, const Tensor<double>&);
template Tensor<float> read_tten(std::istream&);
template Tensor<double> read_tten(std::istream&);
template void save_tten(const std::filesystem::path&, const Tensor<float>&);
template void save_tten(const std::filesystem::path&, const Tensor<double>&);
template Tensor<float> load_tten(const std::filesystem::path&);
template Tensor<double> load_tten(const std::filesystem::path&);

}  // namespace strokenet
