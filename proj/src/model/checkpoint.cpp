// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "strokenet/errors.hpp"
#include "strokenet/model.hpp"
#include "strokenet/tten.hpp"

namespace strokenet {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'T', 'S', 'C', 'K'};
constexpr unsigned char kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {char(v & 0xFF), char((v >> 8) & 0xFF), char((v >> 16) & 0xFF), char((v >> 24) & 0xFF)};
  out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw InputError("checkpoint: truncated file");
  return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

std::string get_bytes(std::istream& in, std::uint32_t n) {
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n)) throw InputError("checkpoint: truncated file");
  return s;
}

}  // namespace

void save_checkpoint(std::ostream& out, const TwoStreamNet<float>& net) {
  const std::string header = json(net.config()).dump();
  out.write(kMagic, 4);
  out.put(static_cast<char>(kVersion));
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  const auto params = net.parameters();
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto* p : params) {
    put_u32(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_tten(out, p->value);
  }
}

void save_checkpoint(const std::filesystem::path& path, const TwoStreamNet<float>& net) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  save_checkpoint(out, net);
  if (!out) throw InputError("failed writing " + path.string());
}

TwoStreamNet<float> load_checkpoint(std::istream& in, const ModelConfig* expected) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw InputError("checkpoint: bad magic");
  const int version = in.get();
  if (version != kVersion) throw InputError("checkpoint: unsupported version " + std::to_string(version));
  const std::string header = get_bytes(in, get_u32(in));
  ModelConfig cfg;
  try {
    from_json(json::parse(header), cfg);
    cfg.validate();
  } catch (const std::exception& e) {
    throw InputError(std::string("checkpoint: bad config header: ") + e.what());
  }
  if (expected) {
    if (auto field = first_config_difference(*expected, cfg)) {
      throw ConfigMismatch(*field, "checkpoint has " + json(cfg).at(*field).dump() + ", expected " +
                                       json(*expected).at(*field).dump());
    }
  }

  auto net = TwoStreamNet<float>::init(cfg, 0);
  auto params = net.parameters();
  const auto count = get_u32(in);
  if (count != params.size()) {
    throw InputError("checkpoint: " + std::to_string(count) + " parameters, model has " +
                     std::to_string(params.size()));
  }
  for (auto* p : params) {
    const std::string name = get_bytes(in, get_u32(in));
    if (name != p->name) throw InputError("checkpoint: expected parameter " + p->name + ", found " + name);
    const auto stored = read_tten<float>(in);
    if (stored.shape() != p->value.shape()) {
      throw InputError("checkpoint: parameter " + name + " has shape " + shape_string(stored.shape()) +
                       ", model expects " + shape_string(p->value.shape()));
    }
    std::copy(stored.data().begin(), stored.data().end(), p->value.mutable_data().begin());
  }
  return net;
}

TwoStreamNet<float> load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  return load_checkpoint(in, expected);
}

}  // namespace strokenet
