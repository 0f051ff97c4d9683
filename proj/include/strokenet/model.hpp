// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "strokenet/ops.hpp"
#include "strokenet/optim.hpp"
#include "strokenet/tensor.hpp"

namespace strokenet {

enum class FusionMode { summed, weighted, concat };

struct FusionConfig {
  FusionMode mode = FusionMode::summed;
  double weight_a = 1.0;  // WEIGHTED only
  double weight_b = 1.0;
  friend bool operator==(const FusionConfig&, const FusionConfig&) = default;
};

enum class StreamCount { one = 1, two = 2 };

struct ModelConfig {
  std::vector<std::size_t> filters{32, 64, 128, 256, 512};
  Extent3 kernel{3, 3, 3};
  // Each triple is listed in `pool_order` axis order (default W,H,T).
  std::vector<std::array<std::size_t, 3>> pool_sizes{{4, 3, 2}, {4, 3, 2}, {2, 2, 2}, {2, 2, 2}, {2, 2, 2}};
  std::string pool_order = "WHT";
  std::size_t width = 120;
  std::size_t height = 120;
  std::size_t frames = 100;
  std::size_t channels = 3;
  std::size_t hidden_dim = 512;
  std::size_t num_classes = 21;
  FusionConfig fusion;
  StreamCount streams = StreamCount::two;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  // Pool extent of level i mapped onto (T, H, W).
  Extent3 pool_extent(std::size_t level) const;
  // C×T×H×W after the last pooling level (ceil mode, size-preserving convs).
  std::array<std::size_t, 4> feature_shape() const;
  std::size_t feature_length() const;
  Shape clip_shape(std::size_t batch) const;

  // Architecture as published: 120×120×100 input, 32..512 filters.
  static ModelConfig paper();
  // Small profile for CPU runs: 32×32×16 input.
  static ModelConfig desk();
};

void to_json(nlohmann::json& j, const ModelConfig& cfg);
void from_json(const nlohmann::json& j, ModelConfig& cfg);
std::string to_string(FusionMode mode);

template <typename T>
struct AttentionBlock {
  Parameter<T> reduce_weight;  // C/8 × C × 1×1×1
  Parameter<T> reduce_bias;
  Parameter<T> expand_weight;  // C × C/8 × 1×1×1
  Parameter<T> expand_bias;

  std::size_t channels() const { return expand_weight.value.dim(0); }
  // M = sigmoid(expand(relu(reduce(x)))); returns x + x⊙M.
  Tensor<T> forward(const Tensor<T>& x) const;
};

template <typename T>
struct BranchLevel {
  Parameter<T> conv_weight;
  Parameter<T> conv_bias;
  AttentionBlock<T> attention;
};

template <typename T>
struct Branch {
  std::vector<BranchLevel<T>> levels;
  Parameter<T> hidden_weight;
  Parameter<T> hidden_bias;
  Parameter<T> output_weight;
  Parameter<T> output_bias;
};

template <typename T>
struct ConcatHead {
  Parameter<T> weight;  // K × 2K
  Parameter<T> bias;
};

// SUMMED: softmax(p_a + p_b); WEIGHTED: softmax(w_a·p_a + w_b·p_b);
// CONCAT: softmax(linear([p_a ; p_b])). `head` is required for CONCAT only.
template <typename T>
Tensor<T> fuse_outputs(const Tensor<T>& p_a, const Tensor<T>& p_b, const FusionConfig& fusion,
                       const ConcatHead<T>* head = nullptr);

template <typename T>
class TwoStreamNet {
 public:
  // Weights uniform in ±1/sqrt(fan_in) from a seeded generator.
  static TwoStreamNet init(const ModelConfig& cfg, std::uint64_t seed);

  TwoStreamNet(TwoStreamNet&&) noexcept = default;
  TwoStreamNet& operator=(TwoStreamNet&&) noexcept = default;
  TwoStreamNet(const TwoStreamNet&) = delete;
  TwoStreamNet& operator=(const TwoStreamNet&) = delete;

  // Deep copy with independent parameter storage.
  TwoStreamNet clone() const;

  const ModelConfig& config() const { return cfg_; }
  const Branch<T>& branch_a() const { return branch_a_; }
  const Branch<T>* branch_b() const { return branch_b_ ? &*branch_b_ : nullptr; }
  Branch<T>& branch_a() { return branch_a_; }
  Branch<T>* branch_b() { return branch_b_ ? &*branch_b_ : nullptr; }
  const ConcatHead<T>* concat_head() const { return head_ ? &*head_ : nullptr; }

  // Per-stream class probabilities N×K.
  Tensor<T> branch_forward(const Branch<T>& branch, const Tensor<T>& clip) const;

  // ONE: branch_a only. TWO: fused output of both branches; clip_b required.
  Tensor<T> forward(const Tensor<T>& clip_a, const Tensor<T>* clip_b = nullptr) const;

  // Fixed order, stable across runs; names are unique.
  std::vector<Parameter<T>*> parameters();
  std::vector<const Parameter<T>*> parameters() const;

 private:
  explicit TwoStreamNet(ModelConfig cfg) : cfg_(std::move(cfg)) {}

  ModelConfig cfg_;
  Branch<T> branch_a_;
  std::optional<Branch<T>> branch_b_;
  std::optional<ConcatHead<T>> head_;
};

extern template class TwoStreamNet<float>;
extern template class TwoStreamNet<double>;

// Checkpoint layout:
//   "TSCK" | version u8 | u32 LE config-JSON length | config JSON |
//   u32 LE parameter count | per parameter: u32 LE name length, name,
//   TTEN record with f32 payload.
void save_checkpoint(std::ostream& out, const TwoStreamNet<float>& net);
void save_checkpoint(const std::filesystem::path& path, const TwoStreamNet<float>& net);

// Throws InputError on malformed/truncated input and ConfigMismatch when the
// stored config differs from `expected`.
TwoStreamNet<float> load_checkpoint(std::istream& in, const ModelConfig* expected = nullptr);
TwoStreamNet<float> load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected = nullptr);

// Names the first differing field, or nullopt when equal.
std::optional<std::string> first_config_difference(const ModelConfig& a, const ModelConfig& b);

}  // namespace strokenet
