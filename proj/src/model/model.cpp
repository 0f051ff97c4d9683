// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "strokenet/rng.hpp"

namespace strokenet {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("model config field '" + field + "': " + why);
}

}  // namespace

void ModelConfig::validate() const {
  if (filters.empty()) bad_field("filters", "must not be empty");
  if (filters.size() != pool_sizes.size()) {
    bad_field("pool_sizes", "has " + std::to_string(pool_sizes.size()) + " levels but filters has " +
                                std::to_string(filters.size()));
  }
  for (auto f : filters) {
    if (f == 0) bad_field("filters", "filter counts must be positive");
  }
  if (kernel.t % 2 == 0 || kernel.h % 2 == 0 || kernel.w % 2 == 0) bad_field("kernel", "extents must be odd");
  for (const auto& p : pool_sizes) {
    for (auto e : p) {
      if (e == 0) bad_field("pool_sizes", "extents must be >= 1");
    }
  }
  std::string sorted = pool_order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != "HTW") bad_field("pool_order", "must be a permutation of W, H, T");
  if (width == 0 || height == 0 || frames == 0) bad_field("input_size", "extents must be positive");
  if (channels != 3) bad_field("input_size", "channel count must be 3 (RGB)");
  if (hidden_dim == 0) bad_field("hidden_dim", "must be positive");
  if (num_classes < 2) bad_field("num_classes", "must be at least 2");
  if (!std::isfinite(fusion.weight_a) || !std::isfinite(fusion.weight_b)) {
    bad_field("fusion", "weights must be finite");
  }
}

Extent3 ModelConfig::pool_extent(std::size_t level) const {
  const auto& p = pool_sizes.at(level);
  Extent3 e;
  for (std::size_t i = 0; i < 3; ++i) {
    switch (pool_order[i]) {
      case 'T':
        e.t = p[i];
        break;
      case 'H':
        e.h = p[i];
        break;
      default:
        e.w = p[i];
        break;
    }
  }
  return e;
}

std::array<std::size_t, 4> ModelConfig::feature_shape() const {
  std::size_t t = frames, h = height, w = width;
  for (std::size_t i = 0; i < pool_sizes.size(); ++i) {
    const auto p = pool_extent(i);
    t = ceil_pool_extent(t, p.t);
    h = ceil_pool_extent(h, p.h);
    w = ceil_pool_extent(w, p.w);
  }
  return {filters.back(), t, h, w};
}

std::size_t ModelConfig::feature_length() const {
  const auto s = feature_shape();
  return s[0] * s[1] * s[2] * s[3];
}

Shape ModelConfig::clip_shape(std::size_t batch) const { return {batch, channels, frames, height, width}; }

ModelConfig ModelConfig::paper() { return ModelConfig{}; }

ModelConfig ModelConfig::desk() {
  ModelConfig cfg;
  cfg.filters = {4, 8, 8, 16, 16};
  cfg.width = 32;
  cfg.height = 32;
  cfg.frames = 16;
  cfg.hidden_dim = 32;
  // Lighter pooling keeps a 128-long feature instead of collapsing to 16.
  cfg.pool_sizes = {{2, 2, 2}, {2, 2, 2}, {2, 2, 2}, {2, 2, 1}, {1, 1, 1}};
  // Equal weights leave the argmax of summed fusion unchanged but scale the
  // gradient reaching each branch, which the small model needs at lr 1e-4.
  cfg.fusion.mode = FusionMode::weighted;
  cfg.fusion.weight_a = 16.0;
  cfg.fusion.weight_b = 16.0;
  return cfg;
}

std::string to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::summed:
      return "summed";
    case FusionMode::weighted:
      return "weighted";
    case FusionMode::concat:
      return "concat";
  }
  return "?";
}

void to_json(json& j, const ModelConfig& cfg) {
  j = json{{"filters", cfg.filters},
           {"kernel", {cfg.kernel.t, cfg.kernel.h, cfg.kernel.w}},
           {"pool_sizes", cfg.pool_sizes},
           {"pool_order", cfg.pool_order},
           {"input_size", {cfg.width, cfg.height, cfg.frames, cfg.channels}},
           {"hidden_dim", cfg.hidden_dim},
           {"num_classes", cfg.num_classes},
           {"fusion", {{"mode", to_string(cfg.fusion.mode)}, {"weights", {cfg.fusion.weight_a, cfg.fusion.weight_b}}}},
           {"streams", static_cast<int>(cfg.streams)}};
}

void from_json(const json& j, ModelConfig& cfg) {
  if (j.contains("filters")) cfg.filters = j.at("filters").get<std::vector<std::size_t>>();
  if (j.contains("kernel")) {
    const auto k = j.at("kernel").get<std::array<std::size_t, 3>>();
    cfg.kernel = {k[0], k[1], k[2]};
  }
  if (j.contains("pool_sizes")) cfg.pool_sizes = j.at("pool_sizes").get<std::vector<std::array<std::size_t, 3>>>();
  if (j.contains("pool_order")) cfg.pool_order = j.at("pool_order").get<std::string>();
  if (j.contains("input_size")) {
    const auto s = j.at("input_size").get<std::vector<std::size_t>>();
    if (s.size() != 3 && s.size() != 4) bad_field("input_size", "expected [W,H,T] or [W,H,T,C]");
    cfg.width = s[0];
    cfg.height = s[1];
    cfg.frames = s[2];
    cfg.channels = s.size() == 4 ? s[3] : 3;
  }
  if (j.contains("hidden_dim")) cfg.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  if (j.contains("num_classes")) cfg.num_classes = j.at("num_classes").get<std::size_t>();
  if (j.contains("fusion")) {
    const auto& f = j.at("fusion");
    const auto mode = f.value("mode", to_string(cfg.fusion.mode));
    if (mode == "summed") {
      cfg.fusion.mode = FusionMode::summed;
    } else if (mode == "weighted") {
      cfg.fusion.mode = FusionMode::weighted;
    } else if (mode == "concat") {
      cfg.fusion.mode = FusionMode::concat;
    } else {
      bad_field("fusion", "unknown mode '" + mode + "'");
    }
    if (f.contains("weights")) {
      const auto w = f.at("weights").get<std::array<double, 2>>();
      cfg.fusion.weight_a = w[0];
      cfg.fusion.weight_b = w[1];
    }
  }
  if (j.contains("streams")) {
    const int s = j.at("streams").get<int>();
    if (s != 1 && s != 2) bad_field("streams", "must be 1 or 2");
    cfg.streams = s == 1 ? StreamCount::one : StreamCount::two;
  }
}

std::optional<std::string> first_config_difference(const ModelConfig& a, const ModelConfig& b) {
  const json ja = a, jb = b;
  for (const auto& [key, value] : ja.items()) {
    if (!jb.contains(key) || jb.at(key) != value) return key;
  }
  return std::nullopt;
}

template <typename T>
Tensor<T> AttentionBlock<T>::forward(const Tensor<T>& x) const {
  if (x.rank() != 5 || x.dim(1) != channels()) {
    throw std::invalid_argument("attention: expected " + std::to_string(channels()) +
                                " channels, got input " + shape_string(x.shape()));
  }
  const Extent3 none{0, 0, 0};
  auto hidden = relu(conv3d(x, reduce_weight.value, reduce_bias.value, none));
  auto mask = sigmoid(conv3d(hidden, expand_weight.value, expand_bias.value, none));
  return add(x, mul(x, mask));
}

template <typename T>
Tensor<T> fuse_outputs(const Tensor<T>& p_a, const Tensor<T>& p_b, const FusionConfig& fusion,
                       const ConcatHead<T>* head) {
  if (p_a.shape() != p_b.shape() || p_a.rank() != 2) {
    throw std::invalid_argument("fuse_outputs: stream outputs " + shape_string(p_a.shape()) + " and " +
                                shape_string(p_b.shape()) + " differ");
  }
  switch (fusion.mode) {
    case FusionMode::summed:
      return softmax(add(p_a, p_b));
    case FusionMode::weighted:
      return softmax(add(scale(p_a, static_cast<T>(fusion.weight_a)), scale(p_b, static_cast<T>(fusion.weight_b))));
    case FusionMode::concat:
      if (head == nullptr) throw std::invalid_argument("fuse_outputs: concat fusion needs its linear head");
      return softmax(linear(concat_columns(p_a, p_b), head->weight.value, head->bias.value));
  }
  throw std::invalid_argument("fuse_outputs: unknown fusion mode");
}

namespace {

template <typename T>
Parameter<T> zero_param(std::string name, Shape shape) {
  return Parameter<T>(std::move(name), Tensor<T>::zeros(std::move(shape), true));
}

template <typename T>
Branch<T> make_branch(const ModelConfig& cfg, const std::string& prefix) {
  Branch<T> b;
  std::size_t in = cfg.channels;
  for (std::size_t i = 0; i < cfg.filters.size(); ++i) {
    const std::size_t out = cfg.filters[i];
    const std::size_t mid = std::max<std::size_t>(out / 8, 1);
    const std::string p = prefix + ".level" + std::to_string(i);
    BranchLevel<T> level{
        zero_param<T>(p + ".conv.weight", {out, in, cfg.kernel.t, cfg.kernel.h, cfg.kernel.w}),
        zero_param<T>(p + ".conv.bias", {out}),
        {zero_param<T>(p + ".attention.reduce.weight", {mid, out, 1, 1, 1}),
         zero_param<T>(p + ".attention.reduce.bias", {mid}),
         zero_param<T>(p + ".attention.expand.weight", {out, mid, 1, 1, 1}),
         zero_param<T>(p + ".attention.expand.bias", {out})}};
    b.levels.push_back(std::move(level));
    in = out;
  }
  b.hidden_weight = zero_param<T>(prefix + ".hidden.weight", {cfg.hidden_dim, cfg.feature_length()});
  b.hidden_bias = zero_param<T>(prefix + ".hidden.bias", {cfg.hidden_dim});
  b.output_weight = zero_param<T>(prefix + ".output.weight", {cfg.num_classes, cfg.hidden_dim});
  b.output_bias = zero_param<T>(prefix + ".output.bias", {cfg.num_classes});
  return b;
}

template <typename P>
void collect(auto& branch, std::vector<P>& out) {
  for (auto& level : branch.levels) {
    out.push_back(&level.conv_weight);
    out.push_back(&level.conv_bias);
    out.push_back(&level.attention.reduce_weight);
    out.push_back(&level.attention.reduce_bias);
    out.push_back(&level.attention.expand_weight);
    out.push_back(&level.attention.expand_bias);
  }
  out.push_back(&branch.hidden_weight);
  out.push_back(&branch.hidden_bias);
  out.push_back(&branch.output_weight);
  out.push_back(&branch.output_bias);
}

}  // namespace

template <typename T>
TwoStreamNet<T> TwoStreamNet<T>::init(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  TwoStreamNet net(cfg);
  net.branch_a_ = make_branch<T>(cfg, "a");
  if (cfg.streams == StreamCount::two) {
    net.branch_b_ = make_branch<T>(cfg, "b");
    if (cfg.fusion.mode == FusionMode::concat) {
      net.head_ = ConcatHead<T>{zero_param<T>("fusion.weight", {cfg.num_classes, 2 * cfg.num_classes}),
                                zero_param<T>("fusion.bias", {cfg.num_classes})};
    }
  }
  // Parameters come in (weight, bias) pairs; a bias shares its weight's fan-in.
  Rng rng(seed);
  double bound = 1.0;
  for (Parameter<T>* p : net.parameters()) {
    if (p->value.rank() >= 2) bound = 1.0 / std::sqrt(static_cast<double>(p->value.numel() / p->value.dim(0)));
    for (auto& v : p->value.mutable_data()) v = static_cast<T>(rng.uniform(-bound, bound));
  }
  return net;
}

template <typename T>
TwoStreamNet<T> TwoStreamNet<T>::clone() const {
  TwoStreamNet copy = init(cfg_, 0);
  auto dst = copy.parameters();
  auto src = parameters();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    std::copy(src[i]->value.data().begin(), src[i]->value.data().end(), dst[i]->value.mutable_data().begin());
    dst[i]->velocity = src[i]->velocity;
  }
  return copy;
}

template <typename T>
Tensor<T> TwoStreamNet<T>::branch_forward(const Branch<T>& branch, const Tensor<T>& clip) const {
  if (clip.rank() != 5 || clip.dim(1) != cfg_.channels || clip.dim(2) != cfg_.frames ||
      clip.dim(3) != cfg_.height || clip.dim(4) != cfg_.width) {
    throw std::invalid_argument("branch input must be " + shape_string(cfg_.clip_shape(clip.rank() ? clip.dim(0) : 0)) +
                                " (N×C×T×H×W), got " + shape_string(clip.shape()));
  }
  const Extent3 pad{cfg_.kernel.t / 2, cfg_.kernel.h / 2, cfg_.kernel.w / 2};
  Tensor<T> x = clip;
  for (std::size_t i = 0; i < branch.levels.size(); ++i) {
    const auto& level = branch.levels[i];
    x = relu(conv3d(x, level.conv_weight.value, level.conv_bias.value, pad));
    x = level.attention.forward(x);
    x = maxpool3d(x, cfg_.pool_extent(i));
  }
  const std::size_t n = clip.dim(0);
  x = reshape(x, {n, x.numel() / n});
  x = relu(linear(x, branch.hidden_weight.value, branch.hidden_bias.value));
  return softmax(linear(x, branch.output_weight.value, branch.output_bias.value));
}

template <typename T>
Tensor<T> TwoStreamNet<T>::forward(const Tensor<T>& clip_a, const Tensor<T>* clip_b) const {
  if (!branch_b_) return branch_forward(branch_a_, clip_a);
  if (clip_b == nullptr) throw std::invalid_argument("two-stream model needs an input for the second stream");
  return fuse_outputs(branch_forward(branch_a_, clip_a), branch_forward(*branch_b_, *clip_b), cfg_.fusion,
                      concat_head());
}

template <typename T>
std::vector<Parameter<T>*> TwoStreamNet<T>::parameters() {
  std::vector<Parameter<T>*> out;
  collect(branch_a_, out);
  if (branch_b_) collect(*branch_b_, out);
  if (head_) {
    out.push_back(&head_->weight);
    out.push_back(&head_->bias);
  }
  return out;
}

template <typename T>
std::vector<const Parameter<T>*> TwoStreamNet<T>::parameters() const {
  std::vector<const Parameter<T>*> out;
  collect(branch_a_, out);
  if (branch_b_) collect(*branch_b_, out);
  if (head_) {
    out.push_back(&head_->weight);
    out.push_back(&head_->bias);
  }
  return out;
}

template struct AttentionBlock<float>;
template struct AttentionBlock<double>;
template class TwoStreamNet<float>;
template class TwoStreamNet<double>;
template Tensor<float> fuse_outputs(const Tensor<float>&, const Tensor<float>&, const FusionConfig&,
                                    const ConcatHead<float>*);
template Tensor<double> fuse_outputs(const Tensor<double>&, const Tensor<double>&, const FusionConfig&,
                                     const ConcatHead<double>*);

}  // namespace strokenet
