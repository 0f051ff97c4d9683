// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include "strokenet/decision.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace strokenet {

void DecisionMethod::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("decision sigma must be > 0");
  if (stride < 1) throw std::invalid_argument("decision stride must be >= 1");
}

double DecisionMethod::sigma_for(std::size_t window) const {
  return sigma > 0.0 ? sigma : static_cast<double>(window) / 4.0;
}

std::string to_string(DecisionKind kind) {
  switch (kind) {
    case DecisionKind::no_window: return "no_window";
    case DecisionKind::gaussian: return "gaussian";
    case DecisionKind::mean: return "mean";
    case DecisionKind::vote: return "vote";
    case DecisionKind::vote_sliding: return "vote_sliding";
  }
  return "?";
}

DecisionKind parse_decision_kind(std::string_view name) {
  std::string s(name);
  for (auto& c : s) c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto k : {DecisionKind::no_window, DecisionKind::gaussian, DecisionKind::mean, DecisionKind::vote,
                 DecisionKind::vote_sliding}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown decision method '" + std::string(name) +
                              "' (expected no_window, gaussian, mean, vote or vote_sliding)");
}

void to_json(nlohmann::json& j, const DecisionMethod& m) {
  j = {{"method", to_string(m.kind)}, {"sigma", m.sigma}, {"stride", m.stride}};
}

void from_json(const nlohmann::json& j, DecisionMethod& m) {
  m = DecisionMethod{};
  if (j.is_string()) {
    m.kind = parse_decision_kind(j.get<std::string>());
    return;
  }
  if (j.contains("method")) m.kind = parse_decision_kind(j.at("method").get<std::string>());
  if (j.contains("sigma")) m.sigma = j.at("sigma").get<double>();
  if (j.contains("stride")) m.stride = j.at("stride").get<std::size_t>();
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

std::vector<std::size_t> sliding_starts(std::size_t frame_count, std::size_t window, std::size_t stride) {
  if (window == 0 || stride == 0) throw std::invalid_argument("window and stride must be positive");
  std::vector<std::size_t> starts;
  if (frame_count < window) return starts;
  const std::size_t last = frame_count - window;
  for (std::size_t s = 0; s <= last; s += stride) starts.push_back(s);
  if (starts.back() != last) starts.push_back(last);
  return starts;
}

namespace {

std::size_t class_count(std::span<const WindowPrediction> preds) {
  if (preds.empty()) throw std::invalid_argument("no window predictions to aggregate");
  const std::size_t k = preds.front().probs.size();
  if (k == 0) throw std::invalid_argument("window prediction has no classes");
  for (const auto& p : preds)
    if (p.probs.size() != k) throw std::invalid_argument("window predictions disagree on the class count");
  return k;
}

// Normalised Gaussian weights, computed relative to the nearest window so a
// tiny sigma does not underflow every weight to zero.
std::vector<double> gaussian_weights(std::span<const WindowPrediction> preds, double midpoint, double sigma) {
  std::vector<double> d2(preds.size());
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i].center() - midpoint;
    d2[i] = d * d;
    nearest = std::min(nearest, d2[i]);
  }
  double total = 0.0;
  for (auto& w : d2) {
    w = std::exp(-(w - nearest) / (2.0 * sigma * sigma));
    total += w;
  }
  for (auto& w : d2) w /= total;
  return d2;
}

std::size_t nearest_window(std::span<const WindowPrediction> preds, double midpoint) {
  std::size_t best = 0;
  double best_d = std::abs(preds[0].center() - midpoint);
  for (std::size_t i = 1; i < preds.size(); ++i) {
    const double d = std::abs(preds[i].center() - midpoint);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

}  // namespace

ClipDecision aggregate_clip(std::span<const WindowPrediction> preds, const DecisionMethod& method, double midpoint,
                            std::size_t window) {
  method.validate();
  const std::size_t k = class_count(preds);
  ClipDecision out;
  out.votes.assign(k, 0);
  for (const auto& p : preds) ++out.votes[argmax(p.probs)];
  out.probs.assign(k, 0.0);

  switch (method.kind) {
    case DecisionKind::no_window:
      out.probs = preds[nearest_window(preds, midpoint)].probs;
      break;
    case DecisionKind::mean:
      for (const auto& p : preds)
        for (std::size_t c = 0; c < k; ++c) out.probs[c] += p.probs[c];
      for (auto& v : out.probs) v /= static_cast<double>(preds.size());
      break;
    case DecisionKind::gaussian: {
      const auto w = gaussian_weights(preds, midpoint, method.sigma_for(window));
      for (std::size_t i = 0; i < preds.size(); ++i)
        for (std::size_t c = 0; c < k; ++c) out.probs[c] += w[i] * preds[i].probs[c];
      break;
    }
    case DecisionKind::vote:
    case DecisionKind::vote_sliding: {
      std::size_t winner = 0;
      for (std::size_t c = 1; c < k; ++c)
        if (out.votes[c] > out.votes[winner]) winner = c;
      // Every voter has `winner` as its strict-or-lowest argmax, so the mean
      // of their distributions does too.
      for (const auto& p : preds) {
        if (argmax(p.probs) != winner) continue;
        for (std::size_t c = 0; c < k; ++c) out.probs[c] += p.probs[c];
      }
      for (auto& v : out.probs) v /= static_cast<double>(out.votes[winner]);
      out.label = winner;
      return out;
    }
  }
  out.label = argmax(out.probs);
  return out;
}

std::vector<double> vote_sliding_window(std::span<const WindowPrediction> preds, std::size_t num_frames,
                                        std::size_t stroke_class) {
  std::vector<double> hits(num_frames, 0.0), cover(num_frames, 0.0);
  for (const auto& p : preds) {
    const double hit = argmax(p.probs) == stroke_class ? 1.0 : 0.0;
    const std::size_t end = std::min(num_frames, p.start + p.length);
    for (std::size_t f = p.start; f < end; ++f) {
      hits[f] += hit;
      cover[f] += 1.0;
    }
  }
  for (std::size_t f = 0; f < num_frames; ++f) hits[f] = cover[f] > 0.0 ? hits[f] / cover[f] : 0.0;
  return hits;
}

std::vector<double> frame_curve(std::span<const WindowPrediction> preds, std::size_t num_frames,
                                const DecisionMethod& method, std::size_t window, std::size_t stroke_class) {
  method.validate();
  if (method.kind == DecisionKind::vote || method.kind == DecisionKind::vote_sliding)
    return vote_sliding_window(preds, num_frames, stroke_class);

  std::vector<std::vector<WindowPrediction>> covering(num_frames);
  for (const auto& p : preds) {
    if (stroke_class >= p.probs.size()) throw std::invalid_argument("stroke class outside the prediction vector");
    const std::size_t end = std::min(num_frames, p.start + p.length);
    for (std::size_t f = p.start; f < end; ++f) covering[f].push_back(p);
  }
  std::vector<double> curve(num_frames, 0.0);
  for (std::size_t f = 0; f < num_frames; ++f) {
    if (covering[f].empty()) continue;
    const auto d = aggregate_clip(covering[f], method, static_cast<double>(f) + 0.5, window);
    curve[f] = d.probs[stroke_class];
  }
  return curve;
}

std::vector<Segment> extract_segments(std::span<const double> curve, double threshold, std::size_t min_length,
                                      std::size_t label) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("segment threshold must lie in (0, 1)");
  if (min_length < 1) throw std::invalid_argument("segment min_length must be >= 1");
  std::vector<Segment> out;
  std::size_t f = 0;
  while (f < curve.size()) {
    if (!(curve[f] >= threshold)) {
      ++f;
      continue;
    }
    const std::size_t begin = f;
    double sum = 0.0;
    while (f < curve.size() && curve[f] >= threshold) sum += curve[f++];
    if (f - begin >= min_length) out.push_back({begin, f, label, sum / static_cast<double>(f - begin)});
  }
  return out;
}

double temporal_iou(const Segment& a, const Segment& b) {
  const std::size_t lo = std::max(a.begin, b.begin);
  const std::size_t hi = std::min(a.end, b.end);
  const std::size_t inter = hi > lo ? hi - lo : 0;
  const std::size_t uni = a.length() + b.length() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

struct Ranked {
  std::size_t video;
  std::size_t index;
};

// Score descending, then begin, then video order.
std::vector<Ranked> rank_predictions(std::span<const VideoSegments> videos) {
  std::vector<Ranked> order;
  for (std::size_t v = 0; v < videos.size(); ++v)
    for (std::size_t i = 0; i < videos[v].predictions.size(); ++i) order.push_back({v, i});
  std::stable_sort(order.begin(), order.end(), [&](const Ranked& a, const Ranked& b) {
    const auto& pa = videos[a.video].predictions[a.index];
    const auto& pb = videos[b.video].predictions[b.index];
    if (pa.score != pb.score) return pa.score > pb.score;
    return pa.begin < pb.begin;
  });
  return order;
}

struct Match {
  bool matched = false;
  std::size_t gt = 0;
  double iou = 0.0;
};

// Greedy matching. `strict` requires IoU > threshold instead of >=.
std::vector<Match> greedy_match(std::span<const VideoSegments> videos, const std::vector<Ranked>& order,
                                double threshold, bool strict) {
  std::vector<std::vector<bool>> used(videos.size());
  for (std::size_t v = 0; v < videos.size(); ++v) used[v].assign(videos[v].ground_truth.size(), false);
  std::vector<Match> out(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& vid = videos[order[r].video];
    const auto& pred = vid.predictions[order[r].index];
    double best = -1.0;
    std::size_t best_g = 0;
    for (std::size_t g = 0; g < vid.ground_truth.size(); ++g) {
      if (used[order[r].video][g]) continue;
      const double iou = temporal_iou(pred, vid.ground_truth[g]);
      const bool ok = strict ? iou > threshold : iou >= threshold;
      if (ok && iou > best) {
        best = iou;
        best_g = g;
      }
    }
    if (best >= 0.0) {
      used[order[r].video][best_g] = true;
      out[r] = {true, best_g, best};
    }
  }
  return out;
}

std::vector<VideoSegments> filter_label(std::span<const VideoSegments> videos, std::size_t label) {
  std::vector<VideoSegments> out;
  for (const auto& v : videos) {
    VideoSegments f{v.video, {}, {}};
    for (const auto& s : v.predictions)
      if (s.label == label) f.predictions.push_back(s);
    for (const auto& s : v.ground_truth)
      if (s.label == label) f.ground_truth.push_back(s);
    out.push_back(std::move(f));
  }
  return out;
}

std::string threshold_key(double t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", t);
  return buf;
}

}  // namespace

double average_precision(std::span<const VideoSegments> videos, double iou_threshold) {
  std::size_t gt_total = 0;
  for (const auto& v : videos) gt_total += v.ground_truth.size();
  const auto order = rank_predictions(videos);
  if (gt_total == 0) return order.empty() ? 1.0 : 0.0;
  if (order.empty()) return 0.0;

  const auto matches = greedy_match(videos, order, iou_threshold, false);
  std::vector<double> precision(order.size());
  std::size_t tp = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    tp += matches[r].matched;
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
  }
  for (std::size_t r = order.size() - 1; r-- > 0;) precision[r] = std::max(precision[r], precision[r + 1]);
  // Recall steps by 1/|GT| at each true positive.
  double ap = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r)
    if (matches[r].matched) ap += precision[r];
  return ap / static_cast<double>(gt_total);
}

double average_precision(std::span<const Segment> preds, std::span<const Segment> gt, double iou_threshold) {
  const VideoSegments one{"", {preds.begin(), preds.end()}, {gt.begin(), gt.end()}};
  return average_precision(std::span(&one, 1), iou_threshold);
}

// Labels are ignored unless per_class, which averages AP over the labels
// seen on either side.
double ap_at(std::span<const VideoSegments> videos, double threshold, bool per_class) {
  if (!per_class) return average_precision(videos, threshold);
  std::vector<std::size_t> labels;
  for (const auto& v : videos) {
    for (const auto& s : v.predictions) labels.push_back(s.label);
    for (const auto& s : v.ground_truth) labels.push_back(s.label);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (labels.empty()) return 1.0;
  double sum = 0.0;
  for (auto label : labels) sum += average_precision(filter_label(videos, label), threshold);
  return sum / static_cast<double>(labels.size());
}

std::vector<double> map_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(static_cast<double>(50 + 5 * i) / 100.0);
  return t;
}

double map_score(std::span<const VideoSegments> videos, bool per_class) {
  const auto thresholds = map_thresholds();
  double sum = 0.0;
  for (double t : thresholds) sum += ap_at(videos, t, per_class);
  return sum / static_cast<double>(thresholds.size());
}

IouSummary iou_summary(std::span<const VideoSegments> videos) {
  const auto order = rank_predictions(videos);
  const auto matches = greedy_match(videos, order, 0.0, true);
  std::vector<std::vector<double>> per_gt(videos.size());
  for (std::size_t v = 0; v < videos.size(); ++v) per_gt[v].assign(videos[v].ground_truth.size(), 0.0);
  IouSummary s;
  double sum = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (!matches[r].matched) continue;
    per_gt[order[r].video][matches[r].gt] = matches[r].iou;
    sum += matches[r].iou;
    ++s.matched;
  }
  for (const auto& v : per_gt) s.gt_iou.insert(s.gt_iou.end(), v.begin(), v.end());
  s.mean_matched_iou = s.matched ? sum / static_cast<double>(s.matched) : 0.0;
  s.mean_gt_iou = s.gt_iou.empty() ? 0.0 : sum / static_cast<double>(s.gt_iou.size());
  return s;
}

ClassificationMetrics classification_metrics(std::span<const std::size_t> predicted,
                                             std::span<const std::size_t> truth, std::size_t num_classes) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("classification metrics: " + std::to_string(predicted.size()) +
                                " predictions for " + std::to_string(truth.size()) + " labels");
  }
  if (num_classes == 0) {
    for (auto l : predicted) num_classes = std::max(num_classes, l + 1);
    for (auto l : truth) num_classes = std::max(num_classes, l + 1);
  }
  ClassificationMetrics m;
  m.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] >= num_classes || truth[i] >= num_classes)
      throw std::invalid_argument("classification metrics: label outside [0, " + std::to_string(num_classes) + ")");
    ++m.confusion[truth[i]][predicted[i]];
    correct += predicted[i] == truth[i];
  }
  m.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
  return m;
}

nlohmann::json detection_report(std::span<const VideoSegments> videos, bool per_class) {
  nlohmann::json ap = nlohmann::json::object();
  double sum = 0.0;
  const auto thresholds = map_thresholds();
  for (double t : thresholds) {
    const double a = ap_at(videos, t, per_class);
    ap[threshold_key(t)] = a;
    sum += a;
  }
  std::size_t gt = 0, pred = 0;
  for (const auto& v : videos) {
    gt += v.ground_truth.size();
    pred += v.predictions.size();
  }
  const auto iou = iou_summary(videos);
  return {{"task", "detect"},
          {"videos", videos.size()},
          {"ground_truth", gt},
          {"predictions", pred},
          {"per_class", per_class},
          {"ap", ap},
          {"map", sum / static_cast<double>(thresholds.size())},
          {"map_50", ap[threshold_key(0.5)]},
          {"matched", iou.matched},
          {"mean_matched_iou", iou.mean_matched_iou},
          {"mean_gt_iou", iou.mean_gt_iou},
          {"gt_iou", iou.gt_iou}};
}

nlohmann::json classification_report(const ClassificationMetrics& m, std::size_t count) {
  return {{"task", "classify"}, {"count", count}, {"accuracy", m.accuracy}, {"confusion", m.confusion}};
}

}  // namespace strokenet
