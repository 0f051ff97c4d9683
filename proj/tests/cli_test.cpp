// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "strokenet/image.hpp"
#include "strokenet/pipeline.hpp"

using namespace strokenet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("strokenet_cli_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& rel) const { return (path_ / rel).string(); }

 private:
  fs::path path_;
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "strokenet");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  return files;
}

// Four 16-frame clips, one per class.
std::string small_spec(const TempDir& dir, std::size_t frames = 16) {
  json spec = SyntheticSpec::classification();
  spec["clips_per_class"] = 1;
  spec["frame_count"] = frames;
  spec["stroke_length"] = {frames, frames};
  const auto path = dir / ("spec_" + std::to_string(frames) + ".json");
  write_file(path, spec.dump());
  return path;
}

std::string write_config(const TempDir& dir, const std::string& name, json extra) {
  json cfg = {{"model", {{"num_classes", 4}}}, {"optimizer", {{"epochs", 1}}}};
  cfg.merge_patch(extra);
  const auto path = dir / name;
  write_file(path, cfg.dump());
  return path;
}

}  // namespace

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({"synth"}).code, 2);  // --out is required
  EXPECT_EQ(run({"--profile", "laptop", "synth", "--out", "x"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliSynth, FixedSeedGivesIdenticalTree) {
  TempDir dir("synth");
  const auto spec = small_spec(dir);
  ASSERT_EQ(run({"synth", "--spec", spec, "--out", dir / "a"}).code, 0);
  ASSERT_EQ(run({"synth", "--spec", spec, "--out", dir / "b"}).code, 0);
  const auto a = tree(dir / "a");
  EXPECT_EQ(a, tree(dir / "b"));

  // The manifest lists exactly what was written, besides itself.
  const auto manifest = json::parse(a.at("manifest.json"));
  std::set<std::string> listed;
  for (const auto& f : manifest.at("files")) listed.insert(f.get<std::string>());
  listed.insert("manifest.json");
  std::set<std::string> walked;
  for (const auto& [name, bytes] : a) walked.insert(name);
  EXPECT_EQ(listed, walked);

  ASSERT_EQ(run({"synth", "--spec", spec, "--seed", "5", "--out", dir / "c"}).code, 0);
  EXPECT_NE(tree(dir / "c"), a);
}

TEST(CliSynth, BadInputs) {
  TempDir dir("synth_bad");
  EXPECT_EQ(run({"synth", "--spec", dir / "missing.json", "--out", dir / "x"}).code, 2);
  write_file(dir / "file", "");
  EXPECT_NE(run({"synth", "--out", dir / "file/sub"}).code, 0);
  EXPECT_EQ(run({"synth", "--preset", "huge", "--out", dir / "y"}).code, 2);
}

TEST(CliRender, EmptyPosesGiveBlackOrUnchangedFrames) {
  TempDir dir("render");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir), "--out", dir / "ds"}).code, 0);
  const auto frames = dir / "ds/clip_0000/frames";
  write_file(dir / "empty.jsonl", "");
  ASSERT_EQ(run({"render", "--frames", frames, "--poses", dir / "empty.jsonl", "--mode", "black", "--out", dir / "black"})
                .code,
            0);
  ASSERT_EQ(run({"render", "--frames", frames, "--poses", dir / "empty.jsonl", "--mode", "overlay", "--out",
                 dir / "overlay"})
                .code,
            0);
  const auto source = load_frame_sequence(frames);
  const auto black = load_frame_sequence(dir / "black");
  const auto overlay = load_frame_sequence(dir / "overlay");
  ASSERT_EQ(black.frame_count(), 16u);
  EXPECT_EQ(overlay.frames, source.frames);
  for (const auto& img : black.frames) {
    const auto b = img.bytes();
    EXPECT_TRUE(std::all_of(b.begin(), b.end(), [](auto v) { return v == 0; }));
  }
}

TEST(CliRender, RerunIsByteIdenticalAndMatchesLibrary) {
  TempDir dir("render_det");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir), "--out", dir / "ds"}).code, 0);
  const auto clip = dir / "ds/clip_0002";
  for (auto out : {"r1", "r2"}) {
    ASSERT_EQ(run({"render", "--frames", clip + "/frames", "--poses", clip + "/keypoints.jsonl", "--mode", "overlay",
                   "--out", dir / out})
                  .code,
              0);
  }
  EXPECT_EQ(tree(dir / "r1"), tree(dir / "r2"));
  const auto frames = load_frame_sequence(clip + "/frames");
  const auto expected = render_stream(frames, parse_keypoint_stream(fs::path(clip + "/keypoints.jsonl")),
                                      StreamInput::prgb);
  EXPECT_EQ(load_frame_sequence(dir / "r1").frames, expected.frames);
}

TEST(CliRender, CountMismatchWarnsAndUsesShorterLength) {
  TempDir dir("render_short");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir), "--out", dir / "ds"}).code, 0);
  const auto clip = dir / "ds/clip_0000";
  std::ifstream in(clip + "/keypoints.jsonl");
  std::string line, kept;
  for (int i = 0; i < 10 && std::getline(in, line); ++i) kept += line + "\n";
  write_file(dir / "ten.jsonl", kept);
  const auto r = run({"render", "--frames", clip + "/frames", "--poses", dir / "ten.jsonl", "--out", dir / "out"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(load_frame_sequence(dir / "out").frame_count(), 10u);
  EXPECT_EQ(run({"render", "--frames", dir / "none", "--poses", dir / "ten.jsonl", "--out", dir / "o2"}).code, 2);
}

TEST(CliTrain, ZeroEpochsWritesInitialisation) {
  TempDir dir("train0");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir), "--out", dir / "ds"}).code, 0);
  const auto cfg = write_config(dir, "cfg.json", {{"train_data", "ds"}, {"optimizer", {{"epochs", 0}}}, {"seed", 7}});
  ASSERT_EQ(run({"--threads", "1", "train", "--config", cfg, "--out", dir / "run"}).code, 0);
  std::ostringstream init;
  auto model = ModelConfig::desk();
  model.num_classes = 4;
  save_checkpoint(init, TwoStreamNet<float>::init(model, 7));
  EXPECT_EQ(read_file(dir / "run/final.ckpt"), init.str());
  EXPECT_EQ(read_file(dir / "run/best.ckpt"), init.str());
  EXPECT_EQ(read_file(dir / "run/train_log.jsonl"), "");
}

TEST(CliTrain, SingleThreadRunsAreByteIdentical) {
  TempDir dir("train_det");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir), "--out", dir / "ds"}).code, 0);
  const auto cfg = write_config(dir, "cfg.json", {{"train_data", "ds/manifest.json"}, {"optimizer", {{"epochs", 2}}}});
  ASSERT_EQ(run({"--threads", "1", "train", "--config", cfg, "--out", dir / "run"}).code, 0);
  const auto first = tree(dir / "run");
  ASSERT_EQ(run({"--threads", "1", "train", "--config", cfg, "--out", dir / "run"}).code, 0);
  EXPECT_EQ(first, tree(dir / "run"));
  std::istringstream log(first.at("train_log.jsonl"));
  std::string line;
  int epochs = 0;
  while (std::getline(log, line)) EXPECT_EQ(json::parse(line).at("epoch"), ++epochs);
  EXPECT_EQ(epochs, 2);
}

TEST(CliTrain, Failures) {
  TempDir dir("train_bad");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir), "--out", dir / "ds"}).code, 0);
  EXPECT_EQ(run({"train", "--config", dir / "none.json"}).code, 2);
  const auto no_data = write_config(dir, "nodata.json", {{"train_data", "missing/manifest.json"}});
  EXPECT_EQ(run({"train", "--config", no_data}).code, 2);
  const auto diverge = write_config(
      dir, "diverge.json",
      {{"train_data", "ds"}, {"optimizer", {{"epochs", 50}, {"learning_rate", 1e6}}}});
  const auto r = run({"--threads", "1", "train", "--config", diverge, "--out", dir / "run"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("non-finite loss at epoch"), std::string::npos) << r.err;
}

TEST(CliClassify, MatchesLibraryAndChecksCheckpoint) {
  TempDir dir("classify");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir), "--out", dir / "ds"}).code, 0);
  const auto cfg = write_config(dir, "cfg.json", {{"train_data", "ds"}});
  ASSERT_EQ(run({"--threads", "1", "train", "--config", cfg, "--out", dir / "run"}).code, 0);
  const auto ckpt = dir / "run/final.ckpt";

  const auto r = run({"classify", "--config", cfg, "--checkpoint", ckpt, "--input", dir / "ds/clip_0001",
                      "--decision", "gaussian"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto got = json::parse(r.out);
  const auto probs = got.at("probs").get<std::vector<double>>();
  EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-6);
  EXPECT_EQ(got.at("method"), "gaussian");

  auto run_cfg = load_run_config(cfg, std::nullopt);
  const auto net = load_checkpoint(ckpt, &run_cfg.model);
  const auto video = load_video_dir(dir / "ds/clip_0001", run_cfg);
  run_cfg.decision.kind = DecisionKind::gaussian;
  EXPECT_EQ(got, json::parse(json(to_json(classify_clip(net, video, run_cfg.decision, 8))).dump()));

  // A manifest gives one result per clip.
  const auto all = run({"classify", "--config", cfg, "--checkpoint", ckpt, "--input", dir / "ds"});
  ASSERT_EQ(all.code, 0);
  EXPECT_EQ(json::parse(all.out).size(), 4u);

  const auto wide = write_config(dir, "wide.json", {{"model", {{"num_classes", 5}}}});
  EXPECT_EQ(run({"classify", "--config", wide, "--checkpoint", ckpt, "--input", dir / "ds/clip_0001"}).code, 3);
  EXPECT_EQ(run({"classify", "--config", cfg, "--checkpoint", dir / "none.ckpt", "--input", dir / "ds/clip_0001"}).code,
            2);
  EXPECT_EQ(run({"classify", "--config", cfg, "--checkpoint", ckpt, "--input", dir / "ds/clip_0001", "--decision",
                 "median"})
                .code,
            2);
}

TEST(CliDetect, ShortVideoWarnsWithNoSegments) {
  TempDir dir("detect_short");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir, 10), "--out", dir / "ds"}).code, 0);
  const auto cfg = write_config(dir, "cfg.json",
                                {{"task", "detect"}, {"model", {{"num_classes", 2}}}, {"train_data", "ds"},
                                 {"optimizer", {{"epochs", 0}}}});
  ASSERT_EQ(run({"train", "--config", cfg, "--out", dir / "run"}).code, 0);
  const auto r = run({"detect", "--config", cfg, "--checkpoint", dir / "run/final.ckpt", "--input",
                      dir / "ds/clip_0000", "--out", dir / "seg.json"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  const auto segs = load_segment_files(dir / "seg.json");
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_TRUE(segs[0].segments.empty());
  EXPECT_EQ(run({"detect", "--config", cfg, "--checkpoint", dir / "run/final.ckpt", "--input", dir / "ds/clip_0000",
                 "--threshold", "1.0"})
                .code,
            2);

  const auto four = write_config(dir, "four.json", {{"train_data", "ds"}, {"optimizer", {{"epochs", 0}}}});
  ASSERT_EQ(run({"train", "--config", four, "--out", dir / "run4"}).code, 0);
  EXPECT_EQ(run({"detect", "--config", four, "--checkpoint", dir / "run4/final.ckpt", "--input", dir / "ds/clip_0000"})
                .code,
            3);
}

TEST(CliEvaluate, DetectionAgainstHandBuiltFixture) {
  TempDir dir("evaluate");
  write_file(dir / "gt.json", R"({"video":"v","frame_count":100,"strokes":[{"begin":0,"end":10,"label":3},)"
                              R"({"begin":20,"end":30,"label":5}]})");
  write_file(dir / "pred.json", R"([{"video":"v","segments":[{"begin":0,"end":10,"label":0,"score":0.9},)"
                                R"({"begin":22,"end":31,"label":0,"score":0.8},)"
                                R"({"begin":50,"end":60,"label":0,"score":0.7}]}])");
  const auto r = run({"evaluate", "--task", "detect", "--pred", dir / "pred.json", "--gt", dir / "gt.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rep = json::parse(r.out);
  // IoUs are 1 and 8/11: AP is 1 up to threshold 0.70 and 1/2 beyond.
  EXPECT_DOUBLE_EQ(rep.at("map").get<double>(), 0.75);
  EXPECT_DOUBLE_EQ(rep.at("map_50").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(rep.at("ap").at("0.75").get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(rep.at("mean_matched_iou").get<double>(), (1.0 + 8.0 / 11.0) / 2.0);
  EXPECT_FALSE(rep.contains("reference"));

  const auto self = run({"evaluate", "--pred", dir / "gt.json", "--gt", dir / "gt.json"});
  EXPECT_DOUBLE_EQ(json::parse(self.out).at("map").get<double>(), 1.0);

  write_file(dir / "empty.json", R"({"video":"v","segments":[]})");
  const auto empty = run({"evaluate", "--pred", dir / "empty.json", "--gt", dir / "gt.json"});
  EXPECT_DOUBLE_EQ(json::parse(empty.out).at("map").get<double>(), 0.0);

  write_file(dir / "other.json", R"({"video":"w","segments":[]})");
  EXPECT_EQ(run({"evaluate", "--pred", dir / "other.json", "--gt", dir / "gt.json"}).code, 4);
  EXPECT_EQ(run({"evaluate", "--pred", dir / "none.json", "--gt", dir / "gt.json"}).code, 2);

  const auto paper = run({"--profile", "paper", "evaluate", "--pred", dir / "gt.json", "--gt", dir / "gt.json"});
  EXPECT_DOUBLE_EQ(json::parse(paper.out).at("reference").at("detection").at("rgb_prgb").at("test_map").get<double>(),
                   0.110);
}

TEST(CliEvaluate, ClassificationAgainstManifest) {
  TempDir dir("evaluate_cls");
  ASSERT_EQ(run({"synth", "--spec", small_spec(dir), "--out", dir / "ds"}).code, 0);
  json perfect = json::array(), shifted = json::array();
  for (int i = 0; i < 4; ++i) {
    const std::string name = "clip_000" + std::to_string(i);
    perfect.push_back({{"video", name}, {"label", i}});
    shifted.push_back({{"video", name}, {"label", i == 0 ? 1 : i}});
  }
  write_file(dir / "perfect.json", perfect.dump());
  write_file(dir / "shifted.json", shifted.dump());
  const auto a = run({"evaluate", "--task", "classify", "--pred", dir / "perfect.json", "--gt", dir / "ds"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_DOUBLE_EQ(json::parse(a.out).at("accuracy").get<double>(), 1.0);
  const auto b = run({"evaluate", "--task", "classify", "--pred", dir / "shifted.json", "--gt",
                      dir / "ds/manifest.json"});
  const auto rep = json::parse(b.out);
  EXPECT_DOUBLE_EQ(rep.at("accuracy").get<double>(), 0.75);
  EXPECT_EQ(rep.at("confusion")[0][1], 1);

  write_file(dir / "partial.json", json::array({perfect[0]}).dump());
  EXPECT_EQ(run({"evaluate", "--task", "classify", "--pred", dir / "partial.json", "--gt", dir / "ds"}).code, 4);
}
