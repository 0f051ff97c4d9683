// Copyright 2026 The StrokeNet Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "strokenet/errors.hpp"
#include "strokenet/pose.hpp"
#include "strokenet/rng.hpp"

using namespace strokenet;

namespace {

PersonPose random_person(Rng& rng, int width, int height) {
  PersonPose p;
  p.score = rng.uniform();
  for (auto& k : p.keypoints) {
    k = {rng.uniform(-5.0, width + 5.0), rng.uniform(-5.0, height + 5.0), rng.uniform()};
  }
  return p;
}

std::set<std::pair<int, int>> changed_pixels(const Image& img, const Image& background) {
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if (!(img.at(x, y) == background.at(x, y))) out.insert({x, y});
  return out;
}

std::set<std::pair<int, int>> nonzero_pixels(const Image& img) {
  return changed_pixels(img, Image(img.width(), img.height()));
}

}  // namespace

TEST(KeypointStream, EmptyPersons) {
  std::istringstream in(R"({"frame":0,"persons":[]})");
  auto frames = parse_keypoint_stream(in);
  ASSERT_EQ(frames.size(), 1u);
  EXPECT_EQ(frames[0].frame_index, 0u);
  EXPECT_TRUE(frames[0].persons.empty());
}

TEST(KeypointStream, GapsAreFilledWithEmptyFrames) {
  Rng rng(1);
  std::vector<PoseFrame> written = {{0, {random_person(rng, 32, 32)}}, {2, {random_person(rng, 32, 32)}}};
  std::stringstream ss;
  write_keypoint_stream(ss, written);
  auto frames = parse_keypoint_stream(ss, 3);
  ASSERT_EQ(frames.size(), 3u);
  EXPECT_EQ(frames[1].frame_index, 1u);
  EXPECT_TRUE(frames[1].persons.empty());
  EXPECT_EQ(frames[2], written[1]);
}

TEST(KeypointStream, PadsToFrameCount) {
  std::istringstream in("{\"frame\":1,\"persons\":[]}\n");
  EXPECT_EQ(parse_keypoint_stream(in, 4).size(), 4u);
}

TEST(KeypointStream, OutOfOrderLinesAreSorted) {
  std::istringstream in("{\"frame\":1,\"persons\":[]}\n{\"frame\":0,\"persons\":[]}\n");
  auto frames = parse_keypoint_stream(in);
  EXPECT_EQ(frames[0].frame_index, 0u);
  EXPECT_EQ(frames[1].frame_index, 1u);
}

TEST(KeypointStream, RoundTripProperty) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PoseFrame> frames(1 + rng.below(5));
    for (std::size_t i = 0; i < frames.size(); ++i) {
      frames[i].frame_index = i;
      for (std::uint64_t p = rng.below(3); p > 0; --p) frames[i].persons.push_back(random_person(rng, 64, 48));
    }
    std::stringstream ss;
    write_keypoint_stream(ss, frames);
    EXPECT_EQ(parse_keypoint_stream(ss), frames);
  }
}

TEST(KeypointStream, MalformedLineNamesLineNumber) {
  std::istringstream in("{\"frame\":0,\"persons\":[]}\n{\"frame\":1,\"persons\":[}\n");
  try {
    parse_keypoint_stream(in);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(KeypointStream, RejectsWrongKeypointCount) {
  std::string kps;
  for (int i = 0; i < 16; ++i) kps += std::string(i ? "," : "") + "[1,1,0.5]";
  std::istringstream in("{\"frame\":0,\"persons\":[{\"score\":0.9,\"keypoints\":[" + kps + "]}]}");
  EXPECT_THROW(parse_keypoint_stream(in), InputError);
}

TEST(KeypointStream, RejectsDuplicateFrame) {
  std::istringstream in("{\"frame\":0,\"persons\":[]}\n{\"frame\":0,\"persons\":[]}\n");
  EXPECT_THROW(parse_keypoint_stream(in), InputError);
}

TEST(Rasterize, BelowThresholdLeavesCanvas) {
  Rng rng(3);
  Image canvas(24, 24, {10, 20, 30});
  PersonPose p = random_person(rng, 24, 24);
  p.score = 1.0;
  for (auto& k : p.keypoints) k.confidence = 0.1;
  const Image before = canvas;
  rasterize_skeleton(canvas, {p}, SkeletonSpec::coco());
  EXPECT_EQ(canvas, before);
}

TEST(Rasterize, HorizontalEdgeMatchesIntegerLine) {
  SkeletonSpec spec = SkeletonSpec::coco();
  spec.line_thickness = 1;
  spec.keypoint_radius = 1;
  PersonPose p;
  p.score = 1.0;
  p.keypoints[kLeftShoulder] = {4.0, 7.0, 1.0};
  p.keypoints[kRightShoulder] = {15.0, 7.0, 1.0};
  Image canvas(20, 12);
  rasterize_skeleton(canvas, {p}, spec);

  std::set<std::pair<int, int>> expected;
  for (int x = 4; x <= 15; ++x) expected.insert({x, 7});
  for (int cx : {4, 15})
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx * dx + dy * dy <= 1) expected.insert({cx + dx, 7 + dy});
  EXPECT_EQ(nonzero_pixels(canvas), expected);
  EXPECT_EQ(canvas.at(10, 7), SkeletonSpec::group_color(LimbGroup::torso));
}

TEST(Rasterize, PersonOutsideCanvasIsClipped) {
  Rng rng(4);
  PersonPose p;
  p.score = 1.0;
  for (auto& k : p.keypoints) k = {rng.uniform(100.0, 200.0), rng.uniform(-300.0, -100.0), 1.0};
  Image canvas(16, 16);
  rasterize_skeleton(canvas, {p}, SkeletonSpec::coco());
  EXPECT_TRUE(nonzero_pixels(canvas).empty());

  for (auto& k : p.keypoints) k = {1e300, -1e300, 1.0};
  rasterize_skeleton(canvas, {p}, SkeletonSpec::coco());
  EXPECT_TRUE(nonzero_pixels(canvas).empty());
}

TEST(Compose, BlackEmptyAndOverlayEmpty) {
  Rng rng(5);
  Image base(8, 6);
  for (auto& b : base.mutable_bytes()) b = static_cast<std::uint8_t>(rng.below(256));
  PoseFrame none{0, {}};
  EXPECT_TRUE(nonzero_pixels(compose_frame(RenderMode::black, &base, none, SkeletonSpec::coco(), {8, 6})).empty());
  EXPECT_EQ(compose_frame(RenderMode::overlay, &base, none, SkeletonSpec::coco(), {8, 6}), base);
}

TEST(Compose, OverlayRequiresBase) {
  EXPECT_THROW(compose_frame(RenderMode::overlay, nullptr, PoseFrame{}, SkeletonSpec::coco(), {8, 6}),
               std::invalid_argument);
}

TEST(Compose, BlackAndOverlayDrawTheSamePixels) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    // Background channels stay below every palette component, so no drawn
    // pixel can coincide with its background.
    Image base(40, 30);
    for (auto& b : base.mutable_bytes()) b = static_cast<std::uint8_t>(rng.below(50));
    PoseFrame frame{0, {random_person(rng, 40, 30), random_person(rng, 40, 30)}};
    const auto spec = SkeletonSpec::coco();
    auto black = compose_frame(RenderMode::black, nullptr, frame, spec, {40, 30});
    auto overlay = compose_frame(RenderMode::overlay, &base, frame, spec, {40, 30});
    EXPECT_EQ(nonzero_pixels(black), changed_pixels(overlay, base));
  }
}

TEST(RenderProperties, PureMonotoneAndPaletteBound) {
  Rng rng(7);
  const auto spec = SkeletonSpec::coco();
  std::set<std::array<std::uint8_t, 3>> palette;
  for (const auto& e : spec.edges) palette.insert({e.color.r, e.color.g, e.color.b});
  for (const auto& c : spec.keypoint_colors) palette.insert({c.r, c.g, c.b});
  EXPECT_EQ(palette.size(), 6u);

  for (int trial = 0; trial < 30; ++trial) {
    PoseFrame frame{0, {}};
    for (std::uint64_t p = 1 + rng.below(3); p > 0; --p) frame.persons.push_back(random_person(rng, 48, 36));
    auto a = compose_frame(RenderMode::black, nullptr, frame, spec, {48, 36});
    auto b = compose_frame(RenderMode::black, nullptr, frame, spec, {48, 36});
    EXPECT_EQ(a, b);
    for (int y = 0; y < 36; ++y)
      for (int x = 0; x < 48; ++x) {
        const Rgb c = a.at(x, y);
        if (c == Rgb{}) continue;
        EXPECT_TRUE(palette.contains({c.r, c.g, c.b}));
      }

    auto stricter = spec;
    stricter.keypoint_threshold = spec.keypoint_threshold + rng.uniform(0.0, 0.7);
    stricter.person_threshold = spec.person_threshold + rng.uniform(0.0, 0.5);
    auto s = compose_frame(RenderMode::black, nullptr, frame, stricter, {48, 36});
    const auto loose = nonzero_pixels(a);
    for (const auto& px : nonzero_pixels(s)) EXPECT_TRUE(loose.contains(px));
  }
}

TEST(Png, RoundTripAndDeterministicBytes) {
  Rng rng(8);
  Image img(13, 7);
  for (auto& b : img.mutable_bytes()) b = static_cast<std::uint8_t>(rng.below(256));
  const auto dir = std::filesystem::temp_directory_path() / "strokenet_png_test";
  std::filesystem::create_directories(dir);
  write_png(dir / "a.png", img);
  write_png(dir / "b.png", img);
  EXPECT_EQ(read_png(dir / "a.png"), img);
  EXPECT_EQ(std::filesystem::file_size(dir / "a.png"), std::filesystem::file_size(dir / "b.png"));
  EXPECT_THROW(read_png(dir / "missing.png"), InputError);
  std::filesystem::remove_all(dir);
}
