#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pixelhand/error.hpp"
#include "pixelhand/geometry.hpp"

namespace pixelhand {
namespace {

constexpr double kPi = std::numbers::pi;

std::array<Point, 4> pts(std::initializer_list<Point> list) {
  std::array<Point, 4> out{};
  std::copy(list.begin(), list.end(), out.begin());
  return out;
}

TEST(RestoreBoxTest, IdentityRotation) {
  const RotatedBox box = restore_box({10, 10}, {5, 5, 5, 5, 0.0});
  EXPECT_LE(oracle::max_vertex_error(box.vertices, pts({{5, 5}, {15, 5}, {15, 15}, {5, 15}})), 1e-12);
}

TEST(RestoreBoxTest, UnitSquareAroundOrigin) {
  const RotatedBox box = restore_box({0, 0}, {1, 1, 1, 1, 0.0});
  EXPECT_LE(oracle::max_vertex_error(box.vertices, pts({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}})), 1e-12);
  EXPECT_DOUBLE_EQ(box.area(), 4.0);
}

TEST(RestoreBoxTest, RotatedCaseMatchesForwardRotationOracle) {
  const RotatedBox box = restore_box({20, 20}, {4, 6, 2, 3, kPi / 6});
  const auto want = oracle::forward_rotation({20, 20}, 4, 6, 2, 3, kPi / 6);
  EXPECT_LE(oracle::max_vertex_error(box.vertices, want), 1e-9);
}

TEST(RestoreBoxTest, PositiveAngleTurnsCounterClockwiseOnScreen) {
  const RotatedBox box = restore_box({0, 0}, {1, 1, 1, 1, 0.3});
  // Bottom edge p3 -> p2 rises (y decreases) for a positive angle.
  EXPECT_LT(box.vertices[2].y, box.vertices[3].y);
  EXPECT_NEAR(box.angle(), 0.3, 1e-12);
}

TEST(RestoreBoxTest, RandomInstancesKeepRectangleInvariants) {
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const Point p{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    const PixelGeometry g{rng.uniform(0, 50), rng.uniform(0, 50), rng.uniform(0.01, 50),
                          rng.uniform(0.01, 50), rng.uniform(-kPi / 2 + 1e-3, kPi / 2 - 1e-3)};
    const RotatedBox box = restore_box(p, g);
    EXPECT_NEAR(box.width(), g.left + g.right, 1e-9);
    EXPECT_NEAR(box.height(), g.top + g.bottom, 1e-9);
    EXPECT_NO_THROW(canonical_box(box));
    EXPECT_LE(oracle::max_vertex_error(
                  box.vertices, oracle::forward_rotation(p, g.top, g.right, g.bottom, g.left, g.theta)),
              1e-9);
  }
}

TEST(RestoreBoxTest, MirrorAngleGivesMirrorImage) {
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const Point p{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const PixelGeometry g{rng.uniform(0.1, 20), rng.uniform(0.1, 20), rng.uniform(0.1, 20),
                          rng.uniform(0.1, 20), rng.uniform(-1.5, 1.5)};
    const RotatedBox box = restore_box(p, g);
    // Reflection about x = p.x swaps left and right and negates the angle.
    const RotatedBox mirrored = restore_box(p, {g.top, g.left, g.bottom, g.right, -g.theta});
    std::array<Point, 4> reflected{};
    for (std::size_t k = 0; k < 4; ++k) {
      reflected[k] = {2 * p.x - box.vertices[k].x, box.vertices[k].y};
    }
    // Reflection reverses winding, so compare against the reversed order too.
    std::array<Point, 4> reversed{reflected[1], reflected[0], reflected[3], reflected[2]};
    EXPECT_LE(oracle::max_vertex_error(mirrored.vertices, reversed), 1e-9);
  }
}

TEST(RestoreBoxTest, RejectsInvalidGeometry) {
  EXPECT_THROW(restore_box({0, 0}, {0, 1, 0, 1, 0.0}), DegenerateGeometryError);
  EXPECT_THROW(restore_box({0, 0}, {1, 0, 1, 0, 0.0}), DegenerateGeometryError);
  EXPECT_THROW(restore_box({0, 0}, {-1, 1, 2, 1, 0.0}), ConfigurationError);
  EXPECT_THROW(restore_box({0, 0}, {1, 1, 1, 1, kPi / 2}), ConfigurationError);
}

TEST(PixelGeometryTest, InvertsRestoreBox) {
  Rng rng(23);
  for (int i = 0; i < 200; ++i) {
    const Point p{rng.uniform(0, 100), rng.uniform(0, 100)};
    const PixelGeometry g{rng.uniform(0.1, 30), rng.uniform(0.1, 30), rng.uniform(0.1, 30),
                          rng.uniform(0.1, 30), rng.uniform(-1.5, 1.5)};
    const PixelGeometry back = pixel_geometry(restore_box(p, g).frame(), p);
    EXPECT_NEAR(back.top, g.top, 1e-9);
    EXPECT_NEAR(back.right, g.right, 1e-9);
    EXPECT_NEAR(back.bottom, g.bottom, 1e-9);
    EXPECT_NEAR(back.left, g.left, 1e-9);
    EXPECT_NEAR(back.theta, g.theta, 1e-12);
  }
}

TEST(CanonicalBoxTest, RelabelsIntoAngleRangeWithoutMovingVertices) {
  const RotatedBox upright = make_box({0, 0}, 4, 2, 0.2);
  for (int shift = 0; shift < 4; ++shift) {
    RotatedBox rolled = upright;
    for (std::size_t k = 0; k < 4; ++k) rolled.vertices[k] = upright.vertices[(k + shift) % 4];
    const RotatedBox c = canonical_box(rolled);
    EXPECT_GT(c.angle(), -kPi / 2);
    EXPECT_LT(c.angle(), kPi / 2);
    EXPECT_LE(oracle::vertex_set_error(upright.vertices, c.vertices), 1e-12);
  }
}

TEST(CanonicalBoxTest, FixesMirroredWinding) {
  const RotatedBox box = make_box({3, 4}, 5, 2, -0.4);
  RotatedBox mirrored;
  mirrored.vertices = {box.vertices[1], box.vertices[0], box.vertices[3], box.vertices[2]};
  const RotatedBox c = canonical_box(mirrored);
  EXPECT_LE(oracle::max_vertex_error(c.vertices, box.vertices), 1e-12);
}

TEST(CanonicalBoxTest, RejectsNonRectangles) {
  RotatedBox skew;
  skew.vertices = {Point{0, 0}, Point{4, 0}, Point{5, 2}, Point{1, 2}};
  EXPECT_THROW(canonical_box(skew), ConfigurationError);
  RotatedBox flat;
  flat.vertices = {Point{0, 0}, Point{4, 0}, Point{4, 0}, Point{0, 0}};
  EXPECT_THROW(canonical_box(flat), DegenerateGeometryError);
}

TEST(AxisIouTest, MatchesIntervalOracle) {
  Rng rng(24);
  for (int i = 0; i < 500; ++i) {
    const AxisBox a{rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0.5, 10), rng.uniform(0.5, 10)};
    const AxisBox b{rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0.5, 10), rng.uniform(0.5, 10)};
    EXPECT_NEAR(axis_iou(a, b), oracle::interval_iou(a, b), 1e-14);
  }
}

TEST(RotatedIouTest, TrivialCases) {
  const RotatedBox a = make_box({0, 0}, 3, 2, 0.4);
  EXPECT_NEAR(rotated_iou(a, a), 1.0, 1e-12);
  EXPECT_EQ(rotated_iou(a, make_box({100, 0}, 3, 2, 0.4)), 0.0);
  const RotatedBox u0 = make_box(AxisBox{0, 0, 1, 1});
  const RotatedBox u1 = make_box(AxisBox{0.5, 0, 1, 1});
  EXPECT_NEAR(rotated_iou(u0, u1), 1.0 / 3.0, 1e-12);
}

TEST(RotatedIouTest, SymmetricBoundedAndAxisConsistent) {
  Rng rng(25);
  for (int i = 0; i < 300; ++i) {
    const RotatedBox a = oracle::random_box(rng, 0, 20, 1, 15, 1.5);
    const RotatedBox b = oracle::random_box(rng, 0, 20, 1, 15, 1.5);
    const double ab = rotated_iou(a, b);
    EXPECT_NEAR(ab, rotated_iou(b, a), 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    const AxisBox x{rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0.5, 10), rng.uniform(0.5, 10)};
    const AxisBox y{rng.uniform(0, 20), rng.uniform(0, 20), rng.uniform(0.5, 10), rng.uniform(0.5, 10)};
    EXPECT_NEAR(rotated_iou(make_box(x), make_box(y)), oracle::interval_iou(x, y), 1e-12);
  }
}

TEST(RotatedIouTest, AgreesWithMonteCarloOracle) {
  Rng rng(26);
  for (int i = 0; i < 10; ++i) {
    const RotatedBox a = oracle::random_box(rng, 0, 10, 4, 12, 1.5);
    const RotatedBox b = oracle::random_box(rng, 0, 10, 4, 12, 1.5);
    EXPECT_NEAR(rotated_iou(a, b), oracle::monte_carlo_iou(a, b, 1'000'000, 100 + i), 2e-3);
  }
}

TEST(NmsTest, TrivialCases) {
  const RotatedBox a = make_box({5, 5}, 4, 4, 0.1, 0.9);
  EXPECT_EQ(nms(std::vector<RotatedBox>{a}, 0.2).size(), 1u);
  RotatedBox b = a;
  b.score = 0.8;
  const auto kept = nms(std::vector<RotatedBox>{b, a}, 0.2);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].score, 0.9);
  EXPECT_TRUE(nms(std::vector<RotatedBox>{}, 0.2).empty());
}

TEST(NmsTest, MatchesBruteForceAndKeepsAnAntichain) {
  Rng rng(27);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RotatedBox> boxes;
    const std::size_t n = 1 + rng.below(50);
    for (std::size_t i = 0; i < n; ++i) boxes.push_back(oracle::random_box(rng, 0, 60, 4, 20, 1.5));
    const auto got = nms(boxes, 0.2);
    const auto want = oracle::brute_force_nms(boxes, 0.2, rotated_iou);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], want[i]);
    for (std::size_t i = 0; i < got.size(); ++i) {
      for (std::size_t j = i + 1; j < got.size(); ++j) EXPECT_LE(rotated_iou(got[i], got[j]), 0.2);
    }
  }
}

TEST(EncodeTest, NoBoxesGivesEmptyMaps) {
  const GeometryMaps maps = encode_ground_truth(std::vector<RotatedBox>{}, 8, 9);
  EXPECT_EQ(maps, GeometryMaps(8, 9));
}

TEST(EncodeTest, AxisAlignedBoxCentrePixel) {
  const std::vector<RotatedBox> boxes{make_box(AxisBox{5, 5, 10, 10})};
  const GeometryMaps maps = encode_ground_truth(boxes, 20, 20, 0.0);
  EXPECT_EQ(maps.score.at(0, 10, 10), 1.0);
  EXPECT_EQ(maps.rotation.at(0, 10, 10), 0.0);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_NEAR(maps.distance.at(c, 10, 10), 5.0, 1e-12);
  EXPECT_EQ(maps.score.at(0, 2, 2), 0.0);
  EXPECT_NO_THROW(validate_maps(maps));
}

TEST(EncodeTest, ShrinkMarginPerSide) {
  const std::vector<RotatedBox> boxes{make_box(AxisBox{0, 0, 20, 10})};
  const GeometryMaps maps = encode_ground_truth(boxes, 12, 22, 0.1);
  // Margins are 2 px horizontally and 1 px vertically.
  EXPECT_EQ(maps.score.at(0, 5, 2), 1.0);
  EXPECT_EQ(maps.score.at(0, 5, 1), 0.0);
  EXPECT_EQ(maps.score.at(0, 1, 10), 1.0);
  EXPECT_EQ(maps.score.at(0, 0, 10), 0.0);
  EXPECT_EQ(maps.score.at(0, 5, 18), 1.0);
  EXPECT_EQ(maps.score.at(0, 5, 19), 0.0);
}

TEST(EncodeTest, RotatedRoundTripThroughRestore) {
  const RotatedBox box = make_box({30, 30}, 24, 14, kPi / 6);
  const GeometryMaps maps = encode_ground_truth(std::vector<RotatedBox>{box}, 64, 64);
  Rng rng(28);
  std::vector<std::pair<std::size_t, std::size_t>> positives;
  for (std::size_t y = 0; y < 64; ++y) {
    for (std::size_t x = 0; x < 64; ++x) {
      if (maps.score.at(0, y, x) > 0.5) positives.emplace_back(y, x);
    }
  }
  ASSERT_GE(positives.size(), 10u);
  for (int i = 0; i < 10; ++i) {
    const auto [y, x] = positives[rng.below(positives.size())];
    const PixelGeometry g{maps.distance.at(0, y, x), maps.distance.at(1, y, x),
                          maps.distance.at(2, y, x), maps.distance.at(3, y, x),
                          maps.rotation.at(0, y, x)};
    const RotatedBox back = restore_box({static_cast<double>(x), static_cast<double>(y)}, g);
    EXPECT_LE(oracle::vertex_set_error(box.vertices, back.vertices), 0.5);
  }
}

TEST(EncodeTest, SmallestBoxOwnsOverlap) {
  const RotatedBox big = make_box(AxisBox{0, 0, 30, 30});
  const RotatedBox small = make_box(AxisBox{10, 10, 8, 8});
  for (const auto& order : {std::vector<RotatedBox>{big, small}, std::vector<RotatedBox>{small, big}}) {
    const GeometryMaps maps = encode_ground_truth(order, 32, 32, 0.0);
    EXPECT_NEAR(maps.distance.at(0, 14, 14), 4.0, 1e-12);
    EXPECT_NEAR(maps.distance.at(0, 25, 25), 25.0, 1e-12);
  }
}

TEST(GeometryMapsTest, PackUnpackAndValidation) {
  GeometryMaps maps(3, 4);
  maps.score.at(0, 1, 1) = 1.0;
  maps.distance.at(2, 1, 1) = 3.0;
  EXPECT_EQ(GeometryMaps::unpack(maps.pack()), maps);
  EXPECT_THROW(GeometryMaps::unpack(Tensor(5, 3, 4)), ConfigurationError);
  maps.score.at(0, 0, 0) = 1.5;
  EXPECT_THROW(validate_maps(maps), ConfigurationError);
}

}  // namespace
}  // namespace pixelhand
