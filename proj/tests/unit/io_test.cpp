#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

#include "oracles.hpp"
#include "pixelhand/box_io.hpp"
#include "pixelhand/error.hpp"
#include "pixelhand/mot_io.hpp"
#include "pixelhand/tensor_io.hpp"
#include "pixelhand/text_format.hpp"
#include "pixelhand/weights_io.hpp"

namespace pixelhand {
namespace {

TEST(TextFormatTest, ShortestRoundTrip) {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.below(80)) - 40);
    const double back = parse_double(format_double(v));
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back), std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v));
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(3.0), "3");
}

TEST(TextFormatTest, RejectsJunk) {
  EXPECT_THROW(parse_double("1.5x"), ParseError);
  EXPECT_THROW(parse_double(""), ParseError);
  EXPECT_THROW(parse_double("nan"), ParseError);
  EXPECT_THROW(parse_integer("2.5"), ParseError);
  EXPECT_EQ(parse_integer(" 42 "), 42);
}

TEST(TensorIoTest, LittleEndianLayout) {
  std::ostringstream out;
  write_array(out, RawArray{{2}, {1.0, -2.0}});
  const std::string bytes = out.str();
  ASSERT_EQ(bytes.size(), 4u + 4u + 4u + 16u);
  EXPECT_EQ(bytes.substr(0, 4), "PWT1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2u);
  // 1.0 is 0x3FF0000000000000; the last byte comes last.
  EXPECT_EQ(static_cast<unsigned char>(bytes[12 + 7]), 0x3Fu);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12 + 6]), 0xF0u);
}

TEST(TensorIoTest, MultiRecordRoundTripIsBitExact) {
  Rng rng(32);
  std::vector<Tensor> tensors{oracle::random_tensor(rng, 3, 4, 5), oracle::random_tensor(rng, 1, 1, 1),
                              oracle::random_tensor(rng, 6, 7, 2)};
  tensors[0].at(0, 0, 0) = std::numeric_limits<double>::denorm_min();
  const auto path = std::filesystem::temp_directory_path() / "pixelhand_io_test.pwt";
  save_tensors(path, tensors);
  EXPECT_EQ(load_tensors(path), tensors);
  EXPECT_THROW(load_tensor(path), ParseError);
  save_tensor(path, tensors[1]);
  EXPECT_EQ(load_tensor(path), tensors[1]);
  std::filesystem::remove(path);
  EXPECT_THROW(load_tensors(path), IoError);
}

TEST(TensorIoTest, RejectsCorruptInput) {
  std::istringstream bad_magic("XXXX");
  EXPECT_THROW(read_array(bad_magic), ParseError);
  std::ostringstream out;
  write_array(out, RawArray{{3}, {1, 2, 3}});
  std::string bytes = out.str();
  bytes.resize(bytes.size() - 3);
  std::istringstream truncated(bytes);
  EXPECT_THROW(read_array(truncated), ParseError);
}

TEST(BoxIoTest, RoundTripIsBitExact) {
  Rng rng(33);
  std::vector<RotatedBox> boxes;
  for (int i = 0; i < 50; ++i) boxes.push_back(oracle::random_box(rng, 0, 300, 2, 80, 1.5));
  std::stringstream text;
  write_boxes(text, boxes);
  EXPECT_EQ(parse_boxes(text), boxes);
}

TEST(BoxIoTest, AxisAlignedImportAndComments) {
  std::istringstream in("# hands\n\n10 20 30 40\n");
  const auto boxes = parse_boxes(in);
  ASSERT_EQ(boxes.size(), 1u);
  EXPECT_EQ(boxes[0].hull(), (AxisBox{10, 20, 30, 40}));
  EXPECT_EQ(boxes[0].angle(), 0.0);
  EXPECT_EQ(boxes[0].score, 1.0);
}

TEST(BoxIoTest, ErrorsCarryLineNumbers) {
  std::istringstream bad("10 20 30 40\n1 2 3\n");
  try {
    parse_boxes(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream skew("0 0 4 0 5 2 1 2 1\n");
  EXPECT_THROW(parse_boxes(skew), ConfigurationError);
  std::istringstream flat("0 0 0 0 1 1 1 1 1\n");
  EXPECT_THROW(parse_boxes(flat), DegenerateGeometryError);
}

TEST(MotIoTest, RoundTripIsBitExact) {
  Rng rng(34);
  std::vector<MotRecord> records;
  for (long f = 1; f <= 20; ++f) {
    for (long id = 1; id <= 3; ++id) {
      records.push_back({f, id,
                         {rng.uniform(0, 300), rng.uniform(0, 300), rng.uniform(1, 50), rng.uniform(1, 50)},
                         rng.unit()});
    }
  }
  std::stringstream text;
  write_mot(text, records);
  EXPECT_EQ(parse_mot(text), records);
}

TEST(MotIoTest, FieldLayout) {
  EXPECT_EQ(format_mot({3, 7, {1.5, 2, 10, 20}, 0.25}), "3,7,1.5,2,10,20,0.25");
  std::istringstream six("1,2,3,4,5,6\n");
  const auto r = parse_mot(six);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].score, 1.0);
  std::istringstream bad("1,2,3\n");
  EXPECT_THROW(parse_mot(bad), ParseError);
  std::istringstream frame0("0,1,0,0,1,1,1\n");
  EXPECT_THROW(parse_mot(frame0), ParseError);
}

TEST(WeightsIoTest, RoundTripAndManifest) {
  FusionConfig config;
  config.input_channels = {3, 4, 5, 6};
  config.fused_channels = {2, 3, 4};
  config.head_channels = 5;
  const FusionWeights weights = random_weights(config, 35);
  std::stringstream buffer;
  write_kernels(buffer, to_named(weights));
  const std::string bytes = buffer.str();
  EXPECT_EQ(bytes.rfind("PWW1 25\n", 0), 0u);
  EXPECT_NE(bytes.find("block0.mask 3 3 1\n"), std::string::npos);
  EXPECT_NE(bytes.find("block0.reduce 2 6 1\n"), std::string::npos);
  EXPECT_NE(bytes.find("head3.distance 4 5 3\n"), std::string::npos);
  EXPECT_EQ(from_named(read_kernels(buffer)), weights);
}

TEST(WeightsIoTest, MissingKernelIsAConfigurationError) {
  FusionConfig config;
  config.input_channels = {1, 1, 1, 1};
  config.fused_channels = {1, 1, 1};
  auto named = to_named(zero_weights(config));
  named.erase("head2.score");
  EXPECT_THROW(from_named(named), ConfigurationError);
}

}  // namespace
}  // namespace pixelhand
