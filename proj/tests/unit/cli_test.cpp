#if PIXELHAND_HAVE_CLI

#include <gtest/gtest.h>

#include <cmath>

#include "cli_harness.hpp"
#include "pixelhand/box_io.hpp"
#include "pixelhand/geometry.hpp"
#include "pixelhand/tensor_io.hpp"
#include "pixelhand/text_format.hpp"

namespace pixelhand {
namespace {

using harness::read_file;
using harness::run_cli;
using harness::TempDir;
using harness::write_file;

double report_value(const std::string& text, const std::string& key) {
  const std::string needle = key + "=";
  std::size_t pos = text.rfind("\n" + needle, std::string::npos);
  pos = pos == std::string::npos ? (text.rfind(needle, 0) == 0 ? 0 : std::string::npos) : pos + 1;
  if (pos == std::string::npos) throw std::runtime_error("missing key " + key);
  const std::size_t start = pos + needle.size();
  return parse_double(text.substr(start, text.find('\n', start) - start));
}

void save_single_pixel_maps(const std::string& path, double top, double right, double bottom, double left) {
  GeometryMaps m(1, 1);
  m.score.at(0, 0, 0) = 1.0;
  m.distance.at(0, 0, 0) = top;
  m.distance.at(1, 0, 0) = right;
  m.distance.at(2, 0, 0) = bottom;
  m.distance.at(3, 0, 0) = left;
  save_tensors(path, std::vector<Tensor>{m.pack()});
}

TEST(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli({"--help"}).code, 0);
  EXPECT_EQ(run_cli({"encode", "--help"}).code, 0);
  EXPECT_EQ(run_cli({"no-such-command"}).code, 2);
  EXPECT_EQ(run_cli({"encode"}).code, 2);
  EXPECT_EQ(run_cli({"decode", "x.pwt", "--score-thresh", "abc"}).code, 2);
}

TEST(CliTest, ExitCodesByFailureKind) {
  TempDir dir("cli_codes");
  EXPECT_EQ(run_cli({"decode", dir.file("missing.pwt")}).code, 1);
  write_file(dir.file("bad.boxes"), "1 2 3\n");
  const auto parse = run_cli({"encode", dir.file("bad.boxes"), dir.file("m.pwt")});
  EXPECT_EQ(parse.code, 2);
  EXPECT_NE(parse.err.find("line 1"), std::string::npos);
  write_file(dir.file("ok.boxes"), "10 10 20 20\n");
  EXPECT_EQ(run_cli({"encode", dir.file("ok.boxes"), dir.file("m.pwt"), "--scales", "5"}).code, 3);
  EXPECT_EQ(run_cli({"encode", dir.file("ok.boxes"), dir.file("m.pwt")}).code, 0);
}

TEST(CliTest, EmptyBoxFileRoundTrip) {
  TempDir dir("cli_empty");
  write_file(dir.file("e.boxes"), "");
  ASSERT_EQ(run_cli({"encode", dir.file("e.boxes"), dir.file("e.pwt"), "--height", "32", "--width", "32"}).code, 0);
  const auto r = run_cli({"decode", dir.file("e.pwt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
}

TEST(CliTest, EncodeDecodeRoundTrip) {
  TempDir dir("cli_roundtrip");
  const RotatedBox truth = make_box({60.5, 40.25}, 40, 24, 0.35);
  save_boxes(dir.file("t.boxes"), std::vector{truth});
  ASSERT_EQ(run_cli({"encode", dir.file("t.boxes"), dir.file("t.pwt"), "--height", "96", "--width", "128"}).code, 0);
  ASSERT_EQ(run_cli({"decode", dir.file("t.pwt"), dir.file("d.boxes")}).code, 0);
  const auto got = load_boxes(dir.file("d.boxes"));
  ASSERT_EQ(got.size(), 1u);
  for (std::size_t k = 0; k < 4; ++k) {
    double best = 1e9;
    for (const Point& p : truth.vertices) best = std::min(best, std::hypot(p.x - got[0].vertices[k].x, p.y - got[0].vertices[k].y));
    EXPECT_LE(best, 1e-9);
  }
}

TEST(CliTest, ConfigFileAndOverride) {
  TempDir dir("cli_config");
  write_file(dir.file("t.boxes"), "10 10 20 20\n");
  write_file(dir.file("run.cfg"), "# encode settings\nheight = 48\nwidth=40\n");
  ASSERT_EQ(run_cli({"encode", dir.file("t.boxes"), dir.file("a.pwt"), "--config", dir.file("run.cfg")}).code, 0);
  const Tensor a = load_tensor(dir.file("a.pwt"));
  EXPECT_EQ(a.height(), 48u);
  EXPECT_EQ(a.width(), 40u);
  ASSERT_EQ(run_cli({"encode", dir.file("t.boxes"), dir.file("b.pwt"), "--config", dir.file("run.cfg"), "--height", "64"})
                .code,
            0);
  EXPECT_EQ(load_tensor(dir.file("b.pwt")).height(), 64u);
  EXPECT_EQ(run_cli({"encode", dir.file("t.boxes"), dir.file("c.pwt"), "--config", dir.file("nope.cfg")}).code, 1);
}

TEST(CliTest, LossesPerfectPredictionIsZero) {
  TempDir dir("cli_losses");
  write_file(dir.file("t.boxes"), "10 10 20 20\n40 8 12 30\n");
  ASSERT_EQ(run_cli({"encode", dir.file("t.boxes"), dir.file("t.pwt"), "--height", "64", "--width", "64", "--scales", "4"})
                .code,
            0);
  const auto r = run_cli({"losses", dir.file("t.pwt"), dir.file("t.pwt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(report_value(r.out, "total"), 0.0, 1e-9);
  EXPECT_EQ(report_value(r.out, "scales"), 4.0);
}

TEST(CliTest, LossesHandIouCase) {
  TempDir dir("cli_iou");
  save_single_pixel_maps(dir.file("truth.pwt"), 1, 1, 1, 1);
  save_single_pixel_maps(dir.file("pred.pwt"), 1, 3, 1, 1);
  const auto tight = run_cli({"losses", dir.file("pred.pwt"), dir.file("truth.pwt"), "--eps1", "1e-12"});
  ASSERT_EQ(tight.code, 0) << tight.err;
  EXPECT_NEAR(report_value(tight.out, "s0.l_dis"), std::log(2.0), 1e-9);
  const auto standard = run_cli({"losses", dir.file("pred.pwt"), dir.file("truth.pwt")});
  EXPECT_NEAR(report_value(standard.out, "s0.l_dis"), std::log((8 + 1e-5) / (4 + 1e-5)), 1e-15);
  EXPECT_EQ(report_value(standard.out, "s0.l_sco"), 0.0);
}

TEST(CliTest, FuseHffMatchesBffWithNeutralMasks) {
  TempDir dir("cli_fuse");
  Tensor image(3, 64, 64);
  for (std::size_t i = 0; i < image.size(); ++i) image.data()[i] = std::sin(0.37 * static_cast<double>(i));
  save_tensor(dir.file("img.pwt"), image);
  ASSERT_EQ(run_cli({"pyramid", dir.file("img.pwt"), dir.file("pyr.pwt")}).code, 0);
  ASSERT_EQ(run_cli({"init-weights", dir.file("w.pww"), "--seed", "3", "--neutral-mask"}).code, 0);
  ASSERT_EQ(run_cli({"fuse", dir.file("pyr.pwt"), "--weights", dir.file("w.pww"), "--out", dir.file("h.pwt"),
                     "--masks-out", dir.file("masks.pwt")})
                .code,
            0);
  ASSERT_EQ(run_cli({"fuse", dir.file("pyr.pwt"), "--weights", dir.file("w.pww"), "--out", dir.file("b.pwt"), "--block",
                     "bff"})
                .code,
            0);
  EXPECT_EQ(read_file(dir.file("h.pwt")), read_file(dir.file("b.pwt")));
  const auto maps = load_tensors(dir.file("h.pwt"));
  ASSERT_EQ(maps.size(), 4u);
  EXPECT_EQ(maps[0].channels(), 6u);
  EXPECT_EQ(maps[0].height(), 64u);
  ASSERT_EQ(run_cli({"init-weights", dir.file("r.pww"), "--seed", "3"}).code, 0);
  EXPECT_EQ(run_cli({"fuse", dir.file("pyr.pwt"), "--weights", dir.file("r.pww"), "--out", dir.file("x.pwt"), "--block",
                     "bff", "--masks-out", dir.file("m.pwt")})
                .code,
            3);
  ASSERT_EQ(run_cli({"heatmap", dir.file("h.pwt"), dir.file("score.pgm")}).code, 0);
  const std::string pgm = read_file(dir.file("score.pgm"));
  EXPECT_EQ(pgm.rfind("P5\n64 64\n255\n", 0), 0u);
  EXPECT_EQ(pgm.size(), std::string("P5\n64 64\n255\n").size() + 64u * 64u);
}

TEST(CliTest, GenerateIsDeterministic) {
  TempDir a("cli_gen_a"), b("cli_gen_b");
  for (const TempDir* d : {&a, &b}) {
    ASSERT_EQ(run_cli({"generate", d->path().string(), "--seed", "11", "--frames", "3", "--height", "64", "--width", "64",
                       "--min-size", "8", "--max-size", "20"})
                  .code,
              0);
  }
  for (const char* name : {"frame_0001.boxes", "frame_0003.pwt", "gt.mot"}) {
    EXPECT_EQ(read_file(a.path() / name), read_file(b.path() / name)) << name;
  }
}

TEST(CliTest, EndToEndTracking) {
  TempDir dir("cli_e2e");
  const std::string gen = (dir.path() / "gen").string();
  const std::string dets = (dir.path() / "dets").string();
  ASSERT_EQ(run_cli({"generate", gen, "--seed", "5", "--frames", "30", "--boxes", "3"}).code, 0);
  std::filesystem::create_directories(dets);
  for (int f = 1; f <= 30; ++f) {
    std::string stem = std::to_string(f);
    stem = "frame_" + std::string(4 - stem.size(), '0') + stem;
    ASSERT_EQ(run_cli({"decode", gen + "/" + stem + ".pwt", dets + "/" + stem + ".boxes"}).code, 0);
  }
  const auto det_eval = run_cli({"eval-det", dets, gen});
  ASSERT_EQ(det_eval.code, 0) << det_eval.err;
  EXPECT_EQ(report_value(det_eval.out, "ap"), 1.0);
  for (const char* tracker : {"sort", "iou"}) {
    const std::string mot = dir.file(std::string(tracker) + ".mot");
    ASSERT_EQ(run_cli({"track", dets, "--tracker", tracker, "--out", mot}).code, 0);
    const auto r = run_cli({"eval-mot", mot, gen + "/gt.mot"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_GE(report_value(r.out, "mota"), 0.95) << tracker;
    EXPECT_EQ(report_value(r.out, "ids"), 0.0) << tracker;
  }
  EXPECT_EQ(run_cli({"track", dets, "--tracker", "kcf"}).code, 3);
  write_file(dir.file("long.mot"), "31,1,0,0,10,10,1\n");
  EXPECT_EQ(run_cli({"eval-mot", dir.file("long.mot"), gen + "/gt.mot"}).code, 3);
  std::filesystem::remove(dets + "/frame_0030.boxes");
  EXPECT_EQ(run_cli({"eval-det", dets, gen}).code, 3);
}

}  // namespace
}  // namespace pixelhand

#endif
