#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "pixelhand/box_io.hpp"
#include "pixelhand/error.hpp"
#include "pixelhand/evaluation.hpp"
#include "pixelhand/fusion.hpp"
#include "pixelhand/losses.hpp"
#include "pixelhand/mot_io.hpp"
#include "pixelhand/mot_metrics.hpp"
#include "pixelhand/pipeline.hpp"
#include "pixelhand/tensor_io.hpp"
#include "pixelhand/text_format.hpp"
#include "pixelhand/tracking.hpp"
#include "pixelhand/weights_io.hpp"

namespace pixelhand::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kBoxExtension = ".boxes";

// Splices `--config FILE` into the argument list: each key=value line becomes
// --key=value right after the subcommand, so later command-line flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty() || args.empty()) return args;

  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::vector<std::string> injected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto key = trim(body.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.remove_prefix(1);
    if (key.empty()) throw ParseError(path + ":" + std::to_string(line_no) + ": empty key");
    injected.push_back("--" + std::string(key) + "=" + std::string(trim(body.substr(eq + 1))));
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  for (auto field : split_on(text, ',')) values.push_back(parse_double(field));
  return values;
}

std::vector<std::size_t> parse_counts(const std::string& text, std::size_t expected,
                                      const char* what) {
  std::vector<std::size_t> values;
  for (auto field : split_on(text, ',')) {
    const long long v = parse_integer(field);
    if (v <= 0) throw ConfigurationError(std::string(what) + " must be positive");
    values.push_back(static_cast<std::size_t>(v));
  }
  if (values.size() != expected) {
    throw ConfigurationError(std::string(what) + " needs " + std::to_string(expected) +
                             " comma-separated values");
  }
  return values;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

// Writes `text` to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  auto out = open_output(path);
  out << text;
}

std::vector<fs::path> box_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kBoxExtension) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<GeometryMaps> load_maps(const fs::path& path) {
  std::vector<GeometryMaps> maps;
  for (const auto& t : load_tensors(path)) maps.push_back(GeometryMaps::unpack(t));
  if (maps.empty()) throw ParseError(path.string() + ": no maps records");
  return maps;
}

void save_maps(const fs::path& path, const std::vector<GeometryMaps>& maps) {
  std::vector<Tensor> packed;
  for (const auto& m : maps) packed.push_back(m.pack());
  save_tensors(path, packed);
}

std::string frame_name(std::size_t frame) {
  std::string digits = std::to_string(frame);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "frame_" + digits;
}

ConvOrder parse_order(const std::string& text) {
  if (text == "reduce-then-fuse") return ConvOrder::reduce_then_fuse;
  if (text == "as-printed") return ConvOrder::as_printed;
  throw ConfigurationError("order must be reduce-then-fuse or as-printed, got '" + text + "'");
}

struct EncodeArgs {
  std::string boxes, out;
  std::size_t height = 256, width = 256, scales = 1;
  double shrink = kDefaultShrink;
};

void cmd_encode(const EncodeArgs& a) {
  if (a.scales == 0 || a.scales > kMaxScales) throw ConfigurationError("scales must be 1..4");
  const auto boxes = load_boxes(a.boxes);
  const auto maps = encode_ground_truth(boxes, a.height, a.width, a.shrink);
  save_maps(a.out, std::vector<GeometryMaps>(a.scales, maps));
}

struct DecodeArgs {
  std::string maps, out;
  DecodeOptions options;
  std::size_t scale = 0;
};

void cmd_decode(const DecodeArgs& a, std::ostream& out) {
  const auto maps = load_maps(a.maps);
  if (a.scale >= maps.size()) {
    throw ConfigurationError("scale " + std::to_string(a.scale) + " not in " + a.maps);
  }
  validate_maps(maps[a.scale]);
  const auto boxes = decode(maps[a.scale], a.options);
  std::ostringstream text;
  write_boxes(text, boxes);
  emit(a.out, text.str(), out);
}

struct GenerateArgs {
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t frames = 1, scales = 1;
  SceneOptions scene;
  double max_speed = 1.5;
};

void cmd_generate(const GenerateArgs& a) {
  if (a.scales == 0 || a.scales > kMaxScales) throw ConfigurationError("scales must be 1..4");
  SequenceOptions options;
  options.scene = a.scene;
  options.frames = a.frames;
  options.max_speed = a.max_speed;
  const Sequence seq = generate_sequence(a.seed, options);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    const std::string stem = frame_name(f + 1);
    save_boxes(dir / (stem + kBoxExtension), seq.frames[f]);
    const auto maps = encode_ground_truth(seq.frames[f], a.scene.height, a.scene.width, a.scene.shrink);
    save_maps(dir / (stem + ".pwt"), std::vector<GeometryMaps>(a.scales, maps));
  }
  save_mot(dir / "gt.mot", hull_records(seq.frames));
}

struct PyramidArgs {
  std::string image, out;
};

void cmd_pyramid(const PyramidArgs& a) { save_tensors(a.out, average_pool_pyramid(load_tensor(a.image))); }

struct FuseArgs {
  std::vector<std::string> pyramid;
  std::string weights, out, masks_out;
  std::string block = "hff", mask = "sigmoid", order = "reduce-then-fuse", upsample = "bilinear";
  std::size_t height = 0, width = 0;
  double distance_scale = 1.0;
};

void cmd_fuse(const FuseArgs& a) {
  std::vector<Tensor> levels;
  for (const auto& file : a.pyramid) {
    for (auto& t : load_tensors(file)) levels.push_back(std::move(t));
  }
  if (levels.size() != kPyramidLevels) {
    throw ConfigurationError("fuse needs 4 pyramid levels, got " + std::to_string(levels.size()));
  }
  const FusionWeights weights = load_weights(a.weights);
  FusionConfig config = infer_config(weights, parse_order(a.order));
  config.distance_scale = a.distance_scale;
  if (a.block == "hff") {
    config.block.kind = BlockKind::hff;
  } else if (a.block == "bff") {
    config.block.kind = BlockKind::bff;
  } else {
    throw ConfigurationError("block must be hff or bff, got '" + a.block + "'");
  }
  if (a.mask == "sigmoid") {
    config.block.mask = MaskActivation::sigmoid;
  } else if (a.mask == "raw") {
    config.block.mask = MaskActivation::raw;
  } else {
    throw ConfigurationError("mask must be sigmoid or raw, got '" + a.mask + "'");
  }
  if (a.upsample == "bilinear") {
    config.block.upsample = UpsampleMode::bilinear;
  } else if (a.upsample == "nearest") {
    config.block.upsample = UpsampleMode::nearest;
  } else {
    throw ConfigurationError("upsample must be bilinear or nearest, got '" + a.upsample + "'");
  }
  const std::size_t h = a.height > 0 ? a.height : 4 * levels[0].height();
  const std::size_t w = a.width > 0 ? a.width : 4 * levels[0].width();

  const CascadeOutput fused = cascade(levels, config, weights);
  std::vector<GeometryMaps> maps;
  for (std::size_t s = 0; s < kPyramidLevels; ++s) {
    maps.push_back(head(fused.fused[s], weights.heads[s], h, w, config.distance_scale,
                        config.block.upsample));
  }
  save_maps(a.out, maps);
  if (!a.masks_out.empty()) {
    if (config.block.kind != BlockKind::hff) throw ConfigurationError("bff blocks have no masks");
    save_tensors(a.masks_out, std::vector<Tensor>(fused.masks.begin(), fused.masks.end()));
  }
}

struct LossesArgs {
  std::string pred, truth, scale_weights = "1,1,1,1";
  LossWeights weights;
};

void cmd_losses(LossesArgs a, std::ostream& out) {
  const auto sw = parse_list(a.scale_weights);
  if (sw.empty() || sw.size() > kMaxScales) throw ConfigurationError("scale-weights takes 1..4 values");
  a.weights.scale_weights.fill(1.0);
  std::copy(sw.begin(), sw.end(), a.weights.scale_weights.begin());
  const auto pred = load_maps(a.pred);
  const auto truth = load_maps(a.truth);
  out << format_breakdown(loss_breakdown(pred, truth, a.weights));
}

struct EvalDetArgs {
  std::string dets_dir, truths_dir, level = "all", out, pr_csv;
  double iou = 0.5;
};

void cmd_eval_det(const EvalDetArgs& a, std::ostream& out) {
  const Level level = parse_level(a.level);
  const auto truth_files = box_files(a.truths_dir);
  const auto det_files = box_files(a.dets_dir);
  std::vector<std::vector<RotatedBox>> truths, dets;
  for (std::size_t i = 0; i < truth_files.size(); ++i) {
    const auto& name = truth_files[i].filename();
    if (i >= det_files.size() || det_files[i].filename() != name) {
      throw ConfigurationError("no detections file " + name.string() + " in " + a.dets_dir);
    }
    truths.push_back(load_boxes(truth_files[i]));
    dets.push_back(load_boxes(det_files[i]));
  }
  if (det_files.size() != truth_files.size()) {
    throw ConfigurationError(std::to_string(det_files.size()) + " detection files vs " +
                             std::to_string(truth_files.size()) + " truth files");
  }
  const EvalReport report = evaluate_detection(dets, truths, level, a.iou);
  emit(a.out, format_eval_report(report), out);
  if (!a.pr_csv.empty()) {
    auto csv = open_output(a.pr_csv);
    write_pr_csv(csv, report);
  }
}

struct TrackArgs {
  std::string dets_dir, tracker = "sort", out;
  SortOptions sort;
  IouTrackerOptions iou;
};

void cmd_track(const TrackArgs& a, std::ostream& out) {
  std::vector<std::vector<Detection>> frames;
  for (const auto& file : box_files(a.dets_dir)) frames.push_back(to_detections(load_boxes(file)));
  std::vector<MotRecord> records;
  if (a.tracker == "sort") {
    records = run_sort(frames, a.sort);
  } else if (a.tracker == "iou") {
    records = to_records(iou_track(frames, a.iou));
  } else {
    throw ConfigurationError("tracker must be sort or iou, got '" + a.tracker + "'");
  }
  std::ostringstream text;
  write_mot(text, records);
  emit(a.out, text.str(), out);
}

struct EvalMotArgs {
  std::string tracks, gt, out;
  double iou = 0.5;
};

void cmd_eval_mot(const EvalMotArgs& a, std::ostream& out) {
  const auto hyp = load_mot(a.tracks);
  const auto gt = load_mot(a.gt);
  const auto last_frame = [](const std::vector<MotRecord>& r) {
    long f = 0;
    for (const auto& x : r) f = std::max(f, x.frame);
    return f;
  };
  if (!gt.empty() && last_frame(hyp) > last_frame(gt)) {
    throw ConfigurationError("tracker output runs to frame " + std::to_string(last_frame(hyp)) +
                             " but ground truth ends at frame " + std::to_string(last_frame(gt)));
  }
  emit(a.out, format_mot_report(mot_metrics(hyp, gt, a.iou)), out);
}

struct InitWeightsArgs {
  std::string out, channels = "3,3,3,3", fused = "8,8,8", order = "reduce-then-fuse";
  std::uint64_t seed = 0;
  std::size_t head = 8;
  bool neutral_mask = false;
  bool zero = false;
};

void cmd_init_weights(const InitWeightsArgs& a) {
  FusionConfig config;
  const auto in = parse_counts(a.channels, kPyramidLevels, "channels");
  const auto cs = parse_counts(a.fused, kFusionBlocks, "fused");
  std::copy(in.begin(), in.end(), config.input_channels.begin());
  std::copy(cs.begin(), cs.end(), config.fused_channels.begin());
  config.head_channels = a.head;
  config.block.order = parse_order(a.order);
  FusionWeights weights = a.zero ? zero_weights(config) : random_weights(config, a.seed);
  if (a.neutral_mask) neutralize_masks(weights);
  save_weights(a.out, weights);
}

struct HeatmapArgs {
  std::string input, out;
  std::size_t record = 0, channel = 0;
};

void cmd_heatmap(const HeatmapArgs& a) {
  const auto tensors = load_tensors(a.input);
  if (a.record >= tensors.size()) {
    throw ConfigurationError("record " + std::to_string(a.record) + " not in " + a.input);
  }
  const Tensor& t = tensors[a.record];
  if (a.channel >= t.channels()) {
    throw ConfigurationError("channel " + std::to_string(a.channel) + " not in record");
  }
  const auto plane = t.channel(a.channel);
  const auto [lo, hi] = std::minmax_element(plane.begin(), plane.end());
  const double range = *hi - *lo;
  auto out = open_output(a.out);
  out << "P5\n" << t.width() << ' ' << t.height() << "\n255\n";
  for (double v : plane) {
    const double unit = range > 0.0 ? (v - *lo) / range : 0.0;
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(unit * 255.0))));
  }
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pixel-wise rotated hand detection toolkit", "pixelhand"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::function<void()> action;
  const auto sub = [&](const char* name, const char* help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s->set_help_flag("-h,--help", "Show help");
    return s;
  };

  EncodeArgs enc;
  auto* encode = sub("encode", "Rasterise a box file into geometry maps");
  encode->add_option("boxes", enc.boxes, "Box file")->required();
  encode->add_option("out", enc.out, "Maps file to write")->required();
  encode->add_option("--height", enc.height, "Map height")->capture_default_str();
  encode->add_option("--width", enc.width, "Map width")->capture_default_str();
  encode->add_option("--shrink", enc.shrink, "Positive-region shrink per side")->capture_default_str();
  encode->add_option("--scales", enc.scales, "Copies of the maps, one per supervised scale")
      ->capture_default_str();
  encode->callback([&] { action = [&] { cmd_encode(enc); }; });

  DecodeArgs dec;
  auto* decode_cmd = sub("decode", "Threshold, restore and suppress boxes from maps");
  decode_cmd->add_option("maps", dec.maps, "Maps file")->required();
  decode_cmd->add_option("out", dec.out, "Box file to write (stdout if omitted)");
  decode_cmd->add_option("--score-thresh", dec.options.score_threshold, "Score threshold")
      ->capture_default_str();
  decode_cmd->add_option("--nms-thresh", dec.options.nms_threshold, "NMS IoU threshold")
      ->capture_default_str();
  decode_cmd->add_option("--max-candidates", dec.options.max_candidates, "Candidates kept before NMS")
      ->capture_default_str();
  decode_cmd->add_option("--scale", dec.scale, "Maps record to decode")->capture_default_str();
  decode_cmd->callback([&] { action = [&] { cmd_decode(dec, out); }; });

  GenerateArgs gen;
  auto* generate = sub("generate", "Write a synthetic sequence: boxes, maps and MOT ground truth");
  generate->add_option("out_dir", gen.out_dir, "Output directory")->required();
  generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  generate->add_option("--frames", gen.frames, "Number of frames")->capture_default_str();
  generate->add_option("--boxes", gen.scene.boxes, "Boxes per frame")->capture_default_str();
  generate->add_option("--height", gen.scene.height, "Frame height")->capture_default_str();
  generate->add_option("--width", gen.scene.width, "Frame width")->capture_default_str();
  generate->add_option("--min-size", gen.scene.size_min, "Smallest box side")->capture_default_str();
  generate->add_option("--max-size", gen.scene.size_max, "Largest box side")->capture_default_str();
  generate->add_option("--max-angle", gen.scene.theta_max, "Largest |angle| in radians")
      ->capture_default_str();
  generate->add_option("--shrink", gen.scene.shrink, "Positive-region shrink per side")
      ->capture_default_str();
  generate->add_option("--max-pair-iou", gen.scene.max_pair_iou, "Largest IoU between two boxes")
      ->capture_default_str();
  generate->add_option("--max-speed", gen.max_speed, "Largest per-frame centre motion in px")
      ->capture_default_str();
  generate->add_option("--scales", gen.scales, "Maps records per frame")->capture_default_str();
  generate->callback([&] {
    gen.scene.theta_min = -gen.scene.theta_max;
    action = [&] { cmd_generate(gen); };
  });

  PyramidArgs pyr;
  auto* pyramid = sub("pyramid", "Average-pool an image tensor into the 4-level pyramid");
  pyramid->add_option("image", pyr.image, "Image tensor file (C,H,W)")->required();
  pyramid->add_option("out", pyr.out, "Pyramid file to write")->required();
  pyramid->callback([&] { action = [&] { cmd_pyramid(pyr); }; });

  FuseArgs fus;
  auto* fuse = sub("fuse", "Run the fusion cascade and heads on a feature pyramid");
  fuse->add_option("pyramid", fus.pyramid, "One file with 4 records or 4 single-record files")
      ->required();
  fuse->add_option("--weights", fus.weights, "Weights file")->required();
  fuse->add_option("--out", fus.out, "Maps file to write (one record per level)")->required();
  fuse->add_option("--masks-out", fus.masks_out, "Also write the highlight masks");
  fuse->add_option("--block", fus.block, "hff or bff")->capture_default_str();
  fuse->add_option("--mask", fus.mask, "sigmoid or raw")->capture_default_str();
  fuse->add_option("--order", fus.order, "reduce-then-fuse or as-printed")->capture_default_str();
  fuse->add_option("--upsample", fus.upsample, "bilinear or nearest")->capture_default_str();
  fuse->add_option("--height", fus.height, "Output height (default 4x the finest level)");
  fuse->add_option("--width", fus.width, "Output width (default 4x the finest level)");
  fuse->add_option("--distance-scale", fus.distance_scale, "Distance map multiplier")
      ->capture_default_str();
  fuse->callback([&] { action = [&] { cmd_fuse(fus); }; });

  LossesArgs los;
  auto* losses = sub("losses", "Print the per-scale loss breakdown");
  losses->add_option("pred", los.pred, "Predicted maps file")->required();
  losses->add_option("truth", los.truth, "Ground-truth maps file")->required();
  losses->add_option("--alpha", los.weights.alpha, "Score loss weight")->capture_default_str();
  losses->add_option("--beta", los.weights.beta, "Rotation loss weight")->capture_default_str();
  losses->add_option("--scale-weights", los.scale_weights, "Comma-separated per-scale weights")
      ->capture_default_str();
  losses->add_option("--eps0", los.weights.eps0, "Dice smoothing")->capture_default_str();
  losses->add_option("--eps1", los.weights.eps1, "IoU loss smoothing")->capture_default_str();
  losses->callback([&] { action = [&] { cmd_losses(los, out); }; });

  EvalDetArgs ed;
  auto* eval_det = sub("eval-det", "AP/AR of per-frame detections against truths");
  eval_det->add_option("dets_dir", ed.dets_dir, "Directory of detection box files")->required();
  eval_det->add_option("truths_dir", ed.truths_dir, "Directory of truth box files")->required();
  eval_det->add_option("--level", ed.level, "1, 2 or all")->capture_default_str();
  eval_det->add_option("--iou", ed.iou, "Hit/miss IoU threshold")->capture_default_str();
  eval_det->add_option("--out", ed.out, "Report file (stdout if omitted)");
  eval_det->add_option("--pr-csv", ed.pr_csv, "Write the precision/recall curve here");
  eval_det->callback([&] { action = [&] { cmd_eval_det(ed, out); }; });

  TrackArgs tr;
  auto* track = sub("track", "Link per-frame detections into tracks");
  track->add_option("dets_dir", tr.dets_dir, "Directory of detection box files")->required();
  track->add_option("--tracker", tr.tracker, "sort or iou")->capture_default_str();
  track->add_option("--out", tr.out, "MOT file (stdout if omitted)");
  track->add_option("--iou-gate", tr.sort.iou_gate, "SORT association gate")->capture_default_str();
  track->add_option("--max-age", tr.sort.max_age, "SORT frames without a match")->capture_default_str();
  track->add_option("--min-hits", tr.sort.min_hits, "SORT hits before reporting")->capture_default_str();
  track->add_option("--sigma-iou", tr.iou.sigma_iou, "IOU tracker extension threshold")
      ->capture_default_str();
  track->add_option("--min-track-len", tr.iou.min_track_len, "IOU tracker shortest kept track")
      ->capture_default_str();
  track->callback([&] { action = [&] { cmd_track(tr, out); }; });

  EvalMotArgs em;
  auto* eval_mot = sub("eval-mot", "CLEAR-MOT metrics of a MOT file against ground truth");
  eval_mot->add_option("tracks", em.tracks, "Tracker MOT file")->required();
  eval_mot->add_option("gt", em.gt, "Ground-truth MOT file")->required();
  eval_mot->add_option("--iou", em.iou, "Match IoU threshold")->capture_default_str();
  eval_mot->add_option("--out", em.out, "Report file (stdout if omitted)");
  eval_mot->callback([&] { action = [&] { cmd_eval_mot(em, out); }; });

  InitWeightsArgs iw;
  auto* init = sub("init-weights", "Write a fusion weights file");
  init->add_option("out", iw.out, "Weights file to write")->required();
  init->add_option("--seed", iw.seed, "Random seed")->capture_default_str();
  init->add_option("--channels", iw.channels, "Pyramid channels, finest first")->capture_default_str();
  init->add_option("--fused", iw.fused, "Fused channels of blocks 0,1,2")->capture_default_str();
  init->add_option("--head", iw.head, "Head channels")->capture_default_str();
  init->add_option("--order", iw.order, "reduce-then-fuse or as-printed")->capture_default_str();
  init->add_flag("--neutral-mask", iw.neutral_mask, "Masks pass features through unchanged");
  init->add_flag("--zero", iw.zero, "All-zero weights");
  init->callback([&] { action = [&] { cmd_init_weights(iw); }; });

  HeatmapArgs hm;
  auto* heatmap = sub("heatmap", "Dump one tensor channel as a PGM image");
  heatmap->add_option("input", hm.input, "Tensor file")->required();
  heatmap->add_option("out", hm.out, "PGM file to write")->required();
  heatmap->add_option("--record", hm.record, "Record index")->capture_default_str();
  heatmap->add_option("--channel", hm.channel, "Channel index")->capture_default_str();
  heatmap->callback([&] { action = [&] { cmd_heatmap(hm); }; });

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (action) action();
    return kOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseFailure;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConstraintFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace pixelhand::cli
