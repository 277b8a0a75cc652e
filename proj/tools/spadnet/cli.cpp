#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "run_config.hpp"
#include "spadnet/checkpoint.hpp"
#include "spadnet/dataset.hpp"
#include "spadnet/errors.hpp"
#include "spadnet/inference.hpp"
#include "spadnet/log.hpp"
#include "spadnet/manifest.hpp"
#include "spadnet/metrics.hpp"
#include "spadnet/sensor_model.hpp"
#include "spadnet/training.hpp"
#include "spadnet/video_io.hpp"

namespace spadnet::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Thrown for flag combinations CLI11 cannot express; maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Extent3 parse_extent(const std::string& text, const char* flag) {
  std::array<int, 3> v{};
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 3; ++i) {
    auto [next, ec] = std::from_chars(p, end, v[i]);
    if (ec != std::errc{} || v[i] < 0) {
      throw UsageError(std::string(flag) + " expects T,H,W (got '" + text + "')");
    }
    p = next;
    if (i < 2) {
      if (p == end || *p != ',') throw UsageError(std::string(flag) + " expects T,H,W");
      ++p;
    }
  }
  if (p != end) throw UsageError(std::string(flag) + " expects T,H,W");
  return {v[0], v[1], v[2]};
}

std::string extent_string(Extent3 e) {
  return std::to_string(e.frames) + "," + std::to_string(e.height) + "," +
         std::to_string(e.width);
}

void log_resolved(const std::string& command, const json& resolved) {
  log::info(command + " config: " + resolved.dump());
}

std::vector<VideoSource> load_sources(const DatasetManifest& m) {
  std::vector<VideoSource> out;
  if (m.source_kind != SourceKind::directories) return out;
  for (const auto& id : m.sources) {
    try {
      out.push_back({id, read_frames(id)});
    } catch (const IoError& e) {
      log::warn("skipping source '" + id + "': " + e.what());
    }
  }
  return out;
}

fs::path sequence_dir(const fs::path& root, const char* split, std::size_t index) {
  std::ostringstream name;
  name << std::setw(4) << std::setfill('0') << index;
  return root / split / name.str();
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string clean_dir;
  int bits = 1;
  double hot_density = HotPixelSpec::default_density;
  std::string hot_mode = "per-sequence-fixed";
  std::uint64_t seed = 0;
  std::string out;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* c = app.add_subcommand("simulate", "degrade a clean frame directory into a quantized sequence");
  c->add_option("--clean-dir", a.clean_dir, "directory of clean frame_*.pgm/ppm")->required();
  c->add_option("--bits", a.bits, "bit level b")->check(CLI::Range(BitLevel::min_bits, BitLevel::max_bits));
  c->add_option("--hot-density", a.hot_density, "fraction of hot pixels")
      ->check(CLI::Range(0.0, HotPixelSpec::max_density));
  c->add_option("--hot-mode", a.hot_mode)->check(CLI::IsMember({"per-sequence-fixed", "per-frame-random"}));
  c->add_option("--seed", a.seed);
  c->add_option("--out", a.out, "output directory")->required();
}

int run_simulate(const SimulateArgs& a) {
  log_resolved("simulate", {{"clean_dir", a.clean_dir},
                            {"bits", a.bits},
                            {"hot_density", a.hot_density},
                            {"hot_mode", a.hot_mode},
                            {"seed", a.seed},
                            {"out", a.out}});
  const VideoSource source{a.clean_dir, read_frames(a.clean_dir)};

  // One-sequence manifest covering the whole clip, so the output can be
  // regenerated with `dataset --manifest`.
  DatasetManifest m;
  m.rng_algorithm = std::string(Rng::algorithm_name);
  m.seed = a.seed;
  m.source_kind = SourceKind::directories;
  m.sources = {source.id};
  m.downsample_factor = 1;
  m.dims = extent_of(source.frames);
  m.bit_level = a.bits;
  m.hot_density = a.hot_density;
  m.hot_mode = hot_pixel_mode_from_string(a.hot_mode);
  m.hot_seed = Rng(a.seed).split(0x686f74).next_u64();
  m.train_count = 1;
  m.test_count = 0;
  m.sequences.push_back({source.id, 0, 0, 0, Rng(a.seed).next_u64()});

  const auto pairs = generate_dataset(m, {source});
  const fs::path out(a.out);
  write_quantized(out / "frames", pairs.front().input);
  write_manifest(out / "manifest.json", m);
  log::info("wrote " + std::to_string(pairs.front().input.frames.size()) + " frames to " +
            (out / "frames").string());
  return exit_ok;
}

// --- dataset ----------------------------------------------------------------

struct DatasetArgs {
  std::string manifest;
  std::vector<std::string> sources;
  bool synthetic = false;
  int count = 2500;
  int test_count = -1;
  std::string dims = "64,100,100";
  int factor = 7;
  int bits = 1;
  double hot_density = HotPixelSpec::default_density;
  std::string hot_mode = "per-sequence-fixed";
  std::uint64_t seed = 0;
  std::string out;
};

void add_dataset(CLI::App& app, DatasetArgs& a) {
  auto* c = app.add_subcommand("dataset", "build a training corpus and its manifest");
  auto* from_manifest = c->add_option("--manifest", a.manifest, "regenerate from an existing manifest");
  auto* src = c->add_option("--source", a.sources, "clean source directory (repeatable)");
  auto* syn = c->add_flag("--synthetic", a.synthetic, "constant-plus-gradient synthetic clips");
  from_manifest->excludes(src)->excludes(syn);
  src->excludes(syn);
  c->add_option("--count", a.count)->check(CLI::PositiveNumber);
  c->add_option("--test-count", a.test_count, "default: count / 25");
  c->add_option("--dims", a.dims, "T,H,W of each sequence");
  c->add_option("--factor", a.factor, "spatial box downsample factor")->check(CLI::PositiveNumber);
  c->add_option("--bits", a.bits)->check(CLI::Range(BitLevel::min_bits, BitLevel::max_bits));
  c->add_option("--hot-density", a.hot_density)->check(CLI::Range(0.0, HotPixelSpec::max_density));
  c->add_option("--hot-mode", a.hot_mode)->check(CLI::IsMember({"per-sequence-fixed", "per-frame-random"}));
  c->add_option("--seed", a.seed);
  c->add_option("--out", a.out)->required();
}

int run_dataset(const DatasetArgs& a) {
  DatasetManifest m;
  std::vector<VideoSource> sources;
  if (!a.manifest.empty()) {
    m = read_manifest(a.manifest);
    sources = load_sources(m);
  } else {
    const Extent3 dims = parse_extent(a.dims, "--dims");
    const HotPixelSpec hot{a.hot_density, Rng(a.seed).split(0x686f74).next_u64(),
                           hot_pixel_mode_from_string(a.hot_mode)};
    if (a.synthetic) {
      m = make_synthetic_manifest(a.count, dims, BitLevel(a.bits), hot, a.seed);
    } else {
      if (a.sources.empty()) throw UsageError("dataset needs --manifest, --source or --synthetic");
      for (const auto& s : a.sources) {
        try {
          sources.push_back({s, read_frames(s)});
        } catch (const IoError& e) {
          log::warn("skipping source '" + s + "': " + e.what());
        }
      }
      m = build_clean_sequences(sources, {a.factor, a.count, dims, a.seed}).manifest;
      m.bit_level = a.bits;
      m.hot_density = hot.density;
      m.hot_mode = hot.mode;
      m.hot_seed = hot.seed;
    }
    if (a.test_count >= 0) {
      if (a.test_count > a.count) throw UsageError("--test-count exceeds --count");
      m.test_count = a.test_count;
      m.train_count = a.count - a.test_count;
    }
  }
  json resolved = json::parse(manifest_to_string(m));
  resolved.erase("sequences");
  resolved["from_manifest"] = a.manifest;
  resolved["out"] = a.out;
  log_resolved("dataset", resolved);

  const auto pairs = generate_dataset(m, sources);
  const fs::path out(a.out);
  fs::create_directories(out);
  write_manifest(out / "manifest.json", m);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const bool train = i < static_cast<std::size_t>(m.train_count);
    const fs::path dir = sequence_dir(out, train ? "train" : "test",
                                      train ? i : i - static_cast<std::size_t>(m.train_count));
    write_quantized(dir / "input", pairs[i].input);
    write_frames(dir / "target", pairs[i].target.frames, 16);
  }
  log::info("wrote " + std::to_string(m.train_count) + " train and " +
            std::to_string(m.test_count) + " test sequences to " + out.string());
  return exit_ok;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
  std::string config;
  std::string resume;
  std::string manifest;
  std::string checkpoint;
  std::optional<long> steps;
  std::optional<int> batch;
  std::optional<double> lr;
  std::optional<std::uint64_t> seed;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* c = app.add_subcommand("train", "train on the train split of a dataset manifest");
  c->add_option("--config", a.config, "JSON run config")->required();
  c->add_option("--resume", a.resume, "checkpoint to continue from");
  c->add_option("--manifest", a.manifest, "overrides data.manifest");
  c->add_option("--checkpoint", a.checkpoint, "overrides training.checkpoint");
  c->add_option("--steps", a.steps, "total step count (resume continues up to it)");
  c->add_option("--batch-size", a.batch);
  c->add_option("--lr", a.lr);
  c->add_option("--seed", a.seed);
}

int run_train(const TrainArgs& a) {
  RunConfig cfg = load_config(a.config);
  if (!a.manifest.empty()) cfg.manifest = a.manifest;
  if (!a.checkpoint.empty()) cfg.training.checkpoint_path = a.checkpoint;
  if (a.steps) cfg.training.steps = *a.steps;
  if (a.batch) cfg.training.batch_size = *a.batch;
  if (a.lr) cfg.training.sgd.learning_rate = *a.lr;
  if (a.seed) cfg.training.seed = *a.seed;
  if (cfg.manifest.empty()) throw UsageError("no manifest: set data.manifest or pass --manifest");
  if (cfg.training.checkpoint_path.empty()) {
    throw UsageError("no checkpoint path: set training.checkpoint or pass --checkpoint");
  }
  cfg.network.validate();
  cfg.training.validate();

  const DatasetManifest m = read_manifest(cfg.manifest);
  if (cfg.training.trained_bits == 0) cfg.training.trained_bits = m.bit_level;
  const json resolved = config_to_json(cfg);
  log_resolved("train", resolved);
  if (!a.resume.empty()) log::info("resume from " + a.resume);

  // Keep the resolved config next to the checkpoint so the run can be repeated.
  {
    const fs::path ckpt = cfg.training.checkpoint_path;
    if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
    std::ofstream f(fs::path(ckpt).concat(".config.json"));
    if (!f) throw IoError("cannot write resolved config next to " + ckpt.string());
    f << resolved.dump(2) << '\n';
  }

  std::optional<Checkpoint> resume;
  if (!a.resume.empty()) {
    resume = load_checkpoint(a.resume, cfg.network);
    log::info("resuming from step " + std::to_string(resume->step));
  }

  auto pairs = generate_dataset(m, load_sources(m));
  pairs.resize(static_cast<std::size_t>(m.train_count));
  if (pairs.empty()) throw DomainError("manifest has an empty train split");
  const TrainResult r = train(pairs, cfg.network, cfg.training, resume);
  log::info("finished at step " + std::to_string(r.final_step) + ", checkpoint " +
            cfg.training.checkpoint_path.string());
  return exit_ok;
}

// --- restore ----------------------------------------------------------------

struct RestoreArgs {
  std::string checkpoint;
  std::string in;
  std::string out;
  std::string tile = "38,60,60";
  std::string overlap = "8,10,10";
};

void add_restore(CLI::App& app, RestoreArgs& a) {
  auto* c = app.add_subcommand("restore", "run a trained network over a quantized sequence");
  c->add_option("--checkpoint", a.checkpoint)->required();
  c->add_option("--in", a.in, "directory of input frames")->required();
  c->add_option("--out", a.out, "directory for 16-bit restored frames")->required();
  c->add_option("--tile", a.tile, "tile size T,H,W");
  c->add_option("--overlap", a.overlap, "tile overlap T,H,W");
}

int run_restore(const RestoreArgs& a) {
  const TileOptions tiles{parse_extent(a.tile, "--tile"), parse_extent(a.overlap, "--overlap")};
  if (tiles.patch.frames < 1 || tiles.patch.height < 1 || tiles.patch.width < 1) {
    throw UsageError("--tile sizes must be positive");
  }
  const Checkpoint ckpt = load_checkpoint(a.checkpoint);
  log_resolved("restore", {{"checkpoint", a.checkpoint},
                           {"in", a.in},
                           {"out", a.out},
                           {"tile", extent_string(tiles.patch)},
                           {"overlap", extent_string(tiles.overlap)},
                           {"network", network_to_json(ckpt.config)},
                           {"trained_bits", ckpt.trained_bits},
                           {"step", ckpt.step}});
  const FrameStack input = read_frames(a.in);
  std::optional<int> expected;
  if (ckpt.trained_bits > 0) expected = ckpt.trained_bits;
  const FrameStack restored = restore(input, ckpt.weights, ckpt.config, tiles, expected);
  write_frames(a.out, restored, 16);
  log::info("wrote " + std::to_string(restored.size()) + " frames to " + a.out);
  return exit_ok;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string ref;
  std::string test;
  std::string out;
  bool fix_hot = false;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* c = app.add_subcommand("eval", "PSNR/SSIM of a test sequence against a reference");
  c->add_option("--ref", a.ref)->required();
  c->add_option("--test", a.test)->required();
  c->add_option("--out", a.out, "JSON report path");
  c->add_flag("--fix-hot", a.fix_hot, "median-fix hot pixels detected in the test sequence first");
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  log_resolved("eval", {{"ref", a.ref}, {"test", a.test}, {"out", a.out}, {"fix_hot", a.fix_hot}});
  const FrameStack ref = read_frames(a.ref);
  FrameStack test = read_frames(a.test);
  if (a.fix_hot) {
    const Mask hot = detect_hot_pixels(test);
    for (auto& f : test) f = median_hot_pixel_fix(f, hot);
  }
  MetricReport report = evaluate(ref, test);
  report.reference = a.ref;
  report.test = a.test;
  report.hot_pixel_fix = a.fix_hot;
  if (!a.out.empty()) write_report(a.out, report);
  out << "psnr " << std::setprecision(6) << std::fixed << report.psnr_db << " dB  ssim "
      << report.ssim << '\n';
  return exit_ok;
}

// --- detect-bits ------------------------------------------------------------

int run_detect_bits(const std::string& in, std::ostream& out) {
  out << detect_bit_level(read_frames(in)).bits() << '\n';
  return exit_ok;
}

// --- contact-sheet ----------------------------------------------------------

struct SheetArgs {
  std::string in;
  std::string out;
  int columns = 8;
  int every = 1;
  int limit = 32;
};

void add_contact_sheet(CLI::App& app, SheetArgs& a) {
  auto* c = app.add_subcommand("contact-sheet", "tile frames of a sequence into one still");
  c->add_option("--in", a.in)->required();
  c->add_option("--out", a.out, "output .pgm")->required();
  c->add_option("--columns", a.columns)->check(CLI::PositiveNumber);
  c->add_option("--every", a.every, "take every n-th frame")->check(CLI::PositiveNumber);
  c->add_option("--limit", a.limit, "maximum frames on the sheet")->check(CLI::PositiveNumber);
}

int run_contact_sheet(const SheetArgs& a) {
  const FrameStack frames = read_frames(a.in);
  std::vector<const Frame*> picked;
  for (std::size_t i = 0; i < frames.size() && picked.size() < static_cast<std::size_t>(a.limit);
       i += static_cast<std::size_t>(a.every)) {
    picked.push_back(&frames[i]);
  }
  const int h = frames.front().height();
  const int w = frames.front().width();
  const int cols = std::min<int>(a.columns, static_cast<int>(picked.size()));
  const int rows = (static_cast<int>(picked.size()) + cols - 1) / cols;
  const int gap = 2;
  Frame sheet(rows * h + (rows - 1) * gap, cols * w + (cols - 1) * gap, 1.0);
  for (std::size_t k = 0; k < picked.size(); ++k) {
    const int r0 = static_cast<int>(k) / cols * (h + gap);
    const int c0 = static_cast<int>(k) % cols * (w + gap);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) sheet(r0 + y, c0 + x) = (*picked[k])(y, x);
  }
  write_pgm(a.out, sheet, 255);
  return exit_ok;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return exit_usage;
  } catch (const IoError& e) {  // includes every FormatError
    err << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_data;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SPAD binary-frame video restoration", "spadnet"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker cap (computation is single-threaded)")
      ->check(CLI::PositiveNumber);

  SimulateArgs sim;
  DatasetArgs ds;
  TrainArgs tr;
  RestoreArgs rs;
  EvalArgs ev;
  SheetArgs sheet;
  std::string detect_in;
  add_simulate(app, sim);
  add_dataset(app, ds);
  add_train(app, tr);
  add_restore(app, rs);
  add_eval(app, ev);
  app.add_subcommand("detect-bits", "print the bit level b of a quantized sequence")
      ->add_option("--in", detect_in)
      ->required();
  add_contact_sheet(app, sheet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  return guarded(
      [&]() -> int {
        if (name == "simulate") return run_simulate(sim);
        if (name == "dataset") return run_dataset(ds);
        if (name == "train") return run_train(tr);
        if (name == "restore") return run_restore(rs);
        if (name == "eval") return run_eval(ev, out);
        if (name == "detect-bits") return run_detect_bits(detect_in, out);
        return run_contact_sheet(sheet);
      },
      err);
}

}  // namespace spadnet::cli
