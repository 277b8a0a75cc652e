#include "spadnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "spadnet/log.hpp"
#include "spadnet/video_io.hpp"

namespace spadnet {
namespace {

bool fits(const Extent3& have, const Extent3& need) {
  return have.frames >= need.frames && have.height >= need.height && have.width >= need.width;
}

FrameStack crop(const FrameStack& frames, Extent3 origin, Extent3 size) {
  FrameStack out;
  out.reserve(size.frames);
  for (int t = 0; t < size.frames; ++t) {
    const Frame& src = frames[origin.frames + t];
    Frame f(size.height, size.width);
    for (int y = 0; y < size.height; ++y) {
      for (int x = 0; x < size.width; ++x) f(y, x) = src(origin.height + y, origin.width + x);
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::string provenance_of(const std::string& source, Extent3 origin) {
  return source + "@t" + std::to_string(origin.frames) + ",y" + std::to_string(origin.height) +
         ",x" + std::to_string(origin.width);
}

std::optional<VideoSource> prepare_source(const VideoSource& raw, int factor,
                                          const Extent3& dims) {
  if (raw.frames.empty()) {
    log::warn("skipping source '" + raw.id + "': no frames");
    return std::nullopt;
  }
  VideoSource out{raw.id, {}};
  const Extent3 raw_extent = extent_of(raw.frames);
  if (raw_extent.height / factor < dims.height || raw_extent.width / factor < dims.width ||
      raw_extent.frames < dims.frames) {
    log::warn("skipping source '" + raw.id + "': " + std::to_string(raw_extent.frames) +
              " frames of " + std::to_string(raw_extent.height) + "x" +
              std::to_string(raw_extent.width) + " cannot supply " +
              std::to_string(dims.frames) + "x" + std::to_string(dims.height) + "x" +
              std::to_string(dims.width) + " after downsampling by " + std::to_string(factor));
    return std::nullopt;
  }
  out.frames.reserve(raw.frames.size());
  for (const auto& f : raw.frames) out.frames.push_back(box_downsample(f, factor));
  return out;
}

void validate_options(const CleanBuildOptions& o) {
  if (o.factor < 1) throw DomainError("downsample factor must be >= 1");
  if (o.count < 1) throw DomainError("sequence count must be >= 1");
  if (o.dims.frames < 1 || o.dims.height < 1 || o.dims.width < 1) {
    throw DomainError("sequence dimensions must be positive");
  }
}

CleanBuild cut_sequences(const std::vector<VideoSource>& usable, std::vector<std::string> ids,
                         const CleanBuildOptions& o) {
  if (usable.empty()) throw DomainError("build_clean_sequences: no usable sources");
  CleanBuild build;
  auto& m = build.manifest;
  m.rng_algorithm = std::string(Rng::algorithm_name);
  m.seed = o.seed;
  m.source_kind = SourceKind::directories;
  m.sources = std::move(ids);
  m.downsample_factor = o.factor;
  m.dims = o.dims;
  m.test_count = default_test_count(o.count);
  m.train_count = o.count - m.test_count;

  const Rng root(o.seed);
  for (int i = 0; i < o.count; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    const auto& src = usable[rng.uniform_index(usable.size())];
    const Extent3 e = extent_of(src.frames);
    const Extent3 origin{
        static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(e.frames - o.dims.frames + 1))),
        static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(e.height - o.dims.height + 1))),
        static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(e.width - o.dims.width + 1)))};
    const std::uint64_t seq_seed = rng.next_u64();
    build.sequences.push_back({crop(src.frames, origin, o.dims), provenance_of(src.id, origin)});
    m.sequences.push_back({src.id, origin.frames, origin.height, origin.width, seq_seed});
  }
  return build;
}

FrameStack gradient_clip(Extent3 dims, std::uint64_t seed) {
  Rng rng(seed);
  const double base = 0.3 + 0.4 * rng.uniform();
  double gt = 0.0, gy = 0.0, gx = 0.0;
  if (rng.coin()) {
    // Each ramp spans at most +-0.05 over its axis.
    gt = (rng.uniform() - 0.5) * 0.1 / dims.frames;
    gy = (rng.uniform() - 0.5) * 0.1 / dims.height;
    gx = (rng.uniform() - 0.5) * 0.1 / dims.width;
  }
  FrameStack frames;
  frames.reserve(dims.frames);
  for (int t = 0; t < dims.frames; ++t) {
    Frame f(dims.height, dims.width);
    for (int y = 0; y < dims.height; ++y) {
      for (int x = 0; x < dims.width; ++x) {
        f(y, x) = base + gt * (t - 0.5 * dims.frames) + gy * (y - 0.5 * dims.height) +
                  gx * (x - 0.5 * dims.width);
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

// Bilinear sample with edge replication.
double sample_bilinear(const Frame& f, double y, double x) {
  y = std::clamp(y, 0.0, static_cast<double>(f.height() - 1));
  x = std::clamp(x, 0.0, static_cast<double>(f.width() - 1));
  const int y0 = static_cast<int>(std::floor(y));
  const int x0 = static_cast<int>(std::floor(x));
  const int y1 = std::min(y0 + 1, f.height() - 1);
  const int x1 = std::min(x0 + 1, f.width() - 1);
  const double fy = y - y0;
  const double fx = x - x0;
  return (1 - fy) * ((1 - fx) * f(y0, x0) + fx * f(y0, x1)) +
         fy * ((1 - fx) * f(y1, x0) + fx * f(y1, x1));
}

Frame rescale_about_centre(const Frame& f, double scale) {
  Frame out(f.height(), f.width());
  const double cy = (f.height() - 1) / 2.0;
  const double cx = (f.width() - 1) / 2.0;
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      out(y, x) = sample_bilinear(f, (y - cy) / scale + cy, (x - cx) / scale + cx);
    }
  }
  return out;
}

Frame flip_horizontal(const Frame& f) {
  Frame out(f.height(), f.width());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) out(y, x) = f(y, f.width() - 1 - x);
  }
  return out;
}

Frame flip_vertical(const Frame& f) {
  Frame out(f.height(), f.width());
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) out(y, x) = f(f.height() - 1 - y, x);
  }
  return out;
}

// One counter-clockwise quarter turn.
Frame rotate_quarter(const Frame& f) {
  Frame out(f.width(), f.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) out(y, x) = f(x, f.width() - 1 - y);
  }
  return out;
}

Frame transform(const Frame& f, const AugmentParams& p) {
  Frame out = p.scale != 1.0 ? rescale_about_centre(f, p.scale) : f;
  if (p.flip_horizontal) out = flip_horizontal(out);
  if (p.flip_vertical) out = flip_vertical(out);
  for (int k = 0; k < ((p.rotate_quarters % 4) + 4) % 4; ++k) out = rotate_quarter(out);
  return out;
}

}  // namespace

void PatchSpec::validate(int num_blocks) const {
  if (depth < 1 || height < 1 || width < 1) throw DomainError("patch dimensions must be positive");
  const int min_depth = 2 * num_blocks * 3 + 1;
  if (depth < min_depth) {
    throw DomainError("patch depth " + std::to_string(depth) + " is below the minimum " +
                      std::to_string(min_depth) + " for " + std::to_string(num_blocks) +
                      " blocks");
  }
}

Frame box_downsample(const Frame& frame, int factor) {
  if (factor < 1) throw DomainError("downsample factor must be >= 1");
  if (factor == 1) return frame;
  const int oh = frame.height() / factor;
  const int ow = frame.width() / factor;
  if (oh < 1 || ow < 1) throw DomainError("frame smaller than the downsample factor");
  Frame out(oh, ow);
  const double inv = 1.0 / (static_cast<double>(factor) * factor);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int dy = 0; dy < factor; ++dy) {
        for (int dx = 0; dx < factor; ++dx) s += frame(y * factor + dy, x * factor + dx);
      }
      out(y, x) = s * inv;
    }
  }
  return out;
}

CleanBuild build_clean_sequences(const std::vector<VideoSource>& sources,
                                 const CleanBuildOptions& options) {
  validate_options(options);
  std::vector<VideoSource> usable;
  std::vector<std::string> ids;
  for (const auto& src : sources) {
    if (auto prepared = prepare_source(src, options.factor, options.dims)) {
      ids.push_back(src.id);
      usable.push_back(std::move(*prepared));
    }
  }
  return cut_sequences(usable, std::move(ids), options);
}

CleanBuild build_clean_sequences(const std::vector<std::filesystem::path>& source_dirs,
                                 const CleanBuildOptions& options) {
  validate_options(options);
  std::vector<VideoSource> usable;
  std::vector<std::string> ids;
  for (const auto& dir : source_dirs) {
    VideoSource raw{dir.string(), {}};
    try {
      raw.frames = read_frames(dir);
    } catch (const Error& e) {
      log::warn("skipping source '" + raw.id + "': " + e.what());
      continue;
    }
    if (auto prepared = prepare_source(raw, options.factor, options.dims)) {
      ids.push_back(raw.id);
      usable.push_back(std::move(*prepared));
    }
  }
  return cut_sequences(usable, std::move(ids), options);
}

std::vector<CleanSequence> make_gradient_clips(int count, Extent3 dims, std::uint64_t seed) {
  if (count < 1) throw DomainError("clip count must be >= 1");
  std::vector<CleanSequence> clips;
  const Rng root(seed);
  for (int i = 0; i < count; ++i) {
    const std::uint64_t clip_seed = root.split(static_cast<std::uint64_t>(i)).next_u64();
    clips.push_back({gradient_clip(dims, clip_seed), "synthetic-gradient#" + std::to_string(i)});
  }
  return clips;
}

TrainingPair synthesize_pair(const CleanSequence& clean, BitLevel level,
                             const HotPixelSpec& hot, Rng& rng) {
  const Extent3 e = extent_of(clean.frames);
  if (e.frames == 0) throw DomainError("synthesize_pair: empty clean sequence");
  const int n = level.frames_per_sample();
  QuantizedSequence q;
  q.bit_level = level;
  q.frames.reserve(e.frames);
  std::vector<int> counts(static_cast<std::size_t>(e.height) * e.width);
  for (const auto& frame : clean.frames) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int k = 0; k < n; ++k) {
      const BitFrame bits = sample_binary_frame(frame, rng);
      auto b = bits.values();
      for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += b[i];
    }
    Frame out(e.height, e.width);
    auto v = out.values();
    for (std::size_t i = 0; i < counts.size(); ++i) v[i] = counts[i] / static_cast<double>(n);
    q.frames.push_back(std::move(out));
  }
  return {inject_hot_pixels(q, hot), clean, level};
}

TrainingPair sample_patch(const TrainingPair& pair, const PatchSpec& spec, Rng& rng) {
  const Extent3 e = extent_of(pair.target.frames);
  if (!(extent_of(pair.input.frames) == e)) {
    throw ShapeError("sample_patch: input and target dimensions differ");
  }
  const Extent3 size = spec.extent();
  if (!fits(e, size)) {
    throw DomainError("sample_patch: patch larger than the sequence");
  }
  if (e == size) return pair;
  const Extent3 origin{
      static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(e.frames - size.frames + 1))),
      static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(e.height - size.height + 1))),
      static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(e.width - size.width + 1)))};
  TrainingPair out;
  out.bit_level = pair.bit_level;
  out.input.bit_level = pair.input.bit_level;
  out.input.frames = crop(pair.input.frames, origin, size);
  out.target.frames = crop(pair.target.frames, origin, size);
  out.target.provenance = pair.target.provenance;
  return out;
}

AugmentParams draw_augmentation(Rng& rng, bool square) {
  AugmentParams p;
  if (rng.coin()) {
    p.scale = AugmentParams::scale_choices[rng.uniform_index(std::size(AugmentParams::scale_choices))];
  }
  p.flip_horizontal = rng.coin();
  p.flip_vertical = rng.coin();
  p.rotate_quarters = square ? static_cast<int>(rng.uniform_index(4))
                             : 2 * static_cast<int>(rng.uniform_index(2));
  return p;
}

TrainingPair apply_augmentation(const TrainingPair& pair, const AugmentParams& params) {
  if (!(params.scale > 0.0)) throw DomainError("augmentation scale must be > 0");
  TrainingPair out;
  out.bit_level = pair.bit_level;
  out.input.bit_level = pair.input.bit_level;
  out.target.provenance = pair.target.provenance;
  for (const auto& f : pair.input.frames) {
    Frame g = transform(f, params);
    if (params.scale != 1.0) {
      for (double& v : g.values()) v = pair.input.bit_level.quantize(v);
    }
    out.input.frames.push_back(std::move(g));
  }
  for (const auto& f : pair.target.frames) out.target.frames.push_back(transform(f, params));
  return out;
}

TrainingPair augment(const TrainingPair& pair, Rng& rng) {
  const Extent3 e = extent_of(pair.input.frames);
  return apply_augmentation(pair, draw_augmentation(rng, e.height == e.width));
}

DatasetManifest make_synthetic_manifest(int count, Extent3 dims, BitLevel level,
                                        const HotPixelSpec& hot, std::uint64_t seed) {
  if (count < 1) throw DomainError("sequence count must be >= 1");
  hot.validate();
  DatasetManifest m;
  m.rng_algorithm = std::string(Rng::algorithm_name);
  m.seed = seed;
  m.source_kind = SourceKind::synthetic_gradient;
  m.downsample_factor = 1;
  m.dims = dims;
  m.bit_level = level.bits();
  m.hot_density = hot.density;
  m.hot_mode = hot.mode;
  m.hot_seed = hot.seed;
  m.test_count = default_test_count(count);
  m.train_count = count - m.test_count;
  const Rng root(seed);
  for (int i = 0; i < count; ++i) {
    m.sequences.push_back({"synthetic-gradient", 0, 0, 0,
                           root.split(static_cast<std::uint64_t>(i)).next_u64()});
  }
  return m;
}

std::vector<TrainingPair> generate_dataset(const DatasetManifest& manifest,
                                           const std::vector<VideoSource>& sources) {
  if (manifest.rng_algorithm != Rng::algorithm_name) {
    throw DomainError("manifest uses RNG '" + manifest.rng_algorithm + "', this build provides '" +
                      std::string(Rng::algorithm_name) + "'");
  }
  const BitLevel level(manifest.bit_level);
  std::vector<VideoSource> prepared;
  if (manifest.source_kind == SourceKind::directories) {
    for (const auto& src : sources) {
      if (auto p = prepare_source(src, manifest.downsample_factor, manifest.dims)) {
        prepared.push_back(std::move(*p));
      }
    }
  }
  const Rng hot_root(manifest.hot_seed);
  std::vector<TrainingPair> pairs;
  pairs.reserve(manifest.sequences.size());
  for (std::size_t i = 0; i < manifest.sequences.size(); ++i) {
    const auto& rec = manifest.sequences[i];
    CleanSequence clean;
    if (manifest.source_kind == SourceKind::synthetic_gradient) {
      clean = {gradient_clip(manifest.dims, rec.seed), "synthetic-gradient#" + std::to_string(i)};
    } else {
      auto it = std::find_if(prepared.begin(), prepared.end(),
                             [&](const VideoSource& s) { return s.id == rec.source; });
      if (it == prepared.end()) {
        throw DomainError("manifest references unavailable source '" + rec.source + "'");
      }
      const Extent3 origin{rec.t0, rec.y0, rec.x0};
      if (!fits(extent_of(it->frames), {rec.t0 + manifest.dims.frames,
                                        rec.y0 + manifest.dims.height,
                                        rec.x0 + manifest.dims.width})) {
        throw DomainError("manifest window exceeds source '" + rec.source + "'");
      }
      clean = {crop(it->frames, origin, manifest.dims), provenance_of(rec.source, origin)};
    }
    HotPixelSpec hot{manifest.hot_density, hot_root.split(i).next_u64(), manifest.hot_mode};
    Rng rng = Rng(rec.seed).split(1);
    pairs.push_back(synthesize_pair(clean, level, hot, rng));
  }
  return pairs;
}

}  // namespace spadnet
