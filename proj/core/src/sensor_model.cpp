#include "spadnet/sensor_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spadnet/log.hpp"

namespace spadnet {

void SensorConfig::validate() const {
  if (!(impinging_rate >= 0.0) || !std::isfinite(impinging_rate)) {
    throw DomainError("impinging_rate must be finite and >= 0");
  }
  if (!(dark_count_rate >= 0.0) || !std::isfinite(dark_count_rate)) {
    throw DomainError("dark_count_rate must be finite and >= 0");
  }
  if (!(pde >= 0.0 && pde <= 1.0)) throw DomainError("pde must lie in [0,1]");
  if (!(gate_time > 0.0) || !std::isfinite(gate_time)) {
    throw DomainError("gate_time must be finite and > 0");
  }
}

BitLevel::BitLevel(int bits) : bits_(bits) {
  if (bits < min_bits || bits > max_bits) {
    throw UnsupportedBitDepthError("bit level must be in 1..4, got " + std::to_string(bits));
  }
}

std::vector<double> BitLevel::levels() const {
  const int n = frames_per_sample();
  std::vector<double> out(n + 1);
  for (int k = 0; k <= n; ++k) out[k] = static_cast<double>(k) / n;
  return out;
}

double BitLevel::quantize(double v) const noexcept {
  const int n = frames_per_sample();
  const double clamped = std::clamp(v, 0.0, 1.0);
  return std::nearbyint(clamped * n) / n;
}

void HotPixelSpec::validate() const {
  if (!(density >= 0.0 && density <= max_density)) {
    throw DomainError("hot-pixel density must lie in [0, 0.05]");
  }
}

std::string_view to_string(HotPixelMode mode) noexcept {
  return mode == HotPixelMode::per_sequence_fixed ? "per-sequence-fixed"
                                                   : "per-frame-random";
}

HotPixelMode hot_pixel_mode_from_string(std::string_view name) {
  if (name == "per-sequence-fixed") return HotPixelMode::per_sequence_fixed;
  if (name == "per-frame-random") return HotPixelMode::per_frame_random;
  throw DomainError("unknown hot-pixel mode '" + std::string(name) + "'");
}

double poisson_pmf(double chi, long k) {
  if (!(chi >= 0.0) || !std::isfinite(chi)) throw DomainError("poisson_pmf: chi must be >= 0");
  if (k < 0) throw DomainError("poisson_pmf: k must be >= 0");
  if (chi == 0.0) return k == 0 ? 1.0 : 0.0;
  if (k > 20) {
    const double kd = static_cast<double>(k);
    return std::exp(kd * std::log(chi) - chi - std::lgamma(kd + 1.0));
  }
  double factorial = 1.0;
  for (long i = 2; i <= k; ++i) factorial *= static_cast<double>(i);
  return std::pow(chi, static_cast<double>(k)) * std::exp(-chi) / factorial;
}

double detection_probability(double chi) {
  if (!(chi >= 0.0)) throw DomainError("detection_probability: chi must be >= 0");
  return -std::expm1(-chi);
}

double expected_counts(const SensorConfig& config, double radiance) {
  config.validate();
  if (!(radiance >= 0.0) || !std::isfinite(radiance)) {
    throw DomainError("expected_counts: radiance must be finite and >= 0");
  }
  return (radiance * config.impinging_rate * config.pde + config.dark_count_rate) *
         config.gate_time;
}

BitFrame sample_binary_frame(const Frame& intensity, Rng& rng) {
  for (double v : intensity.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw DomainError("sample_binary_frame: intensity outside [0,1]");
    }
  }
  BitFrame out(intensity.height(), intensity.width());
  auto src = intensity.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = rng.uniform() < src[i] ? 1 : 0;
  }
  return out;
}

QuantizedSequence accumulate_bits(const BinarySequence& seq, BitLevel level) {
  if (seq.frames.empty()) throw DomainError("accumulate_bits: empty sequence");
  const auto n = static_cast<std::size_t>(level.frames_per_sample());
  const auto groups = seq.frames.size() / n;
  if (const auto rest = seq.frames.size() % n; rest != 0) {
    log::warn("accumulate_bits: dropping " + std::to_string(rest) +
              " trailing frame(s) that do not fill a group of " + std::to_string(n));
  }
  if (groups == 0) {
    throw DomainError("accumulate_bits: fewer frames than one group of N_b");
  }
  const int h = seq.frames.front().height();
  const int w = seq.frames.front().width();

  QuantizedSequence out;
  out.bit_level = level;
  out.frames.reserve(groups);
  std::vector<int> counts(static_cast<std::size_t>(h) * w);
  for (std::size_t g = 0; g < groups; ++g) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t t = 0; t < n; ++t) {
      const auto& f = seq.frames[g * n + t];
      if (f.height() != h || f.width() != w) {
        throw ShapeError("accumulate_bits: frames differ in size");
      }
      auto bits = f.values();
      for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += bits[i] ? 1 : 0;
    }
    Frame frame(h, w);
    auto vals = frame.values();
    const double denom = static_cast<double>(n);
    for (std::size_t i = 0; i < counts.size(); ++i) vals[i] = counts[i] / denom;
    out.frames.push_back(std::move(frame));
  }
  return out;
}

std::vector<std::size_t> hot_pixel_sites(int height, int width, const HotPixelSpec& spec,
                                         std::size_t frame_index) {
  spec.validate();
  const auto total = static_cast<std::size_t>(height) * width;
  const auto count = static_cast<std::size_t>(std::llround(spec.density * total));
  if (count == 0) return {};

  Rng rng = spec.mode == HotPixelMode::per_sequence_fixed ? Rng(spec.seed)
                                                          : Rng(spec.seed).split(frame_index);
  std::vector<std::size_t> perm(total);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_index(total - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(count);
  std::sort(perm.begin(), perm.end());
  return perm;
}

QuantizedSequence inject_hot_pixels(const QuantizedSequence& seq, const HotPixelSpec& spec) {
  spec.validate();
  QuantizedSequence out = seq;
  if (spec.density == 0.0) return out;
  std::vector<std::size_t> fixed;
  for (std::size_t t = 0; t < out.frames.size(); ++t) {
    auto& frame = out.frames[t];
    if (spec.mode == HotPixelMode::per_sequence_fixed) {
      if (t == 0) fixed = hot_pixel_sites(frame.height(), frame.width(), spec, 0);
      for (auto site : fixed) frame.values()[site] = 1.0;
    } else {
      for (auto site : hot_pixel_sites(frame.height(), frame.width(), spec, t)) {
        frame.values()[site] = 1.0;
      }
    }
  }
  return out;
}

std::vector<Mask> hot_pixel_masks(const Extent3& extent, const HotPixelSpec& spec) {
  std::vector<Mask> masks;
  masks.reserve(extent.frames);
  for (int t = 0; t < extent.frames; ++t) {
    Mask m(extent.height, extent.width, 0);
    const std::size_t index = spec.mode == HotPixelMode::per_sequence_fixed ? 0 : t;
    for (auto site : hot_pixel_sites(extent.height, extent.width, spec, index)) {
      m.values()[site] = 1;
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

BitLevel detect_bit_level(const FrameStack& frames) {
  if (frames.empty()) throw DomainError("detect_bit_level: empty sequence");
  for (int bits = BitLevel::min_bits; bits <= BitLevel::max_bits; ++bits) {
    const double n = static_cast<double>((1 << bits) - 1);
    bool fits = true;
    for (const auto& f : frames) {
      for (double v : f.values()) {
        if (!(v >= -level_match_tolerance && v <= 1.0 + level_match_tolerance) ||
            std::abs(v - std::nearbyint(v * n) / n) > level_match_tolerance) {
          fits = false;
          break;
        }
      }
      if (!fits) break;
    }
    if (fits) return BitLevel(bits);
  }
  throw UnsupportedBitDepthError(
      "pixel values do not match k/N_b for any supported bit depth (1-4)");
}

}  // namespace spadnet
