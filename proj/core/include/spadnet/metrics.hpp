#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spadnet/grid.hpp"

namespace spadnet {

/// 10 log10(1 / MSE) over all voxels, peak 1. Identical inputs give +inf.
double psnr(const FrameStack& a, const FrameStack& b);
double psnr(const Frame& a, const Frame& b);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Mean SSIM over valid window positions of one frame (Gaussian window).
double ssim(const Frame& a, const Frame& b, const SsimParams& params = {});

/// Per-frame SSIM averaged over frames.
double ssim(const FrameStack& a, const FrameStack& b, const SsimParams& params = {});

struct MedianFixReport {
  std::size_t replaced = 0;
  std::vector<std::pair<int, int>> unresolved;  // (row, col) with no usable neighbour
};

/// Replaces every masked pixel with the median of its unmasked 3x3
/// neighbours (even count: mean of the two middle values). Neighbourhoods
/// clip at the border.
Frame median_hot_pixel_fix(const Frame& frame, const Mask& hot,
                           MedianFixReport* report = nullptr);

/// Pixels whose temporal mean exceeds `threshold`; needs >= `min_frames`.
Mask detect_hot_pixels(const FrameStack& frames, double threshold = 0.98,
                       int min_frames = 100);

struct MetricReport {
  std::string reference;
  std::string test;
  int frames = 0;
  int height = 0;
  int width = 0;
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::vector<double> frame_psnr;
  std::vector<double> frame_ssim;
  bool hot_pixel_fix = false;
};

MetricReport evaluate(const FrameStack& reference, const FrameStack& test,
                      const SsimParams& params = {});

/// JSON report; an infinite PSNR is written as the string "inf".
std::string report_to_string(const MetricReport& report);
void write_report(const std::filesystem::path& path, const MetricReport& report);

}  // namespace spadnet
