#include "spadnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

namespace spadnet {
namespace {

void require_same_dims(const FrameStack& a, const FrameStack& b, const char* what) {
  const Extent3 ea = extent_of(a);
  const Extent3 eb = extent_of(b);
  if (!(ea == eb)) throw ShapeError(std::string(what) + ": sequence dimensions differ");
  if (a.empty()) throw DomainError(std::string(what) + ": empty sequence");
}

double psnr_from_mse(double mse) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

std::vector<double> gaussian_taps(int window, double sigma) {
  std::vector<double> taps(static_cast<std::size_t>(window));
  const double centre = (window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - centre;
    taps[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// 'valid' separable filtering of a row-major h x w plane.
std::vector<double> filter_valid(const std::vector<double>& src, int h, int w,
                                 const std::vector<double>& taps) {
  const int k = static_cast<int>(taps.size());
  const int oh = h - k + 1;
  const int ow = w - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += taps[i] * src[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += taps[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(const Frame& a, const Frame& b) {
  if (!a.same_shape(b)) throw ShapeError("psnr: frame dimensions differ");
  double sum = 0.0;
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
  return psnr_from_mse(sum / static_cast<double>(x.size()));
}

double psnr(const FrameStack& a, const FrameStack& b) {
  require_same_dims(a, b, "psnr");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    auto x = a[t].values();
    auto y = b[t].values();
    for (std::size_t i = 0; i < x.size(); ++i) sum += (x[i] - y[i]) * (x[i] - y[i]);
    count += x.size();
  }
  return psnr_from_mse(sum / static_cast<double>(count));
}

double ssim(const Frame& a, const Frame& b, const SsimParams& params) {
  if (!a.same_shape(b)) throw ShapeError("ssim: frame dimensions differ");
  if (a.height() < params.window || a.width() < params.window) {
    throw DomainError("ssim: frame smaller than the " + std::to_string(params.window) +
                      "x" + std::to_string(params.window) + " window");
  }
  const int h = a.height();
  const int w = a.width();
  const auto taps = gaussian_taps(params.window, params.sigma);
  const std::vector<double> x(a.values().begin(), a.values().end());
  const std::vector<double> y(b.values().begin(), b.values().end());
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, h, w, taps);
  const auto my = filter_valid(y, h, w, taps);
  const auto mxx = filter_valid(xx, h, w, taps);
  const auto myy = filter_valid(yy, h, w, taps);
  const auto mxy = filter_valid(xy, h, w, taps);

  const double c1 = std::pow(params.k1 * params.dynamic_range, 2);
  const double c2 = std::pow(params.k2 * params.dynamic_range, 2);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = mxx[i] - mx[i] * mx[i];
    const double vy = myy[i] - my[i] * my[i];
    const double cov = mxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

double ssim(const FrameStack& a, const FrameStack& b, const SsimParams& params) {
  require_same_dims(a, b, "ssim");
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) sum += ssim(a[t], b[t], params);
  return sum / static_cast<double>(a.size());
}

Frame median_hot_pixel_fix(const Frame& frame, const Mask& hot, MedianFixReport* report) {
  if (!frame.same_shape(Frame(hot.height(), hot.width()))) {
    throw ShapeError("median_hot_pixel_fix: mask and frame differ in size");
  }
  Frame out = frame;
  MedianFixReport local;
  std::vector<double> neighbours;
  neighbours.reserve(8);
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      if (!hot(y, x)) continue;
      neighbours.clear();
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = y + dy;
          const int xx = x + dx;
          if ((dy == 0 && dx == 0) || yy < 0 || xx < 0 || yy >= frame.height() ||
              xx >= frame.width() || hot(yy, xx)) {
            continue;
          }
          neighbours.push_back(frame(yy, xx));
        }
      }
      if (neighbours.empty()) {
        local.unresolved.emplace_back(y, x);
        continue;
      }
      std::sort(neighbours.begin(), neighbours.end());
      const std::size_t n = neighbours.size();
      out(y, x) = n % 2 == 1 ? neighbours[n / 2]
                             : 0.5 * (neighbours[n / 2 - 1] + neighbours[n / 2]);
      ++local.replaced;
    }
  }
  if (report) *report = std::move(local);
  return out;
}

Mask detect_hot_pixels(const FrameStack& frames, double threshold, int min_frames) {
  const Extent3 e = extent_of(frames);
  if (e.frames < min_frames) {
    throw DomainError("detect_hot_pixels: need at least " + std::to_string(min_frames) +
                      " frames, got " + std::to_string(e.frames));
  }
  std::vector<double> sum(static_cast<std::size_t>(e.height) * e.width, 0.0);
  for (const auto& f : frames) {
    auto v = f.values();
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += v[i];
  }
  Mask mask(e.height, e.width, 0);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    mask.values()[i] = sum[i] / e.frames > threshold ? 1 : 0;
  }
  return mask;
}

MetricReport evaluate(const FrameStack& reference, const FrameStack& test,
                      const SsimParams& params) {
  require_same_dims(reference, test, "evaluate");
  MetricReport r;
  const Extent3 e = extent_of(reference);
  r.frames = e.frames;
  r.height = e.height;
  r.width = e.width;
  r.psnr_db = psnr(reference, test);
  double ssim_sum = 0.0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    r.frame_psnr.push_back(psnr(reference[t], test[t]));
    r.frame_ssim.push_back(ssim(reference[t], test[t], params));
    ssim_sum += r.frame_ssim.back();
  }
  r.ssim = ssim_sum / static_cast<double>(reference.size());
  return r;
}

std::string report_to_string(const MetricReport& report) {
  auto number = [](double v) -> nlohmann::json {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
  };
  nlohmann::json j;
  j["schema"] = "spadnet-metrics";
  j["version"] = 1;
  j["reference"] = report.reference;
  j["test"] = report.test;
  j["frames"] = report.frames;
  j["height"] = report.height;
  j["width"] = report.width;
  j["psnr_db"] = number(report.psnr_db);
  j["ssim"] = report.ssim;
  j["hot_pixel_fix"] = report.hot_pixel_fix;
  nlohmann::json fp = nlohmann::json::array();
  for (double v : report.frame_psnr) fp.push_back(number(v));
  j["frame_psnr_db"] = fp;
  j["frame_ssim"] = report.frame_ssim;
  return j.dump(2) + "\n";
}

void write_report(const std::filesystem::path& path, const MetricReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot create " + path.string());
  out << report_to_string(report);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace spadnet
