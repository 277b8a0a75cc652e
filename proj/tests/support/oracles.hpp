#pragma once

// Test-only reference implementations. They deliberately share no code with
// the library paths they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "spadnet/grid.hpp"
#include "spadnet/rng.hpp"
#include "spadnet/tensor_ops.hpp"

namespace spadnet::testing {

/// Direct nested-loop 3-D cross-correlation with long double accumulation.
/// Out-of-range taps read zero, or the nearest edge voxel for `replicate`.
inline Tensor5 naive_conv3d(const Tensor5& in, const ConvKernel3& k, Padding padding) {
  const auto& s = in.shape();
  const int kt = k.kt(), kh = k.kh(), kw = k.kw();
  const bool pad = padding != Padding::valid;
  const bool edge = padding == Padding::replicate;
  const int pt = pad ? (kt - 1) / 2 : 0;
  const int ph = pad ? (kh - 1) / 2 : 0;
  const int pw = pad ? (kw - 1) / 2 : 0;
  const int ot = s.frames + 2 * pt - kt + 1;
  const int oh = s.height + 2 * ph - kh + 1;
  const int ow = s.width + 2 * pw - kw + 1;
  Tensor5 out(Shape5{s.batch, k.out_channels(), ot, oh, ow});
  for (int n = 0; n < s.batch; ++n)
    for (int co = 0; co < k.out_channels(); ++co)
      for (int t = 0; t < ot; ++t)
        for (int y = 0; y < oh; ++y)
          for (int x = 0; x < ow; ++x) {
            long double acc = k.bias[co];
            for (int ci = 0; ci < s.channels; ++ci)
              for (int dt = 0; dt < kt; ++dt)
                for (int dy = 0; dy < kh; ++dy)
                  for (int dx = 0; dx < kw; ++dx) {
                    int ti = t - pt + dt, yi = y - ph + dy, xi = x - pw + dx;
                    if (edge) {
                      ti = std::clamp(ti, 0, s.frames - 1);
                      yi = std::clamp(yi, 0, s.height - 1);
                      xi = std::clamp(xi, 0, s.width - 1);
                    }
                    if (ti < 0 || yi < 0 || xi < 0 || ti >= s.frames || yi >= s.height ||
                        xi >= s.width)
                      continue;
                    acc += static_cast<long double>(k.weights(co, ci, dt, dy, dx)) *
                           in(n, ci, ti, yi, xi);
                  }
            out(n, co, t, y, x) = static_cast<double>(acc);
          }
  return out;
}

inline Tensor5 random_tensor(Shape5 shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor5 t(shape);
  for (double& v : t.values()) v = lo + (hi - lo) * rng.uniform();
  return t;
}

inline ConvKernel3 random_kernel(int cout, int cin, int kt, int kh, int kw, Rng& rng) {
  ConvKernel3 k(cout, cin, kt, kh, kw);
  for (double& v : k.weights.values()) v = rng.uniform() * 2.0 - 1.0;
  for (double& b : k.bias) b = rng.uniform() * 2.0 - 1.0;
  return k;
}

/// Central difference of f around x[i] with step h.
inline double central_difference(const std::function<double()>& f, double& x, double h) {
  const double saved = x;
  x = saved + h;
  const double plus = f();
  x = saved - h;
  const double minus = f();
  x = saved;
  return (plus - minus) / (2.0 * h);
}

/// |a - b| / max(|a|, |b|, floor): relative error that tolerates values
/// that are zero up to rounding.
inline double relative_error(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Direct per-window SSIM: builds the full 2-D Gaussian window and evaluates
/// weighted means, variances and covariance with a two-pass formula at
/// every valid window position.
inline double direct_ssim(const Frame& a, const Frame& b, int window = 11, double sigma = 1.5,
                          double k1 = 0.01, double k2 = 0.03, double range = 1.0) {
  std::vector<double> w(static_cast<std::size_t>(window) * window);
  double total = 0.0;
  const double c = (window - 1) / 2.0;
  for (int i = 0; i < window; ++i)
    for (int j = 0; j < window; ++j) {
      const double d2 = (i - c) * (i - c) + (j - c) * (j - c);
      w[i * window + j] = std::exp(-d2 / (2 * sigma * sigma));
      total += w[i * window + j];
    }
  for (double& v : w) v /= total;
  const double c1 = (k1 * range) * (k1 * range);
  const double c2 = (k2 * range) * (k2 * range);
  double sum = 0.0;
  int count = 0;
  for (int y0 = 0; y0 + window <= a.height(); ++y0)
    for (int x0 = 0; x0 + window <= a.width(); ++x0) {
      double mx = 0, my = 0;
      for (int i = 0; i < window; ++i)
        for (int j = 0; j < window; ++j) {
          mx += w[i * window + j] * a(y0 + i, x0 + j);
          my += w[i * window + j] * b(y0 + i, x0 + j);
        }
      double vx = 0, vy = 0, cov = 0;
      for (int i = 0; i < window; ++i)
        for (int j = 0; j < window; ++j) {
          const double dx = a(y0 + i, x0 + j) - mx;
          const double dy = b(y0 + i, x0 + j) - my;
          vx += w[i * window + j] * dx * dx;
          vy += w[i * window + j] * dy * dy;
          cov += w[i * window + j] * dx * dy;
        }
      sum += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  return sum / count;
}

}  // namespace spadnet::testing
