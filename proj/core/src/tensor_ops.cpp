#include "spadnet/tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include <Eigen/Core>

namespace spadnet {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using StridedMap = Eigen::Map<RowMatrix, 0, Eigen::OuterStride<>>;
using ConstStridedMap = Eigen::Map<const RowMatrix, 0, Eigen::OuterStride<>>;

// Upper bound on the im2col scratch buffer, in doubles (32 MiB).
constexpr std::size_t kColumnBudget = std::size_t{4} << 20;

struct ConvGeometry {
  int batch, cin, cout;
  int t, h, w;     // input extents
  int kt, kh, kw;
  int pt, ph, pw;  // leading padding
  bool replicate;
  int ot, oh, ow;  // output extents

  [[nodiscard]] std::size_t rows() const noexcept {
    return static_cast<std::size_t>(cin) * kt * kh * kw;
  }
  [[nodiscard]] std::size_t plane() const noexcept {
    return static_cast<std::size_t>(oh) * ow;
  }
  [[nodiscard]] int frames_per_chunk() const noexcept {
    const std::size_t per_frame = rows() * plane();
    return static_cast<int>(std::clamp<std::size_t>(kColumnBudget / per_frame, 1, ot));
  }
};

ConvGeometry geometry(const Tensor5& input, const ConvKernel3& kernel, Padding padding) {
  kernel.validate();
  const auto& s = input.shape();
  if (s.channels != kernel.in_channels()) {
    throw ShapeError("conv3d: input has " + std::to_string(s.channels) +
                     " channels, kernel expects " + std::to_string(kernel.in_channels()));
  }
  ConvGeometry g{};
  g.batch = s.batch;
  g.cin = s.channels;
  g.cout = kernel.out_channels();
  g.t = s.frames;
  g.h = s.height;
  g.w = s.width;
  g.kt = kernel.kt();
  g.kh = kernel.kh();
  g.kw = kernel.kw();
  g.replicate = padding == Padding::replicate;
  if (padding != Padding::valid) {
    g.pt = (g.kt - 1) / 2;
    g.ph = (g.kh - 1) / 2;
    g.pw = (g.kw - 1) / 2;
  }
  g.ot = g.t + 2 * g.pt - g.kt + 1;
  g.oh = g.h + 2 * g.ph - g.kh + 1;
  g.ow = g.w + 2 * g.pw - g.kw + 1;
  if (g.ot < 1 || g.oh < 1 || g.ow < 1) {
    throw ShapeError("conv3d: kernel larger than valid input extent " + s.str());
  }
  return g;
}

// Column matrix for output frames [t0, t0 + nt): row = (ci, dt, dy, dx),
// column = (to, yo, xo).
void im2col(const double* in, const ConvGeometry& g, int t0, int nt, double* col) {
  const std::size_t plane = g.plane();
  const std::size_t cols = plane * nt;
  std::size_t row = 0;
  for (int ci = 0; ci < g.cin; ++ci) {
    const double* chan = in + static_cast<std::size_t>(ci) * g.t * g.h * g.w;
    for (int dt = 0; dt < g.kt; ++dt) {
      for (int dy = 0; dy < g.kh; ++dy) {
        for (int dx = 0; dx < g.kw; ++dx, ++row) {
          double* dst_row = col + row * cols;
          const int xo_lo = std::max(0, g.pw - dx);
          const int xo_hi = std::min(g.ow, g.w + g.pw - dx);
          for (int j = 0; j < nt; ++j) {
            const int ti = t0 + j - g.pt + dt;
            double* dst_frame = dst_row + j * plane;
            if (ti < 0 || ti >= g.t) {
              std::fill(dst_frame, dst_frame + plane, 0.0);
              continue;
            }
            for (int yo = 0; yo < g.oh; ++yo) {
              double* dst = dst_frame + static_cast<std::size_t>(yo) * g.ow;
              const int yi = yo - g.ph + dy;
              if (yi < 0 || yi >= g.h || xo_lo >= xo_hi) {
                std::fill(dst, dst + g.ow, 0.0);
                continue;
              }
              const double* src =
                  chan + (static_cast<std::size_t>(ti) * g.h + yi) * g.w + (xo_lo - g.pw + dx);
              std::fill(dst, dst + xo_lo, 0.0);
              std::memcpy(dst + xo_lo, src, sizeof(double) * (xo_hi - xo_lo));
              std::fill(dst + xo_hi, dst + g.ow, 0.0);
            }
          }
        }
      }
    }
  }
}

// Clamped source index along one axis for every output position.
std::vector<int> clamped_index(int out_len, int in_len, int pad, int d) {
  std::vector<int> idx(static_cast<std::size_t>(out_len));
  for (int o = 0; o < out_len; ++o) idx[o] = std::clamp(o - pad + d, 0, in_len - 1);
  return idx;
}

// im2col with edge replication instead of zeros.
void im2col_replicate(const double* in, const ConvGeometry& g, int t0, int nt, double* col) {
  const std::size_t plane = g.plane();
  const std::size_t cols = plane * nt;
  std::size_t row = 0;
  for (int ci = 0; ci < g.cin; ++ci) {
    const double* chan = in + static_cast<std::size_t>(ci) * g.t * g.h * g.w;
    for (int dt = 0; dt < g.kt; ++dt) {
      for (int dy = 0; dy < g.kh; ++dy) {
        const auto yi = clamped_index(g.oh, g.h, g.ph, dy);
        for (int dx = 0; dx < g.kw; ++dx, ++row) {
          const auto xi = clamped_index(g.ow, g.w, g.pw, dx);
          double* dst_row = col + row * cols;
          for (int j = 0; j < nt; ++j) {
            const int ti = std::clamp(t0 + j - g.pt + dt, 0, g.t - 1);
            for (int yo = 0; yo < g.oh; ++yo) {
              double* dst = dst_row + j * plane + static_cast<std::size_t>(yo) * g.ow;
              const double* src = chan + (static_cast<std::size_t>(ti) * g.h + yi[yo]) * g.w;
              for (int xo = 0; xo < g.ow; ++xo) dst[xo] = src[xi[xo]];
            }
          }
        }
      }
    }
  }
}

void col2im_replicate(const double* col, const ConvGeometry& g, int t0, int nt,
                      double* grad_in) {
  const std::size_t plane = g.plane();
  const std::size_t cols = plane * nt;
  std::size_t row = 0;
  for (int ci = 0; ci < g.cin; ++ci) {
    double* chan = grad_in + static_cast<std::size_t>(ci) * g.t * g.h * g.w;
    for (int dt = 0; dt < g.kt; ++dt) {
      for (int dy = 0; dy < g.kh; ++dy) {
        const auto yi = clamped_index(g.oh, g.h, g.ph, dy);
        for (int dx = 0; dx < g.kw; ++dx, ++row) {
          const auto xi = clamped_index(g.ow, g.w, g.pw, dx);
          const double* src_row = col + row * cols;
          for (int j = 0; j < nt; ++j) {
            const int ti = std::clamp(t0 + j - g.pt + dt, 0, g.t - 1);
            for (int yo = 0; yo < g.oh; ++yo) {
              const double* src = src_row + j * plane + static_cast<std::size_t>(yo) * g.ow;
              double* dst = chan + (static_cast<std::size_t>(ti) * g.h + yi[yo]) * g.w;
              for (int xo = 0; xo < g.ow; ++xo) dst[xi[xo]] += src[xo];
            }
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-add columns back into the input gradient.
void col2im(const double* col, const ConvGeometry& g, int t0, int nt, double* grad_in) {
  const std::size_t plane = g.plane();
  const std::size_t cols = plane * nt;
  std::size_t row = 0;
  for (int ci = 0; ci < g.cin; ++ci) {
    double* chan = grad_in + static_cast<std::size_t>(ci) * g.t * g.h * g.w;
    for (int dt = 0; dt < g.kt; ++dt) {
      for (int dy = 0; dy < g.kh; ++dy) {
        for (int dx = 0; dx < g.kw; ++dx, ++row) {
          const double* src_row = col + row * cols;
          const int xo_lo = std::max(0, g.pw - dx);
          const int xo_hi = std::min(g.ow, g.w + g.pw - dx);
          if (xo_lo >= xo_hi) continue;
          for (int j = 0; j < nt; ++j) {
            const int ti = t0 + j - g.pt + dt;
            if (ti < 0 || ti >= g.t) continue;
            for (int yo = 0; yo < g.oh; ++yo) {
              const int yi = yo - g.ph + dy;
              if (yi < 0 || yi >= g.h) continue;
              const double* src = src_row + j * plane + static_cast<std::size_t>(yo) * g.ow;
              double* dst =
                  chan + (static_cast<std::size_t>(ti) * g.h + yi) * g.w + (xo_lo - g.pw + dx);
              for (int xo = xo_lo; xo < xo_hi; ++xo) dst[xo - xo_lo] += src[xo];
            }
          }
        }
      }
    }
  }
}

void gather(const double* in, const ConvGeometry& g, int t0, int nt, double* col) {
  if (g.replicate) {
    im2col_replicate(in, g, t0, nt, col);
  } else {
    im2col(in, g, t0, nt, col);
  }
}

void scatter(const double* col, const ConvGeometry& g, int t0, int nt, double* grad_in) {
  if (g.replicate) {
    col2im_replicate(col, g, t0, nt, grad_in);
  } else {
    col2im(col, g, t0, nt, grad_in);
  }
}

}  // namespace

ConvKernel3::ConvKernel3(int out_channels, int in_channels, int kt, int kh, int kw)
    : weights(Shape5{out_channels, in_channels, kt, kh, kw}),
      bias(static_cast<std::size_t>(out_channels), 0.0) {}

void ConvKernel3::validate() const {
  const auto& s = weights.shape();
  if (s.frames % 2 == 0 || s.height % 2 == 0 || s.width % 2 == 0) {
    throw ShapeError("conv kernel extents must be odd, got " + s.str());
  }
  if (bias.size() != static_cast<std::size_t>(s.batch)) {
    throw ShapeError("conv bias length does not match output channels");
  }
}

Tensor5 conv3d_forward(const Tensor5& input, const ConvKernel3& kernel, Padding padding) {
  const ConvGeometry g = geometry(input, kernel, padding);
  Tensor5 out(Shape5{g.batch, g.cout, g.ot, g.oh, g.ow});

  const auto rows = static_cast<Eigen::Index>(g.rows());
  const std::size_t plane = g.plane();
  const std::size_t out_volume = plane * g.ot;
  const std::size_t in_volume = static_cast<std::size_t>(g.cin) * g.t * g.h * g.w;
  const int chunk = g.frames_per_chunk();
  std::vector<double> col(g.rows() * plane * chunk);
  Eigen::Map<const RowMatrix> w(kernel.weights.data(), g.cout, rows);

  for (int n = 0; n < g.batch; ++n) {
    const double* in = input.data() + n * in_volume;
    for (int t0 = 0; t0 < g.ot; t0 += chunk) {
      const int nt = std::min(chunk, g.ot - t0);
      const auto cols = static_cast<Eigen::Index>(plane * nt);
      gather(in, g, t0, nt, col.data());
      Eigen::Map<const RowMatrix> c(col.data(), rows, cols);
      StridedMap o(out.data() + (static_cast<std::size_t>(n) * g.cout) * out_volume +
                       static_cast<std::size_t>(t0) * plane,
                   g.cout, cols, Eigen::OuterStride<>(static_cast<Eigen::Index>(out_volume)));
      o.noalias() = w * c;
    }
    for (int co = 0; co < g.cout; ++co) {
      double* dst = out.data() + (static_cast<std::size_t>(n) * g.cout + co) * out_volume;
      const double b = kernel.bias[co];
      for (std::size_t i = 0; i < out_volume; ++i) dst[i] += b;
    }
  }
  return out;
}

ConvGradients conv3d_backward(const Tensor5& input, const ConvKernel3& kernel,
                              const Tensor5& grad_output, Padding padding,
                              bool want_input_grad) {
  const ConvGeometry g = geometry(input, kernel, padding);
  const Shape5 expected{g.batch, g.cout, g.ot, g.oh, g.ow};
  if (grad_output.shape() != expected) {
    throw ShapeError("conv3d_backward: grad_output shape " + grad_output.shape().str() +
                     " does not match forward output " + expected.str());
  }

  ConvGradients grads;
  grads.weights = Tensor5(kernel.weights.shape());
  grads.bias.assign(static_cast<std::size_t>(g.cout), 0.0);
  if (want_input_grad) grads.input = Tensor5(input.shape());

  const auto rows = static_cast<Eigen::Index>(g.rows());
  const std::size_t plane = g.plane();
  const std::size_t out_volume = plane * g.ot;
  const std::size_t in_volume = static_cast<std::size_t>(g.cin) * g.t * g.h * g.w;
  const int chunk = g.frames_per_chunk();
  std::vector<double> col(g.rows() * plane * chunk);
  Eigen::Map<const RowMatrix> w(kernel.weights.data(), g.cout, rows);
  Eigen::Map<RowMatrix> gw(grads.weights.data(), g.cout, rows);

  for (int n = 0; n < g.batch; ++n) {
    const double* in = input.data() + n * in_volume;
    const double* go_n = grad_output.data() + static_cast<std::size_t>(n) * g.cout * out_volume;
    for (int co = 0; co < g.cout; ++co) {
      const double* src = go_n + co * out_volume;
      double s = 0.0;
      for (std::size_t i = 0; i < out_volume; ++i) s += src[i];
      grads.bias[co] += s;
    }
    for (int t0 = 0; t0 < g.ot; t0 += chunk) {
      const int nt = std::min(chunk, g.ot - t0);
      const auto cols = static_cast<Eigen::Index>(plane * nt);
      ConstStridedMap go(go_n + static_cast<std::size_t>(t0) * plane, g.cout, cols,
                         Eigen::OuterStride<>(static_cast<Eigen::Index>(out_volume)));
      gather(in, g, t0, nt, col.data());
      Eigen::Map<RowMatrix> c(col.data(), rows, cols);
      gw.noalias() += go * c.transpose();
      if (want_input_grad) {
        c.noalias() = w.transpose() * go;
        scatter(col.data(), g, t0, nt, grads.input.data() + n * in_volume);
      }
    }
  }
  return grads;
}

Tensor5 leaky_relu(const Tensor5& input, double slope) {
  Tensor5 out = input;
  leaky_relu_inplace(out, slope);
  return out;
}

void leaky_relu_inplace(Tensor5& x, double slope) {
  for (double& v : x.values()) {
    if (v < 0.0) v *= slope;
  }
}

Tensor5 leaky_relu_backward(const Tensor5& activation, const Tensor5& grad_output,
                            double slope) {
  require_same_shape(activation, grad_output, "leaky_relu_backward");
  Tensor5 out = grad_output;
  auto a = activation.values();
  auto g = out.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (a[i] < 0.0) g[i] *= slope;
  }
  return out;
}

void LossConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("Charbonnier eta must be > 0");
}

LossResult charbonnier(const Tensor5& pred, const Tensor5& target, const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(pred, target, "charbonnier");
  LossResult result;
  result.grad = Tensor5(pred.shape());
  const double eta2 = cfg.eta * cfg.eta;
  const double inv_count = 1.0 / static_cast<double>(pred.size());
  auto p = pred.values();
  auto t = target.values();
  auto g = result.grad.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - t[i];
    const double r = std::sqrt(d * d + eta2);
    sum += r;
    g[i] = d / r * inv_count;
  }
  result.loss = sum * inv_count;
  return result;
}

Tensor5 elementwise_add(const Tensor5& a, const Tensor5& b) {
  Tensor5 out = a;
  add_inplace(out, b);
  return out;
}

void add_inplace(Tensor5& a, const Tensor5& b) {
  require_same_shape(a, b, "elementwise_add");
  auto x = a.values();
  auto y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
}

void SgdConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning_rate must be finite and >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw DomainError("momentum must lie in [0,1)");
  if (!(weight_decay >= 0.0)) throw DomainError("weight_decay must be >= 0");
}

void sgd_step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads, const SgdConfig& cfg,
              SgdState& state) {
  cfg.validate();
  if (params.size() != grads.size()) {
    throw ShapeError("sgd_step: " + std::to_string(params.size()) + " parameter blocks but " +
                     std::to_string(grads.size()) + " gradient blocks");
  }
  if (state.velocity.empty()) {
    state.velocity.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.velocity[i].assign(params[i].size(), 0.0);
    }
  }
  if (state.velocity.size() != params.size()) {
    throw ShapeError("sgd_step: momentum state does not match parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i];
    auto g = grads[i];
    auto& v = state.velocity[i];
    if (g.size() != p.size() || v.size() != p.size()) {
      throw ShapeError("sgd_step: block " + std::to_string(i) + " size mismatch");
    }
    for (std::size_t j = 0; j < p.size(); ++j) {
      v[j] = cfg.momentum * v[j] + g[j] + cfg.weight_decay * p[j];
      p[j] -= cfg.learning_rate * v[j];
    }
  }
}

}  // namespace spadnet
