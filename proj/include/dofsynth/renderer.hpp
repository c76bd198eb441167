#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>
#include <tuple>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/image.hpp"
#include "dofsynth/layering.hpp"
#include "dofsynth/psf.hpp"

namespace dofsynth {

// Accumulated coverage below this is treated as a hole and falls back to
// the input pixel.
constexpr double kAlphaThreshold = 1e-4;

/// Ordered multi-view render: view k was blurred with kernel angle
/// k*360/n, bokeh is the combined shallow-DoF image.
struct ViewSet {
  std::vector<Image> views;
  Image bokeh;
  KernelFamily family = KernelFamily::dp;

  int n_views() const { return static_cast<int>(views.size()); }
};

namespace detail {

struct Tap {
  int dx, dy;
  double w;
};

inline std::vector<Tap> kernel_taps(const Kernel& k) {
  std::vector<Tap> taps;
  taps.reserve(k.weights.size());
  const int h = k.half();
  for (int dy = -h; dy <= h; ++dy)
    for (int dx = -h; dx <= h; ++dx) {
      const double w = k.at_offset(dx, dy);
      if (w != 0.0) taps.push_back({dx, dy, w});
    }
  return taps;
}

// dest[y][x] += w * src[y+dy+h][x+dx+h] over a dest_w x dest_h block,
// src padded by h on each side.
inline void accumulate_taps(const std::vector<Tap>& taps, int h,
                            const std::vector<double>& padded, int padded_w,
                            std::vector<double>& dest, int dest_w,
                            int dest_h) {
  for (const Tap& t : taps) {
    const double w = t.w;
    for (int y = 0; y < dest_h; ++y) {
      const double* src =
          padded.data() + static_cast<size_t>(y + h + t.dy) * padded_w +
          (h + t.dx);
      double* out = dest.data() + static_cast<size_t>(y) * dest_w;
      for (int x = 0; x < dest_w; ++x) out[x] += w * src[x];
    }
  }
}

}  // namespace detail

/// Correlation-style 2D convolution with replicate-edge padding. Output
/// dimensions equal the input; a constant plane maps to itself (up to the
/// kernel's unit-sum rounding).
inline Image convolve(const Image& plane, const Kernel& k) {
  if (k.side < 1 || k.weights.size() != static_cast<size_t>(k.side) * k.side)
    throw ValidationError("convolve: malformed kernel");
  const int w = plane.width, h = plane.height;
  const int kh = k.half();
  const int pw = w + 2 * kh, ph = h + 2 * kh;
  const auto taps = detail::kernel_taps(k);

  Image out(w, h, plane.channels);
  out.source_encoding = plane.source_encoding;
  std::vector<double> padded(static_cast<size_t>(pw) * ph);
  std::vector<double> acc(static_cast<size_t>(w) * h);
  for (int c = 0; c < plane.channels; ++c) {
    for (int py = 0; py < ph; ++py) {
      const int sy = std::clamp(py - kh, 0, h - 1);
      for (int px = 0; px < pw; ++px) {
        const int sx = std::clamp(px - kh, 0, w - 1);
        padded[static_cast<size_t>(py) * pw + px] = plane.at(sx, sy, c);
      }
    }
    std::fill(acc.begin(), acc.end(), 0.0);
    detail::accumulate_taps(taps, kh, padded, pw, acc, w, h);
    std::copy(acc.begin(), acc.end(), out.plane(c));
  }
  return out;
}

namespace detail {

// Per-layer blur + OVER compositing into the accumulators. Work is
// restricted to the layer's support box dilated by the kernel radius.
inline void composite_layer(const Image& src, const DepthLayer& layer,
                            const Kernel& k, Image& acc_color,
                            std::vector<double>& acc_alpha) {
  const int w = src.width, h = src.height;
  const int kh = k.half();

  // Output box: support dilated by kh, clamped to the image.
  const int ox0 = std::max(0, layer.x0 - kh);
  const int oy0 = std::max(0, layer.y0 - kh);
  const int ox1 = std::min(w, layer.x1 + kh);
  const int oy1 = std::min(h, layer.y1 + kh);
  const int ow = ox1 - ox0, oh = oy1 - oy0;

  // Padded input covering the output box plus kernel reach. Coordinates are
  // clamped to the image (replicate padding); in-image cells outside the
  // layer's support box read as 0.
  const int pw = ow + 2 * kh, ph = oh + 2 * kh;
  std::vector<double> padded(static_cast<size_t>(pw) * ph);
  std::vector<double> blurred(static_cast<size_t>(ow) * oh);
  const auto taps = kernel_taps(k);

  auto fill_padded = [&](const Image& plane, int c) {
    for (int py = 0; py < ph; ++py) {
      const int iy = std::clamp(oy0 - kh + py, 0, h - 1);
      const bool in_y = iy >= layer.y0 && iy < layer.y1;
      double* row = padded.data() + static_cast<size_t>(py) * pw;
      for (int px = 0; px < pw; ++px) {
        const int ix = std::clamp(ox0 - kh + px, 0, w - 1);
        row[px] = (in_y && ix >= layer.x0 && ix < layer.x1)
                      ? plane.at(ix - layer.x0, iy - layer.y0, c)
                      : 0.0;
      }
    }
  };

  // Alpha first: composite needs it for every color channel.
  fill_padded(layer.coverage, 0);
  std::fill(blurred.begin(), blurred.end(), 0.0);
  accumulate_taps(taps, kh, padded, pw, blurred, ow, oh);
  std::vector<double> b_alpha = blurred;

  for (int c = 0; c < src.channels; ++c) {
    fill_padded(layer.color, c);
    std::fill(blurred.begin(), blurred.end(), 0.0);
    accumulate_taps(taps, kh, padded, pw, blurred, ow, oh);
    for (int y = 0; y < oh; ++y)
      for (int x = 0; x < ow; ++x) {
        const double a = b_alpha[static_cast<size_t>(y) * ow + x];
        double& acc = acc_color.at(ox0 + x, oy0 + y, c);
        acc = blurred[static_cast<size_t>(y) * ow + x] + (1.0 - a) * acc;
      }
  }
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      const double a = b_alpha[static_cast<size_t>(y) * ow + x];
      double& acc = acc_alpha[static_cast<size_t>(oy0 + y) * w + (ox0 + x)];
      acc = a + (1.0 - a) * acc;
    }
}

}  // namespace detail

/// Renders one view: each layer is blurred with the family kernel at the
/// layer's radius and the given angle, then composited back-to-front with
/// the blurred coverage as alpha. Coverage holes fall back to the input.
inline Image render_view(const Image& src, const LayerStack& stack,
                         double theta_deg, KernelFamily family) {
  if (stack.empty())
    throw ValidationError("render_view: empty layer stack");
  if (stack.width != src.width || stack.height != src.height ||
      stack.channels != src.channels)
    throw ValidationError("render_view: stack does not match image");

  Image acc_color(src.width, src.height, src.channels, 0.0);
  std::vector<double> acc_alpha(src.plane_size(), 0.0);
  for (const DepthLayer& layer : stack.layers) {
    const Kernel k = make_kernel(family, layer.radius_px, theta_deg);
    detail::composite_layer(src, layer, k, acc_color, acc_alpha);
  }

  Image out(src.width, src.height, src.channels);
  out.source_encoding = src.source_encoding;
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      const double a = acc_alpha[static_cast<size_t>(y) * src.width + x];
      for (int c = 0; c < src.channels; ++c)
        out.at(x, y, c) =
            a > kAlphaThreshold ? acc_color.at(x, y, c) / a : src.at(x, y, c);
    }
  return out;
}

inline Image average(const Image& a, const Image& b) {
  if (!a.same_shape(b))
    throw ValidationError("average: shape mismatch");
  Image out(a.width, a.height, a.channels);
  out.source_encoding = a.source_encoding;
  for (size_t i = 0; i < a.data.size(); ++i)
    out.data[i] = (a.data[i] + b.data[i]) * 0.5;
  return out;
}

/// Left/right dual-pixel sub-aperture pair (angles 0 and 180).
inline std::pair<Image, Image> render_dp_pair(const Image& src,
                                              const LayerStack& stack) {
  return {render_view(src, stack, 0.0, KernelFamily::dp),
          render_view(src, stack, 180.0, KernelFamily::dp)};
}

/// Combined shallow-DoF image: the mean of the DP pair.
inline Image render_bokeh(const Image& src, const LayerStack& stack) {
  const auto [left, right] = render_dp_pair(src, stack);
  return average(left, right);
}

/// Renders the n-view set (view k at angle k*360/n) plus the bokeh image.
/// Views may be rendered on multiple threads; each view is an independent
/// pure render so the output is bit-identical for any thread count.
inline ViewSet render_views(const Image& src, const LayerStack& stack,
                            int n_views, KernelFamily family,
                            int threads = 1) {
  if (n_views < 2 || n_views % 2 != 0)
    throw ValidationError("render_views: n_views must be even and >= 2");
  if (family == KernelFamily::disk)
    throw ValidationError("render_views: family must be dp or ramp");

  ViewSet set;
  set.family = family;
  set.views.resize(n_views);

  const int nthreads =
      std::clamp(threads > 0 ? threads
                             : static_cast<int>(
                                   std::thread::hardware_concurrency()),
                 1, n_views);
  auto render_slice = [&](int first) {
    for (int k = first; k < n_views; k += nthreads) {
      const double theta = (360.0 * k) / n_views;
      set.views[k] = render_view(src, stack, theta, family);
    }
  };
  if (nthreads == 1) {
    render_slice(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        try {
          render_slice(t);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  set.bokeh = average(set.views[0], set.views[n_views / 2]);
  return set;
}

}  // namespace dofsynth
