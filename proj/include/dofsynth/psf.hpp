#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/image.hpp"

namespace dofsynth {

enum class KernelFamily { disk, dp, ramp };

inline const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::disk: return "disk";
    case KernelFamily::dp: return "dp";
    case KernelFamily::ramp: return "ramp";
  }
  return "?";
}

/// Square blur kernel. side is odd, weights are nonnegative and sum to 1.
/// For disk and dp families, cells outside the disk support are exactly 0.
/// theta_deg records the effective ramp fall-off direction.
struct Kernel {
  int side = 1;
  std::vector<double> weights;  // row-major, side*side
  double radius_px = 0.0;
  double theta_deg = 0.0;
  KernelFamily family = KernelFamily::disk;

  int half() const { return side / 2; }

  // Centered access: dx, dy in [-half, +half], x rightward, y downward.
  double at_offset(int dx, int dy) const {
    return weights[static_cast<size_t>(dy + half()) * side + (dx + half())];
  }

  double sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

namespace detail {

constexpr double kMaxKernelRadius = 4096.0;

inline double normalize_angle(double theta_deg) {
  if (!std::isfinite(theta_deg))
    throw ValidationError("kernel: angle must be finite");
  double t = std::fmod(theta_deg, 360.0);
  if (t < 0.0) t += 360.0;
  if (t >= 360.0) t = 0.0;
  return t;
}

/// Unit direction for an angle measured clockwise from +x (y points down).
/// Folded by quadrant so that directions for t and t+180 are exact
/// negations of each other, which the kernel symmetry identities rely on.
inline std::pair<double, double> unit_dir(double t_deg) {
  int quad = static_cast<int>(t_deg / 90.0);
  quad = std::clamp(quad, 0, 3);
  const double rem = t_deg - 90.0 * quad;
  const double a = rem * (M_PI / 180.0);
  const double c = std::cos(a), s = std::sin(a);
  switch (quad) {
    case 0: return {c, s};
    case 1: return {-s, c};
    case 2: return {-c, -s};
    default: return {s, -c};
  }
}

/// Grid sum accumulated center-out in mirrored pairs. The result is
/// bit-identical under horizontal flip, vertical flip, and 180-degree
/// rotation of the grid, so normalized kernels keep those symmetries
/// exactly.
inline double symmetric_sum(const std::vector<double>& g, int side) {
  const int h = side / 2;
  auto at = [&](int x, int y) {
    return g[static_cast<size_t>(y + h) * side + (x + h)];
  };
  auto row_sum = [&](int y) {
    double r = at(0, y);
    for (int x = 1; x <= h; ++x) r += at(-x, y) + at(x, y);
    return r;
  };
  double total = row_sum(0);
  for (int y = 1; y <= h; ++y) total += row_sum(-y) + row_sum(y);
  return total;
}

inline int side_for_radius(double radius_px) {
  if (!std::isfinite(radius_px) || std::abs(radius_px) > kMaxKernelRadius)
    throw ValidationError("kernel: radius out of range");
  return 2 * static_cast<int>(std::ceil(std::abs(radius_px))) + 1;
}

inline void normalize_weights(std::vector<double>& w, int side) {
  const double total = symmetric_sum(w, side);
  for (double& v : w) v /= total;
}

}  // namespace detail

/// Uniform disk kernel: equal weight over cells whose center lies within
/// radius_px of the kernel center. Radius 0 is the 1x1 identity.
inline Kernel disk(double radius_px) {
  if (radius_px < 0.0)
    throw ValidationError("disk: radius must be >= 0");
  Kernel k;
  k.family = KernelFamily::disk;
  k.radius_px = radius_px;
  k.side = detail::side_for_radius(radius_px);
  k.weights.assign(static_cast<size_t>(k.side) * k.side, 0.0);
  const int h = k.half();
  const double r2 = radius_px * radius_px;
  for (int y = -h; y <= h; ++y)
    for (int x = -h; x <= h; ++x)
      if (static_cast<double>(x * x + y * y) <= r2)
        k.weights[static_cast<size_t>(y + h) * k.side + (x + h)] = 1.0;
  detail::normalize_weights(k.weights, k.side);
  return k;
}

/// Linear ramp mask M(x,y) = (h + 1 - p) / (2(h+1)) with p = x cos t + y sin t,
/// h = (side-1)/2. Complementary directions satisfy M_t + M_{t+180} = 1.
inline std::vector<double> ramp_mask(int side, double theta_deg) {
  if (side < 1 || side % 2 == 0)
    throw ValidationError("ramp_mask: side must be odd and >= 1");
  const auto [c, s] = detail::unit_dir(detail::normalize_angle(theta_deg));
  const int h = side / 2;
  const double lim = h + 1.0;
  const double denom = 2.0 * lim;
  std::vector<double> m(static_cast<size_t>(side) * side);
  for (int y = -h; y <= h; ++y)
    for (int x = -h; x <= h; ++x) {
      const double p = c * x + s * y;
      m[static_cast<size_t>(y + h) * side + (x + h)] = (lim - p) / denom;
    }
  return m;
}

/// Dual-pixel PSF: disk support weighted by the ramp mask, renormalized.
/// Negative radius flips the ramp direction by 180 degrees (the front/back
/// half-CoC flip).
inline Kernel dp_kernel(double radius_px, double theta_deg) {
  Kernel k;
  k.family = KernelFamily::dp;
  k.radius_px = radius_px;
  k.side = detail::side_for_radius(radius_px);
  double t = detail::normalize_angle(theta_deg);
  auto [c, s] = detail::unit_dir(t);
  if (radius_px < 0.0) {
    c = -c;
    s = -s;
    t = detail::normalize_angle(t + 180.0);
  }
  k.theta_deg = t;
  const int h = k.half();
  const double ar = std::abs(radius_px);
  const double r2 = ar * ar;
  const double lim = h + 1.0;
  const double denom = 2.0 * lim;
  k.weights.assign(static_cast<size_t>(k.side) * k.side, 0.0);
  for (int y = -h; y <= h; ++y)
    for (int x = -h; x <= h; ++x) {
      if (static_cast<double>(x * x + y * y) > r2) continue;
      const double p = c * x + s * y;
      k.weights[static_cast<size_t>(y + h) * k.side + (x + h)] =
          (lim - p) / denom;
    }
  detail::normalize_weights(k.weights, k.side);
  return k;
}

/// Ramp PSF: the ramp mask over the full square support (no disk window),
/// renormalized. Cells where the ramp goes nonpositive (far corners at
/// diagonal angles) are clamped to 0 to keep weights nonnegative.
inline Kernel ramp_psf(double radius_px, double theta_deg) {
  Kernel k;
  k.family = KernelFamily::ramp;
  k.radius_px = radius_px;
  k.side = detail::side_for_radius(radius_px);
  double t = detail::normalize_angle(theta_deg);
  auto [c, s] = detail::unit_dir(t);
  if (radius_px < 0.0) {
    c = -c;
    s = -s;
    t = detail::normalize_angle(t + 180.0);
  }
  k.theta_deg = t;
  const int h = k.half();
  const double lim = h + 1.0;
  const double denom = 2.0 * lim;
  k.weights.assign(static_cast<size_t>(k.side) * k.side, 0.0);
  for (int y = -h; y <= h; ++y)
    for (int x = -h; x <= h; ++x) {
      const double p = c * x + s * y;
      const double m = (lim - p) / denom;
      k.weights[static_cast<size_t>(y + h) * k.side + (x + h)] =
          m > 0.0 ? m : 0.0;
    }
  detail::normalize_weights(k.weights, k.side);
  return k;
}

/// Mirror about the central column. The right DP PSF is the left one
/// flipped around the vertical axis.
inline Kernel flip_horizontal(const Kernel& k) {
  Kernel out = k;
  for (int y = 0; y < k.side; ++y)
    for (int x = 0; x < k.side; ++x)
      out.weights[static_cast<size_t>(y) * k.side + x] =
          k.weights[static_cast<size_t>(y) * k.side + (k.side - 1 - x)];
  if (k.family != KernelFamily::disk)
    out.theta_deg = detail::normalize_angle(180.0 - k.theta_deg);
  return out;
}

inline Kernel make_kernel(KernelFamily family, double radius_px,
                          double theta_deg) {
  switch (family) {
    case KernelFamily::disk: return disk(std::abs(radius_px));
    case KernelFamily::dp: return dp_kernel(radius_px, theta_deg);
    case KernelFamily::ramp: return ramp_psf(radius_px, theta_deg);
  }
  throw ValidationError("make_kernel: unknown family");
}

/// Rotation bank for multi-view synthesis: kernel k gets angle k*360/n.
/// n_views must be even so every direction has its opposite in the bank;
/// n = 2 reproduces the left/right DP pair.
inline std::vector<Kernel> kernel_bank(double radius_px, int n_views,
                                       KernelFamily family) {
  if (n_views < 2 || n_views % 2 != 0)
    throw ValidationError("kernel_bank: n_views must be even and >= 2");
  if (family == KernelFamily::disk)
    throw ValidationError("kernel_bank: family must be dp or ramp");
  std::vector<Kernel> bank;
  bank.reserve(n_views);
  for (int k = 0; k < n_views; ++k) {
    const double theta = (360.0 * k) / n_views;
    bank.push_back(make_kernel(family, radius_px, theta));
  }
  return bank;
}

/// Plain-text dump of the weight grid, one row per line.
inline std::string kernel_to_text(const Kernel& k) {
  std::string out;
  char buf[32];
  for (int y = 0; y < k.side; ++y) {
    for (int x = 0; x < k.side; ++x) {
      std::snprintf(buf, sizeof(buf), "%.9g",
                    k.weights[static_cast<size_t>(y) * k.side + x]);
      out += buf;
      out += (x + 1 < k.side) ? ' ' : '\n';
    }
  }
  return out;
}

/// Grayscale visualization with the largest weight mapped to white.
inline Image kernel_to_image(const Kernel& k) {
  Image img(k.side, k.side, 1);
  const double peak = *std::max_element(k.weights.begin(), k.weights.end());
  for (int y = 0; y < k.side; ++y)
    for (int x = 0; x < k.side; ++x)
      img.at(x, y) = k.weights[static_cast<size_t>(y) * k.side + x] / peak;
  return img;
}

}  // namespace dofsynth
