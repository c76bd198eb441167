#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/image.hpp"

namespace dofsynth {

/// Thin-lens parameters. focal_length_mm (f) and focus_distance_mm (s) are in
/// millimetres, f_number (F) is dimensionless. pixels_per_mm converts a blur
/// radius on the sensor plane into kernel pixels.
struct CameraParams {
  double focal_length_mm = 50.0;
  double f_number = 2.0;
  double focus_distance_mm = 1000.0;
  double pixels_per_mm = 30.0;

  void validate() const {
    if (!(focal_length_mm > 0.0) || !std::isfinite(focal_length_mm))
      throw ValidationError("CameraParams: focal_length_mm must be > 0");
    if (!(f_number > 0.0) || !std::isfinite(f_number))
      throw ValidationError("CameraParams: f_number must be > 0");
    if (!(pixels_per_mm > 0.0) || !std::isfinite(pixels_per_mm))
      throw ValidationError("CameraParams: pixels_per_mm must be > 0");
    if (!(focus_distance_mm > focal_length_mm))
      throw ValidationError(
          "CameraParams: focus_distance_mm must exceed focal_length_mm");
  }
};

enum class DepthMode { physical, artistic };

/// Per-pixel scene distance. Physical mode stores distances in mm (> 0),
/// artistic mode stores a normalized value in [0,1] where larger means
/// farther behind the focal plane.
struct DepthMap {
  int width = 0;
  int height = 0;
  DepthMode mode = DepthMode::physical;
  std::vector<double> values;

  DepthMap() = default;
  DepthMap(int w, int h, DepthMode m, double fill = 0.0)
      : width(w), height(h), mode(m),
        values(static_cast<size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0)
      throw ValidationError("DepthMap: invalid dimensions");
  }

  double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }

  void validate() const {
    for (double v : values) {
      if (!std::isfinite(v))
        throw ValidationError("DepthMap: non-finite value");
      if (mode == DepthMode::physical && !(v > 0.0))
        throw ValidationError("DepthMap: physical depth must be > 0 mm");
      if (mode == DepthMode::artistic && (v < 0.0 || v > 1.0))
        throw ValidationError("DepthMap: artistic value outside [0,1]");
    }
  }
};

/// Per-pixel signed blur radius in pixels. Positive radii lie behind the
/// focal plane, negative radii in front of it.
struct DefocusMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  DefocusMap() = default;
  DefocusMap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0)
      throw ValidationError("DefocusMap: invalid dimensions");
  }

  double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
};

/// Lens-to-sensor distance s' = f*s / (s - f).
inline double image_distance(const CameraParams& p) {
  p.validate();
  return p.focal_length_mm * p.focus_distance_mm /
         (p.focus_distance_mm - p.focal_length_mm);
}

/// Aperture diameter q = f / F.
inline double aperture_diameter(const CameraParams& p) {
  p.validate();
  return p.focal_length_mm / p.f_number;
}

/// Signed CoC radius in mm for a scene point at distance d:
///   r = (q/2) * (s'/s) * (d - s) / d.
/// Zero at the focal plane, negative in front of it.
inline double coc_radius_mm(const CameraParams& p, double d_mm) {
  p.validate();
  if (!(d_mm > 0.0) || !std::isfinite(d_mm))
    throw ValidationError("coc_radius_mm: scene distance must be > 0 mm");
  const double q = p.focal_length_mm / p.f_number;
  const double sp = image_distance(p);
  const double s = p.focus_distance_mm;
  return (q / 2.0) * (sp / s) * ((d_mm - s) / d_mm);
}

namespace detail {

inline void check_mask(const DepthMap& depth, const Image* mask) {
  if (mask) {
    if (mask->width != depth.width || mask->height != depth.height ||
        mask->channels != 1)
      throw ValidationError("defocus_map: mask dimensions do not match depth");
  }
}

inline double clamp_radius(double r, double cap) {
  return std::clamp(r, -cap, cap);
}

}  // namespace detail

/// Physical-mode defocus map: r_px = pixels_per_mm * coc_radius_mm(d),
/// clamped to [-max_radius_px, +max_radius_px]. Pixels flagged as subject
/// by the segmentation mask (value >= 0.5) are forced to radius 0.
inline DefocusMap defocus_map(const CameraParams& params, const DepthMap& depth,
                              const Image* seg_mask, double max_radius_px) {
  params.validate();
  if (depth.mode != DepthMode::physical)
    throw ValidationError("defocus_map: depth map is not in physical mode");
  depth.validate();
  detail::check_mask(depth, seg_mask);
  if (!(max_radius_px >= 0.0) || !std::isfinite(max_radius_px))
    throw ValidationError("defocus_map: max_radius_px must be >= 0");

  const double q = params.focal_length_mm / params.f_number;
  const double sp = image_distance(params);
  const double s = params.focus_distance_mm;
  const double scale = params.pixels_per_mm * (q / 2.0) * (sp / s);

  DefocusMap out(depth.width, depth.height);
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      if (seg_mask && seg_mask->at(x, y) >= 0.5) {
        out.at(x, y) = 0.0;
        continue;
      }
      const double d = depth.at(x, y);
      out.at(x, y) = detail::clamp_radius(scale * ((d - s) / d), max_radius_px);
    }
  }
  return out;
}

/// Artistic-mode defocus map for normalized inputs:
///   r_px = max_radius_px * (value - focus_disparity)
///          / max(focus_disparity, 1 - focus_disparity).
inline DefocusMap defocus_map_artistic(double focus_disparity,
                                       const DepthMap& depth,
                                       const Image* seg_mask,
                                       double max_radius_px) {
  if (!(focus_disparity >= 0.0 && focus_disparity <= 1.0))
    throw ValidationError("defocus_map: focus_disparity must be in [0,1]");
  if (depth.mode != DepthMode::artistic)
    throw ValidationError("defocus_map: depth map is not in artistic mode");
  depth.validate();
  detail::check_mask(depth, seg_mask);
  if (!(max_radius_px >= 0.0) || !std::isfinite(max_radius_px))
    throw ValidationError("defocus_map: max_radius_px must be >= 0");

  const double norm = std::max(focus_disparity, 1.0 - focus_disparity);
  DefocusMap out(depth.width, depth.height);
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      if (seg_mask && seg_mask->at(x, y) >= 0.5) {
        out.at(x, y) = 0.0;
        continue;
      }
      const double r = max_radius_px * (depth.at(x, y) - focus_disparity) / norm;
      out.at(x, y) = detail::clamp_radius(r, max_radius_px);
    }
  }
  return out;
}

}  // namespace dofsynth
