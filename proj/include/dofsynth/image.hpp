#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dofsynth/error.hpp"

namespace dofsynth {

enum class Colorspace { linear, srgb };

/// Planar floating-point image. Channel planes are stored back to back,
/// each plane row-major: data[(c*height + y)*width + x].
/// Working values are linear-light in [0,1]; the tag records how the
/// source file was encoded.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;
  Colorspace source_encoding = Colorspace::linear;

  Image() = default;
  Image(int w, int h, int c, double fill = 0.0)
      : width(w), height(h), channels(c),
        data(static_cast<size_t>(w) * h * c, fill) {
    if (w <= 0 || h <= 0 || (c != 1 && c != 3))
      throw ValidationError("Image: invalid dimensions or channel count");
  }

  size_t plane_size() const { return static_cast<size_t>(width) * height; }

  double* plane(int c) { return data.data() + c * plane_size(); }
  const double* plane(int c) const { return data.data() + c * plane_size(); }

  double& at(int x, int y, int c = 0) {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }
  double at(int x, int y, int c = 0) const {
    return data[(static_cast<size_t>(c) * height + y) * width + x];
  }

  bool same_shape(const Image& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

// sRGB transfer function (IEC 61966-2-1).
inline double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double v) {
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

inline Image mirror_horizontal(const Image& img) {
  Image out(img.width, img.height, img.channels);
  out.source_encoding = img.source_encoding;
  for (int c = 0; c < img.channels; ++c)
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        out.at(x, y, c) = img.at(img.width - 1 - x, y, c);
  return out;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  if (!a.same_shape(b))
    throw ValidationError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

inline bool bitwise_equal(const Image& a, const Image& b) {
  return a.same_shape(b) && a.data == b.data;
}

}  // namespace dofsynth
