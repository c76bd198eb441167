#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/image.hpp"
#include "dofsynth/optics.hpp"

namespace dofsynth {

constexpr int kMaxDepthLayers = 500;
constexpr double kRadiusQuantum = 0.25;  // px granularity of layer radii

/// One quantized-radius slice of the scene. coverage is 1 where the pixel
/// belongs to this layer and 0 elsewhere; color is image * coverage
/// (premultiplied before any blurring). Both planes are stored cropped to
/// the support box [x0,x1) x [y0,y1).
struct DepthLayer {
  double radius_px = 0.0;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  Image coverage;
  Image color;

  int box_width() const { return x1 - x0; }
  int box_height() const { return y1 - y0; }
};

/// Layers ordered back-to-front: descending signed radius, so the most
/// blurred background comes first, the in-focus slice sits in the middle,
/// and the nearest (most negative) slice composites last.
struct LayerStack {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<DepthLayer> layers;

  bool empty() const { return layers.empty(); }
  size_t size() const { return layers.size(); }
};

/// Decomposes image + defocus map into depth layers. Radii are snapped to
/// a 0.25 px grid; if the distinct snapped radii exceed max_layers, radii
/// are re-binned into max_layers uniform bins over [min, max] with bin
/// centers as representatives (the bin containing radius 0 keeps exactly 0
/// so in-focus pixels stay bit-identical).
inline LayerStack quantize_layers(const Image& image, const DefocusMap& defocus,
                                  int max_layers = kMaxDepthLayers) {
  if (image.width != defocus.width || image.height != defocus.height)
    throw ValidationError("quantize_layers: image/defocus dimension mismatch");
  if (max_layers < 1 || max_layers > kMaxDepthLayers)
    throw ValidationError("quantize_layers: max_layers must be in [1,500]");
  for (double r : defocus.values)
    if (!std::isfinite(r))
      throw ValidationError("quantize_layers: non-finite defocus radius");

  const int w = image.width, h = image.height;
  const size_t n = static_cast<size_t>(w) * h;

  // Representative radius per pixel.
  std::vector<double> rep(n);
  std::map<double, int, std::greater<double>> rep_index;  // descending
  std::vector<double> snapped(n);
  std::map<double, size_t> counts;
  for (size_t i = 0; i < n; ++i) {
    double s = std::round(defocus.values[i] / kRadiusQuantum) * kRadiusQuantum;
    if (s == 0.0) s = 0.0;  // canonicalize -0.0
    snapped[i] = s;
    ++counts[snapped[i]];
  }

  if (counts.size() <= static_cast<size_t>(max_layers)) {
    rep = snapped;
  } else {
    const auto [mn_it, mx_it] =
        std::minmax_element(defocus.values.begin(), defocus.values.end());
    const double mn = *mn_it, mx = *mx_it;
    const double width_r = (mx - mn) / max_layers;
    const int zero_bin =
        (mn <= 0.0 && 0.0 <= mx)
            ? std::min(max_layers - 1,
                       static_cast<int>(std::floor((0.0 - mn) / width_r)))
            : -1;
    for (size_t i = 0; i < n; ++i) {
      const int b = std::min(
          max_layers - 1,
          static_cast<int>(std::floor((defocus.values[i] - mn) / width_r)));
      rep[i] = (b == zero_bin) ? 0.0 : mn + (b + 0.5) * width_r;
    }
  }

  for (size_t i = 0; i < n; ++i) rep_index.emplace(rep[i], 0);
  int next = 0;
  for (auto& [r, idx] : rep_index) idx = next++;

  LayerStack stack;
  stack.width = w;
  stack.height = h;
  stack.channels = image.channels;
  stack.layers.resize(rep_index.size());
  for (auto& [r, idx] : rep_index) {
    DepthLayer& layer = stack.layers[idx];
    layer.radius_px = r;
    layer.x0 = w;
    layer.y0 = h;
    layer.x1 = 0;
    layer.y1 = 0;
  }

  // Support boxes.
  std::vector<int> label(n);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      const int li = rep_index.at(rep[i]);
      label[i] = li;
      DepthLayer& layer = stack.layers[li];
      layer.x0 = std::min(layer.x0, x);
      layer.y0 = std::min(layer.y0, y);
      layer.x1 = std::max(layer.x1, x + 1);
      layer.y1 = std::max(layer.y1, y + 1);
    }

  for (auto& layer : stack.layers) {
    layer.coverage = Image(layer.box_width(), layer.box_height(), 1);
    layer.color = Image(layer.box_width(), layer.box_height(), image.channels);
  }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const size_t i = static_cast<size_t>(y) * w + x;
      DepthLayer& layer = stack.layers[label[i]];
      const int lx = x - layer.x0, ly = y - layer.y0;
      layer.coverage.at(lx, ly) = 1.0;
      for (int c = 0; c < image.channels; ++c)
        layer.color.at(lx, ly, c) = image.at(x, y, c);
    }
  return stack;
}

}  // namespace dofsynth
