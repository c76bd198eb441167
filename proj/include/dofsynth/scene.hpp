#pragma once

#include <cmath>
#include <cstdint>

#include "dofsynth/image.hpp"
#include "dofsynth/optics.hpp"

namespace dofsynth {

/// Small deterministic generator for synthetic workloads (identical
/// sequences on every platform, unlike the standard distributions).
struct SplitMix64 {
  uint64_t state;

  explicit SplitMix64(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % uint64_t(hi - lo + 1));
  }
};

inline Image random_image(int width, int height, int channels,
                          uint64_t seed) {
  SplitMix64 rng(seed);
  Image img(width, height, channels);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

struct BenchScene {
  Image image;
  DefocusMap defocus;
};

/// Random image plus a banded defocus map covering target_layers distinct
/// radii in [0, max_radius]. Fully determined by the seed.
inline BenchScene make_bench_scene(int size, double max_radius,
                                   int target_layers, uint64_t seed) {
  BenchScene scene{random_image(size, size, 3, seed),
                   DefocusMap(size, size)};
  const int bands = std::max(1, target_layers);
  for (int y = 0; y < size; ++y) {
    const int band = std::min(bands - 1, y * bands / size);
    const double r =
        bands == 1 ? max_radius : max_radius * band / (bands - 1);
    for (int x = 0; x < size; ++x) scene.defocus.at(x, y) = r;
  }
  return scene;
}

struct PortraitScene {
  Image image;    // RGB test chart: black field, color blocks, tracking dot
  Image depth01;  // normalized depth, larger = farther behind focus
  Image mask;     // subject coverage, 1 inside the subject
  double focus_disparity = 0.1;
  int dot_x = 0, dot_y = 0;  // isolated background dot, for motion checks
};

/// Portrait-style asset: a sharp subject disk in the center (masked), a
/// background depth ramp behind it, textured blocks in the top third, and
/// an isolated bright dot on black whose blurred centroid makes per-view
/// motion measurable.
inline PortraitScene make_portrait_scene(int width, int height,
                                         uint64_t seed = 11) {
  PortraitScene s;
  s.image = Image(width, height, 3, 0.0);
  s.depth01 = Image(width, height, 1);
  s.mask = Image(width, height, 1, 0.0);

  // Background depth ramp, top (nearer the focus plane) to bottom.
  for (int y = 0; y < height; ++y) {
    const double d = 0.55 + 0.45 * (double(y) / std::max(1, height - 1));
    for (int x = 0; x < width; ++x) s.depth01.at(x, y) = d;
  }

  // Subject: centered disk, in focus and masked out of the blur.
  const double cx = width * 0.5, cy = height * 0.55;
  const double radius = std::min(width, height) * 0.18;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx, dy = y - cy;
      if (dx * dx + dy * dy <= radius * radius) {
        s.mask.at(x, y) = 1.0;
        s.depth01.at(x, y) = s.focus_disparity;
        s.image.at(x, y, 0) = 0.85;
        s.image.at(x, y, 1) = 0.55 + 0.25 * std::sin(dx * 0.3);
        s.image.at(x, y, 2) = 0.35;
      }
    }

  // Background color blocks for texture, kept in the top third so the
  // tracking dot below stays on pure black.
  SplitMix64 rng(seed);
  for (int i = 0; i < 6; ++i) {
    const int bw = rng.uniform_int(width / 12, width / 6);
    const int bh = rng.uniform_int(height / 12, height / 6);
    const int bx = rng.uniform_int(0, std::max(0, width - bw - 1));
    const int by = rng.uniform_int(0, std::max(1, height / 4));
    const double col[3] = {rng.uniform(), rng.uniform(), rng.uniform()};
    for (int y = by; y < by + bh && y < height; ++y)
      for (int x = bx; x < bx + bw && x < width; ++x)
        if (s.mask.at(x, y) == 0.0)
          for (int c = 0; c < 3; ++c) s.image.at(x, y, c) = 0.1 + 0.8 * col[c];
  }

  // Tracking dot to the right of the subject, well clear of it, the
  // texture blocks, and the image border.
  s.dot_x = static_cast<int>(width * 0.82);
  s.dot_y = static_cast<int>(height * 0.62);
  for (int c = 0; c < 3; ++c) s.image.at(s.dot_x, s.dot_y, c) = 1.0;

  return s;
}

}  // namespace dofsynth
