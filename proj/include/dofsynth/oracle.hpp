#pragma once

#include <map>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/image.hpp"
#include "dofsynth/optics.hpp"
#include "dofsynth/psf.hpp"

namespace dofsynth {

/// Brute-force reference renderer for tiny scenes: every source pixel
/// scatters its own kernel (family, radius from the defocus map, fixed
/// angle) onto the output, and each output pixel is the weight-normalized
/// sum of what landed on it. No layering, no occlusion, no edge padding —
/// comparisons against the layered renderer are only meaningful on scenes
/// where layering cannot matter and away from borders.
inline Image gather_render(const Image& src, const DefocusMap& defocus,
                           double theta_deg, KernelFamily family) {
  if (src.width > 64 || src.height > 64)
    throw ValidationError("gather_render: image larger than 64x64");
  if (src.width != defocus.width || src.height != defocus.height)
    throw ValidationError("gather_render: image/defocus dimension mismatch");

  const int w = src.width, h = src.height;
  std::map<double, Kernel> kernels;  // radius -> kernel, angle fixed

  Image num(w, h, src.channels, 0.0);
  std::vector<double> den(static_cast<size_t>(w) * h, 0.0);

  for (int qy = 0; qy < h; ++qy)
    for (int qx = 0; qx < w; ++qx) {
      const double r = defocus.at(qx, qy);
      auto it = kernels.find(r);
      if (it == kernels.end())
        it = kernels.emplace(r, make_kernel(family, r, theta_deg)).first;
      const Kernel& k = it->second;
      const int kh = k.half();
      // Matches the correlation orientation of the layered renderer's
      // convolve: the tap at offset (dx,dy) reads from p+(dx,dy), so a
      // source q lands on p = q - (dx,dy).
      for (int dy = -kh; dy <= kh; ++dy) {
        const int py = qy - dy;
        if (py < 0 || py >= h) continue;
        for (int dx = -kh; dx <= kh; ++dx) {
          const int px = qx - dx;
          if (px < 0 || px >= w) continue;
          const double wt = k.at_offset(dx, dy);
          if (wt == 0.0) continue;
          den[static_cast<size_t>(py) * w + px] += wt;
          for (int c = 0; c < src.channels; ++c)
            num.at(px, py, c) += wt * src.at(qx, qy, c);
        }
      }
    }

  Image out(w, h, src.channels);
  out.source_encoding = src.source_encoding;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double d = den[static_cast<size_t>(y) * w + x];
      for (int c = 0; c < src.channels; ++c)
        out.at(x, y, c) = d > 0.0 ? num.at(x, y, c) / d : 0.0;
    }
  return out;
}

}  // namespace dofsynth
