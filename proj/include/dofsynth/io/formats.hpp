#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/image.hpp"
#include "dofsynth/io/gif.hpp"
#include "dofsynth/io/pfm.hpp"
#include "dofsynth/io/png.hpp"
#include "dofsynth/io/pnm.hpp"
#include "dofsynth/optics.hpp"
#include "dofsynth/psf.hpp"
#include "dofsynth/renderer.hpp"

namespace dofsynth::io {

/// Everything one render run needs: input paths, focus parameters, view
/// count and PSF family, and output options.
struct RenderJob {
  std::string image_path;
  std::string depth_path;
  std::string mask_path;  // optional, empty = none
  DepthMode mode = DepthMode::artistic;
  CameraParams camera;           // physical mode
  double focus_disparity = 0.5;  // artistic mode
  double max_radius_px = 25.0;
  int n_views = 8;
  KernelFamily family = KernelFamily::dp;
  std::string out_dir = ".";
  int fps = 8;
  bool gif = false;
  bool linearize = true;
  int threads = 1;
};

namespace detail {

inline bool has_png_magic(const std::vector<uint8_t>& head) {
  return head.size() >= 8 && std::memcmp(head.data(), kPngSignature, 8) == 0;
}

inline RawImage read_raw_auto(const std::string& path) {
  const auto bytes = read_file(path);
  if (has_png_magic(bytes)) return read_png(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
    return read_pnm(path);
  throw IoError("unsupported image format (need PNG or binary PGM/PPM): " +
                path);
}

}  // namespace detail

/// Loads an 8/16-bit PNG or binary PPM/PGM, normalizes to [0,1], and (by
/// default) converts from sRGB to linear light. Alpha channels are dropped.
inline Image load_image(const std::string& path, bool linearize = true) {
  const RawImage raw = detail::read_raw_auto(path);
  const int channels = raw.channels >= 3 ? 3 : 1;
  const double scale = raw.bit_depth == 8 ? 255.0 : 65535.0;
  Image img(raw.width, raw.height, channels);
  img.source_encoding = linearize ? Colorspace::srgb : Colorspace::linear;
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) {
      const size_t base =
          (static_cast<size_t>(y) * raw.width + x) * raw.channels;
      for (int c = 0; c < channels; ++c) {
        double v = raw.samples[base + c] / scale;
        if (linearize) v = srgb_to_linear(v);
        img.at(x, y, c) = v;
      }
    }
  return img;
}

/// Loads a depth map: grayscale PNG normalized to [0,1] for artistic mode,
/// PFM with metric millimetre values for physical mode.
inline DepthMap load_depth(const std::string& path, DepthMode mode) {
  if (mode == DepthMode::artistic) {
    const auto bytes = detail::read_file(path);
    if (!detail::has_png_magic(bytes))
      throw IoError("artistic depth must be a grayscale PNG: " + path);
    const RawImage raw = read_png(path);
    if (raw.channels != 1)
      throw IoError("artistic depth must be single-channel: " + path);
    const double scale = raw.bit_depth == 8 ? 255.0 : 65535.0;
    DepthMap depth(raw.width, raw.height, DepthMode::artistic);
    for (size_t i = 0; i < raw.samples.size(); ++i)
      depth.values[i] = raw.samples[i] / scale;
    depth.validate();
    return depth;
  }

  const auto bytes = detail::read_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != 'f')
    throw IoError("physical depth must be a grayscale PFM: " + path);
  const FloatImage raw = read_pfm(path);
  DepthMap depth(raw.width, raw.height, DepthMode::physical);
  for (size_t i = 0; i < raw.samples.size(); ++i)
    depth.values[i] = raw.samples[i];
  depth.validate();
  return depth;
}

/// Loads an 8-bit grayscale segmentation mask; values >= 128 mark the
/// subject (coverage 1), everything else is background (0).
inline Image load_mask(const std::string& path) {
  const RawImage raw = detail::read_raw_auto(path);
  if (raw.channels != 1 || raw.bit_depth != 8)
    throw IoError("mask must be an 8-bit grayscale image: " + path);
  Image mask(raw.width, raw.height, 1);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x)
      mask.at(x, y) =
          raw.samples[static_cast<size_t>(y) * raw.width + x] >= 128 ? 1.0
                                                                     : 0.0;
  return mask;
}

/// Quantizes a working image to packed 8-bit samples, re-encoding to sRGB
/// when the job loaded with linearization on.
inline std::vector<uint8_t> to_bytes8(const Image& img, bool encode_srgb) {
  std::vector<uint8_t> out(img.plane_size() * img.channels);
  size_t i = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      for (int c = 0; c < img.channels; ++c) {
        double v = std::clamp(img.at(x, y, c), 0.0, 1.0);
        if (encode_srgb) v = linear_to_srgb(v);
        out[i++] = uint8_t(std::lround(v * 255.0));
      }
  return out;
}

inline void save_image8(const std::string& path, const Image& img,
                        bool encode_srgb) {
  write_png8(path, img.width, img.height, img.channels,
             to_bytes8(img, encode_srgb));
}

/// Writes bokeh.png plus view_000.png .. view_{n-1}.png, and motion.gif
/// when requested (delay = floor(100/fps) centiseconds, infinite loop).
/// Returns the written paths, bokeh first, then views in angle order.
inline std::vector<std::string> write_outputs(const ViewSet& set,
                                              const RenderJob& job) {
  if (set.views.empty())
    throw ValidationError("write_outputs: empty view set");
  if (job.fps < 1 || job.fps > 100)
    throw ValidationError("write_outputs: fps must be in [1,100]");
  std::filesystem::path dir(job.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir))
    throw IoError("cannot create output directory: " + job.out_dir);

  std::vector<std::string> manifest;
  const bool srgb = job.linearize;

  const auto bokeh_path = (dir / "bokeh.png").string();
  const auto bokeh_bytes = to_bytes8(set.bokeh, srgb);
  write_png8(bokeh_path, set.bokeh.width, set.bokeh.height,
             set.bokeh.channels, bokeh_bytes);
  manifest.push_back(bokeh_path);

  std::vector<std::vector<uint8_t>> frame_bytes;
  frame_bytes.reserve(set.views.size());
  for (size_t k = 0; k < set.views.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "view_%03zu.png", k);
    const auto path = (dir / name).string();
    frame_bytes.push_back(to_bytes8(set.views[k], srgb));
    write_png8(path, set.views[k].width, set.views[k].height,
               set.views[k].channels, frame_bytes.back());
    manifest.push_back(path);
  }

  if (job.gif) {
    if (set.bokeh.channels != 3)
      throw ValidationError("write_outputs: GIF output needs RGB views");
    const auto gif_path = (dir / "motion.gif").string();
    write_gif(gif_path, set.bokeh.width, set.bokeh.height, frame_bytes,
              bokeh_bytes, 100 / job.fps);
    manifest.push_back(gif_path);
  }
  return manifest;
}

}  // namespace dofsynth::io
