#pragma once

#include <cmath>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/io/pnm.hpp"

namespace dofsynth::io {

/// Decoded float image (PFM carrier for metric depth).
struct FloatImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<float> samples;  // interleaved, top-down row order
};

/// Portable FloatMap: "Pf" grayscale or "PF" color. The scale's sign gives
/// the byte order (negative = little-endian); rows are stored bottom-up.
inline FloatImage read_pfm(const std::string& path) {
  const auto buf = detail::read_file(path);
  if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != 'f' && buf[1] != 'F'))
    throw IoError("not a PFM file: " + path);
  FloatImage img;
  img.channels = buf[1] == 'f' ? 1 : 3;
  size_t pos = 2;
  const int w = detail::pnm_int(buf, pos, path);
  const int h = detail::pnm_int(buf, pos, path);
  double scale = 0.0;
  try {
    scale = std::stod(detail::pnm_token(buf, pos, path));
  } catch (const std::exception&) {
    throw IoError("corrupt PFM header (bad scale): " + path);
  }
  if (w <= 0 || h <= 0 || scale == 0.0)
    throw IoError("corrupt PFM header: " + path);
  ++pos;  // single whitespace before the raster
  const bool little_endian = scale < 0.0;
  img.width = w;
  img.height = h;
  const size_t n = static_cast<size_t>(w) * h * img.channels;
  if (pos + n * 4 > buf.size())
    throw IoError("corrupt PFM (truncated data): " + path);

  img.samples.resize(n);
  const size_t row_samples = static_cast<size_t>(w) * img.channels;
  for (int y = 0; y < h; ++y) {
    const int src_row = h - 1 - y;  // bottom-up storage
    const uint8_t* src = buf.data() + pos + src_row * row_samples * 4;
    for (size_t i = 0; i < row_samples; ++i) {
      uint8_t b[4];
      std::memcpy(b, src + i * 4, 4);
      if (!little_endian) std::swap(b[0], b[3]), std::swap(b[1], b[2]);
      float f;
      std::memcpy(&f, b, 4);
      img.samples[static_cast<size_t>(y) * row_samples + i] = f;
    }
  }
  return img;
}

/// Writes a grayscale PFM (little-endian scale convention).
inline void write_pfm(const std::string& path, int width, int height,
                      const std::vector<float>& samples) {
  if (width <= 0 || height <= 0 ||
      samples.size() != static_cast<size_t>(width) * height)
    throw ValidationError("write_pfm: bad dimensions");
  std::vector<uint8_t> out;
  char header[64];
  const int header_len =
      std::snprintf(header, sizeof(header), "Pf\n%d %d\n-1.0\n", width, height);
  out.insert(out.end(), header, header + header_len);
  for (int y = height - 1; y >= 0; --y) {
    const float* row = samples.data() + static_cast<size_t>(y) * width;
    const uint8_t* bytes = reinterpret_cast<const uint8_t*>(row);
    out.insert(out.end(), bytes, bytes + static_cast<size_t>(width) * 4);
  }
  detail::write_file(path, out);
}

}  // namespace dofsynth::io
