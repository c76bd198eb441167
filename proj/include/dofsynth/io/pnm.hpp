#pragma once

#include <cctype>
#include <string>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/io/png.hpp"

namespace dofsynth::io {

namespace detail {

// Reads the next header token, skipping whitespace and '#' comments.
inline std::string pnm_token(const std::vector<uint8_t>& buf, size_t& pos,
                             const std::string& path) {
  while (pos < buf.size()) {
    if (std::isspace(buf[pos])) {
      ++pos;
    } else if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < buf.size() && !std::isspace(buf[pos])) tok += char(buf[pos++]);
  if (tok.empty()) throw IoError("corrupt PNM header: " + path);
  return tok;
}

inline int pnm_int(const std::vector<uint8_t>& buf, size_t& pos,
                   const std::string& path) {
  const std::string tok = pnm_token(buf, pos, path);
  try {
    size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError("corrupt PNM header (bad number '" + tok + "'): " + path);
  }
}

}  // namespace detail

/// Binary PGM (P5) or PPM (P6), 8- or 16-bit.
inline RawImage read_pnm(const std::string& path) {
  const auto buf = detail::read_file(path);
  if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '5' && buf[1] != '6'))
    throw IoError("not a binary PGM/PPM file: " + path);
  RawImage img;
  img.channels = buf[1] == '5' ? 1 : 3;
  size_t pos = 2;
  const int w = detail::pnm_int(buf, pos, path);
  const int h = detail::pnm_int(buf, pos, path);
  const int maxval = detail::pnm_int(buf, pos, path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError("corrupt PNM header: " + path);
  ++pos;  // single whitespace after maxval
  img.width = w;
  img.height = h;
  img.bit_depth = maxval < 256 ? 8 : 16;
  const size_t n = static_cast<size_t>(w) * h * img.channels;
  const size_t need = n * (img.bit_depth / 8);
  if (pos + need > buf.size())
    throw IoError("corrupt PNM (truncated data): " + path);
  img.samples.resize(n);
  if (img.bit_depth == 8) {
    for (size_t i = 0; i < n; ++i) img.samples[i] = buf[pos + i];
  } else {
    for (size_t i = 0; i < n; ++i)
      img.samples[i] =
          uint16_t((buf[pos + 2 * i] << 8) | buf[pos + 2 * i + 1]);
  }
  // Rescale odd maxvals to the full range of the stored bit depth.
  const int full = img.bit_depth == 8 ? 255 : 65535;
  if (maxval != full)
    for (auto& s : img.samples)
      s = uint16_t((static_cast<uint32_t>(s) * full + maxval / 2) / maxval);
  return img;
}

}  // namespace dofsynth::io
