#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "dofsynth/error.hpp"

namespace dofsynth::io {

/// Decoded integer image, samples interleaved at their natural scale
/// (0..255 for 8-bit, 0..65535 for 16-bit).
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 gray, 2 gray+alpha, 3 rgb, 4 rgba
  int bit_depth = 8;
  std::vector<uint16_t> samples;
};

namespace detail {

inline std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open file: " + path);
  f.seekg(0, std::ios::end);
  const std::streamoff len = f.tellg();
  f.seekg(0);
  std::vector<uint8_t> buf(static_cast<size_t>(len));
  if (len > 0) f.read(reinterpret_cast<char*>(buf.data()), len);
  if (!f) throw IoError("read failed: " + path);
  return buf;
}

inline void write_file(const std::string& path,
                       const std::vector<uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot create file: " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path);
}

inline uint32_t be32(const uint8_t* p) {
  return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) |
         (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

inline void push_be32(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(uint8_t(x >> 24));
  v.push_back(uint8_t(x >> 16));
  v.push_back(uint8_t(x >> 8));
  v.push_back(uint8_t(x));
}

inline int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  return pb <= pc ? b : c;
}

inline void append_chunk(std::vector<uint8_t>& out, const char type[4],
                         const std::vector<uint8_t>& data) {
  push_be32(out, static_cast<uint32_t>(data.size()));
  const size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  uLong crc = crc32(0L, out.data() + type_at, uInt(4 + data.size()));
  push_be32(out, static_cast<uint32_t>(crc));
}

constexpr uint8_t kPngSignature[8] = {137, 80, 78, 71, 13, 10, 26, 10};

}  // namespace detail

inline RawImage read_png(const std::string& path) {
  const auto bytes = detail::read_file(path);
  if (bytes.size() < 8 ||
      std::memcmp(bytes.data(), detail::kPngSignature, 8) != 0)
    throw IoError("not a PNG file: " + path);

  RawImage img;
  int color_type = -1;
  std::vector<uint8_t> idat;
  size_t pos = 8;
  bool seen_ihdr = false, seen_iend = false;
  while (pos + 12 <= bytes.size() && !seen_iend) {
    const uint32_t len = detail::be32(&bytes[pos]);
    if (pos + 12 + len > bytes.size())
      throw IoError("corrupt PNG (truncated chunk): " + path);
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    const uint8_t* data = &bytes[pos + 8];
    const uint32_t stored_crc = detail::be32(&bytes[pos + 8 + len]);
    if (crc32(0L, &bytes[pos + 4], 4 + len) != stored_crc)
      throw IoError("corrupt PNG (bad chunk CRC): " + path);

    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw IoError("corrupt PNG (bad IHDR): " + path);
      img.width = static_cast<int>(detail::be32(data));
      img.height = static_cast<int>(detail::be32(data + 4));
      img.bit_depth = data[8];
      color_type = data[9];
      if (img.width <= 0 || img.height <= 0 || img.width > (1 << 20) ||
          img.height > (1 << 20))
        throw IoError("corrupt PNG (bad dimensions): " + path);
      if (img.bit_depth != 8 && img.bit_depth != 16)
        throw IoError("unsupported PNG bit depth (need 8 or 16): " + path);
      if (color_type == 3)
        throw IoError("unsupported PNG (palette images): " + path);
      if (color_type != 0 && color_type != 2 && color_type != 4 &&
          color_type != 6)
        throw IoError("unsupported PNG color type: " + path);
      if (data[12] != 0)
        throw IoError("unsupported PNG (interlaced): " + path);
      seen_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      seen_iend = true;
    }
    pos += 12 + len;
  }
  if (!seen_ihdr || !seen_iend || idat.empty())
    throw IoError("corrupt PNG (missing chunks): " + path);

  img.channels = color_type == 0 ? 1 : color_type == 2 ? 3
                 : color_type == 4 ? 2 : 4;
  const int bytes_per_sample = img.bit_depth / 8;
  const size_t bpp = static_cast<size_t>(img.channels) * bytes_per_sample;
  const size_t rowbytes = bpp * img.width;
  const size_t expected = (rowbytes + 1) * img.height;

  std::vector<uint8_t> raw(expected);
  uLongf dest_len = static_cast<uLongf>(expected);
  const int zrc = uncompress(raw.data(), &dest_len, idat.data(),
                             static_cast<uLong>(idat.size()));
  if (zrc != Z_OK || dest_len != expected)
    throw IoError("corrupt PNG (inflate failed): " + path);

  // Undo scanline filters in place.
  for (int y = 0; y < img.height; ++y) {
    uint8_t* row = raw.data() + static_cast<size_t>(y) * (rowbytes + 1);
    const uint8_t filter = row[0];
    uint8_t* cur = row + 1;
    const uint8_t* up =
        y > 0 ? raw.data() + static_cast<size_t>(y - 1) * (rowbytes + 1) + 1
              : nullptr;
    switch (filter) {
      case 0: break;
      case 1:
        for (size_t i = bpp; i < rowbytes; ++i) cur[i] += cur[i - bpp];
        break;
      case 2:
        if (up)
          for (size_t i = 0; i < rowbytes; ++i) cur[i] += up[i];
        break;
      case 3:
        for (size_t i = 0; i < rowbytes; ++i) {
          const int a = i >= bpp ? cur[i - bpp] : 0;
          const int b = up ? up[i] : 0;
          cur[i] += uint8_t((a + b) / 2);
        }
        break;
      case 4:
        for (size_t i = 0; i < rowbytes; ++i) {
          const int a = i >= bpp ? cur[i - bpp] : 0;
          const int b = up ? up[i] : 0;
          const int c = (up && i >= bpp) ? up[i - bpp] : 0;
          cur[i] += uint8_t(detail::paeth(a, b, c));
        }
        break;
      default:
        throw IoError("corrupt PNG (unknown filter): " + path);
    }
  }

  img.samples.resize(static_cast<size_t>(img.width) * img.height *
                     img.channels);
  size_t si = 0;
  for (int y = 0; y < img.height; ++y) {
    const uint8_t* cur =
        raw.data() + static_cast<size_t>(y) * (rowbytes + 1) + 1;
    if (img.bit_depth == 8) {
      for (size_t i = 0; i < rowbytes; ++i) img.samples[si++] = cur[i];
    } else {
      for (size_t i = 0; i < rowbytes; i += 2)
        img.samples[si++] = uint16_t((cur[i] << 8) | cur[i + 1]);
    }
  }
  return img;
}

/// 8-bit grayscale or RGB PNG, samples interleaved.
inline void write_png8(const std::string& path, int width, int height,
                       int channels, const std::vector<uint8_t>& samples) {
  if (width <= 0 || height <= 0 || (channels != 1 && channels != 3))
    throw ValidationError("write_png8: bad dimensions");
  if (samples.size() != static_cast<size_t>(width) * height * channels)
    throw ValidationError("write_png8: sample count mismatch");

  const size_t rowbytes = static_cast<size_t>(width) * channels;
  std::vector<uint8_t> raw((rowbytes + 1) * height);
  for (int y = 0; y < height; ++y) {
    uint8_t* row = raw.data() + static_cast<size_t>(y) * (rowbytes + 1);
    row[0] = 0;  // filter: none
    std::memcpy(row + 1, samples.data() + static_cast<size_t>(y) * rowbytes,
                rowbytes);
  }

  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw IoError("PNG deflate failed: " + path);
  comp.resize(comp_len);

  std::vector<uint8_t> out(detail::kPngSignature,
                           detail::kPngSignature + 8);
  std::vector<uint8_t> ihdr;
  detail::push_be32(ihdr, static_cast<uint32_t>(width));
  detail::push_be32(ihdr, static_cast<uint32_t>(height));
  ihdr.push_back(8);
  ihdr.push_back(channels == 1 ? 0 : 2);
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  detail::append_chunk(out, "IHDR", ihdr);
  detail::append_chunk(out, "IDAT", comp);
  detail::append_chunk(out, "IEND", {});
  detail::write_file(path, out);
}

/// 16-bit grayscale PNG (the normalized depth-map carrier).
inline void write_png16_gray(const std::string& path, int width, int height,
                             const std::vector<uint16_t>& samples) {
  if (width <= 0 || height <= 0)
    throw ValidationError("write_png16_gray: bad dimensions");
  if (samples.size() != static_cast<size_t>(width) * height)
    throw ValidationError("write_png16_gray: sample count mismatch");

  const size_t rowbytes = static_cast<size_t>(width) * 2;
  std::vector<uint8_t> raw((rowbytes + 1) * height);
  for (int y = 0; y < height; ++y) {
    uint8_t* row = raw.data() + static_cast<size_t>(y) * (rowbytes + 1);
    row[0] = 0;
    for (int x = 0; x < width; ++x) {
      const uint16_t v = samples[static_cast<size_t>(y) * width + x];
      row[1 + 2 * x] = uint8_t(v >> 8);
      row[2 + 2 * x] = uint8_t(v & 0xFF);
    }
  }

  uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> comp(comp_len);
  if (compress2(comp.data(), &comp_len, raw.data(),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw IoError("PNG deflate failed: " + path);
  comp.resize(comp_len);

  std::vector<uint8_t> out(detail::kPngSignature,
                           detail::kPngSignature + 8);
  std::vector<uint8_t> ihdr;
  detail::push_be32(ihdr, static_cast<uint32_t>(width));
  detail::push_be32(ihdr, static_cast<uint32_t>(height));
  ihdr.push_back(16);
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  detail::append_chunk(out, "IHDR", ihdr);
  detail::append_chunk(out, "IDAT", comp);
  detail::append_chunk(out, "IEND", {});
  detail::write_file(path, out);
}

}  // namespace dofsynth::io
