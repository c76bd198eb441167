#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "dofsynth/error.hpp"
#include "dofsynth/io/png.hpp"

namespace dofsynth::io {

namespace detail {

struct ColorCount {
  uint8_t r, g, b;
  uint32_t count;
};

/// Median-cut quantizer over the distinct colors of one reference frame.
/// Splits the box with the widest channel range at the count-weighted
/// median; palette entries are the count-weighted box means.
inline std::vector<std::array<uint8_t, 3>> median_cut_palette(
    const std::vector<uint8_t>& rgb, int max_colors) {
  if (rgb.empty() || rgb.size() % 3 != 0)
    throw ValidationError("gif: palette source must be packed RGB");
  std::map<uint32_t, uint32_t> hist;
  for (size_t i = 0; i + 2 < rgb.size(); i += 3) {
    const uint32_t key =
        (uint32_t(rgb[i]) << 16) | (uint32_t(rgb[i + 1]) << 8) | rgb[i + 2];
    ++hist[key];
  }
  std::vector<ColorCount> colors;
  colors.reserve(hist.size());
  for (const auto& [key, count] : hist)
    colors.push_back({uint8_t(key >> 16), uint8_t(key >> 8), uint8_t(key),
                      count});

  struct Box {
    size_t begin, end;  // range into colors
    uint32_t total;
  };
  auto box_total = [&](size_t b, size_t e) {
    uint32_t t = 0;
    for (size_t i = b; i < e; ++i) t += colors[i].count;
    return t;
  };
  std::vector<Box> boxes{{0, colors.size(), box_total(0, colors.size())}};

  auto channel_of = [](const ColorCount& c, int ch) {
    return ch == 0 ? c.r : ch == 1 ? c.g : c.b;
  };

  while (boxes.size() < static_cast<size_t>(max_colors)) {
    // Widest-range splittable box; ties resolved by lowest index.
    int best = -1, best_range = 0, best_ch = 0;
    for (size_t bi = 0; bi < boxes.size(); ++bi) {
      const Box& box = boxes[bi];
      if (box.end - box.begin < 2) continue;
      for (int ch = 0; ch < 3; ++ch) {
        uint8_t lo = 255, hi = 0;
        for (size_t i = box.begin; i < box.end; ++i) {
          lo = std::min(lo, channel_of(colors[i], ch));
          hi = std::max(hi, channel_of(colors[i], ch));
        }
        if (hi - lo > best_range) {
          best_range = hi - lo;
          best = static_cast<int>(bi);
          best_ch = ch;
        }
      }
    }
    if (best < 0) break;

    Box box = boxes[best];
    std::sort(colors.begin() + box.begin, colors.begin() + box.end,
              [&](const ColorCount& a, const ColorCount& b) {
                if (channel_of(a, best_ch) != channel_of(b, best_ch))
                  return channel_of(a, best_ch) < channel_of(b, best_ch);
                return std::tie(a.r, a.g, a.b) < std::tie(b.r, b.g, b.b);
              });
    uint32_t acc = 0;
    size_t split = box.begin;
    for (size_t i = box.begin; i < box.end - 1; ++i) {
      acc += colors[i].count;
      if (acc * 2 >= box.total) {
        split = i + 1;
        break;
      }
      split = i + 1;
    }
    boxes[best] = {box.begin, split, box_total(box.begin, split)};
    boxes.push_back({split, box.end, box_total(split, box.end)});
  }

  std::vector<std::array<uint8_t, 3>> palette;
  palette.reserve(boxes.size());
  for (const Box& box : boxes) {
    uint64_t r = 0, g = 0, b = 0, n = 0;
    for (size_t i = box.begin; i < box.end; ++i) {
      r += uint64_t(colors[i].r) * colors[i].count;
      g += uint64_t(colors[i].g) * colors[i].count;
      b += uint64_t(colors[i].b) * colors[i].count;
      n += colors[i].count;
    }
    if (n == 0) n = 1;
    palette.push_back({uint8_t((r + n / 2) / n), uint8_t((g + n / 2) / n),
                       uint8_t((b + n / 2) / n)});
  }
  std::sort(palette.begin(), palette.end());
  palette.erase(std::unique(palette.begin(), palette.end()), palette.end());
  return palette;
}

/// GIF-variant LZW with deferred clear: emits a clear code and restarts
/// the dictionary when it fills. Codes are packed LSB-first into 255-byte
/// sub-blocks.
class GifLzwEncoder {
 public:
  explicit GifLzwEncoder(std::vector<uint8_t>& out) : out_(out) {
    out_.push_back(8);  // minimum code size for a 256-color table
    reset_dict();
    emit_clear();
  }

  void encode(const std::vector<uint8_t>& indices) {
    if (indices.empty()) throw ValidationError("gif: empty frame");
    int prev = indices[0];
    for (size_t i = 1; i < indices.size(); ++i) {
      const uint8_t c = indices[i];
      const int32_t node = dict_[static_cast<size_t>(prev) * 256 + c];
      if (node >= 0) {
        prev = node;
        continue;
      }
      emit_code(prev);
      if (next_code_ < 4096) {
        dict_[static_cast<size_t>(prev) * 256 + c] = next_code_++;
      } else {
        emit_clear();
        reset_dict();
      }
      prev = c;
    }
    emit_code(prev);
    emit_code(kEnd);
    flush();
  }

 private:
  static constexpr int kClear = 256;
  static constexpr int kEnd = 257;

  void reset_dict() {
    dict_.assign(4096 * 256, -1);
    next_code_ = 258;
  }

  void emit_clear() {
    put_bits(kClear, code_bits_);
    decoder_slots_ = 258;
    code_bits_ = 9;
    reads_since_clear_ = 0;
  }

  // Mirrors the decoder's dictionary growth so every code is written at
  // the width the decoder will read it with.
  void emit_code(int code) {
    put_bits(code, code_bits_);
    ++reads_since_clear_;
    if (reads_since_clear_ >= 2) {
      if (decoder_slots_ < 4096) ++decoder_slots_;
      if (decoder_slots_ >= (1 << code_bits_) && code_bits_ < 12)
        ++code_bits_;
    }
  }

  void put_bits(int code, int bits) {
    bit_buf_ |= static_cast<uint32_t>(code) << bit_count_;
    bit_count_ += bits;
    while (bit_count_ >= 8) {
      push_byte(uint8_t(bit_buf_ & 0xFF));
      bit_buf_ >>= 8;
      bit_count_ -= 8;
    }
  }

  void push_byte(uint8_t b) {
    block_.push_back(b);
    if (block_.size() == 255) flush_block();
  }

  void flush_block() {
    if (block_.empty()) return;
    out_.push_back(uint8_t(block_.size()));
    out_.insert(out_.end(), block_.begin(), block_.end());
    block_.clear();
  }

  void flush() {
    if (bit_count_ > 0) {
      push_byte(uint8_t(bit_buf_ & 0xFF));
      bit_buf_ = 0;
      bit_count_ = 0;
    }
    flush_block();
    out_.push_back(0);  // block terminator
  }

  std::vector<uint8_t>& out_;
  std::vector<int32_t> dict_;
  int next_code_ = 258;
  int code_bits_ = 9;
  int decoder_slots_ = 258;
  int reads_since_clear_ = 0;
  uint32_t bit_buf_ = 0;
  int bit_count_ = 0;
  std::vector<uint8_t> block_;
};

inline void push_le16(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(uint8_t(x & 0xFF));
  v.push_back(uint8_t(x >> 8));
}

}  // namespace detail

/// Animated GIF89a: one global 256-color palette built from palette_source
/// (median cut), full-replacement frames, infinite NETSCAPE loop.
/// delay_cs is the per-frame delay in centiseconds.
inline void write_gif(const std::string& path, int width, int height,
                      const std::vector<std::vector<uint8_t>>& rgb_frames,
                      const std::vector<uint8_t>& palette_source,
                      int delay_cs) {
  if (width <= 0 || height <= 0 || width > 65535 || height > 65535)
    throw ValidationError("write_gif: bad dimensions");
  if (rgb_frames.empty()) throw ValidationError("write_gif: no frames");
  const size_t npx = static_cast<size_t>(width) * height;
  for (const auto& f : rgb_frames)
    if (f.size() != npx * 3)
      throw ValidationError("write_gif: frame size mismatch");
  if (delay_cs < 0 || delay_cs > 65535)
    throw ValidationError("write_gif: bad frame delay");

  const auto palette = detail::median_cut_palette(palette_source, 256);

  std::vector<uint8_t> out;
  out.insert(out.end(), {'G', 'I', 'F', '8', '9', 'a'});
  detail::push_le16(out, uint16_t(width));
  detail::push_le16(out, uint16_t(height));
  out.push_back(0xF7);  // global table, 8 bits/channel, 256 entries
  out.push_back(0);     // background color index
  out.push_back(0);     // pixel aspect ratio
  for (int i = 0; i < 256; ++i) {
    if (i < static_cast<int>(palette.size())) {
      out.push_back(palette[i][0]);
      out.push_back(palette[i][1]);
      out.push_back(palette[i][2]);
    } else {
      out.insert(out.end(), {0, 0, 0});
    }
  }

  // NETSCAPE2.0 application extension: loop forever.
  out.insert(out.end(), {0x21, 0xFF, 0x0B});
  const char netscape[] = "NETSCAPE2.0";
  out.insert(out.end(), netscape, netscape + 11);
  out.insert(out.end(), {0x03, 0x01});
  detail::push_le16(out, 0);
  out.push_back(0);

  // Nearest-palette lookup, memoized per distinct color.
  std::map<uint32_t, uint8_t> lookup;
  auto nearest = [&](uint8_t r, uint8_t g, uint8_t b) -> uint8_t {
    const uint32_t key = (uint32_t(r) << 16) | (uint32_t(g) << 8) | b;
    const auto it = lookup.find(key);
    if (it != lookup.end()) return it->second;
    int best = 0;
    long best_d = 1L << 30;
    for (size_t i = 0; i < palette.size(); ++i) {
      const long dr = long(r) - palette[i][0];
      const long dg = long(g) - palette[i][1];
      const long db = long(b) - palette[i][2];
      const long d = dr * dr + dg * dg + db * db;
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    lookup.emplace(key, uint8_t(best));
    return uint8_t(best);
  };

  std::vector<uint8_t> indices(npx);
  for (const auto& frame : rgb_frames) {
    // Graphic control extension.
    out.insert(out.end(), {0x21, 0xF9, 0x04});
    out.push_back(0x04);  // disposal: do not dispose; no transparency
    detail::push_le16(out, uint16_t(delay_cs));
    out.push_back(0);  // transparent color index (unused)
    out.push_back(0);  // terminator

    // Image descriptor: full logical screen, no local table.
    out.push_back(0x2C);
    detail::push_le16(out, 0);
    detail::push_le16(out, 0);
    detail::push_le16(out, uint16_t(width));
    detail::push_le16(out, uint16_t(height));
    out.push_back(0);

    for (size_t i = 0; i < npx; ++i)
      indices[i] = nearest(frame[3 * i], frame[3 * i + 1], frame[3 * i + 2]);
    detail::GifLzwEncoder enc(out);
    enc.encode(indices);
  }
  out.push_back(0x3B);  // trailer
  detail::write_file(path, out);
}

}  // namespace dofsynth::io
