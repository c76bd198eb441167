#pragma once

// Shared helpers for the test binaries: scripted scenes whose layering
// cannot interact (constant defocus regions separated by black zones),
// file utilities, and process helpers for driving the CLI.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dofsynth/image.hpp"
#include "dofsynth/optics.hpp"
#include "dofsynth/scene.hpp"

namespace testsup {

using dofsynth::DefocusMap;
using dofsynth::Image;

struct Scene {
  Image image;
  DefocusMap defocus;
};

// Two constant-defocus regions (split at x = split_x, radius r_left /
// r_right) with image content only in two blobs kept clear of the split,
// the borders, and each other (blob supports sit >= 6 px from the split,
// so they are >= 12 px apart). Blur from one region can never reach
// nonzero content governed by the other, so the layered renderer and the
// layering-free oracle must agree.
inline Scene make_separated_scene(int w, int h, int split_x, double r_left,
                                  double r_right, uint64_t seed = 3) {
  Scene s{Image(w, h, 3, 0.0), DefocusMap(w, h)};
  dofsynth::SplitMix64 rng(seed);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      s.defocus.at(x, y) = x < split_x ? r_left : r_right;

  const int border = 4, gap = 6;
  auto paint_blob = [&](int x0, int x1) {
    for (int y = border; y < h - border; ++y)
      for (int x = x0; x < x1; ++x)
        for (int c = 0; c < 3; ++c) s.image.at(x, y, c) = rng.uniform();
  };
  paint_blob(border, split_x - gap);
  paint_blob(split_x + gap, w - border);
  return s;
}

inline std::vector<unsigned char> slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return {};
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(f),
                                    std::istreambuf_iterator<char>());
}

inline bool files_identical(const std::string& a, const std::string& b) {
  const auto ba = slurp(a), bb = slurp(b);
  return !ba.empty() && ba == bb;
}

inline std::string read_text(const std::string& path) {
  const auto bytes = slurp(path);
  return std::string(bytes.begin(), bytes.end());
}

// Runs a command with stdout/stderr captured to files; returns the exit
// status (-1 if the process could not be run).
inline int run_command(const std::string& cmd, const std::string& out_file,
                       const std::string& err_file) {
  const std::string full =
      cmd + " >\"" + out_file + "\" 2>\"" + err_file + "\"";
  const int rc = std::system(full.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

inline std::string q(const std::string& path) { return "\"" + path + "\""; }

}  // namespace testsup
