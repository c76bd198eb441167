// CLI integration checks. Drives the installed binary end to end:
//   cli_integration <path-to-dofsynth> <work-dir>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dofsynth/dofsynth.hpp"
#include "support.hpp"

using namespace dofsynth;
namespace fs = std::filesystem;

static int failures = 0;

#define EXPECT(cond, label)                                          \
  do {                                                               \
    if (cond) {                                                      \
      std::printf("ok   %s\n", label);                               \
    } else {                                                         \
      ++failures;                                                    \
      std::printf("FAIL %s (%s:%d)\n", label, __FILE__, __LINE__);   \
    }                                                                \
  } while (0)

namespace {

struct Paths {
  std::string cli;
  fs::path work;
  std::string image, depth, depth_flat, mask;
};

int run(const Paths& p, const std::string& args, std::string* out = nullptr,
        std::string* err = nullptr) {
  const auto out_file = (p.work / "stdout.txt").string();
  const auto err_file = (p.work / "stderr.txt").string();
  const int rc =
      testsup::run_command(testsup::q(p.cli) + " " + args, out_file, err_file);
  if (out) *out = testsup::read_text(out_file);
  if (err) *err = testsup::read_text(err_file);
  return rc;
}

std::string common_flags(const Paths& p, const std::string& out_dir) {
  return "--image " + testsup::q(p.image) + " --depth " + testsup::q(p.depth) +
         " --mask " + testsup::q(p.mask) +
         " --mode artistic --focus-disparity 0.1 --max-radius 4 --out-dir " +
         testsup::q((p.work / out_dir).string());
}

int max_sample_diff(const std::string& a, const std::string& b) {
  const io::RawImage ra = io::read_png(a), rb = io::read_png(b);
  if (ra.samples.size() != rb.samples.size()) return 1 << 16;
  int m = 0;
  for (size_t i = 0; i < ra.samples.size(); ++i)
    m = std::max(m, std::abs(int(ra.samples[i]) - int(rb.samples[i])));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: cli_integration <cli> <workdir>\n");
    return 2;
  }
  Paths p;
  p.cli = argv[1];
  p.work = fs::path(argv[2]);
  fs::create_directories(p.work);

  // Assets: portrait scene, sRGB-encoded image + 16-bit depth + mask.
  const PortraitScene scene = make_portrait_scene(64, 64);
  p.image = (p.work / "image.png").string();
  p.depth = (p.work / "depth.png").string();
  p.depth_flat = (p.work / "depth_flat.png").string();
  p.mask = (p.work / "mask.png").string();
  io::save_image8(p.image, scene.image, true);
  std::vector<uint16_t> d16(scene.depth01.data.size());
  for (size_t i = 0; i < d16.size(); ++i)
    d16[i] = uint16_t(std::lround(scene.depth01.data[i] * 65535.0));
  io::write_png16_gray(p.depth, 64, 64, d16);
  std::vector<uint16_t> flat(d16.size(),
                             uint16_t(std::lround(scene.focus_disparity * 65535.0)));
  io::write_png16_gray(p.depth_flat, 64, 64, flat);
  std::vector<uint8_t> m8(scene.mask.data.size());
  for (size_t i = 0; i < m8.size(); ++i)
    m8[i] = scene.mask.data[i] >= 0.5 ? 255 : 0;
  io::write_png8(p.mask, 64, 64, 1, m8);

  std::string out, err;

  // bokeh happy path
  int rc = run(p, "bokeh " + common_flags(p, "bokeh_out"), &out);
  EXPECT(rc == 0, "bokeh exits 0");
  EXPECT(fs::exists(p.work / "bokeh_out" / "bokeh.png"), "bokeh.png written");
  EXPECT(out.find("bokeh.png") != std::string::npos, "bokeh manifest printed");

  // missing depth file: I/O error, exit 2, message names the path
  rc = run(p,
           "bokeh --image " + testsup::q(p.image) + " --depth " +
               testsup::q((p.work / "missing_depth.png").string()) +
               " --out-dir " + testsup::q((p.work / "x").string()),
           &out, &err);
  EXPECT(rc == 2, "missing depth exits 2");
  EXPECT(err.find("missing_depth.png") != std::string::npos,
         "missing depth message names the path");

  // odd view count: validation error, exit 1
  rc = run(p, "nimat --views 7 " + common_flags(p, "odd_out"), &out, &err);
  EXPECT(rc == 1, "odd --views exits 1");

  // depth dimensions that do not match the image: hard validation error
  const auto small_depth = (p.work / "depth_small.png").string();
  io::write_png16_gray(small_depth, 32, 32,
                       std::vector<uint16_t>(32 * 32, 40000));
  rc = run(p,
           "bokeh --image " + testsup::q(p.image) + " --depth " +
               testsup::q(small_depth) + " --out-dir " +
               testsup::q((p.work / "mismatch_out").string()),
           &out, &err);
  EXPECT(rc == 1, "dimension mismatch exits 1");

  // unknown flag: exit 1
  rc = run(p, "bokeh --bogus 1 " + common_flags(p, "bogus_out"), &out, &err);
  EXPECT(rc == 1, "unknown flag exits 1");

  // --max-radius 0: output equals input within the 8-bit round trip
  rc = run(p,
           "bokeh --image " + testsup::q(p.image) + " --depth " +
               testsup::q(p.depth) +
               " --mode artistic --focus-disparity 0.1 --max-radius 0 "
               "--out-dir " +
               testsup::q((p.work / "zero_out").string()),
           &out);
  EXPECT(rc == 0, "zero max-radius exits 0");
  EXPECT(max_sample_diff(p.image,
                         (p.work / "zero_out" / "bokeh.png").string()) <= 1,
         "zero max-radius reproduces the input");

  // config file equivalence: same values through --config, byte-identical
  const auto cfg_path = (p.work / "render.cfg").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << "# render configuration\n"
        << "image = \"" << p.image << "\"\n"
        << "depth = \"" << p.depth << "\"\n"
        << "mask = \"" << p.mask << "\"\n"
        << "mode = artistic\n"
        << "focus-disparity = 0.1\n"
        << "max-radius = 4\n"
        << "out-dir = \"" << (p.work / "cfg_out").string() << "\"\n";
  }
  std::string out_flags, out_cfg;
  rc = run(p, "bokeh " + common_flags(p, "flags_out"), &out_flags);
  EXPECT(rc == 0, "flags run exits 0");
  rc = run(p, "bokeh --config " + testsup::q(cfg_path), &out_cfg);
  EXPECT(rc == 0, "config run exits 0");
  EXPECT(testsup::files_identical((p.work / "flags_out" / "bokeh.png").string(),
                                  (p.work / "cfg_out" / "bokeh.png").string()),
         "config and flags produce identical bytes");

  // flags override config values
  rc = run(p,
           "bokeh --config " + testsup::q(cfg_path) + " --out-dir " +
               testsup::q((p.work / "cfg_override").string()),
           &out);
  EXPECT(rc == 0 && fs::exists(p.work / "cfg_override" / "bokeh.png"),
         "flag overrides config out-dir");

  // unknown config key is an error
  const auto bad_cfg = (p.work / "bad.cfg").string();
  {
    std::ofstream cfg(bad_cfg);
    cfg << "image = \"" << p.image << "\"\nbogus_key = 3\n";
  }
  rc = run(p, "bokeh --config " + testsup::q(bad_cfg), &out, &err);
  EXPECT(rc == 1, "unknown config key exits 1");

  // job keys that this subcommand does not consume are still accepted
  const auto full_cfg = (p.work / "full.cfg").string();
  {
    std::ofstream cfg(full_cfg);
    cfg << "views = 8\npsf = dp\nfps = 8\ngif = false\n";
  }
  rc = run(p,
           "bokeh --config " + testsup::q(full_cfg) + " " +
               common_flags(p, "full_cfg_out"),
           &out, &err);
  EXPECT(rc == 0, "shared job keys accepted by every render subcommand");

  // dp-pair on an all-in-focus scene: left == right == input
  rc = run(p,
           "dp-pair --image " + testsup::q(p.image) + " --depth " +
               testsup::q(p.depth_flat) +
               " --mode artistic --focus-disparity 0.1 --out-dir " +
               testsup::q((p.work / "pair_out").string()),
           &out);
  EXPECT(rc == 0, "dp-pair exits 0");
  const auto left = (p.work / "pair_out" / "left.png").string();
  const auto right = (p.work / "pair_out" / "right.png").string();
  EXPECT(fs::exists(left) && fs::exists(right), "left/right written");
  EXPECT(testsup::files_identical(left, right), "in-focus pair is identical");
  EXPECT(max_sample_diff(p.image, left) <= 1, "in-focus pair matches input");

  // dp-pair on the blurred scene matches goldens rendered via the library
  rc = run(p, "dp-pair " + common_flags(p, "pair_blur"), &out);
  EXPECT(rc == 0, "dp-pair (blurred scene) exits 0");
  {
    const Image img = io::load_image(p.image, true);
    const DepthMap depth = io::load_depth(p.depth, DepthMode::artistic);
    const Image mask = io::load_mask(p.mask);
    const DefocusMap defocus = defocus_map_artistic(0.1, depth, &mask, 4.0);
    const auto [left, right] =
        render_dp_pair(img, quantize_layers(img, defocus));
    const auto gold_l = (p.work / "gold_left.png").string();
    const auto gold_r = (p.work / "gold_right.png").string();
    io::save_image8(gold_l, left, true);
    io::save_image8(gold_r, right, true);
    EXPECT(testsup::files_identical(
               gold_l, (p.work / "pair_blur" / "left.png").string()) &&
               testsup::files_identical(
                   gold_r, (p.work / "pair_blur" / "right.png").string()),
           "dp-pair bytes match library goldens");
  }

  // nimat: view files + bokeh + gif, manifest in order
  rc = run(p, "nimat --views 4 --gif --fps 8 " + common_flags(p, "nimat_out"),
           &out);
  EXPECT(rc == 0, "nimat exits 0");
  std::vector<std::string> lines;
  {
    std::stringstream ss(out);
    for (std::string line; std::getline(ss, line);)
      if (!line.empty()) lines.push_back(line);
  }
  EXPECT(lines.size() == 6, "nimat manifest has bokeh + 4 views + gif");
  for (const auto& line : lines)
    EXPECT(fs::exists(line), "manifest path exists");
  EXPECT(lines[0].find("bokeh.png") != std::string::npos &&
             lines[1].find("view_000.png") != std::string::npos &&
             lines.back().find("motion.gif") != std::string::npos,
         "manifest order bokeh, views, gif");

  // physical mode end to end: metric PFM depth + thin-lens flags
  const auto pfm_depth = (p.work / "depth_mm.pfm").string();
  {
    std::vector<float> mm(64 * 64);
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x)
        mm[y * 64 + x] = 1000.0f + 40.0f * y;  // focus plane at 1000 mm
    io::write_pfm(pfm_depth, 64, 64, mm);
  }
  rc = run(p,
           "bokeh --image " + testsup::q(p.image) + " --depth " +
               testsup::q(pfm_depth) +
               " --mode physical --focal-length 50 --f-number 2"
               " --focus-distance 1000 --pixels-per-mm 30 --max-radius 8"
               " --out-dir " +
               testsup::q((p.work / "physical_out").string()),
           &out, &err);
  EXPECT(rc == 0, "physical mode exits 0");
  EXPECT(fs::exists(p.work / "physical_out" / "bokeh.png"),
         "physical mode writes bokeh.png");
  EXPECT(max_sample_diff(p.image,
                         (p.work / "physical_out" / "bokeh.png").string()) > 1,
         "physical mode actually blurs");

  // ramp PSF renders a different view set than the dual-pixel PSF
  rc = run(p, "nimat --views 2 --psf ramp " + common_flags(p, "ramp_out"), &out);
  EXPECT(rc == 0, "nimat --psf ramp exits 0");
  rc = run(p, "nimat --views 2 --psf dp " + common_flags(p, "dp_out"), &out);
  EXPECT(rc == 0, "nimat --psf dp exits 0");
  EXPECT(fs::exists(p.work / "ramp_out" / "view_001.png") &&
             !testsup::files_identical(
                 (p.work / "ramp_out" / "view_000.png").string(),
                 (p.work / "dp_out" / "view_000.png").string()),
         "ramp and dp kernels blur differently");

  // determinism: identical runs produce identical bytes
  rc = run(p, "nimat --views 4 " + common_flags(p, "det_a"), &out);
  EXPECT(rc == 0, "det run A exits 0");
  rc = run(p, "nimat --views 4 " + common_flags(p, "det_b"), &out);
  EXPECT(rc == 0, "det run B exits 0");
  bool identical = true;
  for (const auto& name :
       {"bokeh.png", "view_000.png", "view_001.png", "view_002.png",
        "view_003.png"})
    identical = identical &&
                testsup::files_identical((p.work / "det_a" / name).string(),
                                         (p.work / "det_b" / name).string());
  EXPECT(identical, "repeated runs are byte-identical");

  // bench smoke: table with a header and one row reporting nonnegative ms
  rc = run(p, "bench --sizes 48 --radii 3 --layers 4 --views 2", &out);
  EXPECT(rc == 0, "bench exits 0");
  {
    std::stringstream ss(out);
    std::string header, row;
    std::getline(ss, header);
    std::getline(ss, row);
    std::stringstream rs(row);
    double size = -1, radius = -1, layers = -1, views = -1, ms = -1;
    rs >> size >> radius >> layers >> views >> ms;
    EXPECT(header.find("ms") != std::string::npos, "bench header present");
    EXPECT(size == 48 && views == 2 && ms >= 0.0, "bench row well-formed");
  }

  // help exits 0
  rc = run(p, "--help", &out);
  EXPECT(rc == 0, "--help exits 0");
  rc = run(p, "nimat --help", &out);
  EXPECT(rc == 0, "subcommand --help exits 0");

  if (failures == 0) std::printf("all CLI integration checks passed\n");
  return failures == 0 ? 0 : 1;
}
