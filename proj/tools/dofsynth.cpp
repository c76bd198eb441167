// dofsynth: synthetic shallow depth of field, dual-pixel view pairs, and
// rotated-kernel multi-view motion from a single image + depth map.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "dofsynth/dofsynth.hpp"

namespace {

using namespace dofsynth;

enum ExitCode { kOk = 0, kValidation = 1, kIo = 2, kInternal = 3 };

struct RenderCli {
  io::RenderJob job;
  std::string mode = "artistic";
  std::string psf = "dp";
  std::string config_path;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string v) {
  if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                        (v.front() == '\'' && v.back() == '\'')))
    v = v.substr(1, v.size() - 2);
  return v;
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ValidationError("config: invalid boolean for '" + key + "': " + v);
}

double parse_num(const std::string& v, const std::string& key) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ValidationError("config: invalid number for '" + key + "': " + v);
  }
}

// Config file of `key = value` lines with '#' comments. Keys mirror the
// long flag names; values given on the command line win over the file.
void apply_config_file(CLI::App* cmd, RenderCli& cli) {
  std::ifstream file(cli.config_path);
  if (!file) throw IoError("cannot open config file: " + cli.config_path);

  // Keys are shared across render subcommands; an option absent from this
  // subcommand (e.g. `views` under `bokeh`) counts as not given.
  auto given = [&](const char* flag) {
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    return opt != nullptr && opt->count() > 0;
  };
  std::string line;
  int line_no = 0;
  while (std::getline(file, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config: line " + std::to_string(line_no) +
                            " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));

    if (key == "image") {
      if (!given("--image")) cli.job.image_path = value;
    } else if (key == "depth") {
      if (!given("--depth")) cli.job.depth_path = value;
    } else if (key == "mask") {
      if (!given("--mask")) cli.job.mask_path = value;
    } else if (key == "mode") {
      if (value != "physical" && value != "artistic")
        throw ValidationError("config: invalid mode: " + value);
      if (!given("--mode")) cli.mode = value;
    } else if (key == "focal-length") {
      if (!given("--focal-length"))
        cli.job.camera.focal_length_mm = parse_num(value, key);
    } else if (key == "f-number") {
      if (!given("--f-number")) cli.job.camera.f_number = parse_num(value, key);
    } else if (key == "focus-distance") {
      if (!given("--focus-distance"))
        cli.job.camera.focus_distance_mm = parse_num(value, key);
    } else if (key == "pixels-per-mm") {
      if (!given("--pixels-per-mm"))
        cli.job.camera.pixels_per_mm = parse_num(value, key);
    } else if (key == "focus-disparity") {
      if (!given("--focus-disparity"))
        cli.job.focus_disparity = parse_num(value, key);
    } else if (key == "max-radius") {
      if (!given("--max-radius")) cli.job.max_radius_px = parse_num(value, key);
    } else if (key == "out-dir") {
      if (!given("--out-dir")) cli.job.out_dir = value;
    } else if (key == "linearize") {
      if (!given("--linearize") && !given("--no-linearize"))
        cli.job.linearize = parse_bool(value, key);
    } else if (key == "threads") {
      if (!given("--threads"))
        cli.job.threads = static_cast<int>(parse_num(value, key));
    } else if (key == "views") {
      if (!given("--views"))
        cli.job.n_views = static_cast<int>(parse_num(value, key));
    } else if (key == "psf") {
      if (value != "dp" && value != "ramp")
        throw ValidationError("config: invalid psf family: " + value);
      if (!given("--psf")) cli.psf = value;
    } else if (key == "fps") {
      if (!given("--fps")) cli.job.fps = static_cast<int>(parse_num(value, key));
    } else if (key == "gif") {
      if (!given("--gif")) cli.job.gif = parse_bool(value, key);
    } else {
      throw ValidationError("config: unknown key '" + key + "' (line " +
                            std::to_string(line_no) + ")");
    }
  }
}

void add_input_options(CLI::App* cmd, RenderCli& cli) {
  cmd->add_option("--image", cli.job.image_path,
                  "Input image (PNG or binary PPM/PGM); required here or in the config");
  cmd->add_option("--depth", cli.job.depth_path,
                  "Depth map (grayscale PNG for artistic mode, PFM mm for physical)");
  cmd->add_option("--mask", cli.job.mask_path,
                  "Optional 8-bit segmentation mask; >=128 marks the subject");
  cmd->add_option("--mode", cli.mode, "Depth interpretation")
      ->check(CLI::IsMember({"physical", "artistic"}))
      ->capture_default_str();
  cmd->add_option("--focal-length", cli.job.camera.focal_length_mm,
                  "Focal length f in mm (physical mode)")
      ->capture_default_str();
  cmd->add_option("--f-number", cli.job.camera.f_number,
                  "f-number F (physical mode)")
      ->capture_default_str();
  cmd->add_option("--focus-distance", cli.job.camera.focus_distance_mm,
                  "Focus distance s in mm (physical mode)")
      ->capture_default_str();
  cmd->add_option("--pixels-per-mm", cli.job.camera.pixels_per_mm,
                  "Sensor-plane scale converting CoC mm to pixels")
      ->capture_default_str();
  cmd->add_option("--focus-disparity", cli.job.focus_disparity,
                  "In-focus value in [0,1] (artistic mode)")
      ->capture_default_str();
  cmd->add_option("--max-radius", cli.job.max_radius_px,
                  "Blur radius cap in pixels")
      ->capture_default_str();
  cmd->add_option("--out-dir", cli.job.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_flag("--linearize,!--no-linearize", cli.job.linearize,
                "Blur in linear light (sRGB decode on load, encode on save)")
      ->capture_default_str();
  cmd->add_option("--threads", cli.job.threads,
                  "Render threads (0 = all cores); output is identical")
      ->capture_default_str();
  cmd->add_option("--config", cli.config_path,
                  "Config file of key = value lines ('#' comments); flags override");
}

void finalize_job(CLI::App* cmd, RenderCli& cli) {
  if (!cli.config_path.empty()) apply_config_file(cmd, cli);
  if (cli.job.image_path.empty())
    throw ValidationError("--image is required (flag or config)");
  if (cli.job.depth_path.empty())
    throw ValidationError("--depth is required (flag or config)");
  cli.job.mode = cli.mode == "physical" ? DepthMode::physical
                                        : DepthMode::artistic;
  if (cli.psf == "dp")
    cli.job.family = KernelFamily::dp;
  else
    cli.job.family = KernelFamily::ramp;
}

struct LoadedScene {
  Image image;
  LayerStack stack;
};

LoadedScene load_scene(const io::RenderJob& job) {
  LoadedScene scene{io::load_image(job.image_path, job.linearize), {}};
  const DepthMap depth = io::load_depth(job.depth_path, job.mode);
  if (depth.width != scene.image.width || depth.height != scene.image.height)
    throw ValidationError("depth map dimensions do not match the image");

  Image mask;
  const Image* mask_ptr = nullptr;
  if (!job.mask_path.empty()) {
    mask = io::load_mask(job.mask_path);
    if (mask.width != scene.image.width || mask.height != scene.image.height)
      throw ValidationError("mask dimensions do not match the image");
    mask_ptr = &mask;
  }

  const DefocusMap defocus =
      job.mode == DepthMode::physical
          ? defocus_map(job.camera, depth, mask_ptr, job.max_radius_px)
          : defocus_map_artistic(job.focus_disparity, depth, mask_ptr,
                                 job.max_radius_px);
  scene.stack = quantize_layers(scene.image, defocus);
  return scene;
}

int run_bokeh(CLI::App* cmd, RenderCli& cli) {
  finalize_job(cmd, cli);
  const LoadedScene scene = load_scene(cli.job);
  const ViewSet set = render_views(scene.image, scene.stack, 2,
                                   KernelFamily::dp, cli.job.threads);
  std::filesystem::create_directories(cli.job.out_dir);
  const auto path =
      (std::filesystem::path(cli.job.out_dir) / "bokeh.png").string();
  io::save_image8(path, set.bokeh, cli.job.linearize);
  std::cout << path << "\n";
  return kOk;
}

int run_dp_pair(CLI::App* cmd, RenderCli& cli) {
  finalize_job(cmd, cli);
  const LoadedScene scene = load_scene(cli.job);
  const ViewSet set = render_views(scene.image, scene.stack, 2,
                                   KernelFamily::dp, cli.job.threads);
  std::filesystem::create_directories(cli.job.out_dir);
  const std::filesystem::path dir(cli.job.out_dir);
  const auto left = (dir / "left.png").string();
  const auto right = (dir / "right.png").string();
  io::save_image8(left, set.views[0], cli.job.linearize);
  io::save_image8(right, set.views[1], cli.job.linearize);
  std::cout << left << "\n" << right << "\n";
  return kOk;
}

int run_nimat(CLI::App* cmd, RenderCli& cli) {
  finalize_job(cmd, cli);
  const LoadedScene scene = load_scene(cli.job);
  const ViewSet set = render_views(scene.image, scene.stack, cli.job.n_views,
                                   cli.job.family, cli.job.threads);
  for (const auto& path : io::write_outputs(set, cli.job))
    std::cout << path << "\n";
  return kOk;
}

struct BenchCli {
  std::vector<int> sizes{256};
  std::vector<double> radii{8.0};
  std::vector<int> layers{16};
  std::vector<int> views{8};
  uint64_t seed = 7;
  int threads = 1;
};

int run_bench(const BenchCli& cli) {
  std::printf("%8s %8s %8s %8s %12s\n", "size", "radius", "layers", "views",
              "ms");
  for (int size : cli.sizes)
    for (double radius : cli.radii)
      for (int layers : cli.layers)
        for (int views : cli.views) {
          const BenchScene scene =
              make_bench_scene(size, radius, layers, cli.seed);
          const LayerStack stack =
              quantize_layers(scene.image, scene.defocus);
          const auto t0 = std::chrono::steady_clock::now();
          const ViewSet set = render_views(scene.image, stack, views,
                                           KernelFamily::dp, cli.threads);
          const auto t1 = std::chrono::steady_clock::now();
          (void)set;
          const double ms =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
          std::printf("%8d %8.2f %8zu %8d %12.2f\n", size, radius,
                      stack.size(), views, ms);
        }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Synthetic shallow depth of field, dual-pixel sub-aperture pairs, and "
      "rotated-kernel view motion from one image + depth map"};
  app.require_subcommand(1);

  RenderCli bokeh_cli, pair_cli, nimat_cli;
  BenchCli bench_cli;

  CLI::App* bokeh = app.add_subcommand("bokeh", "Render the combined shallow-DoF image");
  add_input_options(bokeh, bokeh_cli);

  CLI::App* pair = app.add_subcommand("dp-pair", "Render the left/right dual-pixel views");
  add_input_options(pair, pair_cli);

  CLI::App* nimat = app.add_subcommand(
      "nimat", "Render n rotated-kernel views plus bokeh (and optional GIF)");
  add_input_options(nimat, nimat_cli);
  nimat->add_option("--views", nimat_cli.job.n_views,
                    "Number of views (even)")
      ->capture_default_str();
  nimat->add_option("--psf", nimat_cli.psf, "Blur kernel family")
      ->check(CLI::IsMember({"dp", "ramp"}))
      ->capture_default_str();
  nimat->add_option("--fps", nimat_cli.job.fps, "GIF playback rate")
      ->capture_default_str();
  nimat->add_flag("--gif", nimat_cli.job.gif, "Also write motion.gif");

  CLI::App* bench = app.add_subcommand(
      "bench", "Time renders over synthetic scenes (seeded, deterministic)");
  bench->add_option("--sizes", bench_cli.sizes, "Image sizes")
      ->delimiter(',')->capture_default_str();
  bench->add_option("--radii", bench_cli.radii, "Max blur radii")
      ->delimiter(',')->capture_default_str();
  bench->add_option("--layers", bench_cli.layers, "Depth layer counts")
      ->delimiter(',')->capture_default_str();
  bench->add_option("--views", bench_cli.views, "View counts")
      ->delimiter(',')->capture_default_str();
  bench->add_option("--seed", bench_cli.seed, "Scene seed")
      ->capture_default_str();
  bench->add_option("--threads", bench_cli.threads, "Render threads")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (bokeh->parsed()) return run_bokeh(bokeh, bokeh_cli);
    if (pair->parsed()) return run_dp_pair(pair, pair_cli);
    if (nimat->parsed()) return run_nimat(nimat, nimat_cli);
    if (bench->parsed()) return run_bench(bench_cli);
    return kValidation;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
