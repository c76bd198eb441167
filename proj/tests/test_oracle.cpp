#include <doctest.h>

#include <cmath>

#include "dofsynth/oracle.hpp"
#include "dofsynth/renderer.hpp"
#include "dofsynth/scene.hpp"

#include "support.hpp"

using namespace dofsynth;

namespace {

double interior_max_diff(const Image& a, const Image& b, int margin) {
  double m = 0.0;
  for (int c = 0; c < a.channels; ++c)
    for (int y = margin; y < a.height - margin; ++y)
      for (int x = margin; x < a.width - margin; ++x)
        m = std::max(m, std::abs(a.at(x, y, c) - b.at(x, y, c)));
  return m;
}

}  // namespace

TEST_CASE("gather oracle: zero defocus is the identity") {
  const Image img = random_image(16, 16, 3, 55);
  const Image out = gather_render(img, DefocusMap(16, 16, 0.0), 0.0,
                                  KernelFamily::dp);
  CHECK(bitwise_equal(out, img));
}

TEST_CASE("gather oracle: uniform defocus equals convolution away from borders") {
  const Image img = random_image(32, 32, 3, 56);
  const DefocusMap defocus(32, 32, 2.0);
  for (double theta : {0.0, 90.0}) {
    const Image scattered = gather_render(img, defocus, theta, KernelFamily::dp);
    const Image convolved = convolve(img, dp_kernel(2.0, theta));
    CHECK(interior_max_diff(scattered, convolved, 3) < 1e-6);
  }
}

TEST_CASE("gather oracle: opposite angles average to the disk answer") {
  // Away from borders, where no kernel mass is discarded and the
  // normalizers of the two directions coincide.
  const Image img = random_image(24, 24, 1, 57);
  const DefocusMap defocus(24, 24, 3.0);
  for (double theta : {0.0, 45.0}) {
    const Image a = gather_render(img, defocus, theta, KernelFamily::dp);
    const Image b = gather_render(img, defocus, theta + 180.0, KernelFamily::dp);
    const Image d = gather_render(img, defocus, 0.0, KernelFamily::disk);
    CHECK(interior_max_diff(average(a, b), d, 3) < 1e-12);
  }
}

TEST_CASE("gather oracle: constant image normalizes to itself") {
  Image img(20, 20, 1, 0.625);
  DefocusMap defocus(20, 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) defocus.at(x, y) = (x * 7 + y) % 3;
  const Image out = gather_render(img, defocus, 30.0, KernelFamily::dp);
  for (double v : out.data) CHECK(std::abs(v - 0.625) < 1e-12);
}

TEST_CASE("layered renderer agrees with the oracle on separated scenes") {
  const testsup::Scene scene = testsup::make_separated_scene(32, 32, 12, 2.0, 0.0);
  const LayerStack stack = quantize_layers(scene.image, scene.defocus);
  for (double theta : {0.0, 45.0, 180.0}) {
    const Image layered = render_view(scene.image, stack, theta, KernelFamily::dp);
    const Image reference = gather_render(scene.image, scene.defocus, theta,
                                          KernelFamily::dp);
    CHECK(interior_max_diff(layered, reference, 3) < 1e-6);
  }
}

TEST_CASE("gather oracle: size guard") {
  const Image big(65, 4, 1, 0.0);
  CHECK_THROWS_AS(gather_render(big, DefocusMap(65, 4, 0.0), 0.0,
                                KernelFamily::dp),
                  ValidationError);
  const Image mismatched(16, 16, 1, 0.0);
  CHECK_THROWS_AS(gather_render(mismatched, DefocusMap(8, 16, 0.0), 0.0,
                                KernelFamily::dp),
                  ValidationError);
}
