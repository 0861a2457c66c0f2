#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>

#include "doctest.h"
#include "foe/errors.hpp"
#include "foe/image.hpp"
#include "foe/rng.hpp"
#include "support.hpp"

using foe::Image;

TEST_CASE("read_pgm accepts the smallest legal ascii file") {
  const Image img = foe::read_pgm("P2\n1 1\n255\n0\n");
  CHECK(img.width == 1);
  CHECK(img.height == 1);
  CHECK(img.data == std::vector<double>{0.0});
}

TEST_CASE("read_pgm maps binary payload bytes directly") {
  std::string bytes = "P5\n2 2\n255\n";
  bytes += static_cast<char>(10);
  bytes += static_cast<char>(20);
  bytes += static_cast<char>(30);
  bytes += static_cast<char>(40);
  const Image img = foe::read_pgm(bytes);
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.data == std::vector<double>{10.0, 20.0, 30.0, 40.0});
}

TEST_CASE("read_pgm handles comments and arbitrary header whitespace") {
  const Image img = foe::read_pgm("P2 # magic\n# a comment line\n 2\t1 # width/height\n255\n7 9\n");
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  CHECK(img.data == std::vector<double>{7.0, 9.0});
}

TEST_CASE("read_pgm rejects malformed input with byte offsets") {
  CHECK_THROWS_AS(foe::read_pgm("P6\n1 1\n255\n0"), foe::ParseError);
  CHECK_THROWS_AS(foe::read_pgm(""), foe::ParseError);
  CHECK_THROWS_AS(foe::read_pgm("P2\n0 1\n255\n"), foe::ParseError);

  try {
    foe::read_pgm("P2\n1 1\n65535\n0\n");
    FAIL("expected ParseError");
  } catch (const foe::ParseError& e) {
    CHECK(e.offset() == 7);  // the maxval token
    CHECK(std::string(e.what()).find("maxval") != std::string::npos);
  }

  // One payload byte missing.
  std::string truncated = "P5\n2 2\n255\n";
  truncated += "abc";
  CHECK_THROWS_AS(foe::read_pgm(truncated), foe::ParseError);

  // Payload byte above maxval.
  std::string overflow = "P5\n1 1\n15\n";
  overflow += static_cast<char>(200);
  CHECK_THROWS_AS(foe::read_pgm(overflow), foe::ParseError);

  // Trailing junk after a complete binary payload.
  std::string trailing = "P5\n1 1\n255\n";
  trailing += static_cast<char>(3);
  trailing += 'x';
  CHECK_THROWS_AS(foe::read_pgm(trailing), foe::ParseError);

  CHECK_THROWS_AS(foe::read_pgm("P2\n1 1\n255\n0 junk\n"), foe::ParseError);
}

TEST_CASE("write_pgm emits a canonical header and rounds half up") {
  std::string expected = "P5\n1 1\n255\n";
  expected += static_cast<char>(0xFF);
  CHECK(foe::write_pgm(Image(1, 1, {255.0})) == expected);
  CHECK(foe::write_pgm(Image(1, 1, {254.6})) == expected);
  CHECK(foe::write_pgm(Image(1, 1, {254.5})) == expected);

  std::string zero = "P5\n1 1\n255\n";
  zero += static_cast<char>(0);
  CHECK(foe::write_pgm(Image(1, 1, {-0.5})) == zero);

  CHECK(foe::write_pgm(Image(2, 1, {0.0, 17.0}), true) == "P2\n2 1\n255\n0 17\n");

  CHECK_THROWS_AS(foe::write_pgm(Image(1, 1, {255.5})), foe::RangeError);
  CHECK_THROWS_AS(foe::write_pgm(Image(1, 1, {-0.51})), foe::RangeError);
}

TEST_CASE("pgm round-trip is byte identity on generated binary files") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    foe::SplitMix64 rng(seed);
    const int w = 1 + static_cast<int>(rng.next() % 33);
    const int h = 1 + static_cast<int>(rng.next() % 17);
    std::string bytes = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    for (int i = 0; i < w * h; ++i) {
      bytes += static_cast<char>(static_cast<unsigned char>(rng.next() & 0xFF));
    }
    CHECK(foe::write_pgm(foe::read_pgm(bytes)) == bytes);
  }
}

TEST_CASE("pgm file round-trip through disk") {
  const support::TempDir dir("pgm");
  const Image img = foe::clamp_round(support::random_image(13, 7, 99));
  foe::write_pgm_file(img, dir.file("img.pgm"));
  const Image back = foe::read_pgm_file(dir.file("img.pgm"));
  CHECK(back.width == img.width);
  CHECK(back.height == img.height);
  CHECK(back.data == img.data);
  CHECK_THROWS_AS(foe::read_pgm_file(dir.file("missing.pgm")), foe::Error);
}

TEST_CASE("add_gaussian_noise is deterministic and unclamped") {
  const Image img = support::synthetic_image(24, 16, 5);
  const Image a = foe::add_gaussian_noise(img, {20.0, 42});
  const Image b = foe::add_gaussian_noise(img, {20.0, 42});
  CHECK(a.data == b.data);

  const Image c = foe::add_gaussian_noise(img, {20.0, 43});
  CHECK(a.data != c.data);

  // Unclamped: a dark image with strong noise must go below zero somewhere.
  const Image dark(16, 16, std::vector<double>(256, 1.0));
  const Image noisy = foe::add_gaussian_noise(dark, {40.0, 7});
  bool below = false;
  for (double v : noisy.data) below = below || v < 0.0;
  CHECK(below);

  CHECK_THROWS_AS(foe::add_gaussian_noise(img, {0.0, 1}), std::invalid_argument);
}

TEST_CASE("add_gaussian_noise vanishes in the small-sigma limit") {
  const Image img = support::synthetic_image(8, 8, 3);
  const Image noisy = foe::add_gaussian_noise(img, {1e-12, 11});
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    CHECK(noisy.data[i] == doctest::Approx(img.data[i]).epsilon(1e-9));
  }
}

TEST_CASE("noise sample standard deviation matches sigma on a 256x256 image") {
  const Image flat(256, 256, std::vector<double>(256 * 256, 128.0));
  const Image noisy = foe::add_gaussian_noise(flat, {20.0, 1234});
  double mean = 0.0;
  for (std::size_t i = 0; i < flat.data.size(); ++i) mean += noisy.data[i] - flat.data[i];
  mean /= static_cast<double>(flat.data.size());
  double var = 0.0;
  for (std::size_t i = 0; i < flat.data.size(); ++i) {
    const double d = noisy.data[i] - flat.data[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(flat.data.size() - 1);
  const double sd = std::sqrt(var);
  CHECK(sd > 19.0);
  CHECK(sd < 21.0);
}

TEST_CASE("clamp_round hits the documented boundary cases") {
  const Image img(3, 1, {-3.2, 127.5, 300.0});
  const Image out = foe::clamp_round(img);
  CHECK(out.data == std::vector<double>{0.0, 128.0, 255.0});
}

TEST_CASE("clamp_round is idempotent and leaves in-range integers alone") {
  const Image img = support::random_image(17, 9, 21, -80.0, 340.0);
  const Image once = foe::clamp_round(img);
  const Image twice = foe::clamp_round(once);
  CHECK(once.data == twice.data);

  const Image integral(2, 2, {0.0, 1.0, 254.0, 255.0});
  CHECK(foe::clamp_round(integral).data == integral.data);
}

TEST_CASE("clamp_round picks the nearest representable level") {
  const Image img = support::random_image(16, 16, 77, -40.0, 300.0);
  const Image out = foe::clamp_round(img);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    const double chosen = std::fabs(out.data[i] - img.data[i]);
    for (int level = 0; level <= 255; ++level) {
      CHECK(chosen <= std::fabs(level - img.data[i]) + 1e-12);
    }
  }
}

TEST_CASE("psnr formula and sentinel") {
  const Image a(2, 1, {0.0, 0.0});
  CHECK(std::isinf(foe::psnr(a, a)));

  const Image black(2, 1, {0.0, 0.0});
  const Image white(2, 1, {255.0, 255.0});
  CHECK(foe::psnr(black, white) == doctest::Approx(0.0));

  const Image b(2, 1, {10.0, 20.0});
  CHECK(foe::psnr(a, b) == doctest::Approx(10.0 * std::log10(65025.0 / 250.0)).epsilon(1e-12));

  CHECK_THROWS_AS(foe::psnr(a, Image(1, 1, {0.0})), std::invalid_argument);
}

TEST_CASE("resize_scale shapes and content") {
  const Image img = support::synthetic_image(20, 10, 9);

  const Image same = foe::resize_scale(img, 1.0);
  CHECK(same.data == img.data);

  const Image doubled = foe::resize_scale(img, 2.0);
  CHECK(doubled.width == 40);
  CHECK(doubled.height == 20);
  // Nearest neighbor: every output pixel equals some input pixel.
  CHECK(doubled.at(0, 0) == img.at(0, 0));
  CHECK(doubled.at(19, 39) == img.at(9, 19));

  const Image halved = foe::resize_scale(img, 0.5);
  CHECK(halved.width == 10);
  CHECK(halved.height == 5);
  // Box average of a constant image stays constant.
  const Image flat(8, 8, std::vector<double>(64, 42.0));
  const Image small = foe::resize_scale(flat, 0.5);
  for (double v : small.data) CHECK(v == doctest::Approx(42.0));

  CHECK(foe::resize_scale(img, 0.01).width == 1);
  CHECK_THROWS_AS(foe::resize_scale(img, 0.0), std::invalid_argument);
}

TEST_CASE("validate_image rejects bad shapes and non-finite values") {
  CHECK_THROWS_AS(foe::validate_image(Image(0, 1, {})), std::invalid_argument);
  CHECK_THROWS_AS(foe::validate_image(Image(2, 1, {1.0})), std::invalid_argument);
  CHECK_THROWS_AS(foe::validate_image(Image(1, 1, {std::numeric_limits<double>::quiet_NaN()})),
                  std::invalid_argument);
}
