#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "sfrc/core.hpp"
#include "support/helpers.hpp"

using namespace sfrc;

TEST_CASE("image constructor enforces invariants") {
  CHECK_NOTHROW(Image(4, 3, 0.48, std::vector<double>(12, 1.0)));
  CHECK_THROWS_AS(Image(4, 3, 0.48, std::vector<double>(11, 1.0)),
                  DimensionMismatch);
  CHECK_THROWS_AS(Image(4, 3, 0.0, std::vector<double>(12, 1.0)),
                  InvalidArgument);
  CHECK_THROWS_AS(Image(0, 3, 1.0, std::vector<double>{}), InvalidArgument);

  std::vector<double> bad(12, 0.0);
  bad[5] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Image(4, 3, 1.0, bad), NonFiniteData);
  bad[5] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Image(4, 3, 1.0, bad), NonFiniteData);
}

TEST_CASE("validate_pair") {
  const Image a(512, 512, 0.48, 0.0);
  const Image b(512, 512, 0.48, 1.0);
  CHECK_NOTHROW(validate_pair(a, b));

  const Image c(320, 320, 0.48, 0.0);
  CHECK_THROWS_AS(validate_pair(a, c), DimensionMismatch);

  const Image d(512, 512, 1.0, 0.0);
  CHECK_THROWS_AS(validate_pair(a, d), PixelSizeMismatch);
}

TEST_CASE("frequency axis conventions") {
  const FrequencyAxis axis(0.48, 32, 1.0 / 64.0);
  CHECK(axis.nyquist() == 1.0 / (2.0 * 0.48));
  // ring index -> center frequency -> ring index round trip
  for (int k = 0; k < axis.n_rings; ++k)
    CHECK(axis.ring_of(axis.ring_center(k)) == k);
  // rings must cover the full band
  CHECK_THROWS_AS(FrequencyAxis(1.0, 10, 1.0 / 64.0), InvalidArgument);
}

TEST_CASE("patch extraction bounds and size rules") {
  const Image img = testsup::random_image(64, 48, 7);
  const Patch p = extract_patch(img, 16, 8, 32);
  CHECK(p.size == 32);
  CHECK(p.at(0, 0) == img.at(16, 8));
  CHECK(p.at(31, 31) == img.at(47, 39));
  CHECK(p.pixel_size == img.pixel_size());

  CHECK_THROWS_AS(extract_patch(img, 40, 0, 32), InvalidArgument);  // overhang
  CHECK_THROWS_AS(extract_patch(img, 0, 0, 31), InvalidArgument);   // odd
  CHECK_THROWS_AS(extract_patch(img, 0, 0, 6), InvalidArgument);    // too small
}
