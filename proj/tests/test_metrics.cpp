#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "sfrc/degrade.hpp"
#include "sfrc/metrics.hpp"
#include "sfrc/scanner.hpp"
#include "support/helpers.hpp"

using namespace sfrc;

TEST_CASE("psnr identities and hand computations") {
  const auto img = testsup::random_image(64, 64, 1);
  CHECK(std::isinf(psnr(img, img, 1.0)));

  // all-zero vs all-0.1, range 1: MSE = 0.01 -> 20 dB
  const Image zero(64, 64, 1.0, 0.0);
  const Image tenth(64, 64, 1.0, 0.1);
  CHECK(psnr(zero, tenth, 1.0) == Catch::Approx(20.0).margin(1e-12));

  // uniform shift by range/2: MSE = range^2/4 -> 10 log10(4) = 6.0206 dB
  const Image half(64, 64, 1.0, 0.5);
  CHECK(psnr(zero, half, 1.0) == Catch::Approx(6.0206).margin(1e-3));
}

TEST_CASE("psnr/ssim symmetry") {
  const auto a = testsup::random_image(64, 64, 2);
  const auto b = testsup::random_image(64, 64, 3);
  CHECK(psnr(a, b, 1.0) == Catch::Approx(psnr(b, a, 1.0)).margin(1e-9));
  CHECK(ssim(a, b, 1.0) == Catch::Approx(ssim(b, a, 1.0)).margin(1e-9));
}

TEST_CASE("ssim identities and inversion") {
  const auto img = make_phantom(PhantomKind::texture, 128, 4).image;
  CHECK(ssim(img, img, 1.0) == Catch::Approx(1.0).margin(1e-12));

  std::vector<double> inv(img.data().size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 - img.data()[i];
  CHECK(ssim(img, img.with_data(inv), 1.0) < 0.5);

  // equal constants stabilized by C1/C2
  const Image c1(16, 16, 1.0, 0.3), c2(16, 16, 1.0, 0.3);
  CHECK(ssim(c1, c2, 1.0) == Catch::Approx(1.0).margin(1e-12));

  CHECK_THROWS_AS(ssim(Image(4, 4, 1.0, 0.0), Image(4, 4, 1.0, 0.0), 1.0),
                  ImageTooSmall);
}

TEST_CASE("hellinger identities") {
  const auto img = testsup::random_image(64, 64, 5);
  CHECK(hellinger(img, img) == 0.0);

  // disjoint supports -> 1
  const Image lo(64, 64, 1.0, 0.0);
  const Image hi(64, 64, 1.0, 1.0);
  CHECK(hellinger(lo, hi) == Catch::Approx(1.0).margin(1e-12));

  // both constant and equal -> 0, not an error
  CHECK(hellinger(lo, lo.with_data(lo.data())) == 0.0);
}

TEST_CASE("hellinger symmetry and triangle spot check") {
  const auto a = testsup::random_image(64, 64, 6);
  const auto b = testsup::random_image(64, 64, 7);
  const auto c = testsup::random_image(64, 64, 8);
  CHECK(hellinger(a, b) == hellinger(b, a));
  CHECK(hellinger(a, c) <= hellinger(a, b) + hellinger(b, c) + 1e-9);
}

TEST_CASE("gaussian shift against the closed form") {
  // N(0,1) vs N(1,1): H = sqrt(1 - exp(-1/8)) ~= 0.3425
  const int n = 1000;  // 10^6 samples
  rng::Generator gen(123);
  std::vector<double> da(static_cast<std::size_t>(n) * n),
      db(static_cast<std::size_t>(n) * n);
  for (auto& v : da) v = gen.normal();
  for (auto& v : db) v = gen.normal() + 1.0;
  const Image a(n, n, 1.0, std::move(da));
  const Image b(n, n, 1.0, std::move(db));
  const double expected = std::sqrt(1.0 - std::exp(-1.0 / 8.0));
  CHECK(hellinger(a, b, 256) == Catch::Approx(expected).margin(0.01));
}

TEST_CASE("masked psnr/ssim restrict to signal pixels") {
  const auto ref = make_phantom(PhantomKind::texture, 64, 9).image;
  auto data = ref.data();
  // corrupt the left half only
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 32; ++x)
      data[static_cast<std::size_t>(y) * 64 + x] += 0.5;
  const auto test = ref.with_data(data);

  PixelMask right(64 * 64, 0);
  for (int y = 0; y < 64; ++y)
    for (int x = 32; x < 64; ++x) right[static_cast<std::size_t>(y) * 64 + x] = 1;
  CHECK(std::isinf(psnr(ref, test, 1.0, &right)));
  CHECK(psnr(ref, test, 1.0) < 20.0);
  CHECK(ssim(ref, test, 1.0, &right) > ssim(ref, test, 1.0));
}

TEST_CASE("full-image metrics can disagree with sFRC labeling") {
  // A localized high-frequency corruption scores well on SSIM but is
  // caught by the scan; mild global noise does the opposite.
  const auto ref = make_phantom(PhantomKind::texture, 256, 10).image;

  auto local = ref;
  local = testsup::scramble_region_highfreq(local, 64, 64, 64, 64, 0.12, 7);

  rng::Generator gen(77);
  auto noisy_data = ref.data();
  for (auto& v : noisy_data) v += 0.02 * gen.normal();
  const auto global = ref.with_data(std::move(noisy_data));

  const double ssim_local = ssim(ref, local, 1.0);
  const double ssim_global = ssim(ref, global, 1.0);

  SfrcConfig cfg;
  cfg.patch_size = 64;
  cfg.hallucination_threshold = 0.15;
  const double rate_local = scan(ref, local, cfg).hallucination_rate;
  const double rate_global = scan(ref, global, cfg).hallucination_rate;

  CHECK(ssim_local > ssim_global);       // looks better globally...
  CHECK(rate_local > rate_global);       // ...but hallucinates locally
}

TEST_CASE("argument validation") {
  const auto a = testsup::random_image(32, 32, 11);
  const auto b = testsup::random_image(16, 16, 12);
  CHECK_THROWS_AS(psnr(a, b, 1.0), DimensionMismatch);
  CHECK_THROWS_AS(psnr(a, a, 0.0), InvalidArgument);
  CHECK_THROWS_AS(hellinger(a, a, 1), InvalidArgument);
  CHECK_THROWS_AS(infer_data_range(Image(8, 8, 1.0, 0.5),
                                   Image(8, 8, 1.0, 0.5)),
                  InvalidArgument);
  CHECK(infer_data_range(Image(8, 8, 1.0, 0.0), Image(8, 8, 1.0, 2.0)) == 2.0);
}
