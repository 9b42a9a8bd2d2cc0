#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sfrc/frc.hpp"
#include "support/helpers.hpp"
#include "support/oracle.hpp"

using namespace sfrc;

TEST_CASE("self-FRC is one on every powered ring") {
  const auto p = testsup::random_patch(64, 42);
  const auto curve = frc(p, p);
  REQUIRE(curve.axis.n_rings == 32);
  for (double v : curve.values) CHECK(v == Catch::Approx(1.0).margin(1e-9));
  CHECK_FALSE(curve.low_content);
}

TEST_CASE("sign-flipped patch gives minus one") {
  const auto p = testsup::random_patch(64, 43);
  auto q = p;
  for (auto& v : q.data) v = -v;
  const auto curve = frc(p, q);
  for (double v : curve.values) CHECK(v == Catch::Approx(-1.0).margin(1e-9));
}

TEST_CASE("lowpassed counterpart correlates below the cutoff only") {
  const auto p = testsup::random_patch(64, 44);
  const double cutoff = 0.25 * 0.5;  // 0.25 of Nyquist, normalized
  const auto q = testsup::ideal_lowpass(p, cutoff);
  const auto curve = frc(p, q);
  // cross-check the whole curve against the direct-DFT oracle
  const auto oracle = testsup::direct_frc(p, q, 1.0 / 64.0);
  for (int k = 0; k < curve.axis.n_rings; ++k)
    CHECK(curve.values[k] == Catch::Approx(oracle[k]).margin(1e-6));
  for (int k = 0; k < curve.axis.n_rings; ++k) {
    const double center = curve.axis.ring_center(k);
    if (center < cutoff - curve.axis.bin_width)
      CHECK(curve.values[k] > 0.99);
    else if (center > cutoff + curve.axis.bin_width)
      CHECK(std::abs(curve.values[k]) < 1e-9);
  }
}

TEST_CASE("fft FRC matches brute-force direct DFT FRC") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p1 = testsup::random_patch(16, 1000 + seed);
    const auto p2 = testsup::random_patch(16, 2000 + seed);
    const auto fast = frc(p1, p2);
    const auto slow = testsup::direct_frc(p1, p2, 1.0 / 16.0);
    REQUIRE(fast.values.size() == slow.size());
    for (std::size_t k = 0; k < slow.size(); ++k)
      CHECK(fast.values[k] == Catch::Approx(slow[k]).margin(1e-6));
  }
}

TEST_CASE("scale invariance") {
  const auto p1 = testsup::random_patch(32, 7);
  const auto p2 = testsup::random_patch(32, 8);
  const auto base = frc(p1, p2);
  for (double alpha : {0.1, 7.3}) {
    auto q1 = p1, q2 = p2;
    for (auto& v : q1.data) v *= alpha;
    for (auto& v : q2.data) v *= 2.5;
    const auto scaled = frc(q1, q2);
    for (std::size_t k = 0; k < base.values.size(); ++k)
      CHECK(scaled.values[k] == Catch::Approx(base.values[k]).margin(1e-9));
  }
}

TEST_CASE("symmetry in the two arguments") {
  const auto p1 = testsup::random_patch(48, 17);
  const auto p2 = testsup::random_patch(48, 18);
  const auto ab = frc(p1, p2);
  const auto ba = frc(p2, p1);
  for (std::size_t k = 0; k < ab.values.size(); ++k)
    CHECK(ab.values[k] == Catch::Approx(ba.values[k]).margin(1e-9));
}

TEST_CASE("independent noise stays within the counting bound") {
  // |FRC| < 4/sqrt(ring count) on rings with >= 50 pixels, for at least
  // 99% of (seed, ring) draws.
  int total = 0, ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto p1 = testsup::random_patch(64, 3000 + seed);
    const auto p2 = testsup::random_patch(64, 9000 + seed);
    const auto curve = frc(p1, p2);
    for (int k = 0; k < curve.axis.n_rings; ++k) {
      if (curve.ring_pixel_counts[k] < 50) continue;
      ++total;
      if (std::abs(curve.values[k]) <
          4.0 / std::sqrt(static_cast<double>(curve.ring_pixel_counts[k])))
        ++ok;
    }
  }
  REQUIRE(total > 1000);
  CHECK(static_cast<double>(ok) / total >= 0.99);
}

TEST_CASE("uniform patches are low content") {
  Patch p;
  p.size = 32;
  p.pixel_size = 1.0;
  p.data.assign(32 * 32, 3.0);
  const auto curve = frc(p, p);
  CHECK(curve.low_content);
  // floored rings read 0, not NaN
  for (double v : curve.values) CHECK(std::isfinite(v));
}

TEST_CASE("ring bookkeeping") {
  const auto p = testsup::random_patch(64, 4);
  const auto curve = frc(p, p);
  // ring 0 holds only DC
  CHECK(curve.ring_pixel_counts[0] == 1);
  long long sum = 0;
  for (int c : curve.ring_pixel_counts) {
    CHECK(c >= 0);
    sum += c;
  }
  // every binned coefficient lies in exactly one ring, and only
  // coefficients below 0.5 cycles/pixel are binned
  CHECK(sum > 0);
  CHECK(sum <= 64 * 64);
}

TEST_CASE("size mismatch and bad bin width are rejected") {
  const auto p1 = testsup::random_patch(32, 1);
  const auto p2 = testsup::random_patch(16, 1);
  CHECK_THROWS_AS(frc(p1, p2), SizeMismatch);
  FrcOptions opts;
  opts.bin_width = -1.0;
  CHECK_THROWS_AS(frc(p1, p1, opts), ZeroBinWidth);
}

TEST_CASE("threshold crossing: never crosses") {
  FrcCurve curve;
  curve.axis = FrequencyAxis(1.0, 25, 0.02);
  curve.values.assign(25, 1.0);
  curve.ring_pixel_counts.assign(25, 10);
  const auto tc = threshold_crossing(curve, 0.5);
  CHECK_FALSE(tc.crossed);
  CHECK(tc.x_ct == 0.5);
}

TEST_CASE("threshold crossing: hand-computed interpolation") {
  // step 1.0 -> 0.0 between adjacent ring centers 0.23 and 0.25; Y = 0.5
  // interpolates to the midpoint 0.24
  FrcCurve curve;
  curve.axis = FrequencyAxis(1.0, 25, 0.02);
  curve.values.assign(25, 1.0);
  curve.ring_pixel_counts.assign(25, 10);
  for (int k = 12; k < 25; ++k) curve.values[k] = 0.0;
  auto tc = threshold_crossing(curve, 0.5);
  CHECK(tc.crossed);
  CHECK(tc.x_ct == Catch::Approx(0.24).margin(1e-12));

  // drop below at ring 0 pins x_ct to 0
  curve.values[0] = 0.2;
  tc = threshold_crossing(curve, 0.5);
  CHECK(tc.crossed);
  CHECK(tc.x_ct == 0.0);
}

TEST_CASE("threshold crossing: self-FRC never crosses at Y = 0.5") {
  const auto p = testsup::random_patch(64, 77);
  const auto tc = threshold_crossing(frc(p, p), 0.5);
  CHECK_FALSE(tc.crossed);
}

TEST_CASE("threshold crossing monotone in Y") {
  const auto p = testsup::random_patch(64, 88);
  const auto q = testsup::ideal_lowpass(p, 0.2);
  const auto curve = frc(p, q);
  double prev_x = 1.0;
  for (double y : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto tc = threshold_crossing(curve, y);
    CHECK(tc.x_ct <= prev_x + 1e-12);
    prev_x = tc.x_ct;
  }
  CHECK_THROWS_AS(threshold_crossing(curve, 1.5), InvalidThreshold);
}

TEST_CASE("first-crossing rule ignores oscillatory re-crossings") {
  FrcCurve curve;
  curve.axis = FrequencyAxis(1.0, 10, 0.05);
  curve.values = {1.0, 1.0, 0.2, 0.8, 0.1, 0.9, 0.0, 0.0, 0.0, 0.0};
  curve.ring_pixel_counts.assign(10, 10);
  const auto tc = threshold_crossing(curve, 0.5);
  // first drop happens between rings 1 and 2
  CHECK(tc.x_ct < curve.axis.ring_center(2) + 1e-12);
  CHECK(tc.x_ct > curve.axis.ring_center(1) - 1e-12);
}

TEST_CASE("tukey window option keeps self-FRC at one") {
  const auto p = testsup::random_patch(64, 9);
  FrcOptions opts;
  opts.tukey_window = true;
  const auto curve = frc(p, p, opts);
  for (double v : curve.values) CHECK(v == Catch::Approx(1.0).margin(1e-9));
}
