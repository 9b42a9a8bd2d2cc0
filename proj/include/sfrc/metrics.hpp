#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "sfrc/core.hpp"

namespace sfrc {

class ImageTooSmall : public Error {
 public:
  using Error::Error;
};

struct MetricReport {
  double psnr = 0.0;       // dB, +inf when MSE = 0
  double ssim = 0.0;       // [-1, 1]
  double hellinger = 0.0;  // [0, 1]
};

/// Optional signal-only mask: nonzero entries mark pixels that count.
using PixelMask = std::vector<unsigned char>;

namespace detail {

inline void check_mask(const Image& img, const PixelMask* mask) {
  if (mask && mask->size() != img.data().size())
    throw DimensionMismatch("mask size does not match image");
}

}  // namespace detail

inline double psnr(const Image& ref, const Image& test, double data_range,
                   const PixelMask* mask = nullptr) {
  validate_pair(ref, test);
  detail::check_mask(ref, mask);
  if (!(data_range > 0.0)) throw InvalidArgument("data_range must be > 0");
  double mse = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < ref.data().size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    const double d = ref.data()[i] - test.data()[i];
    mse += d * d;
    ++count;
  }
  if (count == 0) throw InvalidArgument("mask selects no pixels");
  mse /= static_cast<double>(count);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(data_range * data_range / mse);
}

/// Mean local SSIM with a 7x7 uniform window over the valid (fully inside)
/// region. C1 = (0.01 R)^2, C2 = (0.03 R)^2. With a mask, only windows
/// centered on masked pixels are averaged.
inline double ssim(const Image& ref, const Image& test, double data_range,
                   const PixelMask* mask = nullptr, int window = 7) {
  validate_pair(ref, test);
  detail::check_mask(ref, mask);
  if (!(data_range > 0.0)) throw InvalidArgument("data_range must be > 0");
  const int w = ref.width(), h = ref.height();
  if (w < window || h < window)
    throw ImageTooSmall("image smaller than SSIM window");

  const double c1 = 0.01 * data_range * 0.01 * data_range;
  const double c2 = 0.03 * data_range * 0.03 * data_range;
  const int half = window / 2;
  const double n = static_cast<double>(window) * window;

  double total = 0.0;
  std::size_t count = 0;
  for (int cy = half; cy < h - half; ++cy) {
    for (int cx = half; cx < w - half; ++cx) {
      if (mask && !(*mask)[static_cast<std::size_t>(cy) * w + cx]) continue;
      double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
      for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) {
          const double a = ref.at(cx + dx, cy + dy);
          const double b = test.at(cx + dx, cy + dy);
          s1 += a;
          s2 += b;
          s11 += a * a;
          s22 += b * b;
          s12 += a * b;
        }
      const double mu1 = s1 / n, mu2 = s2 / n;
      const double var1 = s11 / n - mu1 * mu1;
      const double var2 = s22 / n - mu2 * mu2;
      const double cov = s12 / n - mu1 * mu2;
      const double val = ((2.0 * mu1 * mu2 + c1) * (2.0 * cov + c2)) /
                         ((mu1 * mu1 + mu2 * mu2 + c1) * (var1 + var2 + c2));
      total += val;
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("mask selects no valid windows");
  return total / static_cast<double>(count);
}

/// Hellinger distance between the two images' intensity histograms, built
/// with n_bins equal-width bins over the joint min-max range:
/// sqrt(1/2 * sum (sqrt(p) - sqrt(q))^2). Equal constants give 0.
inline double hellinger(const Image& ref, const Image& test, int n_bins = 256) {
  validate_pair(ref, test);
  if (n_bins < 2) throw InvalidArgument("n_bins must be >= 2");
  double lo = ref.data()[0], hi = ref.data()[0];
  for (double v : ref.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : test.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) return 0.0;  // both constant and equal

  std::vector<double> p(n_bins, 0.0), q(n_bins, 0.0);
  const double scale = n_bins / (hi - lo);
  auto fill = [&](const std::vector<double>& data, std::vector<double>& hist) {
    for (double v : data) {
      int bin = static_cast<int>((v - lo) * scale);
      bin = std::clamp(bin, 0, n_bins - 1);
      hist[bin] += 1.0;
    }
    for (double& x : hist) x /= static_cast<double>(data.size());
  };
  fill(ref.data(), p);
  fill(test.data(), q);

  double acc = 0.0;
  for (int i = 0; i < n_bins; ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    acc += d * d;
  }
  return std::sqrt(0.5 * acc);
}

inline MetricReport compare(const Image& ref, const Image& test,
                            double data_range, int hellinger_bins = 256,
                            const PixelMask* mask = nullptr) {
  MetricReport r;
  r.psnr = psnr(ref, test, data_range, mask);
  r.ssim = ssim(ref, test, data_range, mask);
  r.hellinger = hellinger(ref, test, hellinger_bins);
  return r;
}

/// Joint min-max range of a pair, for explicit data-range inference.
inline double infer_data_range(const Image& ref, const Image& test) {
  double lo = ref.data()[0], hi = ref.data()[0];
  for (double v : ref.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : test.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi == lo) throw InvalidArgument("degenerate range: images are constant");
  return hi - lo;
}

}  // namespace sfrc
