#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sfrc/core.hpp"
#include "sfrc/fft.hpp"

namespace sfrc {

class SizeMismatch : public Error {
 public:
  using Error::Error;
};
class ZeroBinWidth : public Error {
 public:
  using Error::Error;
};
class InvalidThreshold : public Error {
 public:
  using Error::Error;
};

/// Fourier ring correlation curve between two patches.
struct FrcCurve {
  std::vector<double> values;            // per ring, in [-1, 1]
  FrequencyAxis axis;
  std::vector<int> ring_pixel_counts;
  bool low_content = false;
};

/// Where an FRC curve first falls below a threshold Y.
struct ThresholdCrossing {
  double x_ct = 0.5;       // normalized frequency in [0, 0.5]
  double frc_threshold = 0.0;
  bool crossed = false;
};

struct FrcOptions {
  double bin_width = 0.0;     // normalized; 0 -> 1/patch_size
  bool tukey_window = false;  // optional taper for leakage-sensitive studies
  double tukey_alpha = 0.25;
};

namespace detail {

inline double tukey_weight(int i, int n, double alpha) {
  const double x = static_cast<double>(i) / (n - 1);
  const double edge = alpha / 2.0;
  if (x < edge) return 0.5 * (1.0 + std::cos(M_PI * (2.0 * x / alpha - 1.0)));
  if (x > 1.0 - edge)
    return 0.5 * (1.0 + std::cos(M_PI * (2.0 * x / alpha - 2.0 / alpha + 1.0)));
  return 1.0;
}

}  // namespace detail

/// Ring-wise correlation of two equal-size patches in the Fourier domain.
/// Each ring q_i collects coefficients whose radial frequency (cycles/pixel)
/// falls in [i*bw, (i+1)*bw); the value is
/// Re(sum F1 conj(F2)) / sqrt(sum |F1|^2 * sum |F2|^2) over that ring.
/// Rings where either power sum is below a relative floor get value 0; if
/// every ring beyond DC is floored the curve is flagged low_content.
inline FrcCurve frc(const Patch& p1, const Patch& p2,
                    const FrcOptions& opts = {}) {
  if (p1.size != p2.size) throw SizeMismatch("patch sizes differ");
  if (opts.bin_width < 0.0) throw ZeroBinWidth("bin_width must be >= 0");
  const int n = p1.size;
  const double bw = opts.bin_width > 0.0 ? opts.bin_width : 1.0 / n;
  if (!(bw > 0.0)) throw ZeroBinWidth("bin_width must be > 0");

  std::vector<double> d1 = p1.data, d2 = p2.data;
  if (opts.tukey_window) {
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const double w = detail::tukey_weight(x, n, opts.tukey_alpha) *
                         detail::tukey_weight(y, n, opts.tukey_alpha);
        d1[static_cast<std::size_t>(y) * n + x] *= w;
        d2[static_cast<std::size_t>(y) * n + x] *= w;
      }
  }

  const auto f1 = fft::forward_2d(d1, n, n);
  const auto f2 = fft::forward_2d(d2, n, n);

  const int n_rings = static_cast<int>(std::ceil(0.5 / bw - 1e-12));
  std::vector<double> num(n_rings, 0.0), pow1(n_rings, 0.0),
      pow2(n_rings, 0.0);
  std::vector<int> counts(n_rings, 0);

  for (int ky = 0; ky < n; ++ky) {
    const int v = fft::signed_index(ky, n);
    for (int kx = 0; kx < n; ++kx) {
      const int u = fft::signed_index(kx, n);
      const double radius = std::sqrt(static_cast<double>(u) * u +
                                      static_cast<double>(v) * v) / n;
      const int ring = static_cast<int>(std::floor(radius / bw));
      if (ring >= n_rings) continue;
      const auto& a = f1[static_cast<std::size_t>(ky) * n + kx];
      const auto& b = f2[static_cast<std::size_t>(ky) * n + kx];
      num[ring] += a.real() * b.real() + a.imag() * b.imag();
      pow1[ring] += std::norm(a);
      pow2[ring] += std::norm(b);
      counts[ring] += 1;
    }
  }

  auto mean_square = [n](const std::vector<double>& d) {
    double s = 0.0;
    for (double v : d) s += v * v;
    return s / (static_cast<double>(n) * n);
  };
  const double eps_power =
      1e-12 * (0.5 * (mean_square(d1) + mean_square(d2)) + 1e-30);

  FrcCurve curve;
  curve.axis = FrequencyAxis(p1.pixel_size, n_rings, bw);
  curve.ring_pixel_counts = counts;
  curve.values.resize(n_rings, 0.0);
  bool any_content = false;
  for (int k = 0; k < n_rings; ++k) {
    if (counts[k] == 0 || pow1[k] < eps_power || pow2[k] < eps_power) {
      curve.values[k] = 0.0;
      continue;
    }
    if (k > 0) any_content = true;
    curve.values[k] =
        std::clamp(num[k] / std::sqrt(pow1[k] * pow2[k]), -1.0, 1.0);
  }
  curve.low_content = !any_content;
  return curve;
}

/// Lowest frequency at which the curve first falls below Y, scanning from
/// ring 0 upward with linear interpolation between ring centers. Later
/// re-crossings of an oscillatory tail are ignored.
inline ThresholdCrossing threshold_crossing(const FrcCurve& curve, double y) {
  if (!(y >= 0.0 && y <= 1.0))
    throw InvalidThreshold("FRC threshold must be in [0, 1]");
  ThresholdCrossing out;
  out.frc_threshold = y;
  for (int k = 0; k < curve.axis.n_rings; ++k) {
    if (curve.values[k] < y) {
      out.crossed = true;
      if (k == 0) {
        out.x_ct = 0.0;
      } else {
        const double prev = curve.values[k - 1];
        const double frac = (prev - y) / (prev - curve.values[k]);
        out.x_ct = curve.axis.ring_center(k - 1) + frac * curve.axis.bin_width;
      }
      out.x_ct = std::clamp(out.x_ct, 0.0, 0.5);
      return out;
    }
  }
  out.crossed = false;
  out.x_ct = 0.5;
  return out;
}

}  // namespace sfrc
