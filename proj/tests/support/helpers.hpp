#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "sfrc/core.hpp"
#include "sfrc/degrade.hpp"
#include "sfrc/frc.hpp"

namespace testsup {

/// Textured square patch: broadband seeded noise, values roughly in [0, 1].
inline sfrc::Patch random_patch(int size, std::uint64_t seed,
                                double pixel_size = 1.0) {
  sfrc::rng::Generator gen(seed);
  sfrc::Patch p;
  p.size = size;
  p.pixel_size = pixel_size;
  p.data.resize(static_cast<std::size_t>(size) * size);
  for (auto& v : p.data) v = gen.uniform01();
  return p;
}

inline sfrc::Image random_image(int w, int h, std::uint64_t seed,
                                double pixel_size = 1.0) {
  sfrc::rng::Generator gen(seed);
  std::vector<double> data(static_cast<std::size_t>(w) * h);
  for (auto& v : data) v = gen.uniform01();
  return sfrc::Image(w, h, pixel_size, std::move(data));
}

/// Ideal lowpass of a patch: zero every Fourier coefficient with radius
/// >= cutoff (normalized cycles/pixel), via a direct mask on the FFT.
inline sfrc::Patch ideal_lowpass(const sfrc::Patch& p, double cutoff) {
  const int n = p.size;
  auto spec = sfrc::fft::forward_2d(p.data, n, n);
  for (int ky = 0; ky < n; ++ky) {
    const double fy = static_cast<double>(sfrc::fft::signed_index(ky, n)) / n;
    for (int kx = 0; kx < n; ++kx) {
      const double fx =
          static_cast<double>(sfrc::fft::signed_index(kx, n)) / n;
      if (std::sqrt(fx * fx + fy * fy) >= cutoff)
        spec[static_cast<std::size_t>(ky) * n + kx] = {0.0, 0.0};
    }
  }
  sfrc::Patch out = p;
  out.data = sfrc::fft::inverse_2d_real(std::move(spec), n, n);
  return out;
}

/// Replaces the Fourier coefficients of a rectangular image region above
/// `cutoff` (normalized) with seeded random phases/magnitudes. Used to
/// plant localized hallucination-like corruptions.
inline sfrc::Image scramble_region_highfreq(const sfrc::Image& img, int x0,
                                            int y0, int w, int h,
                                            double cutoff,
                                            std::uint64_t seed) {
  sfrc::rng::Generator gen(seed);
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      spec[static_cast<std::size_t>(y) * w + x] = img.at(x0 + x, y0 + y);
  sfrc::fft::transform_2d(spec, w, h, false);
  double mean_mag = 0.0;
  for (const auto& c : spec) mean_mag += std::abs(c);
  mean_mag /= static_cast<double>(spec.size());
  for (int ky = 0; ky < h; ++ky) {
    const double fy = static_cast<double>(sfrc::fft::signed_index(ky, h)) / h;
    for (int kx = 0; kx < w; ++kx) {
      const double fx =
          static_cast<double>(sfrc::fft::signed_index(kx, w)) / w;
      if (std::sqrt(fx * fx + fy * fy) < cutoff) continue;
      const double phase = 2.0 * M_PI * gen.uniform01();
      const double mag = mean_mag * (0.5 + gen.uniform01());
      spec[static_cast<std::size_t>(ky) * w + kx] = {mag * std::cos(phase),
                                                     mag * std::sin(phase)};
    }
  }
  auto region = sfrc::fft::inverse_2d_real(std::move(spec), w, h);
  std::vector<double> data = img.data();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      data[static_cast<std::size_t>(y0 + y) * img.width() + x0 + x] =
          region[static_cast<std::size_t>(y) * w + x];
  return img.with_data(std::move(data));
}

}  // namespace testsup
