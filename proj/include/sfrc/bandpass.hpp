#pragma once

#include <cmath>
#include <vector>

#include "sfrc/core.hpp"
#include "sfrc/fft.hpp"

namespace sfrc {

/// Radial frequency band, normalized cycles/pixel. Lower edge inclusive,
/// upper edge exclusive, so adjacent bands partition exactly; a band ending
/// at 0.5 also absorbs the Nyquist and corner coefficients, and a band
/// starting at 0 includes DC. A partition of (0, 0.5] therefore rebuilds
/// the input exactly.
struct BandSpec {
  double low = 0.0;
  double high = 0.5;

  BandSpec() = default;
  BandSpec(double lo, double hi) : low(lo), high(hi) {
    if (!(low >= 0.0 && low < high && high <= 0.5))
      throw InvalidArgument("band must satisfy 0 <= low < high <= 0.5");
  }

  bool passes(double radius) const {
    if (radius == 0.0) return low == 0.0;
    if (high >= 0.5 - 1e-12) return radius >= low;
    return radius >= low && radius < high;
  }
};

/// Brick-wall annulus filter: mask the DFT with the band indicator and
/// inverse-transform, keeping the real part.
inline Image bandpass(const Image& img, const BandSpec& band) {
  const int w = img.width(), h = img.height();
  auto spectrum = fft::forward_2d(img.data(), w, h);
  for (int ky = 0; ky < h; ++ky) {
    const double fy = static_cast<double>(fft::signed_index(ky, h)) / h;
    for (int kx = 0; kx < w; ++kx) {
      const double fx = static_cast<double>(fft::signed_index(kx, w)) / w;
      const double radius = std::sqrt(fx * fx + fy * fy);
      if (!band.passes(radius))
        spectrum[static_cast<std::size_t>(ky) * w + kx] = {0.0, 0.0};
    }
  }
  return Image(w, h, img.pixel_size(),
               fft::inverse_2d_real(std::move(spectrum), w, h));
}

inline std::vector<Image> decompose(const Image& img,
                                    const std::vector<BandSpec>& bands) {
  if (bands.empty()) throw InvalidArgument("band list is empty");
  std::vector<Image> out;
  out.reserve(bands.size());
  for (const auto& band : bands) out.push_back(bandpass(img, band));
  return out;
}

/// The five standard bands (fractions of Nyquist: 0-0.1, 0.1-0.25,
/// 0.25-0.5, 0.5-0.75, 0.75-1) in normalized cycles/pixel.
inline std::vector<BandSpec> standard_bands() {
  return {BandSpec(0.0, 0.05), BandSpec(0.05, 0.125), BandSpec(0.125, 0.25),
          BandSpec(0.25, 0.375), BandSpec(0.375, 0.5)};
}

}  // namespace sfrc
