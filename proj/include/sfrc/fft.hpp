#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sfrc/core.hpp"

// Self-contained complex FFT: iterative radix-2 for power-of-two lengths,
// Bluestein's chirp-z otherwise, so any even patch size (48, 96, ...) and
// any image dimension works. Unnormalized forward transform; the inverse
// divides by N.

namespace sfrc::fft {

using cd = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline void radix2(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const cd wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        cd u = a[i + k];
        cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Bluestein: length-n DFT as a convolution of chirped sequences, evaluated
// with a power-of-two radix-2 FFT of length >= 2n-1.
inline void bluestein(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  const std::size_t m = next_pow2(2 * n - 1);
  const double sign = inverse ? 1.0 : -1.0;

  std::vector<cd> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small for large n
    const double ang =
        sign * M_PI * static_cast<double>((k * k) % (2 * n)) / static_cast<double>(n);
    chirp[k] = cd(std::cos(ang), std::sin(ang));
  }

  std::vector<cd> x(m, cd(0.0, 0.0)), y(m, cd(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
  for (std::size_t k = 0; k < n; ++k) {
    y[k] = std::conj(chirp[k]);
    if (k) y[m - k] = std::conj(chirp[k]);
  }

  radix2(x, false);
  radix2(y, false);
  for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
  radix2(x, true);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * inv_m * chirp[k];
}

}  // namespace detail

/// In-place 1D transform. Forward is unnormalized; inverse applies 1/N.
inline void transform(std::vector<cd>& a, bool inverse = false) {
  if (a.empty()) throw InvalidArgument("fft of empty sequence");
  if (a.size() == 1) return;
  if (detail::is_pow2(a.size()))
    detail::radix2(a, inverse);
  else
    detail::bluestein(a, inverse);
  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(a.size());
    for (auto& v : a) v *= inv_n;
  }
}

/// 2D transform of a row-major width x height grid, rows then columns.
inline void transform_2d(std::vector<cd>& a, int width, int height,
                         bool inverse = false) {
  if (static_cast<std::size_t>(width) * height != a.size())
    throw DimensionMismatch("fft grid size mismatch");
  std::vector<cd> line;
  line.resize(width);
  for (int y = 0; y < height; ++y) {
    std::copy(a.begin() + static_cast<std::size_t>(y) * width,
              a.begin() + static_cast<std::size_t>(y + 1) * width,
              line.begin());
    transform(line, inverse);
    std::copy(line.begin(), line.end(),
              a.begin() + static_cast<std::size_t>(y) * width);
  }
  line.resize(height);
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y)
      line[y] = a[static_cast<std::size_t>(y) * width + x];
    transform(line, inverse);
    for (int y = 0; y < height; ++y)
      a[static_cast<std::size_t>(y) * width + x] = line[y];
  }
}

/// Forward 2D DFT of real data.
inline std::vector<cd> forward_2d(const std::vector<double>& data, int width,
                                  int height) {
  std::vector<cd> a(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) a[i] = cd(data[i], 0.0);
  transform_2d(a, width, height, false);
  return a;
}

/// Inverse 2D DFT, returning the real part.
inline std::vector<double> inverse_2d_real(std::vector<cd> a, int width,
                                           int height) {
  transform_2d(a, width, height, true);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
  return out;
}

/// Signed frequency index of DFT bin k for length n: 0..n/2, then negative.
inline int signed_index(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace sfrc::fft
