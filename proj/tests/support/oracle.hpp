#pragma once

// Brute-force reference implementations, independent of the library's FFT
// path. O(N^4) direct DFT; only for small patches in tests.

#include <cmath>
#include <complex>
#include <vector>

#include "sfrc/core.hpp"

namespace testsup {

inline std::vector<std::complex<double>> direct_dft_2d(
    const std::vector<double>& data, int n) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n) * n);
  for (int ky = 0; ky < n; ++ky)
    for (int kx = 0; kx < n; ++kx) {
      std::complex<double> acc(0.0, 0.0);
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          const double ang =
              -2.0 * M_PI * (static_cast<double>(kx) * x + static_cast<double>(ky) * y) / n;
          acc += data[static_cast<std::size_t>(y) * n + x] *
                 std::complex<double>(std::cos(ang), std::sin(ang));
        }
      out[static_cast<std::size_t>(ky) * n + kx] = acc;
    }
  return out;
}

/// Direct-DFT FRC with the same ring convention as the library:
/// ring = floor(radius / bin_width), rings up to 0.5 cycles/pixel.
inline std::vector<double> direct_frc(const sfrc::Patch& p1,
                                      const sfrc::Patch& p2,
                                      double bin_width) {
  const int n = p1.size;
  const auto f1 = direct_dft_2d(p1.data, n);
  const auto f2 = direct_dft_2d(p2.data, n);
  const int n_rings =
      static_cast<int>(std::ceil(0.5 / bin_width - 1e-12));
  std::vector<double> num(n_rings, 0.0), pw1(n_rings, 0.0), pw2(n_rings, 0.0);
  for (int ky = 0; ky < n; ++ky) {
    const int v = ky <= n / 2 ? ky : ky - n;
    for (int kx = 0; kx < n; ++kx) {
      const int u = kx <= n / 2 ? kx : kx - n;
      const double radius =
          std::sqrt(static_cast<double>(u) * u + static_cast<double>(v) * v) / n;
      const int ring = static_cast<int>(std::floor(radius / bin_width));
      if (ring >= n_rings) continue;
      const auto a = f1[static_cast<std::size_t>(ky) * n + kx];
      const auto b = f2[static_cast<std::size_t>(ky) * n + kx];
      num[ring] += (a * std::conj(b)).real();
      pw1[ring] += std::norm(a);
      pw2[ring] += std::norm(b);
    }
  }
  auto mean_square = [n](const std::vector<double>& d) {
    double s = 0.0;
    for (double v : d) s += v * v;
    return s / (static_cast<double>(n) * n);
  };
  const double eps_power =
      1e-12 * (0.5 * (mean_square(p1.data) + mean_square(p2.data)) + 1e-30);
  std::vector<double> values(n_rings, 0.0);
  for (int k = 0; k < n_rings; ++k)
    if (pw1[k] >= eps_power && pw2[k] >= eps_power)
      values[k] = num[k] / std::sqrt(pw1[k] * pw2[k]);
  return values;
}

}  // namespace testsup
