#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sfrc/core.hpp"
#include "sfrc/fft.hpp"

namespace sfrc {

class NotDivisible : public Error {
 public:
  using Error::Error;
};
class EmptyAngles : public Error {
 public:
  using Error::Error;
};
class NonPositiveDose : public Error {
 public:
  using Error::Error;
};
class SizeTooSmall : public Error {
 public:
  using Error::Error;
};

/// Parallel-beam sinogram. Detector spacing equals the source image's
/// pixel size; rays span the inscribed circle.
struct Sinogram {
  int n_angles = 0;
  int n_detectors = 0;
  double pixel_size = 1.0;  // detector spacing, physical units
  std::vector<double> angles;  // degrees, strictly ascending
  std::vector<double> data;    // n_angles x n_detectors, row-major

  double at(int a, int d) const {
    return data[static_cast<std::size_t>(a) * n_detectors + d];
  }
};

enum class PhantomKind { ellipses, texture, checker };

struct Phantom {
  Image image;
  PhantomKind kind;
  std::uint64_t seed;
};

namespace rng {

// All randomness goes through mt19937_64 plus hand-rolled transforms so
// sequences are identical across standard library implementations.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : eng_(seed) {}

  double uniform01() {
    return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  /// Poisson draw; Gaussian approximation above mean 50.
  double poisson(double mean) {
    if (mean <= 0.0) return 0.0;
    if (mean > 50.0)
      return std::max(0.0, std::round(mean + std::sqrt(mean) * normal()));
    const double limit = std::exp(-mean);
    double prod = uniform01();
    int k = 0;
    while (prod > limit) {
      prod *= uniform01();
      ++k;
    }
    return static_cast<double>(k);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rng

/// Area-average block downsampling by s followed by nearest-neighbor
/// upsampling back to the original size (the blurring kernel itself is
/// the identity; the resolution loss comes entirely from the resampling).
inline Image downsample_upsample(const Image& img, int s) {
  if (s < 2) throw InvalidArgument("factor must be >= 2");
  const int w = img.width(), h = img.height();
  if (w % s != 0 || h % s != 0)
    throw NotDivisible("dimensions must be divisible by the factor");
  std::vector<double> out(img.data().size());
  const double inv = 1.0 / (static_cast<double>(s) * s);
  for (int by = 0; by < h / s; ++by)
    for (int bx = 0; bx < w / s; ++bx) {
      double acc = 0.0;
      for (int dy = 0; dy < s; ++dy)
        for (int dx = 0; dx < s; ++dx)
          acc += img.at(bx * s + dx, by * s + dy);
      acc *= inv;
      for (int dy = 0; dy < s; ++dy)
        for (int dx = 0; dx < s; ++dx)
          out[static_cast<std::size_t>(by * s + dy) * w + bx * s + dx] = acc;
    }
  return img.with_data(std::move(out));
}

/// Cartesian equidistant k-space undersampling: keep every acceleration-th
/// row of the 2D DFT (phase-encode = image y, DC row always kept), zero the
/// rest, inverse-transform, return the real part. The DC row survives the
/// mask, so the mean is preserved without rescaling.
inline Image kspace_undersample(const Image& img, int acceleration) {
  if (acceleration < 1) throw InvalidArgument("acceleration must be >= 1");
  if (acceleration == 1) return img;
  const int w = img.width(), h = img.height();
  auto spectrum = fft::forward_2d(img.data(), w, h);
  for (int ky = 0; ky < h; ++ky) {
    if (ky % acceleration == 0) continue;
    for (int kx = 0; kx < w; ++kx)
      spectrum[static_cast<std::size_t>(ky) * w + kx] = {0.0, 0.0};
  }
  return img.with_data(fft::inverse_2d_real(std::move(spectrum), w, h));
}

/// Parallel-beam forward projection with bilinear ray sampling. Detector
/// coordinate t runs along (cos a, sin a); rays step at half-pixel
/// resolution across the inscribed circle.
inline Sinogram radon(const Image& img, const std::vector<double>& angles_deg,
                      int n_detectors) {
  if (angles_deg.empty()) throw EmptyAngles("no projection angles");
  for (std::size_t i = 1; i < angles_deg.size(); ++i)
    if (!(angles_deg[i] > angles_deg[i - 1]))
      throw InvalidArgument("angles must be strictly ascending");
  if (n_detectors < 1) throw InvalidArgument("n_detectors must be >= 1");

  const int w = img.width(), h = img.height();
  const double cx = (w - 1) / 2.0, cy = (h - 1) / 2.0;
  const double radius = std::min(w, h) / 2.0;  // inscribed circle, pixels
  const double step = 0.5;                     // pixels along the ray

  Sinogram sino;
  sino.n_angles = static_cast<int>(angles_deg.size());
  sino.n_detectors = n_detectors;
  sino.pixel_size = img.pixel_size();
  sino.angles = angles_deg;
  sino.data.assign(static_cast<std::size_t>(sino.n_angles) * n_detectors, 0.0);

  auto sample = [&](double x, double y) -> double {
    if (x < 0.0 || y < 0.0 || x > w - 1 || y > h - 1) return 0.0;
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0, fy = y - y0;
    return (1 - fx) * (1 - fy) * img.at(x0, y0) +
           fx * (1 - fy) * img.at(x1, y0) +
           (1 - fx) * fy * img.at(x0, y1) + fx * fy * img.at(x1, y1);
  };

  const int n_steps = static_cast<int>(std::ceil(2.0 * radius / step));
  for (int a = 0; a < sino.n_angles; ++a) {
    const double th = angles_deg[a] * M_PI / 180.0;
    const double ct = std::cos(th), st = std::sin(th);
    for (int d = 0; d < n_detectors; ++d) {
      // detector offset in pixels, centered
      const double t = (d - (n_detectors - 1) / 2.0);
      const double ox = cx + t * ct, oy = cy + t * st;
      double acc = 0.0;
      for (int k = 0; k <= n_steps; ++k) {
        const double s = -radius + k * step;
        // trapezoid endpoints at half weight
        const double wgt = (k == 0 || k == n_steps) ? 0.5 : 1.0;
        acc += wgt * sample(ox - s * st, oy + s * ct);
      }
      sino.data[static_cast<std::size_t>(a) * n_detectors + d] =
          acc * step * img.pixel_size();
    }
  }
  return sino;
}

namespace detail {

/// Band-limited Ram-Lak kernel (spatial form): h[0] = 1/4, h[odd n] =
/// -1/(pi^2 n^2), h[even n] = 0, in detector-spacing units.
inline std::vector<double> ramlak_kernel_spectrum(int n_det, int padded) {
  std::vector<fft::cd> h(padded, fft::cd(0.0, 0.0));
  h[0] = 0.25;
  for (int n = 1; n < n_det; ++n) {
    if (n % 2 == 0) continue;
    const double v = -1.0 / (M_PI * M_PI * n * n);
    h[n] = v;
    h[padded - n] = v;
  }
  fft::transform(h, false);
  std::vector<double> mag(padded);
  for (int i = 0; i < padded; ++i) mag[i] = h[i].real();
  return mag;
}

}  // namespace detail

/// Optional override of the backprojection angles, for simulating a
/// forward/backprojection angular mismatch.
inline Image fbp(const Sinogram& sino, int out_size,
                 const std::vector<double>* backproject_angles = nullptr) {
  if (out_size < 1) throw InvalidArgument("out_size must be >= 1");
  const int n_det = sino.n_detectors;
  const int padded = static_cast<int>(fft::detail::next_pow2(
      static_cast<std::size_t>(2 * n_det)));
  const auto filter = detail::ramlak_kernel_spectrum(n_det, padded);

  // Filter every projection row in the Fourier domain.
  std::vector<double> filtered(sino.data.size());
  std::vector<fft::cd> line(padded);
  for (int a = 0; a < sino.n_angles; ++a) {
    std::fill(line.begin(), line.end(), fft::cd(0.0, 0.0));
    for (int d = 0; d < n_det; ++d)
      line[d] = sino.at(a, d);
    fft::transform(line, false);
    for (int i = 0; i < padded; ++i) line[i] *= filter[i];
    fft::transform(line, true);
    for (int d = 0; d < n_det; ++d)
      filtered[static_cast<std::size_t>(a) * n_det + d] =
          line[d].real() / sino.pixel_size;
  }

  const std::vector<double>& angles =
      backproject_angles ? *backproject_angles : sino.angles;
  if (static_cast<int>(angles.size()) != sino.n_angles)
    throw DimensionMismatch("backprojection angle count mismatch");

  Image out(out_size, out_size, sino.pixel_size);
  std::vector<double> img(out.data().size(), 0.0);
  const double cx = (out_size - 1) / 2.0, cy = (out_size - 1) / 2.0;
  const double dc = (n_det - 1) / 2.0;
  const double weight = M_PI / sino.n_angles;
  for (int a = 0; a < sino.n_angles; ++a) {
    const double th = angles[a] * M_PI / 180.0;
    const double ct = std::cos(th), st = std::sin(th);
    const double* row = filtered.data() + static_cast<std::size_t>(a) * n_det;
    for (int y = 0; y < out_size; ++y) {
      for (int x = 0; x < out_size; ++x) {
        const double t = (x - cx) * ct + (y - cy) * st + dc;
        if (t < 0.0 || t > n_det - 1) continue;
        const int t0 = static_cast<int>(t);
        const int t1 = std::min(t0 + 1, n_det - 1);
        const double f = t - t0;
        img[static_cast<std::size_t>(y) * out_size + x] +=
            weight * ((1 - f) * row[t0] + f * row[t1]);
      }
    }
  }
  return out.with_data(std::move(img));
}

/// Transmission noise: counts N = flux * dose * exp(-line integral) get a
/// seeded Poisson draw and are re-logged. Deterministic for a fixed seed.
inline Sinogram add_noise(const Sinogram& sino, double dose_fraction,
                          double flux, std::uint64_t seed) {
  if (!(dose_fraction > 0.0 && dose_fraction <= 1.0))
    throw NonPositiveDose("dose_fraction must be in (0, 1]");
  if (!(flux > 0.0)) throw InvalidArgument("flux must be > 0");
  rng::Generator gen(seed);
  const double n0 = flux * dose_fraction;
  Sinogram out = sino;
  for (double& p : out.data) {
    const double expected = n0 * std::exp(-p);
    const double counts = std::max(gen.poisson(expected), 0.5);
    p = -std::log(counts / n0);
  }
  return out;
}

namespace detail {

inline void add_ellipse(std::vector<double>& img, int size, double cx,
                        double cy, double a, double b, double angle_deg,
                        double value) {
  const double th = angle_deg * M_PI / 180.0;
  const double ct = std::cos(th), st = std::sin(th);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      // normalized coordinates in [-1, 1]
      const double nx = 2.0 * x / (size - 1) - 1.0;
      const double ny = 2.0 * y / (size - 1) - 1.0;
      const double rx = (nx - cx) * ct + (ny - cy) * st;
      const double ry = -(nx - cx) * st + (ny - cy) * ct;
      if ((rx * rx) / (a * a) + (ry * ry) / (b * b) <= 1.0)
        img[static_cast<std::size_t>(y) * size + x] += value;
    }
}

}  // namespace detail

/// Deterministic test phantoms. "ellipses" is a Shepp-Logan-style head
/// section with seed-jittered geometry; "texture" is broadband seeded
/// noise shaped by smooth amplitude blobs plus a few edges, built so no
/// Fourier ring below 0.9 Nyquist is empty; "checker" is an 8-pixel
/// checkerboard.
inline Phantom make_phantom(PhantomKind kind, int size, std::uint64_t seed,
                            double pixel_size = 1.0) {
  if (size < 32) throw SizeTooSmall("phantom size must be >= 32");
  std::vector<double> img(static_cast<std::size_t>(size) * size, 0.0);
  rng::Generator gen(seed);

  if (kind == PhantomKind::ellipses) {
    struct E { double cx, cy, a, b, ang, val; };
    // Shepp-Logan layout, values rescaled into [0, 1]
    const E base[] = {
        {0.0, 0.0, 0.69, 0.92, 90.0, 1.0},
        {0.0, -0.0184, 0.6624, 0.874, 90.0, -0.8},
        {0.22, 0.0, 0.11, 0.31, 72.0, -0.2},
        {-0.22, 0.0, 0.16, 0.41, 108.0, -0.2},
        {0.0, 0.35, 0.21, 0.25, 90.0, 0.1},
        {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
        {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
        {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
        {0.0, -0.605, 0.023, 0.023, 0.0, 0.1},
        {0.06, -0.605, 0.023, 0.046, 90.0, 0.1},
    };
    for (const auto& e : base) {
      const double jx = 0.02 * (gen.uniform01() - 0.5);
      const double jy = 0.02 * (gen.uniform01() - 0.5);
      detail::add_ellipse(img, size, e.cx + jx, e.cy + jy, e.a, e.b, e.ang,
                          e.val);
    }
    for (double& v : img) v = std::clamp(v, 0.0, 1.0);
  } else if (kind == PhantomKind::texture) {
    // Broadband noise with a mildly red spectrum, amplitude-modulated by
    // smooth random blobs so patch content varies across the field.
    std::vector<fft::cd> spec(img.size(), fft::cd(0.0, 0.0));
    for (int ky = 0; ky < size; ++ky) {
      const double fy = static_cast<double>(fft::signed_index(ky, size)) / size;
      for (int kx = 0; kx < size; ++kx) {
        const double fx =
            static_cast<double>(fft::signed_index(kx, size)) / size;
        const double r = std::sqrt(fx * fx + fy * fy);
        const double amp = 1.0 / (1.0 + std::pow(r / 0.06, 1.3));
        const double phase = 2.0 * M_PI * gen.uniform01();
        const double mag = amp * (0.3 + gen.uniform01());
        spec[static_cast<std::size_t>(ky) * size + kx] =
            fft::cd(mag * std::cos(phase), mag * std::sin(phase));
      }
    }
    auto noise = fft::inverse_2d_real(std::move(spec), size, size);

    std::vector<double> envelope(img.size(), 0.15);
    const int n_blobs = 6;
    for (int b = 0; b < n_blobs; ++b) {
      const double bx = gen.uniform01() * size;
      const double by = gen.uniform01() * size;
      const double sigma = size * (0.08 + 0.12 * gen.uniform01());
      for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
          const double d2 = (x - bx) * (x - bx) + (y - by) * (y - by);
          envelope[static_cast<std::size_t>(y) * size + x] +=
              std::exp(-d2 / (2.0 * sigma * sigma));
        }
    }
    double nmax = 0.0;
    for (double v : noise) nmax = std::max(nmax, std::abs(v));
    for (std::size_t i = 0; i < img.size(); ++i)
      img[i] = 0.5 + 0.45 * std::min(envelope[i], 1.0) * noise[i] / nmax;
    // a few sharp edges so structure spans all bands
    detail::add_ellipse(img, size, -0.3, -0.3, 0.12, 0.12, 0.0, 0.2);
    detail::add_ellipse(img, size, 0.35, 0.25, 0.18, 0.09, 30.0, -0.2);
    for (double& v : img) v = std::clamp(v, 0.0, 1.0);
  } else {  // checker
    const int block = 8;
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x)
        img[static_cast<std::size_t>(y) * size + x] =
            ((x / block + y / block) % 2 == 0) ? 1.0 : 0.0;
  }

  return Phantom{Image(size, size, pixel_size, std::move(img)), kind, seed};
}

inline PhantomKind phantom_kind_from_string(const std::string& s) {
  if (s == "ellipses") return PhantomKind::ellipses;
  if (s == "texture") return PhantomKind::texture;
  if (s == "checker") return PhantomKind::checker;
  throw InvalidArgument("unknown phantom kind: " + s);
}

/// Angles "start:stop:step" in degrees, stop exclusive.
inline std::vector<double> angle_range(double start, double stop,
                                       double step) {
  if (!(step > 0.0) || !(stop > start))
    throw InvalidArgument("need stop > start and step > 0");
  std::vector<double> out;
  for (double a = start; a < stop - 1e-9; a += step) out.push_back(a);
  if (out.empty()) throw EmptyAngles("empty angle range");
  return out;
}

}  // namespace sfrc
