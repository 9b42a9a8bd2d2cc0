#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sfrc {

// Error hierarchy. Every failure the library raises derives from Error so
// callers can catch one type at the CLI boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class NonFiniteData : public Error {
 public:
  using Error::Error;
};
class PixelSizeMismatch : public Error {
 public:
  using Error::Error;
};
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// 2D grayscale image with a physical pixel size. Row-major, immutable
/// after construction; the constructor enforces the type invariants.
class Image {
 public:
  Image(int width, int height, double pixel_size, std::vector<double> data)
      : width_(width), height_(height), pixel_size_(pixel_size),
        data_(std::move(data)) {
    if (width_ < 1 || height_ < 1)
      throw InvalidArgument("image dimensions must be >= 1");
    if (!(pixel_size_ > 0.0))
      throw InvalidArgument("pixel_size must be > 0");
    if (data_.size() != static_cast<std::size_t>(width_) * height_)
      throw DimensionMismatch("data length does not equal width*height");
    for (double v : data_)
      if (!std::isfinite(v)) throw NonFiniteData("image contains NaN/Inf");
  }

  Image(int width, int height, double pixel_size, double fill = 0.0)
      : Image(width, height, pixel_size,
              std::vector<double>(static_cast<std::size_t>(width) * height,
                                  fill)) {}

  int width() const { return width_; }
  int height() const { return height_; }
  double pixel_size() const { return pixel_size_; }
  const std::vector<double>& data() const { return data_; }

  double at(int x, int y) const {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  /// Builds a copy with different data but the same geometry.
  Image with_data(std::vector<double> data) const {
    return Image(width_, height_, pixel_size_, std::move(data));
  }

 private:
  int width_;
  int height_;
  double pixel_size_;
  std::vector<double> data_;
};

/// Radial frequency axis. All internal bookkeeping is in normalized
/// cycles/pixel in [0, 0.5]; physical cycles-per-unit come out only
/// through nyquist()/bin_width_physical().
struct FrequencyAxis {
  double pixel_size = 1.0;
  int n_rings = 0;
  double bin_width = 0.0;  // normalized cycles/pixel per ring

  FrequencyAxis() = default;
  FrequencyAxis(double px, int rings, double bw)
      : pixel_size(px), n_rings(rings), bin_width(bw) {
    if (!(pixel_size > 0.0)) throw InvalidArgument("pixel_size must be > 0");
    if (n_rings < 1 || !(bin_width > 0.0))
      throw InvalidArgument("frequency axis needs n_rings >= 1, bin_width > 0");
    if (n_rings * bin_width < 0.5 - 1e-12)
      throw InvalidArgument("rings do not cover the full band");
  }

  double nyquist() const { return 1.0 / (2.0 * pixel_size); }
  double bin_width_physical() const { return bin_width / pixel_size; }
  /// Center frequency of ring k, normalized cycles/pixel.
  double ring_center(int k) const { return (k + 0.5) * bin_width; }
  int ring_of(double freq) const {
    return static_cast<int>(std::floor(freq / bin_width));
  }
};

/// Square patch cut from a parent image at a grid position.
struct Patch {
  int origin_x = 0;
  int origin_y = 0;
  int size = 0;
  int grid_row = 0;
  int grid_col = 0;
  double pixel_size = 1.0;
  std::vector<double> data;

  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * size + x];
  }
};

inline bool valid_patch_size(int size) { return size >= 8 && size % 2 == 0; }

inline Patch extract_patch(const Image& img, int origin_x, int origin_y,
                           int size, int grid_row = 0, int grid_col = 0) {
  if (!valid_patch_size(size))
    throw InvalidArgument("patch size must be even and >= 8");
  if (origin_x < 0 || origin_y < 0 || origin_x + size > img.width() ||
      origin_y + size > img.height())
    throw InvalidArgument("patch exceeds parent image bounds");
  Patch p;
  p.origin_x = origin_x;
  p.origin_y = origin_y;
  p.size = size;
  p.grid_row = grid_row;
  p.grid_col = grid_col;
  p.pixel_size = img.pixel_size();
  p.data.resize(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      p.data[static_cast<std::size_t>(y) * size + x] =
          img.at(origin_x + x, origin_y + y);
  return p;
}

/// Checks that two images form a comparable pair: same shape, same pixel
/// size, finite data. Finiteness is already guaranteed by the Image
/// constructor; shape and pixel size are the live checks.
inline void validate_pair(const Image& ref, const Image& test) {
  if (ref.width() != test.width() || ref.height() != test.height())
    throw DimensionMismatch("image shapes differ");
  if (ref.pixel_size() != test.pixel_size())
    throw PixelSizeMismatch("pixel sizes differ");
}

}  // namespace sfrc
