#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ceal/errors.hpp"

namespace ceal {

// Row-major width x height grid. The Tag parameter keeps rasters with the
// same element type but different meaning (intensity, probability, variance,
// distance) from being mixed up.
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), data_(width * height, fill) {
    check_dims();
  }
  Raster(std::size_t width, std::size_t height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims();
    if (data_.size() != width_ * height_)
      throw ArgumentError("raster data length does not match width*height");
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  const T& operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& values() const& noexcept { return data_; }
  // By value on temporaries, so `for (v : make().values())` is safe.
  std::vector<T> values() && noexcept { return std::move(data_); }

  template <typename OtherT, typename OtherTag>
  bool same_shape(const Raster<OtherT, OtherTag>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  void check_dims() const {
    if (width_ == 0 || height_ == 0) throw ArgumentError("raster dimensions must be positive");
  }

  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> data_;
};

struct GrayTag {};
struct ProbTag {};
struct MaskTag {};

// Intensities in [0,1].
using GrayImage = Raster<double, GrayTag>;
// Foreground probabilities in [0,1].
using ProbMap = Raster<double, ProbTag>;
// Values in {0,1}.
using BinaryMask = Raster<std::uint8_t, MaskTag>;

template <typename ToRaster, typename FromRaster>
ToRaster raster_cast(const FromRaster& from) {
  std::vector<typename ToRaster::value_type> out(from.values().begin(), from.values().end());
  return ToRaster(from.width(), from.height(), std::move(out));
}

std::size_t count_foreground(const BinaryMask& m);

// Binary portable graymap (P5, maxval 255). Pixel v maps to v/255.
GrayImage read_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pgm(const GrayImage& img);

// Masks use the 0 -> 0, 1 -> 255 convention. Reading accepts only {0,255}.
BinaryMask read_pgm_mask(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_pgm_mask(const BinaryMask& mask);

GrayImage load_pgm(const std::string& path);
BinaryMask load_pgm_mask(const std::string& path);
void save_pgm(const std::string& path, const GrayImage& img);
void save_pgm_mask(const std::string& path, const BinaryMask& mask);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

// Pixel is 1 iff p >= threshold.
BinaryMask binarize(const ProbMap& p, double threshold);

// Foreground pixels with a background 4-neighbour or lying on the image border.
BinaryMask extract_contour(const BinaryMask& m);

}  // namespace ceal
