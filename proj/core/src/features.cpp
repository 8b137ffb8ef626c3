#include <algorithm>
#include <cmath>

#include "ceal/predictor.hpp"

namespace ceal {

FeatureGrid extract_features(const GrayImage& img) {
  const auto w = img.width();
  const auto h = img.height();
  FeatureGrid grid{w, h, std::vector<double>(w * h * kFeatureCount)};

  // Summed-area tables over intensities shifted by the first pixel, so a
  // constant image yields exact zero deviations.
  const double ref = img[0];
  const auto stride = w + 1;
  std::vector<double> sum(stride * (h + 1), 0.0);
  std::vector<double> sum_sq(stride * (h + 1), 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    double row = 0.0;
    double row_sq = 0.0;
    for (std::size_t x = 0; x < w; ++x) {
      const double d = img(x, y) - ref;
      row += d;
      row_sq += d * d;
      sum[(y + 1) * stride + x + 1] = sum[y * stride + x + 1] + row;
      sum_sq[(y + 1) * stride + x + 1] = sum_sq[y * stride + x + 1] + row_sq;
    }
  }
  auto box = [&](const std::vector<double>& table, std::size_t x0, std::size_t y0, std::size_t x1,
                 std::size_t y1) {
    return table[y1 * stride + x1] - table[y0 * stride + x1] - table[y1 * stride + x0] +
           table[y0 * stride + x0];
  };

  const double x_den = w > 1 ? static_cast<double>(w - 1) : 1.0;
  const double y_den = h > 1 ? static_cast<double>(h - 1) : 1.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double* f = &grid.values[(y * w + x) * kFeatureCount];
      f[0] = img(x, y);
      for (std::size_t k = 0; k < kBoxRadii.size(); ++k) {
        const auto r = kBoxRadii[k];
        const std::size_t x0 = x >= r ? x - r : 0;
        const std::size_t y0 = y >= r ? y - r : 0;
        const std::size_t x1 = std::min(w, x + r + 1);
        const std::size_t y1 = std::min(h, y + r + 1);
        const double n = static_cast<double>((x1 - x0) * (y1 - y0));
        const double mean_d = box(sum, x0, y0, x1, y1) / n;
        const double var = box(sum_sq, x0, y0, x1, y1) / n - mean_d * mean_d;
        f[1 + 2 * k] = std::clamp(ref + mean_d, 0.0, 1.0);
        f[2 + 2 * k] = var > 0.0 ? std::sqrt(var) : 0.0;
      }
      f[kFeatureX] = static_cast<double>(x) / x_den;
      f[kFeatureY] = static_cast<double>(y) / y_den;
    }
  }
  return grid;
}

}  // namespace ceal
