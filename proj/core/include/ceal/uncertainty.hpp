#pragma once

#include <cstddef>
#include <vector>

#include "ceal/imaging.hpp"
#include "ceal/predictor.hpp"
#include "ceal/rng.hpp"

namespace ceal {

struct VarianceTag {};
// Per-pixel population variance of the stochastic passes.
using UncertaintyMap = Raster<double, VarianceTag>;

struct McConfig {
  std::size_t t_steps = 10;
  double dropout_p = 0.5;

  void validate() const;
};

// Per-pixel streaming mean / sum of squared deviations (Welford).
class VarianceAccumulator {
 public:
  VarianceAccumulator(std::size_t width, std::size_t height);

  void update(const ProbMap& p);
  // Chan et al. pairwise combination; equivalent to updating with every map
  // that went into `other`.
  void merge(const VarianceAccumulator& other);

  std::size_t count() const noexcept { return count_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const std::vector<double>& m2() const noexcept { return m2_; }

  struct Result {
    ProbMap mean;
    UncertaintyMap variance;
  };

  // variance = M2 / count. Requires count >= 2.
  Result finalize() const;

 private:
  std::size_t width_;
  std::size_t height_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

using McResult = VarianceAccumulator::Result;

// cfg.t_steps dropout passes, finalized into mean and variance maps.
McResult mc_predict(const StochasticPredictor& predictor, const GrayImage& img, const McConfig& cfg,
                    Rng& rng);

}  // namespace ceal
