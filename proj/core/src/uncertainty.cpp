#include "ceal/uncertainty.hpp"

#include <algorithm>

namespace ceal {

void McConfig::validate() const {
  if (t_steps < 2) throw ArgumentError("mc: t_steps must be >= 2");
  if (!(dropout_p > 0.0 && dropout_p < 1.0)) throw ArgumentError("mc: dropout_p must lie in (0,1)");
}

VarianceAccumulator::VarianceAccumulator(std::size_t width, std::size_t height)
    : width_(width), height_(height), mean_(width * height, 0.0), m2_(width * height, 0.0) {
  if (width == 0 || height == 0) throw ArgumentError("accumulator: dimensions must be positive");
}

void VarianceAccumulator::update(const ProbMap& p) {
  if (p.width() != width_ || p.height() != height_)
    throw ArgumentError("accumulator: map dimensions do not match");
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double x = p[i];
    const double delta = x - mean_[i];
    mean_[i] += delta / n;
    m2_[i] += delta * (x - mean_[i]);
  }
}

void VarianceAccumulator::merge(const VarianceAccumulator& other) {
  if (other.width_ != width_ || other.height_ != height_)
    throw ArgumentError("accumulator: merge dimensions do not match");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = other.mean_[i] - mean_[i];
    mean_[i] += delta * nb / n;
    m2_[i] += other.m2_[i] + delta * delta * na * nb / n;
  }
  count_ += other.count_;
}

VarianceAccumulator::Result VarianceAccumulator::finalize() const {
  if (count_ < 2) throw StateError("accumulator: finalize needs at least two updates");
  const double n = static_cast<double>(count_);
  std::vector<double> mean(mean_.size());
  std::vector<double> var(m2_.size());
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    mean[i] = std::clamp(mean_[i], 0.0, 1.0);
    var[i] = m2_[i] / n;
  }
  return {ProbMap(width_, height_, std::move(mean)), UncertaintyMap(width_, height_, std::move(var))};
}

McResult mc_predict(const StochasticPredictor& predictor, const GrayImage& img, const McConfig& cfg,
                    Rng& rng) {
  cfg.validate();
  const auto passes = predictor.predict_passes(img, cfg.t_steps, cfg.dropout_p, rng.next_u64());
  if (passes.size() != cfg.t_steps) throw StateError("mc: predictor returned the wrong pass count");
  VarianceAccumulator acc(img.width(), img.height());
  for (const auto& p : passes) acc.update(p);
  return acc.finalize();
}

}  // namespace ceal
