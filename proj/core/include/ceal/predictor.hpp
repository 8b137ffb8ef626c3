#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ceal/imaging.hpp"
#include "ceal/rng.hpp"

namespace ceal {

struct TrainConfig {
  std::size_t epochs = 2;
  double learning_rate = 0.1;
  bool augment = true;  // horizontal + vertical flips
  std::size_t batch_size = 256;
  std::size_t max_pixels_per_image = 4096;

  void validate() const;
};

// A training pair. Images are shared, never copied, by the pool.
struct TrainingExample {
  std::shared_ptr<const GrayImage> image;
  std::shared_ptr<const BinaryMask> target;
};

// Segmenter with dropout-driven stochastic inference. Implementations must
// return maps in [0,1] and be deterministic given weights and rng state.
class StochasticPredictor {
 public:
  virtual ~StochasticPredictor() = default;

  virtual void train(std::span<const TrainingExample> examples, const TrainConfig& cfg, Rng& rng) = 0;

  // Dropout disabled.
  virtual ProbMap predict_deterministic(const GrayImage& img) const = 0;

  // One forward pass with an independent dropout realization.
  virtual ProbMap predict_stochastic(const GrayImage& img, double dropout_p, Rng& rng) const = 0;

  // t_steps stochastic passes. Pass k uses the stream derive_seed(seed, k),
  // so passes can be evaluated in any order.
  virtual std::vector<ProbMap> predict_passes(const GrayImage& img, std::size_t t_steps,
                                              double dropout_p, std::uint64_t seed) const;

  // Discard learned state (used when retraining from scratch).
  virtual void reinitialize() = 0;

  virtual std::unique_ptr<StochasticPredictor> clone() const = 0;

  // Whether predictions may run concurrently from several threads.
  virtual bool concurrent_safe() const { return true; }
};

// Per-pixel features: raw intensity, box mean and box stdev at radii 1, 3, 7,
// normalized x, normalized y.
inline constexpr std::size_t kFeatureCount = 9;
inline constexpr std::array<std::size_t, 3> kBoxRadii{1, 3, 7};
inline constexpr std::size_t kFeatureX = 7;
inline constexpr std::size_t kFeatureY = 8;

struct FeatureGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;  // pixel-major: values[pixel * kFeatureCount + f]

  std::span<const double> at(std::size_t pixel) const {
    return std::span<const double>(values).subspan(pixel * kFeatureCount, kFeatureCount);
  }
};

FeatureGrid extract_features(const GrayImage& img);

// Flip augmentation. With augment on, every training sample contributes all
// four views, a set closed under horizontal and vertical flips.
enum class FlipVariant : std::uint8_t { kNone, kHorizontal, kVertical, kBoth };

std::vector<FlipVariant> augmentation_variants(bool augment);

// Pixel of the unflipped image that lands on (x, y) in the flipped view.
inline std::size_t flip_source_index(std::size_t width, std::size_t height, std::size_t x, std::size_t y,
                                     FlipVariant v) {
  const bool fx = v == FlipVariant::kHorizontal || v == FlipVariant::kBoth;
  const bool fy = v == FlipVariant::kVertical || v == FlipVariant::kBoth;
  return (fy ? height - 1 - y : y) * width + (fx ? width - 1 - x : x);
}

template <typename R>
R flip(const R& raster, FlipVariant v) {
  R out(raster.width(), raster.height());
  for (std::size_t y = 0; y < raster.height(); ++y)
    for (std::size_t x = 0; x < raster.width(); ++x)
      out(x, y) = raster[flip_source_index(raster.width(), raster.height(), x, y, v)];
  return out;
}

// Features of the flipped view at the position where source pixel `pixel`
// lands, read from the unflipped grid. Box statistics are flip-invariant, so
// only the coordinate features change.
void flipped_features(const FeatureGrid& grid, std::size_t pixel, FlipVariant v,
                      std::span<double, kFeatureCount> out);

// Pixels (indices into mask) used for one image in one epoch: every pixel
// when the image fits under `cap`, otherwise `cap` pixels split evenly
// between foreground and background as far as both classes allow.
std::vector<std::uint32_t> sample_training_pixels(const BinaryMask& mask, std::size_t cap, Rng& rng);

// Logistic per-pixel classifier over the nine patch features, with inverted
// dropout on the features at inference time.
class RefPredictor final : public StochasticPredictor {
 public:
  using Weights = std::array<double, kFeatureCount + 1>;  // features..., bias

  explicit RefPredictor(double dropout_p = 0.5);
  RefPredictor(const Weights& weights, double dropout_p);

  void train(std::span<const TrainingExample> examples, const TrainConfig& cfg, Rng& rng) override;
  ProbMap predict_deterministic(const GrayImage& img) const override;
  ProbMap predict_stochastic(const GrayImage& img, double dropout_p, Rng& rng) const override;
  std::vector<ProbMap> predict_passes(const GrayImage& img, std::size_t t_steps, double dropout_p,
                                      std::uint64_t seed) const override;
  void reinitialize() override { weights_.fill(0.0); }
  std::unique_ptr<StochasticPredictor> clone() const override {
    return std::make_unique<RefPredictor>(*this);
  }

  // Same as the virtual interface, but with the model's own dropout_p.
  ProbMap predict(const GrayImage& img, bool dropout_on, Rng& rng) const;
  ProbMap predict(const FeatureGrid& features, std::span<const double> feature_scale) const;

  // Mean pixel cross-entropy of the deterministic model over all pixels.
  double mean_loss(std::span<const TrainingExample> examples) const;

  const Weights& weights() const noexcept { return weights_; }
  double dropout_p() const noexcept { return dropout_p_; }

  std::string serialize() const;
  static RefPredictor deserialize(const std::string& text);

 private:
  Weights weights_{};
  double dropout_p_;
};

void save_model(const std::string& path, const RefPredictor& model);
RefPredictor load_model(const std::string& path);

// Draws one inverted-dropout scale per feature: 0 with probability p,
// otherwise 1/(1-p).
std::array<double, kFeatureCount> draw_dropout_scale(double dropout_p, Rng& rng);

// Runs `<cmd> <input.pgm> <outdir> <T> <p_d> <seed>` once and reads back
// outdir/pass_%03d.umap for every pass.
std::vector<ProbMap> external_predict(const std::string& cmd, const std::string& img_path,
                                      std::size_t t_steps, double dropout_p, std::uint64_t seed,
                                      const std::string& workdir);

std::string pass_file_name(std::size_t index);

// Plugs an external segmenter into the loop through the UMAP protocol. The
// external model is trained out of band, so train() only records the call.
class ExternalPredictor final : public StochasticPredictor {
 public:
  ExternalPredictor(std::string cmd, std::string workdir);

  void train(std::span<const TrainingExample> examples, const TrainConfig& cfg, Rng& rng) override;
  ProbMap predict_deterministic(const GrayImage& img) const override;
  ProbMap predict_stochastic(const GrayImage& img, double dropout_p, Rng& rng) const override;
  std::vector<ProbMap> predict_passes(const GrayImage& img, std::size_t t_steps, double dropout_p,
                                      std::uint64_t seed) const override;
  void reinitialize() override {}
  std::unique_ptr<StochasticPredictor> clone() const override {
    return std::make_unique<ExternalPredictor>(*this);
  }
  bool concurrent_safe() const override { return false; }

  std::size_t train_calls() const noexcept { return train_calls_; }

 private:
  std::string cmd_;
  std::string workdir_;
  std::size_t train_calls_ = 0;
};

}  // namespace ceal
