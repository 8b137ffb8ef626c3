#include "ceal/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ceal {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct PixelEntry {
  std::uint32_t example;
  std::uint32_t pixel;
  FlipVariant variant;
};

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw ArgumentError("train: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("train: learning_rate must be positive");
  if (batch_size < 1) throw ArgumentError("train: batch_size must be >= 1");
  if (max_pixels_per_image < 1) throw ArgumentError("train: max_pixels_per_image must be >= 1");
}

std::vector<FlipVariant> augmentation_variants(bool augment) {
  if (!augment) return {FlipVariant::kNone};
  return {FlipVariant::kNone, FlipVariant::kHorizontal, FlipVariant::kVertical, FlipVariant::kBoth};
}

void flipped_features(const FeatureGrid& grid, std::size_t pixel, FlipVariant v,
                      std::span<double, kFeatureCount> out) {
  const auto src = grid.at(pixel);
  std::copy(src.begin(), src.end(), out.begin());
  const bool fx = v == FlipVariant::kHorizontal || v == FlipVariant::kBoth;
  const bool fy = v == FlipVariant::kVertical || v == FlipVariant::kBoth;
  if (fx && grid.width > 1) out[kFeatureX] = 1.0 - out[kFeatureX];
  if (fy && grid.height > 1) out[kFeatureY] = 1.0 - out[kFeatureY];
}

std::vector<std::uint32_t> sample_training_pixels(const BinaryMask& mask, std::size_t cap, Rng& rng) {
  std::vector<std::uint32_t> out;
  const auto n = static_cast<std::uint32_t>(mask.size());
  if (cap >= mask.size()) {
    out.resize(n);
    for (std::uint32_t p = 0; p < n; ++p) out[p] = p;
    return out;
  }
  std::vector<std::uint32_t> fg;
  std::vector<std::uint32_t> bg;
  for (std::uint32_t p = 0; p < n; ++p) (mask[p] ? fg : bg).push_back(p);
  auto k_fg = std::min(fg.size(), cap / 2);
  const auto k_bg = std::min(bg.size(), cap - k_fg);
  k_fg = std::min(fg.size(), cap - k_bg);
  out.reserve(cap);
  auto choose = [&](std::vector<std::uint32_t>& from, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(from.size() - i));
      std::swap(from[i], from[j]);
      out.push_back(from[i]);
    }
  };
  choose(fg, k_fg);
  choose(bg, k_bg);
  return out;
}

std::vector<ProbMap> StochasticPredictor::predict_passes(const GrayImage& img, std::size_t t_steps,
                                                         double dropout_p, std::uint64_t seed) const {
  std::vector<ProbMap> passes;
  passes.reserve(t_steps);
  for (std::size_t k = 0; k < t_steps; ++k) {
    Rng rng(derive_seed(seed, k));
    passes.push_back(predict_stochastic(img, dropout_p, rng));
  }
  return passes;
}

std::array<double, kFeatureCount> draw_dropout_scale(double dropout_p, Rng& rng) {
  std::array<double, kFeatureCount> scale{};
  const double keep = 1.0 / (1.0 - dropout_p);
  for (auto& s : scale) s = rng.bernoulli(dropout_p) ? 0.0 : keep;
  return scale;
}

RefPredictor::RefPredictor(double dropout_p) : dropout_p_(dropout_p) {
  if (!(dropout_p > 0.0 && dropout_p < 1.0))
    throw ArgumentError("ref predictor: dropout_p must lie in (0,1)");
}

RefPredictor::RefPredictor(const Weights& weights, double dropout_p) : RefPredictor(dropout_p) {
  for (const double v : weights)
    if (!std::isfinite(v)) throw ArgumentError("ref predictor: weights must be finite");
  weights_ = weights;
}

ProbMap RefPredictor::predict(const FeatureGrid& features, std::span<const double> feature_scale) const {
  ProbMap out(features.width, features.height);
  std::array<double, kFeatureCount> w{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) w[f] = weights_[f] * feature_scale[f];
  const double bias = weights_[kFeatureCount];
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto fv = features.at(i);
    double z = bias;
    for (std::size_t f = 0; f < kFeatureCount; ++f) z += w[f] * fv[f];
    out[i] = sigmoid(z);
  }
  return out;
}

ProbMap RefPredictor::predict_deterministic(const GrayImage& img) const {
  std::array<double, kFeatureCount> ones;
  ones.fill(1.0);
  return predict(extract_features(img), ones);
}

ProbMap RefPredictor::predict_stochastic(const GrayImage& img, double dropout_p, Rng& rng) const {
  const auto scale = draw_dropout_scale(dropout_p, rng);
  return predict(extract_features(img), scale);
}

std::vector<ProbMap> RefPredictor::predict_passes(const GrayImage& img, std::size_t t_steps,
                                                  double dropout_p, std::uint64_t seed) const {
  const auto features = extract_features(img);
  std::vector<ProbMap> passes;
  passes.reserve(t_steps);
  for (std::size_t k = 0; k < t_steps; ++k) {
    Rng rng(derive_seed(seed, k));
    passes.push_back(predict(features, draw_dropout_scale(dropout_p, rng)));
  }
  return passes;
}

ProbMap RefPredictor::predict(const GrayImage& img, bool dropout_on, Rng& rng) const {
  return dropout_on ? predict_stochastic(img, dropout_p_, rng) : predict_deterministic(img);
}

void RefPredictor::train(std::span<const TrainingExample> examples, const TrainConfig& cfg, Rng& rng) {
  cfg.validate();
  if (examples.empty()) throw ArgumentError("train: no training examples");

  std::vector<FeatureGrid> features;
  features.reserve(examples.size());
  for (const auto& ex : examples) {
    if (!ex.image || !ex.target) throw ArgumentError("train: null example");
    if (!ex.image->same_shape(*ex.target)) throw ArgumentError("train: image/mask size mismatch");
    features.push_back(extract_features(*ex.image));
  }

  const auto variants = augmentation_variants(cfg.augment);
  std::vector<PixelEntry> entries;
  std::array<double, kFeatureCount> fv{};
  std::array<double, kFeatureCount + 1> grad{};

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    entries.clear();
    for (std::uint32_t e = 0; e < examples.size(); ++e) {
      for (const auto v : variants)
        for (const auto p : sample_training_pixels(*examples[e].target, cfg.max_pixels_per_image, rng))
          entries.push_back({e, p, v});
    }
    rng.shuffle(std::span<PixelEntry>(entries));

    for (std::size_t start = 0; start < entries.size(); start += cfg.batch_size) {
      const auto stop = std::min(entries.size(), start + cfg.batch_size);
      grad.fill(0.0);
      for (std::size_t i = start; i < stop; ++i) {
        const auto& entry = entries[i];
        flipped_features(features[entry.example], entry.pixel, entry.variant, fv);
        double z = weights_[kFeatureCount];
        for (std::size_t f = 0; f < kFeatureCount; ++f) z += weights_[f] * fv[f];
        const double err = sigmoid(z) - static_cast<double>((*examples[entry.example].target)[entry.pixel]);
        for (std::size_t f = 0; f < kFeatureCount; ++f) grad[f] += err * fv[f];
        grad[kFeatureCount] += err;
      }
      const double step = cfg.learning_rate / static_cast<double>(stop - start);
      for (std::size_t f = 0; f <= kFeatureCount; ++f) weights_[f] -= step * grad[f];
    }
  }
}

double RefPredictor::mean_loss(std::span<const TrainingExample> examples) const {
  constexpr double eps = 1e-12;
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& ex : examples) {
    const auto p = predict_deterministic(*ex.image);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double q = std::clamp(p[i], eps, 1.0 - eps);
      total -= (*ex.target)[i] ? std::log(q) : std::log(1.0 - q);
    }
    n += p.size();
  }
  return n ? total / static_cast<double>(n) : 0.0;
}

std::string RefPredictor::serialize() const {
  std::string out = "ceal-ref-model 1\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "dropout_p %.17g\nweights", dropout_p_);
  out += buf;
  for (const double v : weights_) {
    std::snprintf(buf, sizeof buf, " %.17g", v);
    out += buf;
  }
  out += '\n';
  return out;
}

RefPredictor RefPredictor::deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "ceal-ref-model" || version != 1)
    throw FormatError("model: bad header");
  std::string key;
  double p = 0.0;
  if (!(in >> key >> p) || key != "dropout_p") throw FormatError("model: missing dropout_p");
  if (!(in >> key) || key != "weights") throw FormatError("model: missing weights");
  Weights w{};
  for (auto& v : w)
    if (!(in >> v)) throw FormatError("model: expected " + std::to_string(w.size()) + " weights");
  try {
    return RefPredictor(w, p);
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("model: ") + e.what());
  }
}

void save_model(const std::string& path, const RefPredictor& model) {
  const auto text = model.serialize();
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

RefPredictor load_model(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return RefPredictor::deserialize(std::string(bytes.begin(), bytes.end()));
}

}  // namespace ceal
