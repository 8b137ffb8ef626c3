#include "ceal/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace ceal {
namespace {

constexpr double kDistractorContrast = 0.8;

}  // namespace

void SynthParams::validate() const {
  if (image_size == 0) throw ArgumentError("synth: image_size must be positive");
  if (!(min_axis > 0.0 && min_axis <= max_axis && max_axis < image_size / 2.0))
    throw ArgumentError("synth: need 0 < min_axis <= max_axis < image_size/2");
  if (fg_level == bg_level) throw ArgumentError("synth: fg_level must differ from bg_level");
  if (fg_level < 0.0 || fg_level > 1.0 || bg_level < 0.0 || bg_level > 1.0)
    throw ArgumentError("synth: intensity levels must lie in [0,1]");
  if (!(noise_sigma >= 0.0)) throw ArgumentError("synth: noise_sigma must be >= 0");
  if (!(empty_fraction >= 0.0 && empty_fraction <= 1.0))
    throw ArgumentError("synth: empty_fraction must lie in [0,1]");
}

Sample generate_sample(const SynthParams& params, Rng& rng) {
  params.validate();
  const auto n = params.image_size;
  const double extent = static_cast<double>(n);

  const bool empty = rng.uniform() < params.empty_fraction;
  const double a = rng.uniform(params.min_axis, params.max_axis);
  const double b = rng.uniform(params.min_axis, params.max_axis);
  const double theta = rng.uniform(0.0, std::numbers::pi);
  const double cx = rng.uniform(a * 0.5, extent - 1.0 - a * 0.5);
  const double cy = rng.uniform(b * 0.5, extent - 1.0 - b * 0.5);
  const double c = std::cos(theta);
  const double s = std::sin(theta);

  BinaryMask mask(n, n);
  GrayImage image(n, n, params.bg_level);
  if (!empty) {
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        const double dx = static_cast<double>(x) - cx;
        const double dy = static_cast<double>(y) - cy;
        const double u = (dx * c + dy * s) / a;
        const double v = (-dx * s + dy * c) / b;
        if (u * u + v * v <= 1.0) {
          mask(x, y) = 1;
          image(x, y) = params.fg_level;
        }
      }
    }
  }

  const double amplitude = kDistractorContrast * (params.fg_level - params.bg_level);
  const double max_radius = std::max(1.0, params.min_axis);
  for (std::size_t k = 0; k < params.distractor_count; ++k) {
    const double bx = rng.uniform(0.0, extent - 1.0);
    const double by = rng.uniform(0.0, extent - 1.0);
    const double r = rng.uniform(1.0, max_radius + 1.0);
    const double inv = 1.0 / (2.0 * r * r);
    for (std::size_t y = 0; y < n; ++y) {
      for (std::size_t x = 0; x < n; ++x) {
        const double dx = static_cast<double>(x) - bx;
        const double dy = static_cast<double>(y) - by;
        image(x, y) += amplitude * std::exp(-(dx * dx + dy * dy) * inv);
      }
    }
  }

  for (std::size_t i = 0; i < image.size(); ++i) {
    double v = image[i];
    if (params.noise_sigma > 0.0) v += params.noise_sigma * rng.normal();
    image[i] = std::clamp(v, 0.0, 1.0);
  }
  return {std::move(image), std::move(mask)};
}

Sample generate_sample(const SynthParams& params, std::uint64_t seed, std::uint64_t id) {
  Rng rng(derive_seed(seed, tag_hash("synth"), id));
  return generate_sample(params, rng);
}

std::string image_file_name(std::uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img_%05llu.pgm", static_cast<unsigned long long>(id));
  return buf;
}

std::string mask_file_name(std::uint64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "msk_%05llu.pgm", static_cast<unsigned long long>(id));
  return buf;
}

std::filesystem::path generate_dataset(std::size_t n, const SynthParams& params, std::uint64_t seed,
                                       const std::filesystem::path& out_dir) {
  params.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory", out_dir.string());

  const auto manifest = out_dir / kManifestName;
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw IoError("cannot write manifest", manifest.string());
  for (std::uint64_t id = 0; id < n; ++id) {
    const auto sample = generate_sample(params, seed, id);
    save_pgm((out_dir / image_file_name(id)).string(), sample.image);
    save_pgm_mask((out_dir / mask_file_name(id)).string(), sample.mask);
    out << id << '\n';
  }
  out.flush();
  if (!out) throw IoError("manifest write failed", manifest.string());
  return manifest;
}

}  // namespace ceal
