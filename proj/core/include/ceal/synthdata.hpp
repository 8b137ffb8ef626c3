#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ceal/imaging.hpp"
#include "ceal/rng.hpp"

namespace ceal {

// Synthetic "lesion" images: a filled ellipse over a flat background, plus
// lesion-free bright blobs and Gaussian noise.
struct SynthParams {
  std::size_t image_size = 32;
  double min_axis = 3.0;
  double max_axis = 10.0;
  double fg_level = 0.65;
  double bg_level = 0.35;
  double noise_sigma = 0.12;
  std::size_t distractor_count = 2;
  double empty_fraction = 0.1;

  // Throws ArgumentError when the invariants do not hold.
  void validate() const;
};

struct Sample {
  GrayImage image;
  BinaryMask mask;
};

Sample generate_sample(const SynthParams& params, Rng& rng);

// Sample `id` of a dataset is generated from its own stream derived from
// (seed, id), so any subset can be regenerated independently.
Sample generate_sample(const SynthParams& params, std::uint64_t seed, std::uint64_t id);

std::string image_file_name(std::uint64_t id);
std::string mask_file_name(std::uint64_t id);
inline constexpr const char* kManifestName = "manifest.txt";

// Writes img_%05d.pgm / msk_%05d.pgm and manifest.txt (one id per line,
// ascending) into out_dir. Returns the manifest path.
std::filesystem::path generate_dataset(std::size_t n, const SynthParams& params, std::uint64_t seed,
                                       const std::filesystem::path& out_dir);

}  // namespace ceal
