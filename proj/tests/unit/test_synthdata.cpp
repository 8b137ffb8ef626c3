#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "ceal/metrics.hpp"
#include "ceal/synthdata.hpp"

namespace ceal {
namespace {

namespace fs = std::filesystem;

SynthParams clean_params() {
  SynthParams p;
  p.noise_sigma = 0.0;
  p.distractor_count = 0;
  p.empty_fraction = 0.0;
  return p;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ceal_synth_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(Synth, NoiseFreeImageIsExactTwoLevel) {
  const auto p = clean_params();
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto s = generate_sample(p, rng);
    for (std::size_t k = 0; k < s.image.size(); ++k)
      ASSERT_EQ(s.image[k], s.mask[k] ? p.fg_level : p.bg_level);
  }
}

TEST(Synth, EmptyFractionOneGivesEmptyMasks) {
  auto p = clean_params();
  p.empty_fraction = 1.0;
  Rng rng(2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(count_foreground(generate_sample(p, rng).mask), 0u);
}

TEST(Synth, SameSeedSameSample) {
  SynthParams p;
  const auto a = generate_sample(p, 99, 7);
  const auto b = generate_sample(p, 99, 7);
  EXPECT_EQ(write_pgm(a.image), write_pgm(b.image));
  EXPECT_EQ(a.mask, b.mask);
  EXPECT_NE(write_pgm(generate_sample(p, 99, 8).image), write_pgm(a.image));
}

TEST(Synth, IntensitiesClamped) {
  SynthParams p;
  p.noise_sigma = 0.8;
  p.distractor_count = 5;
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    const auto s = generate_sample(p, rng);
    for (const double v : s.image.values()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
  }
}

TEST(Synth, MidpointThresholdRecoversMask) {
  const auto p = clean_params();
  const double mid = 0.5 * (p.fg_level + p.bg_level);
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto s = generate_sample(p, rng);
    const auto pred = binarize(raster_cast<ProbMap>(s.image), mid);
    ASSERT_EQ(dice(pred, s.mask), 1.0);
  }
}

TEST(Synth, EmptyFrequencyWithinThreeSigma) {
  SynthParams p;
  p.empty_fraction = 0.3;
  const int n = 2000;
  int empties = 0;
  for (int i = 0; i < n; ++i) empties += count_foreground(generate_sample(p, 5, i).mask) == 0;
  const double sigma = std::sqrt(n * 0.3 * 0.7);
  EXPECT_LE(std::abs(empties - n * 0.3), 3 * sigma);
}

TEST(Synth, ParamValidation) {
  SynthParams p;
  p.max_axis = 16.0;  // not < 32/2
  EXPECT_THROW(p.validate(), ArgumentError);
  p = SynthParams{};
  p.fg_level = p.bg_level;
  EXPECT_THROW(p.validate(), ArgumentError);
  p = SynthParams{};
  p.min_axis = 0.0;
  EXPECT_THROW(p.validate(), ArgumentError);
}

TEST(SynthDataset, LayoutAndManifest) {
  const auto dir = scratch("layout");
  const auto manifest = generate_dataset(3, SynthParams{}, 4, dir);
  EXPECT_EQ(manifest, dir / "manifest.txt");
  std::ifstream in(manifest);
  std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(all, "0\n1\n2\n");
  EXPECT_TRUE(fs::exists(dir / "img_00002.pgm"));
  EXPECT_TRUE(fs::exists(dir / "msk_00002.pgm"));
  EXPECT_EQ(load_pgm_mask((dir / "msk_00001.pgm").string()), generate_sample(SynthParams{}, 4, 1).mask);
}

TEST(SynthDataset, EmptyDataset) {
  const auto dir = scratch("empty");
  const auto manifest = generate_dataset(0, SynthParams{}, 4, dir);
  EXPECT_EQ(fs::file_size(manifest), 0u);
  EXPECT_EQ(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}), 1);
}

TEST(SynthDataset, SameSeedSameBytes) {
  const auto a = scratch("same_a");
  const auto b = scratch("same_b");
  generate_dataset(5, SynthParams{}, 12, a);
  generate_dataset(5, SynthParams{}, 12, b);
  for (const auto& entry : fs::directory_iterator(a))
    EXPECT_EQ(read_file_bytes(entry.path().string()),
              read_file_bytes((b / entry.path().filename()).string()));
}

TEST(SynthDataset, UnwritableDirectoryIsIoError) {
  EXPECT_THROW(generate_dataset(1, SynthParams{}, 1, "/proc/ceal_no_such_dir"), IoError);
}

}  // namespace
}  // namespace ceal
