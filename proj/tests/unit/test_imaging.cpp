#include <gtest/gtest.h>

#include <string>

#include "ceal/imaging.hpp"
#include "oracles.hpp"

namespace ceal {
namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> payload) {
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

TEST(Pgm, ReadEndpointMapping) {
  const auto img = read_pgm(bytes_of("P5 2 1 255\n", {0, 255}));
  ASSERT_EQ(img.width(), 2u);
  ASSERT_EQ(img.height(), 1u);
  EXPECT_EQ(img[0], 0.0);
  EXPECT_EQ(img[1], 1.0);
}

TEST(Pgm, ReadLinearScaling) {
  const auto img = read_pgm(bytes_of("P5\n1 1\n255\n", {128}));
  EXPECT_DOUBLE_EQ(img[0], 128.0 / 255.0);
}

TEST(Pgm, ReadAcceptsHeaderComments) {
  const auto img = read_pgm(bytes_of("P5\n# made by hand\n1 1\n255\n", {51}));
  EXPECT_DOUBLE_EQ(img[0], 0.2);
}

TEST(Pgm, TruncatedPayloadIsAnError) {
  try {
    read_pgm(bytes_of("P5 4 4 255\n", std::vector<std::uint8_t>(15, 7)));
    FAIL() << "expected a format error";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("truncated"), std::string::npos);
  }
}

TEST(Pgm, HeaderErrorsNameTheField) {
  auto message = [](const std::string& header) {
    try {
      read_pgm(bytes_of(header, {0, 0, 0, 0}));
    } catch (const FormatError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("P6 1 1 255\n").find("magic"), std::string::npos);
  EXPECT_NE(message("P5 x 1 255\n").find("width"), std::string::npos);
  EXPECT_NE(message("P5 1 y 255\n").find("height"), std::string::npos);
  EXPECT_NE(message("P5 1 1 65535\n").find("maxval"), std::string::npos);
  EXPECT_NE(message("P5 0 1 255\n").find("width"), std::string::npos);
}

TEST(Pgm, WriteUsesSingleHeaderLineAndRounding) {
  GrayImage img(1, 2, std::vector<double>{0.0, 1.0});
  EXPECT_EQ(write_pgm(img), bytes_of("P5 1 2 255\n", {0, 255}));
  GrayImage mid(1, 1, std::vector<double>{0.5});
  EXPECT_EQ(write_pgm(mid).back(), 128);  // round(127.5)
}

TEST(Pgm, RoundTripErrorWithinHalfStep) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto img = testing::random_image(1 + rng.below(20), 1 + rng.below(20), rng);
    const auto back = read_pgm(write_pgm(img));
    ASSERT_TRUE(back.same_shape(img));
    for (std::size_t i = 0; i < img.size(); ++i) ASSERT_LE(std::abs(back[i] - img[i]), 1.0 / 510 + 1e-15);
    EXPECT_EQ(write_pgm(back), write_pgm(img));
  }
}

TEST(Pgm, MaskConvention) {
  BinaryMask m(3, 1, std::vector<std::uint8_t>{0, 1, 1});
  const auto bytes = write_pgm_mask(m);
  const auto header = std::string("P5 3 1 255\n").size();
  for (std::size_t i = header; i < bytes.size(); ++i) EXPECT_TRUE(bytes[i] == 0 || bytes[i] == 255);
  EXPECT_EQ(read_pgm_mask(bytes), m);
  EXPECT_THROW(read_pgm_mask(bytes_of("P5 1 1 255\n", {7})), FormatError);
}

TEST(Binarize, ThresholdInclusive) {
  ProbMap p(3, 1, std::vector<double>{0.2, 0.5, 0.9});
  EXPECT_EQ(binarize(p, 0.5).values(), (std::vector<std::uint8_t>{0, 1, 1}));
}

TEST(Binarize, Extremes) {
  ProbMap p(3, 1, std::vector<double>{0.0, 0.3, 0.99});
  EXPECT_EQ(count_foreground(binarize(p, 0.0)), 3u);
  EXPECT_EQ(count_foreground(binarize(p, 1.0)), 0u);
  EXPECT_THROW(binarize(p, 1.01), ArgumentError);
  EXPECT_THROW(binarize(p, -0.1), ArgumentError);
}

TEST(Binarize, MonotoneInThreshold) {
  Rng rng(5);
  const auto p = testing::random_prob_map(9, 7, rng);
  for (int t = 0; t < 100; ++t) {
    const double lo = rng.uniform();
    const double hi = lo + (1.0 - lo) * rng.uniform();
    const auto a = binarize(p, lo);
    const auto b = binarize(p, hi);
    for (std::size_t i = 0; i < p.size(); ++i) ASSERT_LE(b[i], a[i]);
  }
}

TEST(Contour, FullSquareGivesBorderRing) {
  BinaryMask m(3, 3, std::uint8_t{1});
  const auto c = extract_contour(m);
  EXPECT_EQ(count_foreground(c), 8u);
  EXPECT_EQ(c(1, 1), 0);
}

TEST(Contour, SinglePixelAndEmpty) {
  BinaryMask one(5, 5);
  one(2, 3) = 1;
  EXPECT_EQ(extract_contour(one), one);
  BinaryMask none(4, 4);
  EXPECT_EQ(count_foreground(extract_contour(none)), 0u);
}

TEST(Contour, InteriorPixelsDropOut) {
  BinaryMask m(5, 5);
  for (std::size_t y = 1; y < 4; ++y)
    for (std::size_t x = 1; x < 4; ++x) m(x, y) = 1;
  const auto c = extract_contour(m);
  EXPECT_EQ(count_foreground(c), 8u);
  EXPECT_EQ(c(2, 2), 0);
}

TEST(Contour, SubsetOfForegroundAndBorderRule) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto w = 1 + rng.below(12);
    const auto h = 1 + rng.below(12);
    const auto m = testing::random_mask(w, h, rng.uniform(), rng);
    const auto c = extract_contour(m);
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        ASSERT_LE(c(x, y), m(x, y));
        if (!m(x, y)) continue;
        const bool border = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
        const bool open = border || !m(x - 1, y) || !m(x + 1, y) || !m(x, y - 1) || !m(x, y + 1);
        ASSERT_EQ(c(x, y), open ? 1 : 0);
      }
    }
  }
}

TEST(Raster, RejectsBadShapes) {
  EXPECT_THROW(GrayImage(0, 3), ArgumentError);
  EXPECT_THROW(GrayImage(2, 2, std::vector<double>(3)), ArgumentError);
}

}  // namespace
}  // namespace ceal
