#pragma once

#include <cstdint>

#include "ceal/imaging.hpp"
#include "ceal/uncertainty.hpp"

namespace ceal {

struct DistanceTag {};
struct SquaredDistanceTag {};
// Euclidean pixel-centre distance to the nearest contour pixel.
using DistMap = Raster<double, DistanceTag>;
using SquaredDistMap = Raster<std::int64_t, SquaredDistanceTag>;

// Exact squared distances by the separable two-phase lower-envelope method
// (Meijster et al.). Linear in the pixel count, integer arithmetic only.
// Throws NoContourError when the mask is empty.
SquaredDistMap edt_exact_squared(const BinaryMask& contour);
DistMap edt_exact(const BinaryMask& contour);

// Exhaustive nearest-contour search, O(N*M). Reference for tests.
SquaredDistMap edt_brute_squared(const BinaryMask& contour);
DistMap edt_brute(const BinaryMask& contour);

DistMap sqrt_distances(const SquaredDistMap& squared);

struct UncertaintyScore {
  double raw = 0.0;         // sum over pixels of variance * distance
  double normalized = 0.0;  // raw / (width * height)
};

UncertaintyScore weighted_score(const UncertaintyMap& u, const DistMap& d);

struct SampleScore {
  UncertaintyScore score;
  // Prediction was empty or full, so the unweighted variance sum was used.
  bool degenerate = false;
};

SampleScore score_sample(const UncertaintyMap& u, const BinaryMask& predicted);

}  // namespace ceal
