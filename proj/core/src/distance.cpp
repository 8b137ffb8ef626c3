#include "ceal/distance.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace ceal {

SquaredDistMap edt_exact_squared(const BinaryMask& contour) {
  const auto w = static_cast<std::int64_t>(contour.width());
  const auto h = static_cast<std::int64_t>(contour.height());
  if (count_foreground(contour) == 0) throw NoContourError();

  // Phase 1: per column, vertical distance to the nearest contour pixel.
  // Columns without one keep `inf`, which can never win phase 2 because
  // some other column has a finite value and (w-1)^2 + (h-1)^2 < inf^2.
  const std::int64_t inf = w + h;
  std::vector<std::int64_t> g(static_cast<std::size_t>(w * h));
  auto gat = [&](std::int64_t x, std::int64_t y) -> std::int64_t& {
    return g[static_cast<std::size_t>(y * w + x)];
  };
  for (std::int64_t x = 0; x < w; ++x) {
    gat(x, 0) = contour(x, 0) ? 0 : inf;
    for (std::int64_t y = 1; y < h; ++y) gat(x, y) = contour(x, y) ? 0 : gat(x, y - 1) + 1;
    for (std::int64_t y = h - 2; y >= 0; --y)
      if (gat(x, y + 1) < gat(x, y)) gat(x, y) = gat(x, y + 1) + 1;
  }

  // Phase 2: per row, lower envelope of the parabolas (x - i)^2 + g(i)^2.
  SquaredDistMap out(contour.width(), contour.height());
  std::vector<std::int64_t> s(static_cast<std::size_t>(w));
  std::vector<std::int64_t> t(static_cast<std::size_t>(w));
  std::vector<std::int64_t> row(static_cast<std::size_t>(w));
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) row[x] = gat(x, y);
    auto f = [&](std::int64_t x, std::int64_t i) { return (x - i) * (x - i) + row[i] * row[i]; };
    auto sep = [&](std::int64_t i, std::int64_t u) {
      return (u * u - i * i + row[u] * row[u] - row[i] * row[i]) / (2 * (u - i));
    };
    std::int64_t q = 0;
    s[0] = 0;
    t[0] = 0;
    for (std::int64_t u = 1; u < w; ++u) {
      while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
      if (q < 0) {
        q = 0;
        s[0] = u;
      } else {
        const std::int64_t cut = 1 + sep(s[q], u);
        if (cut < w) {
          ++q;
          s[q] = u;
          t[q] = cut;
        }
      }
    }
    for (std::int64_t u = w - 1; u >= 0; --u) {
      out(u, y) = f(u, s[q]);
      if (u == t[q]) --q;
    }
  }
  return out;
}

SquaredDistMap edt_brute_squared(const BinaryMask& contour) {
  const auto w = contour.width();
  const auto h = contour.height();
  std::vector<std::pair<std::int64_t, std::int64_t>> points;
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      if (contour(x, y)) points.emplace_back(x, y);
  if (points.empty()) throw NoContourError();

  SquaredDistMap out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (const auto& [cx, cy] : points) {
        const std::int64_t dx = static_cast<std::int64_t>(x) - cx;
        const std::int64_t dy = static_cast<std::int64_t>(y) - cy;
        best = std::min(best, dx * dx + dy * dy);
      }
      out(x, y) = best;
    }
  }
  return out;
}

DistMap sqrt_distances(const SquaredDistMap& squared) {
  DistMap out(squared.width(), squared.height());
  for (std::size_t i = 0; i < squared.size(); ++i) out[i] = std::sqrt(static_cast<double>(squared[i]));
  return out;
}

DistMap edt_exact(const BinaryMask& contour) { return sqrt_distances(edt_exact_squared(contour)); }

DistMap edt_brute(const BinaryMask& contour) { return sqrt_distances(edt_brute_squared(contour)); }

UncertaintyScore weighted_score(const UncertaintyMap& u, const DistMap& d) {
  if (!u.same_shape(d)) throw ArgumentError("weighted_score: dimensions do not match");
  double raw = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) raw += u[i] * d[i];
  return {raw, raw / static_cast<double>(u.size())};
}

SampleScore score_sample(const UncertaintyMap& u, const BinaryMask& predicted) {
  if (!u.same_shape(predicted)) throw ArgumentError("score_sample: dimensions do not match");
  const auto fg = count_foreground(predicted);
  if (fg == 0 || fg == predicted.size()) {
    double raw = 0.0;
    for (const double v : u.values()) raw += v;
    return {{raw, raw / static_cast<double>(u.size())}, true};
  }
  return {weighted_score(u, edt_exact(extract_contour(predicted))), false};
}

}  // namespace ceal
