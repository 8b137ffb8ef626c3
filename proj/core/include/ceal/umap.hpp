#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ceal {

// UMAP float map: "UMAP", width and height as little-endian uint32, then
// width*height little-endian IEEE-754 binary32 values in row-major order.
struct FloatMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<float> values;

  friend bool operator==(const FloatMap&, const FloatMap&) = default;
};

inline constexpr std::size_t kUmapHeaderBytes = 12;

FloatMap read_umap(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_umap(const FloatMap& map);

FloatMap load_umap(const std::string& path);
void save_umap(const std::string& path, const FloatMap& map);

template <typename R>
FloatMap to_float_map(const R& raster) {
  FloatMap m{raster.width(), raster.height(), {}};
  m.values.reserve(raster.size());
  for (const auto v : raster.values()) m.values.push_back(static_cast<float>(v));
  return m;
}

template <typename R>
R from_float_map(const FloatMap& m) {
  std::vector<typename R::value_type> data(m.values.begin(), m.values.end());
  return R(m.width, m.height, std::move(data));
}

}  // namespace ceal
