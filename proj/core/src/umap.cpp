#include "ceal/umap.hpp"

#include <bit>
#include <cstring>

#include "ceal/errors.hpp"
#include "ceal/imaging.hpp"

namespace ceal {
namespace {

std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_le32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

}  // namespace

FloatMap read_umap(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "UMAP", 4) != 0)
    throw FormatError("umap: bad magic");
  if (bytes.size() < kUmapHeaderBytes) throw FormatError("umap: truncated header");
  FloatMap m;
  m.width = load_le32(bytes.data() + 4);
  m.height = load_le32(bytes.data() + 8);
  if (m.width == 0 || m.height == 0) throw FormatError("umap: dimensions must be positive");
  const std::size_t n = m.width * m.height;
  if (bytes.size() - kUmapHeaderBytes < n * 4)
    throw FormatError("umap: truncated payload, expected " + std::to_string(n * 4) + " bytes");
  m.values.resize(n);
  const auto* p = bytes.data() + kUmapHeaderBytes;
  for (std::size_t i = 0; i < n; ++i) m.values[i] = std::bit_cast<float>(load_le32(p + 4 * i));
  return m;
}

std::vector<std::uint8_t> write_umap(const FloatMap& map) {
  if (map.values.size() != map.width * map.height)
    throw ArgumentError("umap: value count does not match width*height");
  std::vector<std::uint8_t> out{'U', 'M', 'A', 'P'};
  out.reserve(kUmapHeaderBytes + 4 * map.values.size());
  store_le32(out, static_cast<std::uint32_t>(map.width));
  store_le32(out, static_cast<std::uint32_t>(map.height));
  for (const float v : map.values) store_le32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

FloatMap load_umap(const std::string& path) {
  try {
    return read_umap(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (" + path + ")");
  }
}

void save_umap(const std::string& path, const FloatMap& map) { write_file_bytes(path, write_umap(map)); }

}  // namespace ceal
