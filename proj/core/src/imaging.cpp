#include "ceal/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace ceal {
namespace {

struct PgmHeader {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t payload_offset = 0;
};

class HeaderCursor {
 public:
  explicit HeaderCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_number(const char* field) {
    skip_separators();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      ++pos_;
      if (++digits > 9) throw FormatError(std::string("pgm: ") + field + " out of range");
    }
    if (digits == 0) throw FormatError(std::string("pgm: missing or malformed ") + field);
    return value;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }
  bool at_whitespace() const { return pos_ < bytes_.size() && std::isspace(bytes_[pos_]); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

PgmHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError("pgm: magic must be P5");
  HeaderCursor cur(bytes.subspan(2));
  if (!cur.at_whitespace()) throw FormatError("pgm: magic must be P5");
  PgmHeader h;
  h.width = cur.read_number("width");
  h.height = cur.read_number("height");
  const auto maxval = cur.read_number("maxval");
  if (h.width == 0) throw FormatError("pgm: width must be positive");
  if (h.height == 0) throw FormatError("pgm: height must be positive");
  if (maxval != 255)
    throw FormatError("pgm: maxval must be 255, got " + std::to_string(maxval));
  if (!cur.at_whitespace()) throw FormatError("pgm: missing whitespace after maxval");
  cur.advance();
  h.payload_offset = 2 + cur.pos();
  const auto need = h.width * h.height;
  const auto have = bytes.size() - h.payload_offset;
  if (have < need)
    throw FormatError("pgm: truncated payload, expected " + std::to_string(need) +
                      " bytes, got " + std::to_string(have));
  return h;
}

std::vector<std::uint8_t> encode(std::size_t w, std::size_t h, auto&& byte_at) {
  const std::string header =
      "P5 " + std::to_string(w) + " " + std::to_string(h) + " 255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + w * h);
  for (std::size_t i = 0; i < w * h; ++i) out.push_back(byte_at(i));
  return out;
}

}  // namespace

std::size_t count_foreground(const BinaryMask& m) {
  return static_cast<std::size_t>(std::count(m.values().begin(), m.values().end(), 1));
}

GrayImage read_pgm(std::span<const std::uint8_t> bytes) {
  const auto h = parse_header(bytes);
  std::vector<double> data(h.width * h.height);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = bytes[h.payload_offset + i] / 255.0;
  return GrayImage(h.width, h.height, std::move(data));
}

std::vector<std::uint8_t> write_pgm(const GrayImage& img) {
  return encode(img.width(), img.height(), [&](std::size_t i) {
    const double v = std::clamp(img[i], 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
  });
}

BinaryMask read_pgm_mask(std::span<const std::uint8_t> bytes) {
  const auto h = parse_header(bytes);
  std::vector<std::uint8_t> data(h.width * h.height);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto v = bytes[h.payload_offset + i];
    if (v != 0 && v != 255)
      throw FormatError("pgm mask: payload value " + std::to_string(v) + " is not 0 or 255");
    data[i] = v == 255 ? 1 : 0;
  }
  return BinaryMask(h.width, h.height, std::move(data));
}

std::vector<std::uint8_t> write_pgm_mask(const BinaryMask& mask) {
  return encode(mask.width(), mask.height(),
                [&](std::size_t i) { return static_cast<std::uint8_t>(mask[i] ? 255 : 0); });
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file", path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing", path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed", path);
}

GrayImage load_pgm(const std::string& path) {
  try {
    return read_pgm(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (" + path + ")");
  }
}

BinaryMask load_pgm_mask(const std::string& path) {
  try {
    return read_pgm_mask(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (" + path + ")");
  }
}

void save_pgm(const std::string& path, const GrayImage& img) { write_file_bytes(path, write_pgm(img)); }

void save_pgm_mask(const std::string& path, const BinaryMask& mask) {
  write_file_bytes(path, write_pgm_mask(mask));
}

BinaryMask binarize(const ProbMap& p, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw ArgumentError("binarize: threshold must lie in [0,1]");
  BinaryMask out(p.width(), p.height());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= threshold ? 1 : 0;
  return out;
}

BinaryMask extract_contour(const BinaryMask& m) {
  const auto w = m.width();
  const auto h = m.height();
  BinaryMask out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!m(x, y)) continue;
      const bool border = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
      if (border || !m(x - 1, y) || !m(x + 1, y) || !m(x, y - 1) || !m(x, y + 1)) out(x, y) = 1;
    }
  }
  return out;
}

}  // namespace ceal
