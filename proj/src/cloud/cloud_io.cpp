#include "terra/cloud/cloud_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "terra/common/error.hpp"

namespace terra {

namespace {

static_assert(sizeof(float) == 4);

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

void write_f32(std::ostream& out, float f) {
  const std::uint32_t bits = to_little_endian(std::bit_cast<std::uint32_t>(f));
  char buf[4];
  std::memcpy(buf, &bits, 4);
  out.write(buf, 4);
}

float read_f32(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  return std::bit_cast<float>(to_little_endian(bits));
}

PointCloud load_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path.string()));
  PointCloud cloud;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string token;
    double v[3];
    int n = 0;
    while (fields >> token) {
      if (n == 3) {
        throw Error(ErrorCode::parse, fmt::format("{}:{}: expected 3 values, got more", path.string(), line_no));
      }
      // strtod accepts "nan"/"inf" so they surface as non-finite rather than parse errors.
      char* end = nullptr;
      v[n] = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw Error(ErrorCode::parse, fmt::format("{}:{}: malformed number '{}'", path.string(), line_no, token));
      }
      ++n;
    }
    if (n != 3) {
      throw Error(ErrorCode::parse, fmt::format("{}:{}: expected 3 values, got {}", path.string(), line_no, n));
    }
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) {
      throw Error(ErrorCode::non_finite, fmt::format("{}:{}: non-finite coordinate", path.string(), line_no));
    }
    cloud.points.emplace_back(v[0], v[1], v[2]);
  }
  return cloud;
}

PointCloud load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path.string()));
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 12 != 0) {
    throw Error(ErrorCode::parse,
                fmt::format("{}: size {} is not a multiple of 12 bytes", path.string(), bytes.size()));
  }
  PointCloud cloud;
  const std::size_t n = bytes.size() / 12;
  cloud.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const char* p = bytes.data() + 12 * i;
    const double x = read_f32(p), y = read_f32(p + 4), z = read_f32(p + 8);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw Error(ErrorCode::non_finite, fmt::format("{}: non-finite coordinate at byte offset {}", path.string(), 12 * i));
    }
    cloud.points.emplace_back(x, y, z);
  }
  return cloud;
}

}  // namespace

CloudFormat format_for(const std::filesystem::path& path) {
  return path.extension() == ".p3b" ? CloudFormat::binary_f32 : CloudFormat::xyz_text;
}

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::io, fmt::format("no such file '{}'", path.string()));
  return format == CloudFormat::binary_f32 ? load_binary(path) : load_text(path);
}

PointCloud load_cloud(const std::filesystem::path& path) { return load_cloud(path, format_for(path)); }

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format) {
  std::ofstream out(path, format == CloudFormat::binary_f32 ? std::ios::binary : std::ios::out);
  if (!out) throw Error(ErrorCode::io, fmt::format("cannot write '{}'", path.string()));
  if (format == CloudFormat::binary_f32) {
    for (const auto& p : cloud.points) {
      write_f32(out, static_cast<float>(p.x()));
      write_f32(out, static_cast<float>(p.y()));
      write_f32(out, static_cast<float>(p.z()));
    }
  } else {
    for (const auto& p : cloud.points) out << fmt::format("{:.9g} {:.9g} {:.9g}\n", p.x(), p.y(), p.z());
  }
  if (!out) throw Error(ErrorCode::io, fmt::format("write failed for '{}'", path.string()));
}

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  save_cloud(cloud, path, format_for(path));
}

}  // namespace terra
