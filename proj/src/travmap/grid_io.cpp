#include "terra/travmap/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "terra/common/error.hpp"

namespace terra {

namespace {

std::uint32_t le32(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

std::string next_line(std::istream& in, const std::filesystem::path& path, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse, fmt::format("{}: missing {}", path.string(), what));
  return line;
}

}  // namespace

const std::vector<float>* LayeredGrid::find(const std::string& name) const {
  for (const auto& [n, v] : layers) {
    if (n == name) return &v;
  }
  return nullptr;
}

void LayeredGrid::add(std::string name, std::vector<float> values) {
  if (values.size() != geometry.size()) throw Error(ErrorCode::dimension_mismatch, "layer size does not match grid");
  layers.emplace_back(std::move(name), std::move(values));
}

void write_tgrid(const LayeredGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, fmt::format("cannot write '{}'", path.string()));
  const auto& g = grid.geometry;
  out << fmt::format("{:.17g} {:.17g}\n{:.17g}\n{} {}\n", g.origin_x, g.origin_y, g.resolution, g.nx, g.ny);
  for (const auto& [name, values] : grid.layers) {
    out << "layer " << name << '\n';
    for (float f : values) {
      const std::uint32_t bits = le32(std::bit_cast<std::uint32_t>(f));
      out.write(reinterpret_cast<const char*>(&bits), 4);
    }
  }
  if (!out) throw Error(ErrorCode::io, fmt::format("write failed for '{}'", path.string()));
}

LayeredGrid read_tgrid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path.string()));
  LayeredGrid grid;
  auto& g = grid.geometry;
  {
    std::istringstream a(next_line(in, path, "origin line"));
    std::istringstream b(next_line(in, path, "resolution line"));
    std::istringstream c(next_line(in, path, "size line"));
    if (!(a >> g.origin_x >> g.origin_y) || !(b >> g.resolution) || !(c >> g.nx >> g.ny) || g.nx < 0 || g.ny < 0) {
      throw Error(ErrorCode::parse, fmt::format("{}: malformed header", path.string()));
    }
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("layer ", 0) != 0) {
      throw Error(ErrorCode::parse, fmt::format("{}: expected 'layer <name>', got '{}'", path.string(), line));
    }
    std::vector<float> values(g.size());
    for (auto& v : values) {
      std::uint32_t bits;
      if (!in.read(reinterpret_cast<char*>(&bits), 4)) {
        throw Error(ErrorCode::parse, fmt::format("{}: truncated layer '{}'", path.string(), line.substr(6)));
      }
      v = std::bit_cast<float>(le32(bits));
    }
    grid.layers.emplace_back(line.substr(6), std::move(values));
  }
  return grid;
}

LayeredGrid to_layers(const TravGrid& grid) {
  LayeredGrid out;
  out.geometry = grid.geometry;
  const std::size_t n = grid.cells.size();
  std::vector<float> score(n), variance(n), timestamp(n), observed(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = grid.cells[i];
    score[i] = c.observed ? static_cast<float>(c.score) : std::numeric_limits<float>::quiet_NaN();
    variance[i] = static_cast<float>(c.variance);
    timestamp[i] = static_cast<float>(c.timestamp);
    observed[i] = c.observed ? 1.0f : 0.0f;
  }
  out.add("score", std::move(score));
  out.add("variance", std::move(variance));
  out.add("timestamp", std::move(timestamp));
  out.add("observed", std::move(observed));
  return out;
}

TravGrid from_layers(const LayeredGrid& layers) {
  TravGrid grid(layers.geometry);
  const auto* score = layers.find("score");
  const auto* observed = layers.find("observed");
  if (!score) throw Error(ErrorCode::missing_layer, "grid has no 'score' layer");
  if (!observed) throw Error(ErrorCode::missing_layer, "grid has no 'observed' layer");
  const auto* variance = layers.find("variance");
  const auto* timestamp = layers.find("timestamp");
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    auto& c = grid.cells[i];
    c.observed = (*observed)[i] != 0.0f;
    c.score = c.observed ? (*score)[i] : std::numeric_limits<double>::quiet_NaN();
    c.variance = variance ? (*variance)[i] : 0.0;
    c.timestamp = timestamp ? (*timestamp)[i] : 0.0;
  }
  return grid;
}

LayeredGrid to_layers(const Prediction& pred, const TestGrid& grid) {
  LayeredGrid out;
  out.geometry = pred.geometry;
  auto as_float = [](const std::vector<double>& v) { return std::vector<float>(v.begin(), v.end()); };
  out.add("mean", as_float(pred.mean));
  out.add("variance", as_float(pred.variance));
  out.add("slope", as_float(pred.slope));
  out.add("kappa", as_float(grid.kappa));
  out.add("grad", as_float(grid.grad));
  return out;
}

void write_pgm16(const std::vector<float>& values, const std::vector<std::uint8_t>& mask, const GridGeometry& g,
                 const PgmExport& range, const std::filesystem::path& path) {
  if (values.size() != g.size() || mask.size() != g.size()) {
    throw Error(ErrorCode::dimension_mismatch, "PGM export input does not match grid size");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, fmt::format("cannot write '{}'", path.string()));
  out << fmt::format("P5\n# range {:.17g} {:.17g}\n{} {}\n65535\n", range.lo, range.hi, g.nx, g.ny);
  std::filesystem::path mask_path = path;
  mask_path.replace_extension(".mask.pgm");
  std::ofstream mask_out(mask_path, std::ios::binary);
  if (!mask_out) throw Error(ErrorCode::io, fmt::format("cannot write '{}'", mask_path.string()));
  mask_out << fmt::format("P5\n{} {}\n255\n", g.nx, g.ny);

  const double span = range.hi - range.lo;
  // Image rows run top (max y) to bottom.
  for (int iy = g.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t c = g.index(ix, iy);
      std::uint16_t px = 32768;
      if (mask[c]) {
        const double u = span > 0.0 ? std::clamp((values[c] - range.lo) / span, 0.0, 1.0) : 0.0;
        px = static_cast<std::uint16_t>(std::lround((1.0 - u) * 65535.0));
      }
      const char bytes[2] = {static_cast<char>(px >> 8), static_cast<char>(px & 0xff)};
      out.write(bytes, 2);
      mask_out.put(mask[c] ? static_cast<char>(255) : static_cast<char>(0));
    }
  }
  if (!out || !mask_out) throw Error(ErrorCode::io, fmt::format("write failed for '{}'", path.string()));
}

PgmImage read_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open '{}'", path.string()));
  PgmImage img;
  std::string magic = next_line(in, path, "magic");
  if (magic != "P5") throw Error(ErrorCode::parse, fmt::format("{}: not a binary PGM", path.string()));
  std::string line = next_line(in, path, "header");
  while (!line.empty() && line[0] == '#') {
    std::istringstream c(line.substr(1));
    std::string key;
    if (c >> key && key == "range") c >> img.range.lo >> img.range.hi;
    line = next_line(in, path, "header");
  }
  std::istringstream dims(line);
  int maxval = 0;
  if (!(dims >> img.width >> img.height)) throw Error(ErrorCode::parse, fmt::format("{}: bad size", path.string()));
  std::istringstream mv(next_line(in, path, "maxval"));
  if (!(mv >> maxval) || maxval != 65535) throw Error(ErrorCode::parse, fmt::format("{}: expected 16-bit PGM", path.string()));
  img.pixels.resize(static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height));
  for (auto& px : img.pixels) {
    unsigned char b[2];
    if (!in.read(reinterpret_cast<char*>(b), 2)) throw Error(ErrorCode::parse, fmt::format("{}: truncated", path.string()));
    px = static_cast<std::uint16_t>((b[0] << 8) | b[1]);
  }
  return img;
}

std::vector<float> decode_pgm16(const PgmImage& image) {
  std::vector<float> out(image.pixels.size());
  const double span = image.range.hi - image.range.lo;
  for (int row = 0; row < image.height; ++row) {
    const int iy = image.height - 1 - row;
    for (int ix = 0; ix < image.width; ++ix) {
      const std::uint16_t px = image.pixels[static_cast<std::size_t>(row * image.width + ix)];
      out[static_cast<std::size_t>(iy * image.width + ix)] =
          static_cast<float>(image.range.lo + (1.0 - px / 65535.0) * span);
    }
  }
  return out;
}

}  // namespace terra
