#pragma once

#include <filesystem>

#include "terra/cloud/point_cloud.hpp"

namespace terra {

enum class CloudFormat {
  xyz_text,    // whitespace-separated "x y z" per line, '#' comments
  binary_f32,  // little-endian f32 triples, 12 bytes per point, no header
};

/// Chooses the format from the extension: ".p3b" is binary, anything else text.
CloudFormat format_for(const std::filesystem::path& path);

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);
PointCloud load_cloud(const std::filesystem::path& path);
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format);
void save_cloud(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace terra
