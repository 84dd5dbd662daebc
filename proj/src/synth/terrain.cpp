#include "terra/synth/terrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "terra/cloud/kdtree.hpp"
#include "terra/common/error.hpp"
#include "terra/common/rng.hpp"
#include "terra/features/features.hpp"
#include "terra/sgp/sgp.hpp"

namespace terra {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kWallNoise = 0.02;  // meters, radial scatter on obstacle surfaces
}  // namespace

std::string_view to_string(TerrainKind kind) {
  switch (kind) {
    case TerrainKind::hilly: return "hilly";
    case TerrainKind::forest: return "forest";
    case TerrainKind::ruin: return "ruin";
  }
  return "?";
}

TerrainKind parse_terrain_kind(std::string_view name) {
  if (name == "hilly") return TerrainKind::hilly;
  if (name == "forest") return TerrainKind::forest;
  if (name == "ruin") return TerrainKind::ruin;
  throw Error(ErrorCode::invalid_argument,
              fmt::format("unknown terrain kind '{}' (valid kinds: hilly, forest, ruin)", name));
}

void TerrainSpec::validate() const {
  if (!(extent > 0.0)) throw Error(ErrorCode::config, "terrain.extent: must be > 0");
  if (!(point_density > 0.0)) throw Error(ErrorCode::config, "terrain.point_density: must be > 0");
  if (!(obstacle_density >= 0.0)) throw Error(ErrorCode::config, "terrain.obstacle_density: must be >= 0");
  if (!(hill_amplitude >= 0.0)) throw Error(ErrorCode::config, "terrain.hill_amplitude: must be >= 0");
  if (!(hill_wavelength > 0.0)) throw Error(ErrorCode::config, "terrain.hill_wavelength: must be > 0");
  if (!(surface_noise >= 0.0)) throw Error(ErrorCode::config, "terrain.surface_noise: must be >= 0");
  if (!(resolution > 0.0)) throw Error(ErrorCode::config, "terrain.resolution: must be > 0");
}

HeightField::HeightField(const TerrainSpec& spec) {
  Rng rng(mix_seed(spec.seed, 0x4849ULL));
  const int n = 4 + static_cast<int>(uniform_index(rng, 5));
  // Wavelengths fall geometrically from W to W/4; amplitude proportional to
  // wavelength gives every octave the same peak slope.
  std::vector<double> wavelengths(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int o = 0; o < n; ++o) {
    wavelengths[static_cast<std::size_t>(o)] = spec.hill_wavelength * std::pow(4.0, -double(o) / (n - 1));
    total += wavelengths[static_cast<std::size_t>(o)];
  }
  for (double lambda : wavelengths) {
    const double dir = uniform(rng, 0.0, kTwoPi);
    const double k = kTwoPi / lambda;
    waves_.push_back({spec.hill_amplitude * lambda / total, k * std::cos(dir), k * std::sin(dir),
                      uniform(rng, 0.0, kTwoPi)});
  }
}

double HeightField::operator()(double x, double y) const {
  double h = 0.0;
  for (const auto& w : waves_) h += w.amplitude * std::sin(w.kx * x + w.ky * y + w.phase);
  return h;
}

namespace {

bool inside(const Obstacle& o, double x, double y) {
  const double dx = x - o.x, dy = y - o.y;
  if (o.shape == Obstacle::Shape::box) return std::abs(dx) <= o.size_x && std::abs(dy) <= o.size_y;
  return dx * dx + dy * dy <= o.size_x * o.size_x;
}

Obstacle random_obstacle(Rng& rng, Obstacle::Shape shape, double extent) {
  Obstacle o{shape, uniform(rng, 1.0, extent - 1.0), uniform(rng, 1.0, extent - 1.0), 0, 0, 0};
  switch (shape) {
    case Obstacle::Shape::tree:
      o.size_x = o.size_y = uniform(rng, 0.15, 0.4);
      o.height = uniform(rng, 1.5, 4.0);
      break;
    case Obstacle::Shape::box:
      o.size_x = 0.5 * uniform(rng, 0.5, 2.0);
      o.size_y = 0.5 * uniform(rng, 0.5, 2.0);
      o.height = uniform(rng, 0.3, 1.5);
      break;
    case Obstacle::Shape::cylinder:
      o.size_x = o.size_y = uniform(rng, 0.3, 0.8);
      o.height = uniform(rng, 0.3, 1.5);
      break;
  }
  return o;
}

// Samples the obstacle's visible surfaces at the given areal density.
void sample_obstacle(const Obstacle& o, const HeightField& ground, double density, Rng& rng,
                     std::vector<Point3>& out) {
  const double top = ground(o.x, o.y) + o.height;
  auto wall_point = [&](double x, double y, double nx, double ny) {
    const double base = ground(x, y);
    if (top <= base) return;
    const double z = uniform(rng, base, top);
    const double r = kWallNoise * normal01(rng);
    out.emplace_back(x + r * nx, y + r * ny, z);
  };
  if (o.shape == Obstacle::Shape::box) {
    const double perimeter = 4.0 * (o.size_x + o.size_y);
    const auto n_wall = static_cast<std::size_t>(density * perimeter * o.height);
    for (std::size_t i = 0; i < n_wall; ++i) {
      double s = uniform(rng, 0.0, perimeter);
      const double wx = 2.0 * o.size_x, wy = 2.0 * o.size_y;
      if (s < wx) {
        wall_point(o.x - o.size_x + s, o.y - o.size_y, 0.0, -1.0);
      } else if ((s -= wx) < wy) {
        wall_point(o.x + o.size_x, o.y - o.size_y + s, 1.0, 0.0);
      } else if ((s -= wy) < wx) {
        wall_point(o.x + o.size_x - s, o.y + o.size_y, 0.0, 1.0);
      } else {
        s -= wx;
        wall_point(o.x - o.size_x, o.y + o.size_y - s, -1.0, 0.0);
      }
    }
    const auto n_top = static_cast<std::size_t>(density * 4.0 * o.size_x * o.size_y);
    for (std::size_t i = 0; i < n_top; ++i) {
      out.emplace_back(o.x + uniform(rng, -o.size_x, o.size_x), o.y + uniform(rng, -o.size_y, o.size_y), top);
    }
    return;
  }
  const double r = o.size_x;
  const auto n_wall = static_cast<std::size_t>(density * kTwoPi * r * o.height);
  for (std::size_t i = 0; i < n_wall; ++i) {
    const double a = uniform(rng, 0.0, kTwoPi);
    wall_point(o.x + r * std::cos(a), o.y + r * std::sin(a), std::cos(a), std::sin(a));
  }
  if (o.shape == Obstacle::Shape::cylinder) {
    const auto n_top = static_cast<std::size_t>(density * std::numbers::pi * r * r);
    for (std::size_t i = 0; i < n_top; ++i) {
      const double rr = r * std::sqrt(uniform01(rng));
      const double a = uniform(rng, 0.0, kTwoPi);
      out.emplace_back(o.x + rr * std::cos(a), o.y + rr * std::sin(a), top);
    }
  }
}

}  // namespace

Terrain generate_terrain(const TerrainSpec& spec, const OracleParams& oracle) {
  spec.validate();
  const HeightField ground(spec);
  Rng rng(mix_seed(spec.seed, 0x5445ULL));

  Terrain terrain;
  auto& obstacles = terrain.truth.obstacles;
  const double area = spec.extent * spec.extent;
  if (spec.kind == TerrainKind::forest) {
    const int n = poisson(rng, spec.obstacle_density * area);
    for (int i = 0; i < n; ++i) obstacles.push_back(random_obstacle(rng, Obstacle::Shape::tree, spec.extent));
  } else if (spec.kind == TerrainKind::ruin) {
    const int trees = poisson(rng, 0.5 * spec.obstacle_density * area);
    const int structures = poisson(rng, 0.5 * spec.obstacle_density * area);
    for (int i = 0; i < trees; ++i) obstacles.push_back(random_obstacle(rng, Obstacle::Shape::tree, spec.extent));
    for (int i = 0; i < structures; ++i) {
      const auto shape = uniform01(rng) < 0.5 ? Obstacle::Shape::box : Obstacle::Shape::cylinder;
      obstacles.push_back(random_obstacle(rng, shape, spec.extent));
    }
  }

  // Jittered-grid ground samples, skipping obstacle footprints.
  auto& points = terrain.cloud.points;
  const double step = 1.0 / std::sqrt(spec.point_density);
  const auto n_side = static_cast<int>(std::ceil(spec.extent / step));
  for (int j = 0; j < n_side; ++j) {
    for (int i = 0; i < n_side; ++i) {
      const double x = std::min(spec.extent, (i + uniform01(rng)) * step);
      const double y = std::min(spec.extent, (j + uniform01(rng)) * step);
      bool covered = false;
      for (const auto& o : obstacles) covered = covered || inside(o, x, y);
      if (!covered) points.emplace_back(x, y, ground(x, y));
    }
  }
  for (const auto& o : obstacles) sample_obstacle(o, ground, spec.point_density, rng, points);
  if (spec.surface_noise > 0.0) {
    Rng noise(mix_seed(spec.seed, 0x4e5aULL));
    for (auto& p : points) p.z() += spec.surface_noise * normal01(noise);
  }
  terrain.cloud.frame_id = "world";

  auto& truth = terrain.truth;
  truth.spec = spec;
  truth.geometry = square_grid(0.0, 0.0, spec.extent, spec.resolution);
  truth.oracle = ground_truth_map(terrain.cloud, truth.geometry, oracle, terrain_surface(spec, obstacles),
                                  &truth.height);
  return terrain;
}

SurfaceFn terrain_surface(const TerrainSpec& spec, const std::vector<Obstacle>& obstacles) {
  return [ground = HeightField(spec), obstacles](double x, double y) {
    double h = ground(x, y);
    for (const auto& o : obstacles) {
      if (inside(o, x, y)) h = std::max(h, ground(o.x, o.y) + o.height);
    }
    return h;
  };
}

TravGrid ground_truth_map(const PointCloud& cloud, const GridGeometry& g, const OracleParams& params,
                          const SurfaceFn& surface, std::vector<double>* height_out) {
  params.fusion.validate();
  if (cloud.empty()) throw Error(ErrorCode::empty_cloud, "ground truth needs a non-empty cloud");
  const SpatialIndex index = build_index(cloud);
  const auto feats = compute_point_features(cloud, index, params.k, params.eps);

  const std::size_t n = g.size();
  std::vector<double> z(n, 0.0), kappa(n, 0.0), grad(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    const auto cell = g.cell_of(p.x(), p.y());
    if (!cell) continue;
    const std::size_t c = g.index(cell->first, cell->second);
    z[c] += p.z();
    kappa[c] += feats[i].kappa;
    grad[c] += feats[i].grad;
    ++count[c];
  }
  std::optional<PlanarIndex> planar;
  for (int iy = 0; iy < g.ny; ++iy) {
    for (int ix = 0; ix < g.nx; ++ix) {
      const std::size_t c = g.index(ix, iy);
      if (count[c] > 0) {
        const double m = static_cast<double>(count[c]);
        z[c] /= m;
        kappa[c] /= m;
        grad[c] /= m;
      } else {
        if (!planar) planar.emplace(build_planar_index(cloud.points));
        const auto nn = planar->knn({g.center_x(ix), g.center_y(iy)}, 1).front().id;
        z[c] = cloud.points[nn].z();
        kappa[c] = feats[nn].kappa;
        grad[c] = feats[nn].grad;
      }
      if (surface) z[c] = surface(g.center_x(ix), g.center_y(iy));
    }
  }
  const auto slope = slope_field(z, g);
  TravGrid out(g);
  for (std::size_t c = 0; c < n; ++c) {
    out.cells[c] = {preliminary_score(kappa[c], grad[c], slope[c], params.fusion), 0.0, 0.0, true};
  }
  if (height_out) *height_out = std::move(z);
  return out;
}

std::vector<Pose> make_trajectory(const TerrainSpec& spec, std::size_t n_poses, double dt) {
  if (n_poses < 2) throw Error(ErrorCode::invalid_argument, "trajectory needs at least 2 poses");
  const double lo = std::min(1.0, 0.25 * spec.extent);
  const double hi = spec.extent - lo;
  // Lanes roughly 10 m apart, odd count so the sweep ends at the opposite corner.
  int lanes = static_cast<int>(std::ceil((hi - lo) / 10.0)) + 1;
  if (lanes % 2 == 0) ++lanes;
  std::vector<std::array<double, 2>> vertices;
  for (int l = 0; l < lanes; ++l) {
    const double y = lo + (hi - lo) * l / (lanes - 1);
    if (l % 2 == 0) {
      vertices.push_back({lo, y});
      vertices.push_back({hi, y});
    } else {
      vertices.push_back({hi, y});
      vertices.push_back({lo, y});
    }
  }
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    cumulative.push_back(cumulative.back() + std::hypot(vertices[i][0] - vertices[i - 1][0],
                                                        vertices[i][1] - vertices[i - 1][1]));
  }
  const double length = cumulative.back();
  std::vector<Pose> poses;
  std::size_t seg = 1;
  for (std::size_t i = 0; i < n_poses; ++i) {
    const double s = length * static_cast<double>(i) / static_cast<double>(n_poses - 1);
    while (seg + 1 < vertices.size() && cumulative[seg] < s) ++seg;
    const auto& a = vertices[seg - 1];
    const auto& b = vertices[seg];
    const double seg_len = cumulative[seg] - cumulative[seg - 1];
    const double u = seg_len > 0.0 ? std::clamp((s - cumulative[seg - 1]) / seg_len, 0.0, 1.0) : 0.0;
    Pose p;
    p.x = a[0] + u * (b[0] - a[0]);
    p.y = a[1] + u * (b[1] - a[1]);
    p.heading = std::atan2(b[1] - a[1], b[0] - a[0]);
    p.t = dt * static_cast<double>(i);
    poses.push_back(p);
  }
  // Exact endpoints regardless of rounding in the arc-length walk.
  poses.front().x = vertices.front()[0];
  poses.front().y = vertices.front()[1];
  poses.back().x = vertices.back()[0];
  poses.back().y = vertices.back()[1];
  return poses;
}

}  // namespace terra
