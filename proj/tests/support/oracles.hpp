#pragma once

// Reference implementations for tests. Deliberately naive and independent of
// the library code paths they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

struct P3 {
  double x, y, z;
};

/// Ids of the k nearest points sorted by (squared distance, id).
inline std::vector<std::size_t> brute_knn(const std::vector<P3>& pts, const P3& q, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts[i].x - q.x, dy = pts[i].y - q.y, dz = pts[i].z - q.z;
    all.push_back({dx * dx + dy * dy + dz * dz, i});
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) ids.push_back(all[i].second);
  return ids;
}

/// Two-pass sample covariance (1/(n-1)).
inline Mat covariance(const std::vector<P3>& pts) {
  const double n = static_cast<double>(pts.size());
  double m[3] = {0, 0, 0};
  for (const auto& p : pts) {
    m[0] += p.x / n;
    m[1] += p.y / n;
    m[2] += p.z / n;
  }
  Mat c(3, std::vector<double>(3, 0.0));
  for (const auto& p : pts) {
    const double d[3] = {p.x - m[0], p.y - m[1], p.z - m[2]};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) c[a][b] += d[a] * d[b] / (n - 1.0);
  }
  return c;
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Mat a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(Mat a, std::vector<double> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    if (a[col][col] == 0.0) throw std::runtime_error("singular");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

/// Explicit inverse by Gauss-Jordan elimination.
inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

using V4 = std::array<double, 4>;

inline double se_kernel(double variance, const V4& ell, const V4& a, const V4& b) {
  double s = 0.0;
  for (int d = 0; d < 4; ++d) s += std::pow((a[d] - b[d]) / ell[d], 2);
  return variance * std::exp(-0.5 * s);
}

struct DenseSor {
  std::vector<double> mean, variance;
};

/// Subset-of-regressors prediction with an explicitly inverted Gram matrix.
inline DenseSor dense_sor(const std::vector<V4>& z, const std::vector<double>& targets, double target_mean,
                          const std::vector<V4>& test, double variance, const V4& ell, double noise,
                          double jitter) {
  const std::size_t m = z.size();
  Mat k(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) k[i][j] = se_kernel(variance, ell, z[i], z[j]) + (i == j ? noise + jitter : 0);
  const Mat kinv = inverse(k);
  DenseSor out;
  for (const auto& t : test) {
    std::vector<double> ks(m);
    for (std::size_t i = 0; i < m; ++i) ks[i] = se_kernel(variance, ell, t, z[i]);
    double mu = target_mean, q = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j) row += kinv[i][j] * targets[j];
      mu += ks[i] * row;
      for (std::size_t j = 0; j < m; ++j) q += ks[i] * kinv[i][j] * ks[j];
    }
    out.mean.push_back(mu);
    out.variance.push_back(std::max(0.0, variance + noise - q));
  }
  return out;
}

/// Voxel occupancy count via floor keys.
inline std::size_t voxel_count(const std::vector<P3>& pts, double v) {
  std::map<std::tuple<long, long, long>, int> cells;
  for (const auto& p : pts) {
    cells[{static_cast<long>(std::floor(p.x / v)), static_cast<long>(std::floor(p.y / v)),
           static_cast<long>(std::floor(p.z / v))}]++;
  }
  return cells.size();
}

struct ErrStats {
  double mean, var;
};

/// Straight loop over paired samples.
inline ErrStats abs_error_stats(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  const double mean = s / a.size();
  double v = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) v += (std::fabs(a[i] - b[i]) - mean) * (std::fabs(a[i] - b[i]) - mean);
  return {mean, v / a.size()};
}

}  // namespace oracle
