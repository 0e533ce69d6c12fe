#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mixcf/mixed_algebra.hpp"
#include "mixcf/sphere.hpp"

namespace testing {

inline mixcf::Matrix random_symmetric(std::mt19937_64& g, int n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  mixcf::Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = nd(g);
  return m;
}

inline std::vector<double> random_vector(std::mt19937_64& g, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

inline mixcf::Vec3 random_unit(std::mt19937_64& g) {
  std::normal_distribution<double> nd;
  mixcf::Vec3 v(nd(g), nd(g), nd(g));
  return v.normalized();
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace testing
