#include "nullwave/sampling.hpp"

#include <cmath>

namespace nullwave {

std::vector<Vec3> lattice_directions() {
  std::vector<Vec3> dirs;
  dirs.reserve(26);
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j)
      for (int k = -1; k <= 1; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        Vec3 v{double(i), double(j), double(k)};
        dirs.push_back(normalized(v));
      }
  return dirs;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    const double n = norm(v);
    if (n > 1e-12) return scale(v, 1.0 / n);
  }
}

std::vector<Vec3> unit_directions(std::size_t n_total, std::uint64_t seed) {
  std::vector<Vec3> dirs = lattice_directions();
  if (dirs.size() > n_total) {
    dirs.resize(n_total);
    return dirs;
  }
  std::mt19937_64 rng(seed);
  while (dirs.size() < n_total) dirs.push_back(random_unit(rng));
  return dirs;
}

}  // namespace nullwave
