#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nullwave/tensors.hpp"

namespace nullwave {

/// The 26 lattice directions {-1,0,1}^3 \ {0}, normalized. Deterministic and
/// axis-rich, so axis-aligned degeneracies are always probed.
std::vector<Vec3> lattice_directions();

/// `n_total` unit vectors: the 26 lattice directions followed by isotropic
/// seeded draws. Deterministic for a fixed seed.
std::vector<Vec3> unit_directions(std::size_t n_total, std::uint64_t seed);

/// Isotropic random unit vector from an already-seeded engine.
Vec3 random_unit(std::mt19937_64& rng);

}  // namespace nullwave
