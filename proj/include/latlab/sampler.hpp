#pragma once

#include <cstdint>
#include <vector>

#include "latlab/lattice.hpp"

namespace latlab {

// smallest prime >= 10^6
inline constexpr unsigned long kDefaultPrime = 1000003;

struct SamplerConfig {
    int dim = 2;
    mpz_class prime = mpz_class(kDefaultPrime);  // any size; big primes shrink the finite-p bias
    uint64_t seed = 1;
    uint64_t trialIndex = 0;
};

// One draw from the limiting process: points of a Poisson(1/2) process in
// increasing order plus independent half-normal angles for every pair.
struct LimitLawSample {
    std::vector<double> points;
    std::vector<std::vector<double>> angles;  // [i][j], i < j
};

// Uniform nonzero direction a in (Z/pZ)^n for this (seed, trialIndex)
IntVec sample_direction_mod_p(const SamplerConfig& cfg);

// Basis of the index-p sublattice { v in Z^n : v . a == 0 mod p } in
// triangular form, scale p^{-1/n}; |det| = p exactly, covolume 1.
// Lattices of this family equidistribute toward the invariant measure on the
// space of unit-covolume lattices as p grows.
LatticeBasis sample_lattice(const SamplerConfig& cfg);

// N iid uniform directions on the unit sphere of R^n (Gaussian, normalized)
std::vector<std::vector<double>> sample_sphere_directions(int n, int N, const SamplerConfig& cfg);

LimitLawSample sample_limit_law(int N, const SamplerConfig& cfg);

}  // namespace latlab
