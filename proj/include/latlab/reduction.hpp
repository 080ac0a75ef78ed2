#pragma once

#include <utility>
#include <vector>

#include "latlab/lattice.hpp"

namespace latlab {

// Floating Gram-Schmidt data for integer rows. Exact dot products feed the
// recurrences; only mu and the squared star norms are floating point.
struct GramSchmidtData {
    std::vector<std::vector<double>> mu;  // lower triangular
    std::vector<double> bStarNormSq;
};

GramSchmidtData gram_schmidt(const IntMat& rows);

// LLL with exact integer row operations and floating mu/B. Returns a basis of
// the same lattice (unimodular transform), size-reduced with |mu| <= 1/2 + 1e-9
// and satisfying the Lovasz condition for the given delta.
LatticeBasis lll_reduce(const LatticeBasis& basis, double delta = 0.99);

// The N shortest +-pairs, sorted by exact normSq with lexicographic
// tie-break on the canonical-sign coordinates. Completeness comes from
// depth-first enumeration with a doubling radius schedule and a final exact
// confirmation pass at the N-th smallest norm.
// Throws std::runtime_error("radius cap exceeded") past 2^20 nodes per level.
std::vector<LatticeVector> enumerate_shortest(const LatticeBasis& basis, int N);

// Every +-pair with true length (scale applied) at most radius, same order.
std::vector<LatticeVector> enumerate_within(const LatticeBasis& basis, double radius);

// lambda_1..lambda_N by greedy collection of exactly-independent vectors in
// increasing norm; flag is true iff the first N enumerated pairs are already
// linearly independent.
std::pair<std::vector<double>, bool> successive_minima(const LatticeBasis& basis, int N);

SpectrumResult spectrum(const LatticeBasis& basis, int N);

}  // namespace latlab
