#pragma once

#include <gmpxx.h>
#include <vector>

namespace latlab {

using IntVec = std::vector<mpz_class>;
using IntMat = std::vector<IntVec>;

mpz_class dot(const IntVec& a, const IntVec& b);
mpz_class norm_sq(const IntVec& v);

// Exact determinant by fraction-free (Bareiss) elimination. Returns 0 for a
// singular matrix; never divides inexactly.
mpz_class det_bareiss(IntMat m);

// Canonical row-style Hermite normal form of the row span: upper triangular,
// positive diagonal, entries above each pivot reduced into [0, pivot).
// Two integer matrices span the same lattice iff their HNFs are equal.
// Requires full row rank (square input at call sites).
IntMat hnf(IntMat m);

int rank_of(const IntMat& m);

// Miller-Rabin with a fixed set of small prime bases: deterministic, and
// provably correct below 3.3 * 10^24; far beyond that the base set has no
// known pseudoprime. No randomness is consumed.
bool is_prime(const mpz_class& n);

// Incremental independence tester over Q, fraction-free. Rows are reduced
// against an echelon set; gcd-normalized to keep entries small.
class RankProbe {
public:
    // true iff v is independent of everything added so far (then v is absorbed)
    bool try_add(IntVec v);
    int rank() const { return static_cast<int>(rows_.size()); }

private:
    std::vector<IntVec> rows_;
    std::vector<int> pivot_;
};

}  // namespace latlab
