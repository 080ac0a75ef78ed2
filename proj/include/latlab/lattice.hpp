#pragma once

#include <vector>

#include "latlab/exact.hpp"

namespace latlab {

// A unit-covolume lattice: integer rows (one basis vector per row) plus a real
// global scale. Actual basis vectors are scale * row_i, so determinants,
// norms, dot products and tie detection all stay exact on the integer side.
struct LatticeBasis {
    int dim = 0;
    IntMat rows;
    double scale = 1.0;
};

// One representative per +-pair: first nonzero coordinate positive, squared
// norm carried exactly. True length is scale * sqrt(normSq).
struct LatticeVector {
    IntVec coeffs;
    mpz_class normSq;
};

struct SpectrumResult {
    std::vector<double> lengths;                        // l_1 <= ... <= l_N
    std::vector<double> volumes;                        // ball volume at radius l_j
    std::vector<std::vector<double>> rawAngles;         // [i][j], i<j, in [0, pi/2]
    std::vector<std::vector<double>> scaledAngles;      // sqrt(n) * (pi/2 - raw)
    std::vector<double> successiveMinima;               // lambda_1..lambda_min(N,n)
    bool minimaCoincide = false;
    bool hasTies = false;
};

// throws std::invalid_argument on the zero vector
LatticeVector make_lattice_vector(IntVec v);

// |det(rows)| * scale^dim; determinant exact, only the final scaling in float.
// Throws std::runtime_error("degenerate basis") on singular rows.
double covolume(const LatticeBasis& basis);

// Exact rational cos^2 of the angle between v and w, rounded to double at the
// very end. Shared by the angle observable and the exact orthogonality tests.
double cos_sq_angle(const LatticeVector& v, const LatticeVector& w);

// arccos(sqrt((v.w)^2 / (|v|^2 |w|^2))), folded into [0, pi/2]
double symmetrized_angle(const LatticeVector& v, const LatticeVector& w);

// sqrt(n) * (pi/2 - phi)
double scaled_angle(int n, double phi);

// pi^(n/2) / Gamma(n/2 + 1) * ell^n, via log-gamma so large n cannot overflow
double ball_volume(int n, double ell);

}  // namespace latlab
