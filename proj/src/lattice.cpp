#include "latlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latlab {

namespace {
const double kPi = 3.14159265358979323846264338327950288;

// log(|z|) for nonzero z of any size; mpz_get_d would overflow around 1e308
double log_mpz_abs(const mpz_class& z) {
    signed long exp2;
    const double d = mpz_get_d_2exp(&exp2, z.get_mpz_t());
    return std::log(std::fabs(d)) + static_cast<double>(exp2) * 0.6931471805599453094172321214581766;
}
}  // namespace

LatticeVector make_lattice_vector(IntVec v) {
    int firstNonzero = -1;
    for (size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) { firstNonzero = static_cast<int>(i); break; }
    if (firstNonzero < 0) throw std::invalid_argument("zero vector");
    if (v[firstNonzero] < 0)
        for (auto& x : v) x = -x;
    LatticeVector out;
    out.normSq = norm_sq(v);
    out.coeffs = std::move(v);
    return out;
}

double covolume(const LatticeBasis& basis) {
    const mpz_class d = det_bareiss(basis.rows);
    if (d == 0) throw std::runtime_error("degenerate basis");
    return std::exp(log_mpz_abs(d) + basis.dim * std::log(basis.scale));
}

double cos_sq_angle(const LatticeVector& v, const LatticeVector& w) {
    const mpz_class d = dot(v.coeffs, w.coeffs);
    if (v.normSq == 0 || w.normSq == 0) throw std::invalid_argument("zero vector");
    mpq_class q(d * d, v.normSq * w.normSq);
    q.canonicalize();
    return q.get_d();
}

double symmetrized_angle(const LatticeVector& v, const LatticeVector& w) {
    return std::acos(std::sqrt(cos_sq_angle(v, w)));
}

double scaled_angle(int n, double phi) {
    if (phi < 0.0 || phi > kPi / 2 + 1e-12) throw std::invalid_argument("phi outside [0, pi/2]");
    // clamp: phi may sit one ulp above pi/2 after acos, and the observable is >= 0
    return std::max(0.0, std::sqrt(static_cast<double>(n)) * (kPi / 2 - phi));
}

double ball_volume(int n, double ell) {
    if (n < 1 || ell <= 0.0) throw std::invalid_argument("ball_volume domain");
    const double logv = 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n + 1.0) + n * std::log(ell);
    return std::exp(logv);
}

}  // namespace latlab
