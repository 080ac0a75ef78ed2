#include "latlab/sampler.hpp"

#include <cmath>
#include <stdexcept>

#include "latlab/rng.hpp"

namespace latlab {

namespace {

// uniform residue mod p: stack counter words, truncate to bit length, reject.
// Acceptance is at least 1/2 per attempt, so the word count stays bounded.
mpz_class draw_mod(CounterRng& rng, const mpz_class& p, size_t bits) {
    const size_t words = (bits + 63) / 64;
    mpz_class r;
    for (;;) {
        r = 0;
        for (size_t w = 0; w < words; ++w) {
            mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), 64);
            r += mpz_class(static_cast<unsigned long>(rng.next_u64()));
        }
        mpz_tdiv_r_2exp(r.get_mpz_t(), r.get_mpz_t(), bits);
        if (r < p) return r;
    }
}

}  // namespace

IntVec sample_direction_mod_p(const SamplerConfig& cfg) {
    if (cfg.dim < 2) throw std::invalid_argument("sampler: dim >= 2");
    if (!is_prime(cfg.prime)) throw std::invalid_argument("sampler: prime is not prime");
    CounterRng rng(cfg.seed, cfg.trialIndex, Stream::HeckePoint);
    const size_t bits = mpz_sizeinbase(cfg.prime.get_mpz_t(), 2);
    IntVec a(cfg.dim);
    for (;;) {
        bool nonzero = false;
        for (auto& x : a) {
            x = draw_mod(rng, cfg.prime, bits);
            nonzero |= (x != 0);
        }
        if (nonzero) return a;  // a = 0 is resampled, never returned
    }
}

LatticeBasis sample_lattice(const SamplerConfig& cfg) {
    const IntVec a = sample_direction_mod_p(cfg);
    const int n = cfg.dim;
    const mpz_class& p = cfg.prime;

    int pivot = 0;
    while (a[pivot] == 0) ++pivot;
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), a[pivot].get_mpz_t(), p.get_mpz_t());

    // Row k (k != pivot) is e_k + c_k e_pivot with c_k = -a_k / a_pivot mod p,
    // so row . a == 0 mod p; the pivot row is p e_pivot. Determinant +-p by
    // triangularity, and index p forces the rows to generate the whole kernel.
    LatticeBasis basis;
    basis.dim = n;
    long exp2 = 0;
    const double mant = mpz_get_d_2exp(&exp2, p.get_mpz_t());
    basis.scale = std::exp(-(std::log(mant) + exp2 * 0.69314718055994530942) / n);
    basis.rows.assign(n, IntVec(n, mpz_class(0)));
    for (int k = 0; k < n; ++k) {
        if (k == pivot) {
            basis.rows[k][pivot] = p;
        } else {
            mpz_class c = a[k] * inv;
            mpz_mod(c.get_mpz_t(), c.get_mpz_t(), p.get_mpz_t());
            if (c != 0) c = p - c;
            basis.rows[k][k] = 1;
            basis.rows[k][pivot] = c;
        }
    }
    return basis;
}

std::vector<std::vector<double>> sample_sphere_directions(int n, int N, const SamplerConfig& cfg) {
    if (n < 2 || N < 1) throw std::invalid_argument("sample_sphere_directions domain");
    CounterRng rng(cfg.seed, cfg.trialIndex, Stream::SphereDir);
    std::vector<std::vector<double>> dirs(N, std::vector<double>(n));
    for (auto& u : dirs) {
        for (;;) {
            double ns = 0.0;
            for (auto& x : u) {
                x = rng.gaussian();
                ns += x * x;
            }
            if (ns > 1e-100) {  // underflow guard; hit with probability ~0
                const double inv = 1.0 / std::sqrt(ns);
                for (auto& x : u) x *= inv;
                break;
            }
        }
    }
    return dirs;
}

LimitLawSample sample_limit_law(int N, const SamplerConfig& cfg) {
    if (N < 1) throw std::invalid_argument("sample_limit_law: N >= 1");
    LimitLawSample out;
    CounterRng gaps(cfg.seed, cfg.trialIndex, Stream::LimitGap);
    out.points.resize(N);
    double t = 0.0;
    for (int j = 0; j < N; ++j) {
        t += gaps.exponential(2.0);  // intensity 1/2
        out.points[j] = t;
    }
    CounterRng ang(cfg.seed, cfg.trialIndex, Stream::LimitAngle);
    out.angles.assign(N, std::vector<double>(N, 0.0));
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) out.angles[i][j] = std::fabs(ang.gaussian());
    return out;
}

}  // namespace latlab
