#include "latlab/exact.hpp"

#include <stdexcept>
#include <utility>

namespace latlab {

mpz_class dot(const IntVec& a, const IntVec& b) {
    mpz_class acc = 0;
    for (size_t i = 0; i < a.size(); ++i)
        mpz_addmul(acc.get_mpz_t(), a[i].get_mpz_t(), b[i].get_mpz_t());
    return acc;
}

mpz_class norm_sq(const IntVec& v) { return dot(v, v); }

mpz_class det_bareiss(IntMat m) {
    const size_t n = m.size();
    if (n == 0) return 1;
    mpz_class prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            size_t p = k + 1;
            while (p < n && m[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                mpz_class t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                // divides exactly by the previous pivot, a Bareiss invariant
                mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : mpz_class(-m[n - 1][n - 1]);
}

IntMat hnf(IntMat m) {
    const size_t rows = m.size();
    const size_t cols = rows ? m[0].size() : 0;
    size_t r = 0;  // next pivot row
    for (size_t c = 0; c < cols && r < rows; ++c) {
        // Euclid on the column: shrink until one nonzero entry remains below r
        for (;;) {
            size_t best = rows;
            for (size_t i = r; i < rows; ++i)
                if (m[i][c] != 0 && (best == rows || cmp(abs(m[i][c]), abs(m[best][c])) < 0))
                    best = i;
            if (best == rows) break;  // column is zero below r
            std::swap(m[r], m[best]);
            bool clean = true;
            for (size_t i = r + 1; i < rows; ++i) {
                if (m[i][c] == 0) continue;
                mpz_class q = m[i][c] / m[r][c];  // truncated division is fine here
                for (size_t j = 0; j < cols; ++j) m[i][j] -= q * m[r][j];
                if (m[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (r < rows && m[r][c] != 0) {
            if (m[r][c] < 0)
                for (size_t j = 0; j < cols; ++j) m[r][j] = -m[r][j];
            // reduce entries above the pivot into [0, pivot)
            for (size_t i = 0; i < r; ++i) {
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), m[i][c].get_mpz_t(), m[r][c].get_mpz_t());
                if (q != 0)
                    for (size_t j = 0; j < cols; ++j) m[i][j] -= q * m[r][j];
            }
            ++r;
        }
    }
    m.resize(r);  // drop zero rows so equal spans compare equal
    return m;
}

int rank_of(const IntMat& m) {
    RankProbe probe;
    for (const auto& row : m) probe.try_add(row);
    return probe.rank();
}

namespace {
void gcd_normalize(IntVec& v) {
    mpz_class g = 0;
    for (const auto& x : v) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) return;
    }
    if (g > 1)
        for (auto& x : v) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}
}  // namespace

bool RankProbe::try_add(IntVec v) {
    for (size_t k = 0; k < rows_.size(); ++k) {
        const int c = pivot_[k];
        if (v[c] == 0) continue;
        // cross-multiply elimination keeps everything integral
        mpz_class a = rows_[k][c], b = v[c];
        for (size_t j = 0; j < v.size(); ++j) v[j] = v[j] * a - rows_[k][j] * b;
        gcd_normalize(v);
    }
    int piv = -1;
    for (size_t j = 0; j < v.size(); ++j)
        if (v[j] != 0) { piv = static_cast<int>(j); break; }
    if (piv < 0) return false;
    // keep echelon rows ordered by pivot column
    size_t pos = 0;
    while (pos < rows_.size() && pivot_[pos] < piv) ++pos;
    rows_.insert(rows_.begin() + pos, std::move(v));
    pivot_.insert(pivot_.begin() + pos, piv);
    return true;
}

bool is_prime(const mpz_class& n) {
    static const unsigned long bases[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                          43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    if (n < 2) return false;
    for (unsigned long b : bases) {
        if (n == b) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), b)) return false;
    }
    // n - 1 = d * 2^s with d odd
    mpz_class d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
    mpz_class x, nm1 = n - 1;
    for (unsigned long b : bases) {
        mpz_class base(b);
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == nm1) continue;
        bool witness = true;
        for (unsigned long r = 1; r < s; ++r) {
            mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
            if (x == nm1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

}  // namespace latlab
