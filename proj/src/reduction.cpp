#include "latlab/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latlab {

namespace {
const double kPi = 3.14159265358979323846264338327950288;
constexpr long kNodeCapPerLevel = 1 << 20;

double dot_d(const IntVec& a, const IntVec& b) { return dot(a, b).get_d(); }
}  // namespace

GramSchmidtData gram_schmidt(const IntMat& rows) {
    const int n = static_cast<int>(rows.size());
    GramSchmidtData gs;
    gs.mu.assign(n, std::vector<double>(n, 0.0));
    gs.bStarNormSq.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < k; ++j) {
            double t = dot_d(rows[k], rows[j]);
            for (int i = 0; i < j; ++i) t -= gs.mu[j][i] * gs.mu[k][i] * gs.bStarNormSq[i];
            gs.mu[k][j] = t / gs.bStarNormSq[j];
        }
        double b = dot_d(rows[k], rows[k]);
        for (int j = 0; j < k; ++j) b -= gs.mu[k][j] * gs.mu[k][j] * gs.bStarNormSq[j];
        if (!(b > 0.0)) throw std::runtime_error("degenerate basis");
        gs.bStarNormSq[k] = b;
    }
    return gs;
}

namespace {

// The classic incremental LLL loop, parameterized over the floating type that
// carries mu and the star norms. Doubles are fine while exact dot products fit
// comfortably below 53 bits; past that the huge-entry column of a fresh
// kernel basis cancels catastrophically, so a second instantiation runs on
// mpf_class with enough mantissa to represent every dot product exactly.
template <class F>
struct FloatOps;

template <>
struct FloatOps<double> {
    static double zero(unsigned long) { return 0.0; }
    static double from_mpz(const mpz_class& z, unsigned long) { return z.get_d(); }
    static mpz_class round_int(double x) { return mpz_class(static_cast<long>(std::llround(x))); }
    static double abs(double x) { return std::fabs(x); }
};

template <>
struct FloatOps<mpf_class> {
    static mpf_class zero(unsigned long prec) { return mpf_class(0, prec); }
    static mpf_class from_mpz(const mpz_class& z, unsigned long prec) { return mpf_class(z, prec); }
    static mpz_class round_int(const mpf_class& x) {
        mpf_class t(x + 0.5);
        mpf_floor(t.get_mpf_t(), t.get_mpf_t());
        mpz_class z;
        mpz_set_f(z.get_mpz_t(), t.get_mpf_t());
        return z;
    }
    static mpf_class abs(const mpf_class& x) { return ::abs(x); }
};

template <class F>
struct LllState {
    using Ops = FloatOps<F>;
    IntMat b;
    std::vector<std::vector<F>> mu;
    std::vector<F> B;
    int n = 0;
    unsigned long prec = 0;

    explicit LllState(IntMat rows, unsigned long precBits) : b(std::move(rows)), prec(precBits) {
        n = static_cast<int>(b.size());
        mu.assign(n, std::vector<F>(n, Ops::zero(prec)));
        B.assign(n, Ops::zero(prec));
    }

    F dot_f(const IntVec& u, const IntVec& v) const { return Ops::from_mpz(dot(u, v), prec); }

    void size_reduce(int k, int l) {
        if (Ops::abs(mu[k][l]) <= 0.5) return;
        const mpz_class q = Ops::round_int(mu[k][l]);
        for (int t = 0; t < n; ++t)
            mpz_submul(b[k][t].get_mpz_t(), q.get_mpz_t(), b[l][t].get_mpz_t());
        const F qf = Ops::from_mpz(q, prec);
        mu[k][l] -= qf;
        for (int i = 0; i < l; ++i) mu[k][i] -= qf * mu[l][i];
    }

    void gs_row(int k) {
        for (int j = 0; j < k; ++j) {
            F t = dot_f(b[k], b[j]);
            for (int i = 0; i < j; ++i) t -= mu[j][i] * mu[k][i] * B[i];
            mu[k][j] = t / B[j];
        }
        F v = dot_f(b[k], b[k]);
        for (int j = 0; j < k; ++j) v -= mu[k][j] * mu[k][j] * B[j];
        if (!(v > 0)) throw std::runtime_error("degenerate basis");
        B[k] = v;
    }

    void swap_rows(int k, int kmax) {
        std::swap(b[k], b[k - 1]);
        for (int j = 0; j + 1 < k; ++j) std::swap(mu[k][j], mu[k - 1][j]);
        const F muv = mu[k][k - 1];
        const F Bnew = B[k] + muv * muv * B[k - 1];
        mu[k][k - 1] = muv * B[k - 1] / Bnew;
        B[k] = B[k - 1] * B[k] / Bnew;
        B[k - 1] = Bnew;
        for (int i = k + 1; i <= kmax; ++i) {
            const F t = mu[i][k];
            mu[i][k] = mu[i][k - 1] - muv * t;
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
        }
    }
};

// One full pass of the floating LLL loop. Returns true if it hit the
// iteration guard (caller then recomputes GS exactly and retries).
template <class F>
bool lll_pass(LllState<F>& st, double delta) {
    const int n = st.n;
    if (n <= 1) return false;
    int k = 1, kmax = 0;
    st.B[0] = st.dot_f(st.b[0], st.b[0]);
    long iterations = 0;
    const long guard = 200000L * n;
    while (k < n) {
        if (++iterations > guard) return true;
        if (k > kmax) {
            kmax = k;
            st.gs_row(k);
        }
        st.size_reduce(k, k - 1);
        if (st.B[k] < (delta - st.mu[k][k - 1] * st.mu[k][k - 1]) * st.B[k - 1]) {
            st.swap_rows(k, kmax);
            k = std::max(k - 1, 1);
        } else {
            for (int l = k - 2; l >= 0; --l) st.size_reduce(k, l);
            ++k;
        }
    }
    return false;
}

template <class F>
void refresh_exact(LllState<F>& st) {
    for (int k = 0; k < st.n; ++k) st.gs_row(k);
}

template <class F>
bool is_reduced(const LllState<F>& st, double delta, double slack) {
    using Ops = FloatOps<F>;
    for (int k = 1; k < st.n; ++k) {
        for (int l = 0; l < k; ++l)
            if (Ops::abs(st.mu[k][l]) > 0.5 + slack) return false;
        if (st.B[k] <
            (delta - st.mu[k][k - 1] * st.mu[k][k - 1]) * st.B[k - 1] - 1e-9 * st.B[k - 1])
            return false;
    }
    return true;
}

size_t max_entry_bits(const IntMat& rows) {
    size_t bits = 1;
    for (const auto& row : rows)
        for (const auto& e : row)
            if (e != 0) bits = std::max(bits, mpz_sizeinbase(e.get_mpz_t(), 2));
    return bits;
}

// Run passes until a fresh exact-dot Gram-Schmidt confirms the conditions;
// drift in the incrementally updated mu/B cannot leak into the result.
template <class F>
bool lll_run(IntMat& rows, double delta, unsigned long prec) {
    LllState<F> st(std::move(rows), prec);
    for (int round = 0; round < 8; ++round) {
        lll_pass(st, delta);
        refresh_exact(st);
        if (is_reduced(st, delta, 1e-9)) {
            rows = std::move(st.b);
            return true;
        }
    }
    rows = std::move(st.b);
    return false;
}

}  // namespace

LatticeBasis lll_reduce(const LatticeBasis& basis, double delta) {
    if (delta <= 0.25 || delta >= 1.0) throw std::invalid_argument("lll_reduce: delta in (1/4, 1)");
    IntMat rows = basis.rows;
    const size_t bits = max_entry_bits(rows);
    bool done = false;
    if (bits <= 20) {
        // dot products stay far below 53 bits, doubles cannot misbehave
        try {
            done = lll_run<double>(rows, delta, 0);
        } catch (const std::runtime_error&) {
            rows = basis.rows;  // retried below at full precision
        }
    }
    if (!done) {
        const unsigned long prec = 2 * static_cast<unsigned long>(max_entry_bits(rows)) + 96;
        if (!lll_run<mpf_class>(rows, delta, prec))
            throw std::runtime_error("reduction failed to stabilize");
    }
    LatticeBasis out;
    out.dim = basis.dim;
    out.scale = basis.scale;
    out.rows = std::move(rows);
    return out;
}

namespace {

// Depth-first enumeration of all nonzero x with ||sum x_i b_i||^2 inside the
// float radius, exact filter at the leaves. Zigzag order around the center.
struct Enumerator {
    const IntMat& rows;
    const GramSchmidtData& gs;
    int n;
    double pruneR2;
    const mpz_class* exactBound;   // keep normSq <= bound (nullptr: use <= pruneR2)
    int targetVisits;              // > 0: shrink the radius once this many leaves landed
    std::vector<LatticeVector> found;
    std::vector<double> best;      // smallest targetVisits leaf norms seen so far

    std::vector<long long> x;
    std::vector<double> partial;     // distance accumulated below each level
    std::vector<long> nodesPerLevel;

    Enumerator(const IntMat& r, const GramSchmidtData& g, double p, const mpz_class* eb, int tv)
        : rows(r), gs(g), n(static_cast<int>(r.size())), pruneR2(p), exactBound(eb),
          targetVisits(tv), x(n, 0), partial(n + 1, 0.0), nodesPerLevel(n, 0) {}

    void leaf() {
        IntVec v(rows[0].size(), mpz_class(0));
        bool nonzero = false;
        for (int i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            nonzero = true;
            const mpz_class c(static_cast<long>(x[i]));
            for (size_t t = 0; t < v.size(); ++t)
                mpz_addmul(v[t].get_mpz_t(), c.get_mpz_t(), rows[i][t].get_mpz_t());
        }
        if (!nonzero) return;
        LatticeVector lv = make_lattice_vector(std::move(v));
        if (exactBound != nullptr) {
            if (lv.normSq > *exactBound) return;
        } else if (mpz_cmp_d(lv.normSq.get_mpz_t(), pruneR2) > 0) {
            return;
        }
        if (targetVisits > 0) {
            // Each +-pair reaches this leaf at most twice, so with
            // targetVisits = 2 * (pairs wanted) the running cutoff can never
            // dip below the true N-th pair norm; the search radius collapses
            // toward the answer instead of sweeping the whole initial ball.
            const double ns = lv.normSq.get_d();
            best.insert(std::upper_bound(best.begin(), best.end(), ns), ns);
            if (static_cast<int>(best.size()) > targetVisits) best.pop_back();
            if (static_cast<int>(best.size()) == targetVisits && best.back() < pruneR2)
                pruneR2 = best.back();
        }
        found.push_back(std::move(lv));
    }

    // level i counts down; partial[i+1] holds the distance from levels > i
    void descend(int i) {
        if (i < 0) {
            leaf();
            return;
        }
        double c = 0.0;
        for (int j = i + 1; j < n; ++j) c -= static_cast<double>(x[j]) * gs.mu[j][i];
        // zigzag around the center; offsets grow monotonically on each side,
        // so a side that leaves the budget never comes back
        const long long base = static_cast<long long>(std::floor(c));
        bool plusOpen = true, minusOpen = true;
        for (int step = 0; plusOpen || minusOpen; ++step) {
            // the budget rereads pruneR2: it may have shrunk mid-loop
            const double budget = pruneR2 * (1.0 + 1e-6) - partial[i + 1];
            if (budget < 0) return;
            const bool plusSide = (step % 2 == 1);  // floor counts as the minus side
            long long cand;
            if (step == 0) cand = base;
            else if (plusSide) cand = base + (step + 1) / 2;
            else cand = base - step / 2;
            if ((plusSide && !plusOpen) || (!plusSide && !minusOpen)) continue;
            const double off = static_cast<double>(cand) - c;
            const double d = off * off * gs.bStarNormSq[i];
            if (d > budget) {
                if (plusSide) plusOpen = false;
                else minusOpen = false;
                continue;
            }
            if (++nodesPerLevel[i] > kNodeCapPerLevel) throw std::runtime_error("radius cap exceeded");
            x[i] = cand;
            partial[i] = partial[i + 1] + d;
            descend(i - 1);
        }
        x[i] = 0;
    }

    void run() { descend(n - 1); }
};

std::vector<LatticeVector> enumerate_raw(const IntMat& rows, const GramSchmidtData& gs, double pruneR2,
                                         const mpz_class* exactBound, int targetPairs = 0) {
    Enumerator e(rows, gs, pruneR2, exactBound, targetPairs > 0 ? 2 * targetPairs : 0);
    e.run();
    auto& v = e.found;
    std::sort(v.begin(), v.end(), [](const LatticeVector& a, const LatticeVector& b) {
        const int c = cmp(a.normSq, b.normSq);
        if (c != 0) return c < 0;
        return a.coeffs < b.coeffs;
    });
    v.erase(std::unique(v.begin(), v.end(),
                        [](const LatticeVector& a, const LatticeVector& b) { return a.coeffs == b.coeffs; }),
            v.end());
    return v;
}

}  // namespace

std::vector<LatticeVector> enumerate_shortest(const LatticeBasis& basis, int N) {
    if (N < 1) throw std::invalid_argument("enumerate_shortest: N >= 1");
    const LatticeBasis red = lll_reduce(basis);
    const GramSchmidtData gs = gram_schmidt(red.rows);

    std::vector<double> rowNorms;
    for (const auto& r : red.rows) rowNorms.push_back(norm_sq(r).get_d());
    std::sort(rowNorms.begin(), rowNorms.end());
    double r2 = rowNorms[std::min<size_t>(N, rowNorms.size()) - 1];

    // a radius sized for ~2N expected pairs by point-count heuristics; the
    // N-th row norm can badly overshoot in high dimension and the tree size
    // is exponential in the overshoot
    const int n = static_cast<int>(red.rows.size());
    double logCov = 0.0;
    for (double b : gs.bStarNormSq) logCov += 0.5 * std::log(b);
    const double guess = std::exp((std::log(4.0 * N) + logCov - std::log(ball_volume(n, 1.0))) * 2.0 / n);
    if (guess > 0.0 && std::isfinite(guess)) r2 = std::min(r2, guess);

    std::vector<LatticeVector> pairs;
    for (;;) {
        pairs = enumerate_raw(red.rows, gs, r2, nullptr, N);
        if (static_cast<int>(pairs.size()) >= N) break;
        r2 *= 2.0;
    }
    // exact confirmation at the N-th smallest norm: no boundary miss possible
    const mpz_class cutoff = pairs[N - 1].normSq;
    pairs = enumerate_raw(red.rows, gs, cutoff.get_d(), &cutoff);
    pairs.resize(N);
    return pairs;
}

std::vector<LatticeVector> enumerate_within(const LatticeBasis& basis, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("enumerate_within: radius > 0");
    const LatticeBasis red = lll_reduce(basis);
    const GramSchmidtData gs = gram_schmidt(red.rows);
    const double r2 = (radius / red.scale) * (radius / red.scale);
    return enumerate_raw(red.rows, gs, r2, nullptr);
}

std::pair<std::vector<double>, bool> successive_minima(const LatticeBasis& basis, int N) {
    if (N < 1 || N > basis.dim) throw std::invalid_argument("successive_minima: 1 <= N <= dim");
    const LatticeBasis red = lll_reduce(basis);

    int want = std::max(N, 6);
    std::vector<LatticeVector> vecs;
    std::vector<double> minima;
    for (;;) {
        vecs = enumerate_shortest(red, want);
        RankProbe probe;
        minima.clear();
        for (const auto& v : vecs) {
            if (probe.try_add(v.coeffs))
                minima.push_back(red.scale * std::sqrt(v.normSq.get_d()));
            if (static_cast<int>(minima.size()) == N) break;
        }
        if (static_cast<int>(minima.size()) == N) break;
        want *= 2;  // rare: the first `want` pairs spanned fewer than N dims
    }

    RankProbe firstN;
    int r = 0;
    for (int i = 0; i < N; ++i)
        if (firstN.try_add(vecs[i].coeffs)) ++r;
    return {minima, r == N};
}

SpectrumResult spectrum(const LatticeBasis& basis, int N) {
    if (N < 1 || N > 2 * basis.dim * basis.dim) throw std::invalid_argument("spectrum: bad N");
    const LatticeBasis red = lll_reduce(basis);
    const auto vecs = enumerate_shortest(red, N);

    SpectrumResult out;
    for (const auto& v : vecs) {
        const double ell = red.scale * std::sqrt(v.normSq.get_d());
        out.lengths.push_back(ell);
        out.volumes.push_back(ball_volume(basis.dim, ell));
    }
    out.rawAngles.assign(N, std::vector<double>(N, 0.0));
    out.scaledAngles.assign(N, std::vector<double>(N, 0.0));
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            const double phi = symmetrized_angle(vecs[i], vecs[j]);
            out.rawAngles[i][j] = std::min(phi, kPi / 2);
            out.scaledAngles[i][j] = scaled_angle(basis.dim, out.rawAngles[i][j]);
        }
    }
    out.hasTies = false;
    for (int j = 0; j + 1 < N; ++j)
        if (vecs[j].normSq == vecs[j + 1].normSq) out.hasTies = true;

    auto [minima, coincide] = successive_minima(red, std::min(N, basis.dim));
    out.successiveMinima = std::move(minima);
    out.minimaCoincide = coincide;
    return out;
}

}  // namespace latlab
