#include <doctest.h>

#include <vector>

#include "latlab/exact.hpp"
#include "latlab/rng.hpp"

using namespace latlab;

namespace {

IntVec vec(std::initializer_list<long> v) {
    IntVec out;
    for (long x : v) out.emplace_back(x);
    return out;
}

IntMat mat(std::initializer_list<std::initializer_list<long>> rows) {
    IntMat out;
    for (auto& r : rows) out.push_back(vec(r));
    return out;
}

}  // namespace

TEST_CASE("dot and norm_sq") {
    CHECK(dot(vec({1, 2, 3}), vec({4, -5, 6})) == 12);
    CHECK(dot(vec({0, 0}), vec({7, 9})) == 0);
    CHECK(norm_sq(vec({3, 4})) == 25);
    CHECK(norm_sq(vec({-2, -2, -2})) == 12);
    // no overflow: (2^40)^2 * 2 needs 81 bits
    mpz_class big = mpz_class(1) << 40;
    IntVec w{big, big};
    CHECK(norm_sq(w) == (mpz_class(1) << 81));
}

TEST_CASE("det_bareiss on small known matrices") {
    CHECK(det_bareiss(mat({{1}})) == 1);
    CHECK(det_bareiss(mat({{1, 0}, {0, 1}})) == 1);
    CHECK(det_bareiss(mat({{3, 1}, {1, 2}})) == 5);
    CHECK(det_bareiss(mat({{2, 1}, {1, 2}})) == 3);
    CHECK(det_bareiss(mat({{0, 1}, {1, 0}})) == -1);  // one swap flips the sign
    CHECK(det_bareiss(mat({{1, 2, 3}, {4, 5, 6}, {7, 8, 10}})) == -3);
    CHECK(det_bareiss(mat({{1, 2}, {2, 4}})) == 0);
    CHECK(det_bareiss(mat({{0, 0}, {1, 5}})) == 0);
}

TEST_CASE("det_bareiss stays exact on large entries") {
    mpz_class b = mpz_class(1) << 40;
    IntMat m{{b, 1}, {0, b}};
    CHECK(det_bareiss(m) == (mpz_class(1) << 80));
    // triangular with a huge off-diagonal entry that must cancel exactly
    IntMat t{{1, b * b}, {1, b * b + 1}};
    CHECK(det_bareiss(t) == 1);
}

TEST_CASE("det_bareiss is unimodular-invariant") {
    IntMat m = mat({{3, 1, 4}, {1, 5, 9}, {2, 6, 5}});
    const mpz_class d = det_bareiss(m);
    // add a multiple of one row to another: determinant unchanged
    for (int i = 0; i < 3; ++i) m[0][i] += 7 * m[2][i];
    CHECK(det_bareiss(m) == d);
    std::swap(m[1], m[2]);
    CHECK(det_bareiss(m) == -d);
}

TEST_CASE("hnf canonical form") {
    // hnf of a unimodular basis of Z^2 is the identity
    CHECK(hnf(mat({{1, 0}, {3, 1}})) == mat({{1, 0}, {0, 1}}));
    CHECK(hnf(mat({{2, 1}, {1, 1}})) == mat({{1, 0}, {0, 1}}));
    // index-2 kernel of a = (1, 0) mod 2
    CHECK(hnf(mat({{2, 0}, {0, 1}})) == mat({{2, 0}, {0, 1}}));
    CHECK(hnf(mat({{2, 0}, {2, 1}})) == mat({{2, 0}, {0, 1}}));
}

TEST_CASE("hnf identifies equal spans") {
    IntMat m = mat({{4, 1, 0}, {1, 3, 2}, {0, 5, 8}});
    IntMat t = m;
    // a few elementary row operations keep the span
    for (int i = 0; i < 3; ++i) t[1][i] -= 2 * t[0][i];
    for (int i = 0; i < 3; ++i) t[2][i] += 5 * t[1][i];
    std::swap(t[0], t[2]);
    for (int i = 0; i < 3; ++i) t[0][i] = -t[0][i];
    CHECK(hnf(m) == hnf(t));

    // scaling one row changes the span
    IntMat s = m;
    for (int i = 0; i < 3; ++i) s[0][i] *= 2;
    CHECK(hnf(m) != hnf(s));
}

TEST_CASE("hnf shape invariants on random bases") {
    for (int rep = 0; rep < 30; ++rep) {
        CounterRng rng(5, rep, Stream::HeckePoint);
        IntMat m(3, IntVec(3));
        do {
            for (auto& row : m)
                for (auto& z : row) z = static_cast<long>(rng.next_u64() % 19) - 9;
        } while (det_bareiss(m) == 0);
        IntMat h = hnf(m);
        for (int i = 0; i < 3; ++i) {
            CHECK(h[i][i] > 0);
            for (int j = 0; j < i; ++j) CHECK(h[i][j] == 0);        // upper triangular rows
            for (int j = i + 1; j < 3; ++j) {
                CHECK(h[j][j] > 0);
                CHECK(h[i][j] >= 0);
                CHECK(h[i][j] < h[j][j]);                            // reduced above the pivot
            }
        }
        mpz_class dh = det_bareiss(h);
        mpz_class dm = det_bareiss(m);
        CHECK(dh == abs(dm));
    }
}

TEST_CASE("rank_of") {
    CHECK(rank_of(mat({{1, 0}, {0, 1}})) == 2);
    CHECK(rank_of(mat({{1, 2}, {2, 4}})) == 1);
    CHECK(rank_of(mat({{0, 0}, {0, 0}})) == 0);
    CHECK(rank_of(mat({{1, 2, 3}, {4, 5, 6}, {5, 7, 9}})) == 2);
}

TEST_CASE("RankProbe accepts exactly the independent rows") {
    RankProbe p;
    CHECK(p.rank() == 0);
    CHECK(p.try_add(vec({2, 0, 0})));
    CHECK(p.rank() == 1);
    CHECK_FALSE(p.try_add(vec({-3, 0, 0})));      // parallel
    CHECK(p.try_add(vec({1, 1, 0})));
    CHECK_FALSE(p.try_add(vec({7, 5, 0})));       // in the span over Q
    CHECK(p.try_add(vec({0, 0, 1})));
    CHECK(p.rank() == 3);
    CHECK_FALSE(p.try_add(vec({123, -456, 789})));
}

TEST_CASE("RankProbe agrees with rank_of on random sets") {
    for (int rep = 0; rep < 40; ++rep) {
        CounterRng rng(11, rep, Stream::HeckePoint);
        IntMat rows(5, IntVec(4));
        for (auto& row : rows)
            for (auto& z : row) z = static_cast<long>(rng.next_u64() % 7) - 3;
        RankProbe p;
        for (const auto& r : rows) p.try_add(r);
        CHECK(p.rank() == rank_of(rows));
    }
}

TEST_CASE("is_prime small values") {
    CHECK_FALSE(is_prime(0));
    CHECK_FALSE(is_prime(1));
    CHECK(is_prime(2));
    CHECK(is_prime(3));
    CHECK_FALSE(is_prime(4));
    CHECK(is_prime(97));
    CHECK_FALSE(is_prime(91));         // 7 * 13
    CHECK_FALSE(is_prime(561));        // Carmichael
    CHECK_FALSE(is_prime(41041));      // Carmichael
    CHECK(is_prime(999983));
    CHECK(is_prime(1000003));
    CHECK_FALSE(is_prime(1000001));    // 101 * 9901
    CHECK_FALSE(is_prime(mpz_class(-7)));
}

TEST_CASE("is_prime matches trial division up to 20000") {
    auto slow = [](long n) {
        if (n < 2) return false;
        for (long d = 2; d * d <= n; ++d)
            if (n % d == 0) return false;
        return true;
    };
    for (long n = 0; n < 20000; ++n) CHECK(is_prime(mpz_class(n)) == slow(n));
}

TEST_CASE("is_prime on the word-sized and beyond-word primes in use") {
    mpz_class mersenne61 = (mpz_class(1) << 61) - 1;
    CHECK(is_prime(mersenne61));
    mpz_class p64 = (mpz_class(1) << 64) + 13;
    CHECK(is_prime(p64));
    CHECK_FALSE(is_prime((mpz_class(1) << 64) + 1));
    mpz_class p128 = (mpz_class(1) << 128) + 51;
    CHECK(p128 == mpz_class("340282366920938463463374607431768211507"));
    CHECK(is_prime(p128));
    // 2^128 + 1 factors as 59649589127497217 * 5704689200685129054721
    CHECK_FALSE(is_prime((mpz_class(1) << 128) + 1));
    CHECK_FALSE(is_prime(mersenne61 * p64));
}
