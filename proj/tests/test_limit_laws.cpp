#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "latlab/limit_laws.hpp"
#include "latlab/rng.hpp"

using namespace latlab;

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

TEST_CASE("sphere surface closed forms") {
    CHECK(sphere_surface(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(sphere_surface(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(sphere_surface(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
    CHECK(sphere_surface(4) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
    for (int n = 2; n <= 40; ++n)
        CHECK(sphere_surface_ratio(n) ==
              doctest::Approx(sphere_surface(n - 1) / sphere_surface(n)).epsilon(1e-12));
    // recursion s_{n+2} = 2 pi s_n / n far past where the plain value underflows
    for (int n = 2; n <= 400; ++n)
        CHECK(log_sphere_surface(n + 2) ==
              doctest::Approx(std::log(2.0 * kPi / n) + log_sphere_surface(n)).epsilon(1e-12));
    CHECK(std::isfinite(log_sphere_surface(10000000)));
    CHECK(std::isfinite(sphere_surface_ratio(10000000)));
}

TEST_CASE("poisson_gap_cdf") {
    // N = 1 is the plain exponential in the half-volume variable
    for (double v : {0.1, 1.0, 2.0, 7.5})
        CHECK(poisson_gap_cdf(1, v) == doctest::Approx(1.0 - std::exp(-v / 2)).epsilon(1e-15));
    // median of the first point: 2 ln 2
    CHECK(poisson_gap_cdf(1, 1.3862943611198906) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(poisson_gap_cdf(3, 2.0) == doctest::Approx(0.080301397071394196).epsilon(1e-13));
    CHECK(poisson_gap_cdf(1, 0.0) == 0.0);
    CHECK(poisson_gap_cdf(4, 1e4) == doctest::Approx(1.0).epsilon(1e-12));
    // CDFs are ordered in N: more points needed, smaller mass
    for (int N = 1; N < 6; ++N) CHECK(poisson_gap_cdf(N + 1, 3.0) < poisson_gap_cdf(N, 3.0));
}

TEST_CASE("gaussian CDFs") {
    CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std_normal_cdf(1.0) == doctest::Approx(0.84134474606854295).epsilon(1e-14));
    CHECK(std_normal_cdf(-1.0) == doctest::Approx(1.0 - 0.84134474606854295).epsilon(1e-13));
    CHECK(half_normal_cdf(0.0) == 0.0);
    CHECK(half_normal_cdf(1.0) == doctest::Approx(0.68268949213708590).epsilon(1e-14));
    CHECK(half_normal_cdf(8.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(concentration_limit(1.0) == doctest::Approx(0.34134474606854295).epsilon(1e-14));
    for (double c : {0.3, 1.0, 2.2})
        CHECK(half_normal_cdf(c) ==
              doctest::Approx(2.0 * std_normal_cdf(c) - 1.0).epsilon(1e-13));
}

TEST_CASE("finite_n_angle_mass normalization and small-n closed forms") {
    for (int n : {2, 3, 5, 12, 100})
        CHECK(finite_n_angle_mass(n, 0.0, kPi) == doctest::Approx(1.0).epsilon(1e-10));
    // n = 2: uniform on [0, pi]
    CHECK(finite_n_angle_mass(2, 0.2, 0.9) == doctest::Approx(0.7 / kPi).epsilon(1e-10));
    // n = 3: density sin(phi)/2
    CHECK(finite_n_angle_mass(3, 0.0, kPi / 2) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(finite_n_angle_mass(3, kPi / 3, kPi / 2) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(finite_n_angle_mass(12, kPi / 3, kPi / 2) == doctest::Approx(0.45906788441715281).epsilon(1e-10));
    CHECK(finite_n_angle_mass(5, 0.3, 1.1) == doctest::Approx(0.18166084819504552).epsilon(1e-10));
    CHECK_THROWS_WITH(finite_n_angle_mass(7, 0.4, 0.4), "invalid interval");
}

TEST_CASE("angle mass near orthogonality approaches the erf limit") {
    // the n = 400 window values sit a few 1e-4 under the limit
    for (double C : {0.5, 1.0, 2.0}) {
        const double mass = finite_n_angle_mass(400, kPi / 2 - C / 20.0, kPi / 2);
        const double limit = concentration_limit(C);
        CHECK(std::fabs(mass - limit) < 1e-3);
        CHECK(mass < limit);   // finite n loses a little mass to the window edge
    }
}

TEST_CASE("rogers_pair_expectation") {
    // full angle range: exactly V^2/8
    for (int n : {3, 12, 30, 60})
        for (double V : {0.5, 2.0, 5.0})
            CHECK(rogers_pair_expectation(n, V, 0.0, kPi / 2) ==
                  doctest::Approx(V * V / 8).epsilon(1e-12));
    // restricted range: (V^2/4) times the angle mass of the window
    CHECK(rogers_pair_expectation(12, 2.0, kPi / 3, kPi / 2) ==
          doctest::Approx(0.45906788441715281).epsilon(1e-10));
    CHECK(rogers_pair_expectation(12, 3.0, kPi / 3, kPi / 2) ==
          doctest::Approx(9.0 / 4 * 0.45906788441715281).epsilon(1e-10));
}

TEST_CASE("campbell_box_expectation") {
    using Box = std::vector<std::pair<double, double>>;
    CHECK(campbell_box_expectation(2, Box{{0, 1}, {0, 1}}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(campbell_box_expectation(2, Box{{0, 2}, {1, 4}}) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(campbell_box_expectation(3, Box{{0, 1}, {0, 1}, {0, 1}}) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(campbell_box_expectation(4, Box{{0, 2}, {0, 2}, {0, 2}, {0, 2}}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("chart unit vectors and angles") {
    std::vector<std::vector<double>> phis(3, std::vector<double>(3, 0.0));
    phis[0][1] = 0.7;
    phis[0][2] = 1.1;
    phis[1][2] = 0.9;
    auto u = chart_unit_vectors(phis, 3);
    REQUIRE(u.size() == 3);
    for (const auto& v : u) {
        double s = 0;
        for (double x : v) s += x * x;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(u[0][0] == doctest::Approx(1.0));
    auto alpha = chart_to_angles(phis, 3);
    CHECK(alpha[0][1] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(alpha[0][2] == doctest::Approx(1.1).epsilon(1e-12));
    // alpha_23 comes from the actual inner product
    double d = 0;
    for (int t = 0; t < 3; ++t) d += u[1][t] * u[2][t];
    CHECK(alpha[1][2] == doctest::Approx(std::acos(d)).epsilon(1e-12));
}

namespace {

std::vector<std::vector<double>> unpack_chart(const std::vector<double>& flat, int k) {
    std::vector<std::vector<double>> phis(k, std::vector<double>(k, 0.0));
    int t = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) phis[i][j] = flat[t++];
    return phis;
}

std::vector<double> chart_angles_flat(const std::vector<double>& flat, int k) {
    auto alpha = chart_to_angles(unpack_chart(flat, k), k);
    std::vector<double> out;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) out.push_back(alpha[i][j]);
    return out;
}

double det_dense(std::vector<std::vector<double>> m) {
    const int d = static_cast<int>(m.size());
    double det = 1.0;
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        if (m[c][c] == 0.0) return 0.0;
        det *= m[c][c];
        for (int r = c + 1; r < d; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int t = c; t < d; ++t) m[r][t] -= f * m[c][t];
        }
    }
    return det;
}

}  // namespace

TEST_CASE("chart jacobian matches finite differences") {
    for (int k : {3, 4}) {
        const int d = k * (k - 1) / 2;
        for (int rep = 0; rep < 8; ++rep) {
            CounterRng rng(7, rep, Stream::LimitAngle);
            std::vector<double> flat(d);
            for (auto& v : flat) v = 0.3 + 2.4 * rng.uniform01();
            const double analytic = chart_jacobian_det(unpack_chart(flat, k), k);
            const double h = 1e-5;
            std::vector<std::vector<double>> J(d, std::vector<double>(d));
            for (int c = 0; c < d; ++c) {
                auto hi = flat, lo = flat;
                hi[c] += h;
                lo[c] -= h;
                auto ahi = chart_angles_flat(hi, k), alo = chart_angles_flat(lo, k);
                for (int r = 0; r < d; ++r) J[r][c] = (ahi[r] - alo[r]) / (2 * h);
            }
            const double fd = std::fabs(det_dense(J));
            CHECK(std::fabs(fd - std::fabs(analytic)) <= 1e-6 * std::fabs(analytic));
        }
    }
}

TEST_CASE("chart jacobian rejects degenerate angle configurations") {
    std::vector<std::vector<double>> phis(3, std::vector<double>(3, 0.0));
    phis[0][1] = 0.0;   // u_2 collapses onto u_1
    phis[0][2] = 1.0;
    phis[1][2] = 1.0;
    CHECK_THROWS_WITH(chart_jacobian_det(phis, 3), "chart degenerate");
}

namespace {
double square_fn(double x, const void*) { return x * x; }
double kink_fn(double x, const void*) { return std::fabs(x - 0.5); }
}  // namespace

TEST_CASE("adaptive integration") {
    CHECK(integrate({0.0, 1.0}, square_fn, nullptr, 1e-12) == doctest::Approx(1.0 / 3).epsilon(1e-11));
    // a split point right on the kink keeps Simpson honest
    CHECK(integrate({0.0, 0.5, 1.0}, kink_fn, nullptr, 1e-12) == doctest::Approx(0.25).epsilon(1e-11));
}

