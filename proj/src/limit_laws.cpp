#include "latlab/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latlab {

namespace {
const double kPi = 3.14159265358979323846264338327950288;

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double adapt(double (*f)(double, const void*), const void* ctx, double a, double b, double fa, double fm,
             double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm, ctx), frm = f(rm, ctx);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps)
        return left + right + delta / 15.0;
    return adapt(f, ctx, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adapt(f, ctx, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double integrate_one(double (*f)(double, const void*), const void* ctx, double a, double b, double eps) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a, ctx), fm = f(m, ctx), fb = f(b, ctx);
    return adapt(f, ctx, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), eps, 52);
}

struct SinPowCtx {
    int power;
};

double sin_pow(double x, const void* ctx) {
    const int p = static_cast<const SinPowCtx*>(ctx)->power;
    if (p == 0) return 1.0;
    return std::pow(std::sin(x), p);
}

// sin^{n-2} mass concentrates in a ~1/sqrt(n) window around pi/2; seed the
// adaptive pass with splits there so it cannot stall on the spike
double sin_pow_mass(int n, double phi1, double phi2, double eps) {
    std::vector<double> splits{phi1};
    const double w = 10.0 / std::sqrt(static_cast<double>(n));
    for (double s : {kPi / 2 - w, kPi / 2, kPi / 2 + w})
        if (s > phi1 && s < phi2) splits.push_back(s);
    splits.push_back(phi2);
    SinPowCtx ctx{n - 2};
    double total = 0.0;
    for (size_t i = 0; i + 1 < splits.size(); ++i)
        total += integrate_one(sin_pow, &ctx, splits[i], splits[i + 1], eps);
    return total;
}
}  // namespace

double integrate(const std::vector<double>& splits, double (*f)(double, const void*), const void* ctx,
                 double eps) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < splits.size(); ++i)
        total += integrate_one(f, ctx, splits[i], splits[i + 1], eps);
    return total;
}

double log_sphere_surface(int n) {
    if (n < 1) throw std::invalid_argument("sphere_surface: n >= 1");
    return std::log(2.0) + 0.5 * n * std::log(kPi) - std::lgamma(0.5 * n);
}

double sphere_surface(int n) { return std::exp(log_sphere_surface(n)); }

double sphere_surface_ratio(int n) {
    if (n < 2) throw std::invalid_argument("sphere_surface_ratio: n >= 2");
    return std::exp(log_sphere_surface(n - 1) - log_sphere_surface(n));
}

double poisson_gap_cdf(int N, double V) {
    if (N < 1 || V < 0.0) throw std::invalid_argument("poisson_gap_cdf domain");
    const double half = 0.5 * V;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < N; ++k) {
        term *= half / k;
        sum += term;
    }
    const double cdf = 1.0 - std::exp(-half) * sum;
    return std::clamp(cdf, 0.0, 1.0);
}

double half_normal_cdf(double c) {
    if (c < 0.0) throw std::invalid_argument("half_normal_cdf: c >= 0");
    return std::erf(c / 1.41421356237309504880168872420969808);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.41421356237309504880168872420969808); }

double concentration_limit(double C) {
    if (C <= 0.0) throw std::invalid_argument("concentration_limit: C > 0");
    return 0.5 * half_normal_cdf(C);
}

double finite_n_angle_mass(int n, double phi1, double phi2) {
    if (n < 2 || phi1 < 0.0 || phi2 > kPi + 1e-12 || phi1 >= phi2)
        throw std::invalid_argument("invalid interval");
    return sphere_surface_ratio(n) * sin_pow_mass(n, phi1, std::min(phi2, kPi), 1e-13);
}

double rogers_pair_expectation(int n, double V, double phi1, double phi2) {
    if (n < 3 || V <= 0.0) throw std::invalid_argument("rogers_pair_expectation domain");
    if (phi1 < 0.0 || phi2 > kPi / 2 + 1e-12 || phi1 >= phi2)
        throw std::invalid_argument("invalid interval");
    return 0.25 * V * V * sphere_surface_ratio(n) * sin_pow_mass(n, phi1, std::min(phi2, kPi / 2), 1e-13);
}

double campbell_box_expectation(int k, const std::vector<std::pair<double, double>>& box) {
    if (k < 2 || static_cast<int>(box.size()) != k)
        throw std::invalid_argument("campbell_box_expectation: k >= 2 intervals");
    double prod = 1.0;
    for (const auto& [lo, hi] : box) {
        if (lo < 0.0 || hi < lo) throw std::invalid_argument("campbell_box_expectation: bad interval");
        prod *= hi - lo;
    }
    return std::ldexp(prod, -k);
}

std::vector<std::vector<double>> chart_unit_vectors(const std::vector<std::vector<double>>& phis, int k) {
    std::vector<std::vector<double>> u(k, std::vector<double>(k, 0.0));
    u[0][0] = 1.0;
    for (int j = 1; j < k; ++j) {
        double prefix = 1.0;  // running product of sin(phi_lj), l < i
        for (int i = 0; i < j; ++i) {
            u[j][i] = prefix * std::cos(phis[i][j]);
            prefix *= std::sin(phis[i][j]);
        }
        u[j][j] = prefix;
    }
    return u;
}

std::vector<std::vector<double>> chart_to_angles(const std::vector<std::vector<double>>& phis, int k) {
    const auto u = chart_unit_vectors(phis, k);
    std::vector<std::vector<double>> alpha(k, std::vector<double>(k, 0.0));
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            double d = 0.0;
            for (int t = 0; t <= j; ++t) d += u[i][t] * u[j][t];
            alpha[i][j] = std::acos(std::clamp(d, -1.0, 1.0));
        }
    }
    return alpha;
}

double chart_jacobian_det(const std::vector<std::vector<double>>& phis, int k) {
    const auto alpha = chart_to_angles(phis, k);
    double det = 1.0;
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            const double sa = std::sin(alpha[i][j]);
            if (!(sa > 1e-12)) throw std::runtime_error("chart degenerate");
            // exponent k - i with 1-based i
            det *= std::pow(std::sin(phis[i][j]), k - i - 1) / sa;
        }
    }
    return det;
}

}  // namespace latlab
