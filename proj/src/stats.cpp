#include "latlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latlab {

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    const double a = -2.0 * lambda * lambda;
    double sum = 0.0, sign = 1.0;
    for (int j = 1; j <= 100000; ++j) {
        const double term = std::exp(a * j * j);
        sum += sign * term;
        if (term < 1e-10) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

std::pair<double, double> ks_statistic(std::vector<double> sample,
                                       const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double m = static_cast<double>(sample.size());
    double d = 0.0;
    for (size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, (i + 1) / m - f);   // ECDF jumps to (i+1)/m at the point
        d = std::max(d, f - i / m);         // and sits at i/m just before it
    }
    return {d, kolmogorov_q(std::sqrt(m) * d)};
}

std::pair<double, double> mean_ci(const std::vector<double>& sample) {
    if (sample.size() < 2) throw std::invalid_argument("mean_ci: need at least 2 points");
    const double m = static_cast<double>(sample.size());
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= m;
    double ss = 0.0;
    for (double x : sample) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (m - 1.0) / m)};
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("pearson: bad input");
    const double m = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= m;
    my /= m;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double quadrant_chi2(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 4) throw std::invalid_argument("quadrant_chi2: bad input");
    auto median = [](std::vector<double> v) {
        const size_t k = (v.size() - 1) / 2;  // lower median
        std::nth_element(v.begin(), v.begin() + k, v.end());
        return v[k];
    };
    const double medx = median(x), medy = median(y);
    double a = 0, b = 0, c = 0, d = 0;  // (<=,<=) (<=,>) (>,<=) (>,>)
    for (size_t i = 0; i < x.size(); ++i) {
        const bool lx = x[i] <= medx, ly = y[i] <= medy;
        if (lx && ly) ++a;
        else if (lx) ++b;
        else if (ly) ++c;
        else ++d;
    }
    const double m = static_cast<double>(x.size());
    const double r0 = a + b, r1 = c + d, c0 = a + c, c1 = b + d;
    if (r0 == 0 || r1 == 0 || c0 == 0 || c1 == 0)
        throw std::invalid_argument("quadrant_chi2: degenerate split");
    const double det = a * d - b * c;
    return m * det * det / (r0 * r1 * c0 * c1);
}

}  // namespace latlab
