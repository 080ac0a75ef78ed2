#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace latlab {

struct StatReport {
    std::string name;
    long sampleSize = 0;
    double statistic = 0.0;     // KS D, correlation, chi-square, or deviation
    bool hasPValue = false;
    double pValue = 0.0;
    double mean = 0.0;
    double stdErr = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string notes;
};

// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 lambda^2},
// series truncated once terms drop below 1e-10.
double kolmogorov_q(double lambda);

// Exact sup-distance at the jump points of the ECDF; p-value Q(sqrt(m) * D).
// The sample is sorted internally.
std::pair<double, double> ks_statistic(std::vector<double> sample,
                                       const std::function<double(double)>& cdf);

// arithmetic mean and sigma-hat / sqrt(m) with the unbiased variance estimate
std::pair<double, double> mean_ci(const std::vector<double>& sample);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

// 2x2 association chi-square after splitting both samples at their medians
double quadrant_chi2(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace latlab
