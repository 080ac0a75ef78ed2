#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latlab/sampler.hpp"
#include "latlab/stats.hpp"

namespace latlab {

struct ExperimentConfig {
    std::string experiment;
    int n = 30;
    int N = 3;
    long trials = 10000;
    mpz_class prime = mpz_class(kDefaultPrime);
    uint64_t seed = 1;
    double C = 1.0;
    double V = 2.0;
    double phi1 = 0.0;
    double phi2 = 1.5707963267948966;
    std::vector<std::pair<double, double>> box;
    std::optional<std::pair<double, double>> angleBox;
    long latticeTrials = 0;
    std::string outPath;
    std::string format = "csv";  // csv: raw per-trial samples; json: report object
    int parallelism = 0;         // 0: hardware concurrency
    double allowance = 0.05;     // engineering tolerance on distributional checks
};

struct ExperimentResult {
    std::vector<StatReport> reports;
    double runtimeSeconds = 0.0;
};

ExperimentResult run_joint_law(const ExperimentConfig& cfg);
ExperimentResult run_sphere_angles(const ExperimentConfig& cfg);
ExperimentResult run_concentration(const ExperimentConfig& cfg);
ExperimentResult run_rogers_expectation(const ExperimentConfig& cfg);
ExperimentResult run_campbell(const ExperimentConfig& cfg);
ExperimentResult run_successive_minima(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// 17 significant digits, enough to round-trip any double
std::string fmt17(double x);

std::string report_table(const std::vector<StatReport>& reports);
std::string reports_json(const ExperimentConfig& cfg, const ExperimentResult& result);
bool all_pass(const std::vector<StatReport>& reports);

}  // namespace latlab
