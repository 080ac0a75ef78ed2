#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latlab/experiments.hpp"
#include "latlab/limit_laws.hpp"
#include "latlab/reduction.hpp"
#include "latlab/rng.hpp"

namespace {

using latlab::ExperimentConfig;
using latlab::fmt17;

std::pair<double, double> parse_interval(const std::string& spec) {
    double lo = 0.0, hi = 0.0;
    char tail = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf%c", &lo, &hi, &tail) != 2)
        throw std::invalid_argument("interval must look like lo:hi, got '" + spec + "'");
    return {lo, hi};
}

std::vector<std::pair<double, double>> parse_box(const std::string& spec) {
    std::vector<std::pair<double, double>> out;
    size_t start = 0;
    while (start <= spec.size()) {
        const size_t comma = spec.find(',', start);
        const std::string piece =
            comma == std::string::npos ? spec.substr(start) : spec.substr(start, comma - start);
        out.push_back(parse_interval(piece));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::ostream& open_sink(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path, std::ios::out | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

nlohmann::ordered_json json_int(const mpz_class& v) {
    if (v.fits_slong_p()) return nlohmann::ordered_json(v.get_si());
    return nlohmann::ordered_json(v.get_str());
}

nlohmann::ordered_json json_rows(const latlab::IntMat& rows) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& e : row) r.push_back(json_int(e));
        out.push_back(r);
    }
    return out;
}

int run_limit_cdf(const std::string& law, int n, int N, double lo, double hi, int steps,
                  const std::string& outPath) {
    if (steps < 1) throw std::invalid_argument("steps must be at least 1");
    if (!(hi > lo)) throw std::invalid_argument("max must exceed min");

    const double pi = 3.14159265358979323846264338327950288;
    std::function<double(double)> cdf;
    if (law == "point") {
        if (N < 1) throw std::invalid_argument("point law needs N >= 1");
        cdf = [N](double x) { return x <= 0.0 ? 0.0 : latlab::poisson_gap_cdf(N, x); };
    } else if (law == "gap") {
        cdf = [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-0.5 * x); };
    } else if (law == "angle") {
        cdf = [](double x) { return x <= 0.0 ? 0.0 : latlab::half_normal_cdf(x); };
    } else if (law == "normal") {
        cdf = [](double x) { return latlab::std_normal_cdf(x); };
    } else {  // mass
        if (n < 2) throw std::invalid_argument("mass law needs n >= 2");
        cdf = [n, pi](double x) {
            if (x <= 0.0) return 0.0;
            if (x >= pi) return 1.0;
            return latlab::finite_n_angle_mass(n, 0.0, x);
        };
    }

    std::ofstream file;
    std::ostream& os = open_sink(outPath, file);
    os << "x,cdf\n";
    for (int i = 0; i <= steps; ++i) {
        const double x = lo + (hi - lo) * i / steps;
        os << fmt17(x) << ',' << fmt17(cdf(x)) << '\n';
    }
    return 0;
}

int run_sample_lattice(const ExperimentConfig& cfg, uint64_t trialIndex) {
    latlab::SamplerConfig sc{cfg.n, cfg.prime, cfg.seed, trialIndex};
    const latlab::LatticeBasis basis = latlab::sample_lattice(sc);
    const latlab::LatticeBasis reduced = latlab::lll_reduce(basis);
    const latlab::SpectrumResult sp = latlab::spectrum(basis, cfg.N);

    nlohmann::ordered_json j;
    j["config"] = {{"n", cfg.n},   {"prime", cfg.prime.get_str()}, {"seed", cfg.seed},
                   {"trial", trialIndex}, {"N", cfg.N}};
    j["basis"] = {{"scale", basis.scale}, {"rows", json_rows(basis.rows)}};
    j["reduced"] = {{"rows", json_rows(reduced.rows)}};

    nlohmann::ordered_json spec;
    spec["lengths"] = sp.lengths;
    spec["volumes"] = sp.volumes;
    nlohmann::ordered_json angles = nlohmann::ordered_json::array();
    for (size_t i = 0; i < sp.rawAngles.size(); ++i) {
        for (size_t k = i + 1; k < sp.rawAngles[i].size(); ++k) {
            angles.push_back({{"i", i + 1},
                              {"j", k + 1},
                              {"raw", sp.rawAngles[i][k]},
                              {"scaled", sp.scaledAngles[i][k]}});
        }
    }
    spec["angles"] = angles;
    spec["successiveMinima"] = sp.successiveMinima;
    spec["minimaCoincide"] = sp.minimaCoincide;
    spec["hasTies"] = sp.hasTies;
    j["spectrum"] = spec;

    std::ofstream file;
    std::ostream& os = open_sink(cfg.outPath, file);
    os << j.dump(2) << '\n';
    return 0;
}

int run_experiment_command(ExperimentConfig cfg) {
    const latlab::ExperimentResult result = latlab::run_experiment(cfg);
    if (cfg.format == "json") {
        const std::string doc = latlab::reports_json(cfg, result);
        if (cfg.outPath.empty()) {
            std::cout << doc;
        } else {
            std::ofstream f(cfg.outPath, std::ios::out | std::ios::trunc);
            if (!f) throw std::runtime_error("cannot open output file: " + cfg.outPath);
            f << doc;
            std::cout << latlab::report_table(result.reports);
        }
    } else {
        std::cout << latlab::report_table(result.reports);
    }
    long failed = 0;
    for (const auto& r : result.reports) failed += r.pass ? 0 : 1;
    if (cfg.format != "json" || !cfg.outPath.empty()) {
        if (failed == 0)
            std::cout << "verdict: all " << result.reports.size() << " reports pass ("
                      << fmt17(result.runtimeSeconds) << "s)\n";
        else
            std::cout << "verdict: " << failed << " of " << result.reports.size()
                      << " reports FAIL (" << fmt17(result.runtimeSeconds) << "s)\n";
    }
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for short-vector statistics of random unit-covolume lattices"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string boxSpec, angleBoxSpec;
    std::string primeStr = "1000003";
    uint64_t trialIndex = 0;
    std::string law = "point";
    double cdfMin = 0.0, cdfMax = 20.0;
    int cdfSteps = 200;

    auto add_sampling = [&cfg, &primeStr](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "ambient dimension");
        sub->add_option("--prime", primeStr, "prime index of the sampled sublattice family, any size");
        sub->add_option("--seed", cfg.seed, "RNG seed; trials are counter-indexed under it");
    };
    auto add_run = [&cfg](CLI::App* sub) {
        sub->add_option("--trials", cfg.trials, "number of independent trials");
        sub->add_option("--out", cfg.outPath, "output file: per-trial csv samples, or the json report");
        sub->add_option("--format", cfg.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--parallelism", cfg.parallelism, "worker threads, 0 picks the hardware count");
        sub->add_option("--allowance", cfg.allowance,
                        "engineering tolerance added to distributional thresholds");
    };

    CLI::App* jointLaw =
        app.add_subcommand("joint-law", "joint law of the N shortest pairs: volumes, gaps, angles");
    add_sampling(jointLaw);
    add_run(jointLaw);
    jointLaw->add_option("--N", cfg.N, "number of shortest pairs");

    CLI::App* sphere = app.add_subcommand(
        "sphere-angles", "scaled pairwise angles of uniform sphere directions against N(0,1)");
    sphere->add_option("--n", cfg.n, "ambient dimension");
    sphere->add_option("--seed", cfg.seed, "RNG seed");
    add_run(sphere);
    sphere->add_option("--N", cfg.N, "number of directions per trial");

    CLI::App* conc = app.add_subcommand(
        "concentration", "probability that some pair of the N shortest exceeds the C/sqrt(n) window");
    add_sampling(conc);
    add_run(conc);
    conc->add_option("--N", cfg.N, "number of shortest pairs");
    conc->add_option("--C", cfg.C, "orthogonality window half-width, in sqrt(n) units");

    CLI::App* rogers = app.add_subcommand(
        "rogers-expectation", "mean pair count in a volume-V ball with angle in [phi1, phi2]");
    add_sampling(rogers);
    add_run(rogers);
    rogers->add_option("--V", cfg.V, "ball volume");
    rogers->add_option("--phi1", cfg.phi1, "lower angle bound");
    rogers->add_option("--phi2", cfg.phi2, "upper angle bound");

    CLI::App* campbell = app.add_subcommand(
        "campbell", "mean number of distinct point tuples in volume boxes, limit side and lattice side");
    add_sampling(campbell);
    add_run(campbell);
    campbell->add_option("--box", boxSpec, "volume intervals lo:hi,lo:hi,... (one per tuple slot)")
        ->required();
    campbell->add_option("--angle-box", angleBoxSpec, "scaled-angle interval lo:hi for every pair");
    campbell->add_option("--lattice-trials", cfg.latticeTrials,
                         "also run this many finite-n lattice trials (0 skips the lattice side)");

    CLI::App* minima =
        app.add_subcommand("successive-minima", "successive minima against the volume limit law");
    add_sampling(minima);
    add_run(minima);
    minima->add_option("--N", cfg.N, "number of minima");

    CLI::App* limitCdf =
        app.add_subcommand("limit-cdf", "tabulate a reference limit-law cdf as x,cdf rows");
    limitCdf->add_option("--law", law, "point, gap, angle, normal, or mass")
        ->check(CLI::IsMember({"point", "gap", "angle", "normal", "mass"}));
    limitCdf->add_option("--n", cfg.n, "ambient dimension (mass law)");
    limitCdf->add_option("--N", cfg.N, "point order (point law)");
    limitCdf->add_option("--min", cdfMin, "left end of the tabulated range");
    limitCdf->add_option("--max", cdfMax, "right end of the tabulated range");
    limitCdf->add_option("--steps", cdfSteps, "number of grid intervals");
    limitCdf->add_option("--out", cfg.outPath, "output file; stdout when omitted");

    CLI::App* sampleLat =
        app.add_subcommand("sample-lattice", "dump one sampled lattice and its spectrum as json");
    add_sampling(sampleLat);
    sampleLat->add_option("--trial", trialIndex, "trial index under the seed");
    sampleLat->add_option("--N", cfg.N, "number of shortest pairs in the dump");
    sampleLat->add_option("--out", cfg.outPath, "output file; stdout when omitted");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        try {
            cfg.prime = mpz_class(primeStr, 10);
        } catch (const std::exception&) {
            throw std::invalid_argument("prime must be a decimal integer, got '" + primeStr + "'");
        }
        if (name == "limit-cdf")
            return run_limit_cdf(law, cfg.n, cfg.N, cdfMin, cdfMax, cdfSteps, cfg.outPath);
        if (name == "sample-lattice") return run_sample_lattice(cfg, trialIndex);
        cfg.experiment = name;
        if (!boxSpec.empty()) cfg.box = parse_box(boxSpec);
        if (!angleBoxSpec.empty()) cfg.angleBox = parse_interval(angleBoxSpec);
        return run_experiment_command(std::move(cfg));
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
