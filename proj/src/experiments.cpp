#include "latlab/experiments.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "latlab/limit_laws.hpp"
#include "latlab/reduction.hpp"
#include "latlab/rng.hpp"

namespace latlab {

namespace {

const double kPi = 3.14159265358979323846264338327950288;
constexpr double kKsCritical = 1.63;   // asymptotic 1% point of the Kolmogorov law
constexpr double kChi2Critical = 10.83;  // chi-square(1) at 0.1%

double ks_threshold(long m, double allowance) {
    return std::max(kKsCritical / std::sqrt(static_cast<double>(m)), allowance);
}

double corr_threshold(long m, double allowance) {
    return std::max(4.0 / std::sqrt(static_cast<double>(m)), allowance);
}

// Workers claim trial indices from a shared counter; the main thread flushes
// rows strictly in trial order, so the CSV bytes cannot depend on the thread
// schedule. On error the complete prefix is flushed before rethrowing.
template <class Row>
std::vector<Row> run_trials(long m, int parallelism, const std::function<Row(long)>& work,
                            std::ofstream* csv, const std::function<std::string(long, const Row&)>& format) {
    int workers = parallelism > 0 ? parallelism : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(std::min<long>(m, 1024))));

    std::vector<std::optional<Row>> slots(m);
    std::atomic<long> nextTrial{0};
    std::atomic<bool> failed{false};
    std::mutex mx;
    std::condition_variable cv;
    std::exception_ptr firstError;

    auto body = [&]() {
        for (;;) {
            const long t = nextTrial.fetch_add(1);
            if (t >= m || failed.load()) return;
            try {
                Row r = work(t);
                {
                    std::lock_guard<std::mutex> lk(mx);
                    slots[t] = std::move(r);
                }
                cv.notify_all();
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lk(mx);
                    if (!firstError) firstError = std::current_exception();
                }
                failed.store(true);
                cv.notify_all();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);

    std::vector<Row> out;
    out.reserve(m);
    {
        std::unique_lock<std::mutex> lk(mx);
        for (long i = 0; i < m; ++i) {
            cv.wait(lk, [&] { return slots[i].has_value() || failed.load(); });
            if (!slots[i].has_value()) break;
            if (csv) {
                *csv << format(i, *slots[i]) << '\n';
                csv->flush();  // abort safety: never leave a torn row behind
            }
            out.push_back(std::move(*slots[i]));
            slots[i].reset();
        }
    }
    for (auto& th : pool) th.join();
    if (firstError) std::rethrow_exception(firstError);
    return out;
}

std::string pair_label(int i, int j) {
    // 1-based; underscore once two digits make concatenation ambiguous
    if (j < 9) return std::to_string(i + 1) + std::to_string(j + 1);
    return std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

std::vector<std::pair<int, int>> upper_pairs(int N) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) out.emplace_back(i, j);
    return out;
}

StatReport ks_report(std::string name, const std::vector<double>& sample,
                     const std::function<double(double)>& cdf, double allowance, std::string notes = "") {
    auto [d, p] = ks_statistic(sample, cdf);
    StatReport r;
    r.name = std::move(name);
    r.sampleSize = static_cast<long>(sample.size());
    r.statistic = d;
    r.hasPValue = true;
    r.pValue = p;
    auto [mean, se] = mean_ci(sample);
    r.mean = mean;
    r.stdErr = se;
    r.threshold = ks_threshold(r.sampleSize, allowance);
    r.pass = d <= r.threshold;
    r.notes = std::move(notes);
    return r;
}

StatReport corr_report(std::string name, const std::vector<double>& x, const std::vector<double>& y,
                       double allowance, std::string notes = "") {
    StatReport r;
    r.name = std::move(name);
    r.sampleSize = static_cast<long>(x.size());
    r.statistic = pearson(x, y);
    r.threshold = corr_threshold(r.sampleSize, allowance);
    r.pass = std::fabs(r.statistic) <= r.threshold;
    r.notes = std::move(notes);
    return r;
}

StatReport chi2_report(std::string name, const std::vector<double>& x, const std::vector<double>& y,
                       std::string notes = "") {
    StatReport r;
    r.name = std::move(name);
    r.sampleSize = static_cast<long>(x.size());
    r.statistic = quadrant_chi2(x, y);
    r.threshold = kChi2Critical;
    r.pass = r.statistic <= r.threshold;
    r.notes = std::move(notes);
    return r;
}

std::ofstream open_csv(const ExperimentConfig& cfg, const std::string& header, bool& active) {
    active = cfg.format == "csv" && !cfg.outPath.empty();
    std::ofstream f;
    if (active) {
        f.open(cfg.outPath, std::ios::out | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open output file: " + cfg.outPath);
        f << header << '\n';
        f.flush();
    }
    return f;
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void validate_common(const ExperimentConfig& cfg) {
    require(cfg.trials >= 2, "trials must be at least 2");
    require(cfg.allowance >= 0.0, "allowance must be nonnegative");
    require(cfg.parallelism >= 0, "parallelism must be nonnegative");
}

double runtime_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// finite-n CDF of the angle between two uniform directions, tabulated once on
// a fine grid; interpolation error is far below any KS tolerance used here
std::function<double(double)> angle_mass_cdf(int n) {
    const int grid = 16384;
    auto table = std::make_shared<std::vector<double>>(grid + 1, 0.0);
    const double h = kPi / grid;
    const double ratio = sphere_surface_ratio(n);
    double acc = 0.0;
    double prev = 0.0;  // sin(0)^(n-2) with n >= 2: zero unless n == 2
    auto f = [n](double x) { return n == 2 ? 1.0 : std::pow(std::sin(x), n - 2); };
    prev = f(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double a = (i - 1) * h, b = i * h;
        const double fm = f(0.5 * (a + b)), fb = f(b);
        acc += h / 6.0 * (prev + 4.0 * fm + fb);
        (*table)[i] = acc * ratio;
        prev = fb;
    }
    return [table, h](double x) {
        if (x <= 0.0) return 0.0;
        if (x >= kPi) return 1.0;
        const double u = x / h;
        const int i = std::min(static_cast<int>(u), static_cast<int>(table->size()) - 2);
        const double w = u - i;
        return (*table)[i] * (1.0 - w) + (*table)[i + 1] * w;
    };
}

}  // namespace

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// joint law: V_j against the Poisson(1/2) point law, gaps against Exp(mean 2),
// scaled angles against the half-normal, everything pairwise decorrelated
// ---------------------------------------------------------------------------

ExperimentResult run_joint_law(const ExperimentConfig& cfg) {
    validate_common(cfg);
    require(cfg.N >= 1, "N must be at least 1");
    require(cfg.n >= std::max(8, cfg.N + 2), "n must be at least max(8, N+2)");
    require(is_prime(cfg.prime), "prime must be prime");
    const auto t0 = std::chrono::steady_clock::now();

    const int N = cfg.N;
    const auto pairs = upper_pairs(N);

    struct Row {
        std::vector<double> V;
        std::vector<double> phiT;
        bool ties;
    };

    std::string header = "trial";
    for (int j = 0; j < N; ++j) header += ",V" + std::to_string(j + 1);
    for (const auto& [i, j] : pairs) header += ",phi" + pair_label(i, j);
    header += ",ties";

    bool csvActive = false;
    std::ofstream csv = open_csv(cfg, header, csvActive);

    auto work = [&cfg, N, &pairs](long trial) {
        SamplerConfig sc{cfg.n, cfg.prime, cfg.seed, static_cast<uint64_t>(trial)};
        const SpectrumResult sp = spectrum(sample_lattice(sc), N);
        Row r;
        r.V = sp.volumes;
        for (const auto& [i, j] : pairs) r.phiT.push_back(sp.scaledAngles[i][j]);
        r.ties = sp.hasTies;
        return r;
    };
    auto format = [](long trial, const Row& r) {
        std::string line = std::to_string(trial);
        for (double v : r.V) line += "," + fmt17(v);
        for (double v : r.phiT) line += "," + fmt17(v);
        line += r.ties ? ",1" : ",0";
        return line;
    };

    const auto rows =
        run_trials<Row>(cfg.trials, cfg.parallelism, work, csvActive ? &csv : nullptr, format);

    const long m = static_cast<long>(rows.size());
    long tieCount = 0;
    for (const auto& r : rows) tieCount += r.ties ? 1 : 0;
    const std::string tieNote = "tie trials excluded: " + std::to_string(tieCount);

    ExperimentResult result;

    for (int j = 0; j < N; ++j) {
        std::vector<double> sample;
        sample.reserve(m);
        for (const auto& r : rows) sample.push_back(r.V[j]);
        const int order = j + 1;
        result.reports.push_back(ks_report(
            "ks_V" + std::to_string(order), sample,
            [order](double v) { return v <= 0.0 ? 0.0 : poisson_gap_cdf(order, v); }, cfg.allowance));
    }
    {
        std::vector<double> v1;
        for (const auto& r : rows) v1.push_back(r.V[0]);
        auto [mean, se] = mean_ci(v1);
        StatReport r;
        r.name = "mean_V1";
        r.sampleSize = m;
        r.statistic = mean - 2.0;
        r.mean = mean;
        r.stdErr = se;
        r.threshold = 3.0 * se;
        r.pass = std::fabs(r.statistic) <= r.threshold;
        r.notes = "limiting mean of the first point is 2";
        result.reports.push_back(r);
    }
    for (int j = 0; j + 1 < N; ++j) {
        std::vector<double> gaps;
        gaps.reserve(m);
        for (const auto& r : rows) gaps.push_back(r.V[j + 1] - r.V[j]);
        result.reports.push_back(ks_report(
            "ks_gap" + pair_label(j, j + 1), gaps,
            [](double g) { return g <= 0.0 ? 0.0 : 1.0 - std::exp(-0.5 * g); }, cfg.allowance));
    }

    // angle marginals and everything correlation-shaped use tie-free trials
    std::vector<const Row*> clean;
    for (const auto& r : rows)
        if (!r.ties) clean.push_back(&r);

    if (clean.size() < 2) {
        // the prime is far too small for this dimension: exact ties swallowed
        // every trial, so the angle statistics have no sample to stand on
        StatReport r;
        r.name = "tie_free_trials";
        r.sampleSize = m;
        r.statistic = static_cast<double>(clean.size());
        r.threshold = 2.0;
        r.pass = false;
        r.notes = "angle checks skipped; increase the prime for this dimension";
        result.reports.push_back(std::move(r));
        result.runtimeSeconds = runtime_since(t0);
        return result;
    }

    for (size_t p = 0; p < pairs.size(); ++p) {
        std::vector<double> sample;
        sample.reserve(clean.size());
        for (const Row* r : clean) sample.push_back(r->phiT[p]);
        result.reports.push_back(ks_report("ks_phi" + pair_label(pairs[p].first, pairs[p].second), sample,
                                           [](double c) { return c <= 0.0 ? 0.0 : half_normal_cdf(c); },
                                           cfg.allowance, tieNote));
    }

    for (int j = 0; j < N; ++j) {
        std::vector<double> vj;
        for (const Row* r : clean) vj.push_back(r->V[j]);
        for (size_t p = 0; p < pairs.size(); ++p) {
            std::vector<double> ph;
            for (const Row* r : clean) ph.push_back(r->phiT[p]);
            const std::string suffix =
                "V" + std::to_string(j + 1) + "_phi" + pair_label(pairs[p].first, pairs[p].second);
            result.reports.push_back(corr_report("corr_" + suffix, vj, ph, cfg.allowance, tieNote));
            result.reports.push_back(chi2_report("chi2_" + suffix, vj, ph, tieNote));
        }
    }
    for (size_t p = 0; p < pairs.size(); ++p) {
        for (size_t q = p + 1; q < pairs.size(); ++q) {
            std::vector<double> xp, xq;
            for (const Row* r : clean) {
                xp.push_back(r->phiT[p]);
                xq.push_back(r->phiT[q]);
            }
            const std::string suffix = "phi" + pair_label(pairs[p].first, pairs[p].second) + "_phi" +
                                       pair_label(pairs[q].first, pairs[q].second);
            result.reports.push_back(corr_report("corr_" + suffix, xp, xq, cfg.allowance, tieNote));
            result.reports.push_back(chi2_report("chi2_" + suffix, xp, xq, tieNote));
        }
    }
    {
        StatReport r;
        r.name = "tie_trials";
        r.sampleSize = m;
        r.statistic = static_cast<double>(tieCount);
        r.mean = m > 0 ? static_cast<double>(tieCount) / m : 0.0;
        r.threshold = 0.0;
        r.pass = true;
        r.notes = "informational; exact normSq ties among the first N pairs";
        result.reports.push_back(r);
    }

    result.runtimeSeconds = runtime_since(t0);
    return result;
}

// ---------------------------------------------------------------------------
// sphere angles: scaled pairwise angles of uniform directions against N(0,1)
// ---------------------------------------------------------------------------

ExperimentResult run_sphere_angles(const ExperimentConfig& cfg) {
    validate_common(cfg);
    require(cfg.n >= 2 && cfg.N >= 2, "sphere-angles needs n >= 2 and N >= 2");
    const auto t0 = std::chrono::steady_clock::now();

    const int N = cfg.N;
    const double sqrtn = std::sqrt(static_cast<double>(cfg.n));
    const auto pairs = upper_pairs(N);

    struct Row {
        std::vector<double> alphaT;
        double alpha12 = 0.0;
    };

    std::string header = "trial";
    for (const auto& [i, j] : pairs) header += ",alphat" + pair_label(i, j);
    header += ",alpha12";

    bool csvActive = false;
    std::ofstream csv = open_csv(cfg, header, csvActive);

    auto work = [&cfg, N, sqrtn, &pairs](long trial) {
        SamplerConfig sc{cfg.n, cfg.prime, cfg.seed, static_cast<uint64_t>(trial)};
        const auto dirs = sample_sphere_directions(cfg.n, N, sc);
        Row r;
        for (const auto& [i, j] : pairs) {
            double d = 0.0;
            for (int t = 0; t < cfg.n; ++t) d += dirs[i][t] * dirs[j][t];
            const double alpha = std::acos(std::clamp(d, -1.0, 1.0));
            if (i == 0 && j == 1) r.alpha12 = alpha;
            r.alphaT.push_back(sqrtn * (alpha - kPi / 2));
        }
        return r;
    };
    auto format = [](long trial, const Row& r) {
        std::string line = std::to_string(trial);
        for (double v : r.alphaT) line += "," + fmt17(v);
        line += "," + fmt17(r.alpha12);
        return line;
    };

    const auto rows =
        run_trials<Row>(cfg.trials, cfg.parallelism, work, csvActive ? &csv : nullptr, format);

    ExperimentResult result;
    for (size_t p = 0; p < pairs.size(); ++p) {
        std::vector<double> sample;
        for (const auto& r : rows) sample.push_back(r.alphaT[p]);
        result.reports.push_back(ks_report("ks_alphat" + pair_label(pairs[p].first, pairs[p].second),
                                           sample, [](double x) { return std_normal_cdf(x); },
                                           cfg.allowance));
    }
    for (size_t p = 0; p < pairs.size(); ++p) {
        for (size_t q = p + 1; q < pairs.size(); ++q) {
            std::vector<double> xp, xq;
            for (const auto& r : rows) {
                xp.push_back(r.alphaT[p]);
                xq.push_back(r.alphaT[q]);
            }
            const std::string suffix = "alphat" + pair_label(pairs[p].first, pairs[p].second) + "_alphat" +
                                       pair_label(pairs[q].first, pairs[q].second);
            result.reports.push_back(corr_report("corr_" + suffix, xp, xq, cfg.allowance));
        }
    }
    {
        std::vector<double> absFirst;
        for (const auto& r : rows) absFirst.push_back(std::fabs(r.alphaT[0]));
        result.reports.push_back(ks_report(
            "ks_abs_alphat12", absFirst, [](double c) { return c <= 0.0 ? 0.0 : half_normal_cdf(c); },
            cfg.allowance, "consistency: |scaled angle| should match the half-normal"));
    }
    {
        std::vector<double> raw;
        for (const auto& r : rows) raw.push_back(r.alpha12);
        result.reports.push_back(ks_report("ks_alpha12_mass", raw, angle_mass_cdf(cfg.n), cfg.allowance,
                                           "raw angle against the exact finite-n law"));
    }

    result.runtimeSeconds = runtime_since(t0);
    return result;
}

// ---------------------------------------------------------------------------
// concentration: P(some pair of the N shortest sits further than C/sqrt(n)
// from orthogonality)
// ---------------------------------------------------------------------------

ExperimentResult run_concentration(const ExperimentConfig& cfg) {
    validate_common(cfg);
    require(cfg.N >= 2, "concentration needs N >= 2");
    require(cfg.n >= std::max(8, cfg.N + 2), "n must be at least max(8, N+2)");
    require(cfg.C >= 0.0, "C must be nonnegative");
    require(is_prime(cfg.prime), "prime must be prime");
    const auto t0 = std::chrono::steady_clock::now();

    struct Row {
        double maxPhiT = 0.0;
        int exceeds = 0;
    };

    bool csvActive = false;
    std::ofstream csv = open_csv(cfg, "trial,maxScaledAngle,exceeds", csvActive);

    auto work = [&cfg](long trial) {
        SamplerConfig sc{cfg.n, cfg.prime, cfg.seed, static_cast<uint64_t>(trial)};
        const auto vecs = enumerate_shortest(sample_lattice(sc), cfg.N);
        Row r;
        for (int i = 0; i < cfg.N; ++i) {
            for (int j = i + 1; j < cfg.N; ++j) {
                const bool orthogonal = dot(vecs[i].coeffs, vecs[j].coeffs) == 0;  // exact
                const double phi = std::min(symmetrized_angle(vecs[i], vecs[j]), kPi / 2);
                const double phiT = scaled_angle(cfg.n, phi);
                r.maxPhiT = std::max(r.maxPhiT, orthogonal ? 0.0 : phiT);
                // C = 0: any non-orthogonal pair exceeds, even if the float
                // angle rounded all the way down to pi/2
                if (!orthogonal && (cfg.C == 0.0 || phiT > cfg.C)) r.exceeds = 1;
            }
        }
        return r;
    };
    auto format = [](long trial, const Row& r) {
        return std::to_string(trial) + "," + fmt17(r.maxPhiT) + "," + std::to_string(r.exceeds);
    };

    const auto rows =
        run_trials<Row>(cfg.trials, cfg.parallelism, work, csvActive ? &csv : nullptr, format);

    std::vector<double> flags;
    for (const auto& r : rows) flags.push_back(static_cast<double>(r.exceeds));
    auto [mean, se] = mean_ci(flags);

    const int numPairs = cfg.N * (cfg.N - 1) / 2;
    const double limit = cfg.C == 0.0 ? 1.0 : 1.0 - std::pow(half_normal_cdf(cfg.C), numPairs);
    const double vHeuristic = 2.0 * cfg.N;
    const double markov =
        cfg.C == 0.0 ? vHeuristic * vHeuristic / 8.0
                     : vHeuristic * vHeuristic / 8.0 * (1.0 - half_normal_cdf(cfg.C));

    StatReport r;
    r.name = "exceed_probability";
    r.sampleSize = static_cast<long>(rows.size());
    r.statistic = mean - limit;
    r.mean = mean;
    r.stdErr = se;
    r.threshold = std::max(3.0 * se, cfg.allowance);
    r.pass = std::fabs(r.statistic) <= r.threshold;
    r.notes = "limit reference " + fmt17(limit) + "; pair-count bound at V=2N: " + fmt17(markov);

    ExperimentResult result;
    result.reports.push_back(std::move(r));
    result.runtimeSeconds = runtime_since(t0);
    return result;
}

// ---------------------------------------------------------------------------
// pair-count expectation inside a ball, against the closed-form main term
// ---------------------------------------------------------------------------

ExperimentResult run_rogers_expectation(const ExperimentConfig& cfg) {
    validate_common(cfg);
    require(cfg.n >= 3, "rogers-expectation needs n >= 3");
    require(cfg.V > 0.0, "V must be positive");
    require(cfg.phi1 >= 0.0 && cfg.phi2 <= kPi / 2 + 1e-12 && cfg.phi1 < cfg.phi2, "invalid interval");
    require(is_prime(cfg.prime), "prime must be prime");
    const auto t0 = std::chrono::steady_clock::now();

    const double ell = std::pow(cfg.V / ball_volume(cfg.n, 1.0), 1.0 / cfg.n);

    struct Row {
        long pairs = 0;
    };

    bool csvActive = false;
    std::ofstream csv = open_csv(cfg, "trial,pairs", csvActive);

    auto work = [&cfg, ell](long trial) {
        SamplerConfig sc{cfg.n, cfg.prime, cfg.seed, static_cast<uint64_t>(trial)};
        std::vector<LatticeVector> vecs;
        try {
            vecs = enumerate_within(sample_lattice(sc), ell);
        } catch (const std::runtime_error& e) {
            if (std::string(e.what()) == "radius cap exceeded")
                throw std::runtime_error("radius cap exceeded; V is too large for this dimension");
            throw;
        }
        Row r;
        for (size_t i = 0; i < vecs.size(); ++i) {
            for (size_t j = i + 1; j < vecs.size(); ++j) {
                const double phi = symmetrized_angle(vecs[i], vecs[j]);
                if (phi >= cfg.phi1 && phi <= cfg.phi2) ++r.pairs;
            }
        }
        return r;
    };
    auto format = [](long trial, const Row& r) {
        return std::to_string(trial) + "," + std::to_string(r.pairs);
    };

    const auto rows =
        run_trials<Row>(cfg.trials, cfg.parallelism, work, csvActive ? &csv : nullptr, format);

    std::vector<double> counts;
    for (const auto& r : rows) counts.push_back(static_cast<double>(r.pairs));
    auto [mean, se] = mean_ci(counts);
    const double analytic = rogers_pair_expectation(cfg.n, cfg.V, cfg.phi1, cfg.phi2);

    StatReport r;
    r.name = "pair_count_mean";
    r.sampleSize = static_cast<long>(rows.size());
    r.statistic = mean - analytic;
    r.mean = mean;
    r.stdErr = se;
    // the extra sqrt(analytic/m) floor keeps the empty-ball regime honest: a
    // correct run with zero observed pairs must still pass
    r.threshold = std::max({3.0 * se, 3.0 * std::sqrt(analytic / static_cast<double>(rows.size())),
                            0.1 * analytic});
    r.pass = std::fabs(r.statistic) <= r.threshold;
    r.notes = "analytic main term " + fmt17(analytic) + "; remainder is exponentially small in n";

    ExperimentResult result;
    result.reports.push_back(std::move(r));
    result.runtimeSeconds = runtime_since(t0);
    return result;
}

// ---------------------------------------------------------------------------
// tuple-count expectation over distinct process points (and optionally over
// actual lattices), against 2^{-k} prod(len) times the half-normal masses
// ---------------------------------------------------------------------------

namespace {

// ordered k-tuples of distinct indices whose values land in the box and whose
// pairwise angles land in the window
long count_tuples(const std::vector<double>& values,
                  const std::function<double(int, int)>& angle,
                  const std::vector<std::pair<double, double>>& box,
                  const std::optional<std::pair<double, double>>& angleBox) {
    const int k = static_cast<int>(box.size());
    const int K = static_cast<int>(values.size());
    std::vector<int> idx;
    idx.reserve(k);
    long total = 0;
    std::function<void(int)> rec = [&](int level) {
        if (level == k) {
            ++total;
            return;
        }
        for (int i = 0; i < K; ++i) {
            bool used = false;
            for (int u : idx)
                if (u == i) used = true;
            if (used) continue;
            if (values[i] < box[level].first || values[i] > box[level].second) continue;
            if (angleBox) {
                bool ok = true;
                for (int u : idx) {
                    const double a = angle(std::min(u, i), std::max(u, i));
                    if (a < angleBox->first || a > angleBox->second) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
            }
            idx.push_back(i);
            rec(level + 1);
            idx.pop_back();
        }
    };
    rec(0);
    return total;
}

}  // namespace

ExperimentResult run_campbell(const ExperimentConfig& cfg) {
    validate_common(cfg);
    const int k = static_cast<int>(cfg.box.size());
    require(k >= 2, "campbell needs at least 2 box intervals");
    require(k <= 4, "campbell supports at most 4 box intervals");
    for (const auto& [lo, hi] : cfg.box)
        require(lo >= 0.0 && hi >= lo, "campbell box intervals must satisfy 0 <= lo <= hi");
    if (cfg.angleBox)
        require(cfg.angleBox->first >= 0.0 && cfg.angleBox->second >= cfg.angleBox->first,
                "angle box must satisfy 0 <= lo <= hi");
    require(cfg.latticeTrials == 0 || cfg.n >= 8, "lattice-side campbell needs n >= 8");
    if (cfg.latticeTrials > 0) require(is_prime(cfg.prime), "prime must be prime");
    const auto t0 = std::chrono::steady_clock::now();

    double maxU = 0.0;
    for (const auto& [lo, hi] : cfg.box) maxU = std::max(maxU, hi);
    require(maxU > 0.0, "campbell box is empty");

    double closed = campbell_box_expectation(k, cfg.box);
    if (cfg.angleBox) {
        const double mass = half_normal_cdf(cfg.angleBox->second) - half_normal_cdf(cfg.angleBox->first);
        closed *= std::pow(mass, k * (k - 1) / 2);
    }

    struct Row {
        long tuples = 0;
    };

    bool csvActive = false;
    std::ofstream csv = open_csv(cfg, "trial,side,tuples", csvActive);

    auto limitWork = [&cfg, maxU](long trial) {
        CounterRng gapRng(cfg.seed, static_cast<uint64_t>(trial), Stream::LimitGap);
        std::vector<double> pts;
        for (double t = gapRng.exponential(2.0); t <= maxU; t += gapRng.exponential(2.0))
            pts.push_back(t);
        const int K = static_cast<int>(pts.size());
        std::vector<std::vector<double>> ang;
        if (cfg.angleBox) {
            CounterRng angRng(cfg.seed, static_cast<uint64_t>(trial), Stream::LimitAngle);
            ang.assign(K, std::vector<double>(K, 0.0));
            for (int i = 0; i < K; ++i)
                for (int j = i + 1; j < K; ++j) ang[i][j] = std::fabs(angRng.gaussian());
        }
        Row r;
        r.tuples = count_tuples(
            pts, [&ang](int i, int j) { return ang[i][j]; }, cfg.box, cfg.angleBox);
        return r;
    };
    auto limitFormat = [](long trial, const Row& r) {
        return std::to_string(trial) + ",limit," + std::to_string(r.tuples);
    };

    const auto limitRows =
        run_trials<Row>(cfg.trials, cfg.parallelism, limitWork, csvActive ? &csv : nullptr, limitFormat);

    ExperimentResult result;
    {
        std::vector<double> counts;
        for (const auto& r : limitRows) counts.push_back(static_cast<double>(r.tuples));
        auto [mean, se] = mean_ci(counts);
        StatReport rep;
        rep.name = "campbell_limit";
        rep.sampleSize = static_cast<long>(limitRows.size());
        rep.statistic = mean - closed;
        rep.mean = mean;
        rep.stdErr = se;
        rep.threshold =
            std::max(3.0 * se, 3.0 * std::sqrt(closed / static_cast<double>(limitRows.size())));
        rep.pass = std::fabs(rep.statistic) <= rep.threshold;
        rep.notes = "closed form " + fmt17(closed);
        result.reports.push_back(std::move(rep));
    }

    if (cfg.latticeTrials > 0) {
        const double ell = std::pow(maxU / ball_volume(cfg.n, 1.0), 1.0 / cfg.n);
        auto latticeWork = [&cfg, ell](long trial) {
            SamplerConfig sc{cfg.n, cfg.prime, cfg.seed, static_cast<uint64_t>(trial)};
            const LatticeBasis basis = sample_lattice(sc);
            const auto vecs = enumerate_within(basis, ell);
            std::vector<double> vols;
            for (const auto& v : vecs) {
                const double len = basis.scale * std::sqrt(v.normSq.get_d());
                vols.push_back(ball_volume(cfg.n, len));
            }
            auto angle = [&cfg, &vecs](int i, int j) {
                return scaled_angle(cfg.n, std::min(symmetrized_angle(vecs[i], vecs[j]), kPi / 2));
            };
            Row r;
            r.tuples = count_tuples(vols, angle, cfg.box, cfg.angleBox);
            return r;
        };
        auto latticeFormat = [](long trial, const Row& r) {
            return std::to_string(trial) + ",lattice," + std::to_string(r.tuples);
        };
        const auto latticeRows = run_trials<Row>(cfg.latticeTrials, cfg.parallelism, latticeWork,
                                                 csvActive ? &csv : nullptr, latticeFormat);
        std::vector<double> counts;
        for (const auto& r : latticeRows) counts.push_back(static_cast<double>(r.tuples));
        auto [mean, se] = mean_ci(counts);
        StatReport rep;
        rep.name = "campbell_lattice";
        rep.sampleSize = static_cast<long>(latticeRows.size());
        rep.statistic = mean - closed;
        rep.mean = mean;
        rep.stdErr = se;
        rep.threshold = std::max(3.0 * se, 0.1 * closed);
        rep.pass = std::fabs(rep.statistic) <= rep.threshold;
        rep.notes = "closed form " + fmt17(closed) + "; finite-n lattice side";
        result.reports.push_back(std::move(rep));
    }

    result.runtimeSeconds = runtime_since(t0);
    return result;
}

// ---------------------------------------------------------------------------
// successive minima: coincidence with the shortest pairs, and the volume law
// ---------------------------------------------------------------------------

ExperimentResult run_successive_minima(const ExperimentConfig& cfg) {
    validate_common(cfg);
    require(cfg.N >= 1 && cfg.N <= cfg.n, "successive-minima needs 1 <= N <= n");
    require(cfg.n >= std::max(8, cfg.N + 2), "n must be at least max(8, N+2)");
    require(is_prime(cfg.prime), "prime must be prime");
    const auto t0 = std::chrono::steady_clock::now();

    const int N = cfg.N;

    struct Row {
        std::vector<double> lambdas;
        bool coincide = false;
    };

    std::string header = "trial";
    for (int i = 0; i < N; ++i) header += ",lambda" + std::to_string(i + 1);
    header += ",coincide";

    bool csvActive = false;
    std::ofstream csv = open_csv(cfg, header, csvActive);

    auto work = [&cfg, N](long trial) {
        SamplerConfig sc{cfg.n, cfg.prime, cfg.seed, static_cast<uint64_t>(trial)};
        auto [lambdas, coincide] = successive_minima(sample_lattice(sc), N);
        return Row{std::move(lambdas), coincide};
    };
    auto format = [](long trial, const Row& r) {
        std::string line = std::to_string(trial);
        for (double v : r.lambdas) line += "," + fmt17(v);
        line += r.coincide ? ",1" : ",0";
        return line;
    };

    const auto rows =
        run_trials<Row>(cfg.trials, cfg.parallelism, work, csvActive ? &csv : nullptr, format);

    ExperimentResult result;
    {
        std::vector<double> flags;
        for (const auto& r : rows) flags.push_back(r.coincide ? 1.0 : 0.0);
        auto [mean, se] = mean_ci(flags);
        StatReport rep;
        rep.name = "coincidence_fraction";
        rep.sampleSize = static_cast<long>(rows.size());
        rep.statistic = mean;
        rep.mean = mean;
        rep.stdErr = se;
        rep.threshold = 1.0 - cfg.allowance;  // limit is 1; allowance bounds the deficit
        rep.pass = mean >= rep.threshold;
        rep.notes = "fraction of trials whose first N pairs are independent";
        result.reports.push_back(std::move(rep));
    }
    for (int i = 0; i < N; ++i) {
        std::vector<double> sample;
        for (const auto& r : rows) sample.push_back(ball_volume(cfg.n, r.lambdas[i]));
        const int order = i + 1;
        result.reports.push_back(ks_report(
            "ks_lambda" + std::to_string(order), sample,
            [order](double v) { return v <= 0.0 ? 0.0 : poisson_gap_cdf(order, v); }, cfg.allowance,
            "ball volume at lambda_" + std::to_string(order) + " against the limit law"));
    }

    result.runtimeSeconds = runtime_since(t0);
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "joint-law") return run_joint_law(cfg);
    if (cfg.experiment == "sphere-angles") return run_sphere_angles(cfg);
    if (cfg.experiment == "concentration") return run_concentration(cfg);
    if (cfg.experiment == "rogers-expectation") return run_rogers_expectation(cfg);
    if (cfg.experiment == "campbell") return run_campbell(cfg);
    if (cfg.experiment == "successive-minima") return run_successive_minima(cfg);
    throw std::invalid_argument("unknown experiment: " + cfg.experiment);
}

bool all_pass(const std::vector<StatReport>& reports) {
    for (const auto& r : reports)
        if (!r.pass) return false;
    return true;
}

std::string report_table(const std::vector<StatReport>& reports) {
    std::ostringstream os;
    for (const auto& r : reports) {
        os << (r.pass ? "[pass] " : "[FAIL] ") << r.name;
        for (size_t pad = r.name.size(); pad < 24; ++pad) os << ' ';
        os << " m=" << r.sampleSize << " stat=" << fmt17(r.statistic);
        if (r.hasPValue) os << " p=" << fmt17(r.pValue);
        os << " mean=" << fmt17(r.mean) << " se=" << fmt17(r.stdErr) << " thr=" << fmt17(r.threshold);
        if (!r.notes.empty()) os << "  (" << r.notes << ")";
        os << '\n';
    }
    return os.str();
}

std::string reports_json(const ExperimentConfig& cfg, const ExperimentResult& result) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json c;
    c["experiment"] = cfg.experiment;
    c["n"] = cfg.n;
    c["N"] = cfg.N;
    c["trials"] = cfg.trials;
    c["prime"] = cfg.prime.get_str();
    c["seed"] = cfg.seed;
    c["C"] = cfg.C;
    c["V"] = cfg.V;
    c["phi1"] = cfg.phi1;
    c["phi2"] = cfg.phi2;
    nlohmann::ordered_json boxArr = nlohmann::ordered_json::array();
    for (const auto& [lo, hi] : cfg.box) boxArr.push_back({lo, hi});
    c["box"] = boxArr;
    if (cfg.angleBox)
        c["angleBox"] = {cfg.angleBox->first, cfg.angleBox->second};
    else
        c["angleBox"] = nullptr;
    c["latticeTrials"] = cfg.latticeTrials;
    c["out"] = cfg.outPath;
    c["format"] = cfg.format;
    c["parallelism"] = cfg.parallelism;
    c["allowance"] = cfg.allowance;
    j["config"] = c;

    nlohmann::ordered_json reps = nlohmann::ordered_json::array();
    for (const auto& r : result.reports) {
        nlohmann::ordered_json o;
        o["name"] = r.name;
        o["sampleSize"] = r.sampleSize;
        o["statistic"] = r.statistic;
        if (r.hasPValue) o["pValue"] = r.pValue;
        o["mean"] = r.mean;
        o["stdErr"] = r.stdErr;
        o["threshold"] = r.threshold;
        o["verdict"] = r.pass ? "pass" : "fail";
        o["notes"] = r.notes;
        reps.push_back(o);
    }
    j["reports"] = reps;
    j["runtimeSeconds"] = result.runtimeSeconds;
    return j.dump(2) + "\n";
}

}  // namespace latlab
