#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "latlab/experiments.hpp"

using namespace latlab;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const StatReport* find_report(const ExperimentResult& r, const std::string& name) {
    for (const auto& rep : r.reports)
        if (rep.name == name) return &rep;
    return nullptr;
}

ExperimentConfig small_joint() {
    ExperimentConfig cfg;
    cfg.experiment = "joint-law";
    cfg.n = 8;
    cfg.N = 3;
    cfg.trials = 25;
    cfg.prime = 1009;
    cfg.seed = 5;
    cfg.parallelism = 1;
    cfg.allowance = 0.9;  // smoke run, not a statistical claim
    return cfg;
}

}  // namespace

TEST_CASE("joint-law smoke run produces the full report set") {
    auto cfg = small_joint();
    auto res = run_joint_law(cfg);
    CHECK(res.runtimeSeconds > 0.0);
    CHECK(find_report(res, "ks_V1") != nullptr);
    CHECK(find_report(res, "ks_gap12") != nullptr);
    CHECK(find_report(res, "ks_phi23") != nullptr);
    CHECK(find_report(res, "corr_V1_phi12") != nullptr);
    CHECK(find_report(res, "corr_phi13_phi23") != nullptr);
    CHECK(find_report(res, "tie_trials") != nullptr);
    const auto* ks = find_report(res, "ks_V1");
    CHECK(ks->sampleSize == 25);
    CHECK(ks->hasPValue);
    CHECK(ks->statistic > 0.0);
    CHECK(ks->statistic <= 1.0);
}

TEST_CASE("identical configs write byte-identical CSV, any parallelism") {
    auto cfg = small_joint();
    cfg.outPath = "/tmp/latlab_det_a.csv";
    run_joint_law(cfg);
    cfg.outPath = "/tmp/latlab_det_b.csv";
    run_joint_law(cfg);
    cfg.outPath = "/tmp/latlab_det_c.csv";
    cfg.parallelism = 3;
    run_joint_law(cfg);
    const std::string a = slurp("/tmp/latlab_det_a.csv");
    CHECK(a == slurp("/tmp/latlab_det_b.csv"));
    CHECK(a == slurp("/tmp/latlab_det_c.csv"));

    // quick shape check: header plus one line per trial
    CHECK(a.rfind("trial,", 0) == 0);
    long lines = 0;
    for (char c : a)
        if (c == '\n') ++lines;
    CHECK(lines == 26);
    std::remove("/tmp/latlab_det_a.csv");
    std::remove("/tmp/latlab_det_b.csv");
    std::remove("/tmp/latlab_det_c.csv");
}

TEST_CASE("different seeds change the samples") {
    auto cfg = small_joint();
    cfg.outPath = "/tmp/latlab_seed_a.csv";
    run_joint_law(cfg);
    cfg.seed = 6;
    cfg.outPath = "/tmp/latlab_seed_b.csv";
    run_joint_law(cfg);
    CHECK(slurp("/tmp/latlab_seed_a.csv") != slurp("/tmp/latlab_seed_b.csv"));
    std::remove("/tmp/latlab_seed_a.csv");
    std::remove("/tmp/latlab_seed_b.csv");
}

TEST_CASE("a prime far too small for the dimension fails the tie guard, loudly") {
    ExperimentConfig cfg;
    cfg.experiment = "joint-law";
    cfg.n = 8;
    cfg.N = 3;
    cfg.trials = 10;
    cfg.prime = 2;
    cfg.seed = 1;
    cfg.parallelism = 1;
    auto res = run_joint_law(cfg);
    const auto* guard = find_report(res, "tie_free_trials");
    REQUIRE(guard != nullptr);
    CHECK_FALSE(guard->pass);
    CHECK(guard->notes.find("prime") != std::string::npos);
    CHECK_FALSE(all_pass(res.reports));
}

TEST_CASE("sphere-angles smoke run passes its own checks") {
    ExperimentConfig cfg;
    cfg.experiment = "sphere-angles";
    cfg.n = 50;
    cfg.N = 3;
    cfg.trials = 400;
    cfg.seed = 2;
    cfg.parallelism = 1;
    cfg.allowance = 0.12;
    auto res = run_sphere_angles(cfg);
    CHECK(find_report(res, "ks_alphat12") != nullptr);
    CHECK(find_report(res, "ks_alphat23") != nullptr);
    CHECK(all_pass(res.reports));
}

TEST_CASE("campbell limit side approximates the closed form") {
    ExperimentConfig cfg;
    cfg.experiment = "campbell";
    cfg.trials = 4000;
    cfg.seed = 3;
    cfg.parallelism = 1;
    cfg.box = {{0.0, 1.0}, {0.0, 1.0}};
    auto res = run_campbell(cfg);
    const auto* rep = find_report(res, "campbell_limit");
    REQUIRE(rep != nullptr);
    CHECK(rep->mean == doctest::Approx(0.25).epsilon(0.25));
    CHECK(rep->pass);
}

TEST_CASE("successive-minima smoke run") {
    ExperimentConfig cfg;
    cfg.experiment = "successive-minima";
    cfg.n = 8;
    cfg.N = 2;
    cfg.trials = 40;
    cfg.prime = 100003;
    cfg.seed = 4;
    cfg.parallelism = 1;
    cfg.allowance = 0.9;
    auto res = run_successive_minima(cfg);
    const auto* co = find_report(res, "coincidence_fraction");
    REQUIRE(co != nullptr);
    CHECK(co->mean > 0.5);
    CHECK(find_report(res, "ks_lambda1") != nullptr);
    CHECK(find_report(res, "ks_lambda2") != nullptr);
}

TEST_CASE("concentration smoke run") {
    ExperimentConfig cfg;
    cfg.experiment = "concentration";
    cfg.n = 10;
    cfg.N = 2;
    cfg.trials = 60;
    cfg.prime = 10007;
    cfg.seed = 8;
    cfg.C = 1.0;
    cfg.parallelism = 1;
    cfg.allowance = 0.9;
    auto res = run_concentration(cfg);
    const auto* rep = find_report(res, "exceed_probability");
    REQUIRE(rep != nullptr);
    CHECK(rep->sampleSize == 60);
    CHECK(rep->mean >= 0.0);
    CHECK(rep->mean <= 1.0);
}

TEST_CASE("rogers pair counts track the main term at modest size") {
    ExperimentConfig cfg;
    cfg.experiment = "rogers-expectation";
    cfg.n = 4;
    cfg.V = 2.0;
    cfg.trials = 80;
    cfg.prime = 10007;
    cfg.seed = 9;
    cfg.parallelism = 1;
    auto res = run_rogers_expectation(cfg);
    const auto* rep = find_report(res, "pair_count_mean");
    REQUIRE(rep != nullptr);
    CHECK(rep->sampleSize == 80);
    CHECK(rep->mean >= 0.0);
    CHECK(rep->threshold > 0.0);
}

TEST_CASE("dispatcher routes and rejects") {
    auto cfg = small_joint();
    auto direct = run_joint_law(cfg);
    auto routed = run_experiment(cfg);
    REQUIRE(direct.reports.size() == routed.reports.size());
    for (size_t i = 0; i < direct.reports.size(); ++i) {
        CHECK(direct.reports[i].name == routed.reports[i].name);
        CHECK(direct.reports[i].statistic == routed.reports[i].statistic);
    }
    cfg.experiment = "no-such-thing";
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("json report document round-trips") {
    auto cfg = small_joint();
    auto res = run_joint_law(cfg);
    auto doc = nlohmann::json::parse(reports_json(cfg, res));
    CHECK(doc["config"]["experiment"] == "joint-law");
    CHECK(doc["config"]["n"] == 8);
    CHECK(doc["config"]["prime"] == "1009");
    CHECK(doc["config"]["seed"] == 5);
    REQUIRE(doc["reports"].is_array());
    CHECK(doc["reports"].size() == res.reports.size());
    CHECK(doc["reports"][0].contains("name"));
    CHECK(doc["reports"][0].contains("statistic"));
    CHECK(doc["reports"][0].contains("verdict"));
    CHECK(doc["runtimeSeconds"].is_number());
}

TEST_CASE("fmt17 round-trips doubles") {
    for (double x : {0.1, 1.0 / 3.0, 12345.6789e-7, 2.0}) {
        CHECK(std::stod(fmt17(x)) == x);
    }
}

TEST_CASE("report_table marks failures") {
    StatReport ok;
    ok.name = "fine";
    ok.pass = true;
    StatReport bad;
    bad.name = "broken";
    bad.pass = false;
    const std::string table = report_table({ok, bad});
    CHECK(table.find("[pass]") != std::string::npos);
    CHECK(table.find("[FAIL]") != std::string::npos);
    CHECK(table.find("broken") != std::string::npos);
}
