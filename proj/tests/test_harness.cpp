#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "svct/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <string>

using namespace svct;

namespace {

StudyConfig tiny_config() {
    StudyConfig cfg;
    cfg.kind = StudyKind::SizePower;
    cfg.n_list = {200};
    cfg.lambdas = {0.0, 1.0};
    cfg.reps = 6;
    cfg.seed = 5;
    return cfg;
}

bool same_cell_ignoring_time(const StudyCell& a, const StudyCell& b) {
    return a.study == b.study && a.functional == b.functional && a.d == b.d && a.n == b.n &&
           a.lambda == b.lambda && a.tau == b.tau && a.reps == b.reps &&
           a.rejections == b.rejections && a.power == b.power && a.se == b.se &&
           a.mean_stat == b.mean_stat && a.warnings == b.warnings;
}

} // namespace

TEST_CASE("parallel and serial runners produce identical cells") {
    const StudyConfig cfg = tiny_config();
    setenv("SVCT_THREADS", "3", 1);
    const StudyResult parallel = run_power_study(cfg);
    unsetenv("SVCT_THREADS");
    const StudyResult serial = run_power_study_serial(cfg);
    REQUIRE(parallel.cells.size() == serial.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(same_cell_ignoring_time(parallel.cells[i], serial.cells[i]));
    }
}

TEST_CASE("power increases with the deviation strength") {
    StudyConfig cfg = tiny_config();
    cfg.n_list = {400};
    cfg.reps = 40;
    cfg.seed = 21;
    const StudyResult result = run_power_study_serial(cfg);
    REQUIRE(result.cells.size() == 2);
    const StudyCell& null_cell = result.cells[0];
    const StudyCell& alt_cell = result.cells[1];
    CHECK(null_cell.lambda == 0.0);
    CHECK(alt_cell.lambda == 1.0);
    CHECK(null_cell.power < 0.35);
    CHECK(alt_cell.power > 0.6);
    CHECK(alt_cell.power >= null_cell.power);
    // se is the binomial standard error of the power estimate
    const double expect_se =
        std::sqrt(alt_cell.power * (1 - alt_cell.power) / alt_cell.reps);
    CHECK(alt_cell.se == doctest::Approx(expect_se).epsilon(1e-12));
}

TEST_CASE("power increases with the sample size") {
    StudyConfig cfg = tiny_config();
    cfg.n_list = {200, 800};
    cfg.lambdas = {1.0};
    cfg.reps = 30;
    cfg.seed = 31;
    const StudyResult result = run_power_study_serial(cfg);
    REQUIRE(result.cells.size() == 2);
    CHECK(result.cells[1].power >= result.cells[0].power - 0.1);
}

TEST_CASE("pseudo-observation study runs estimated and oracle tracks") {
    StudyConfig cfg;
    cfg.kind = StudyKind::PseudoObsEffect;
    cfg.n_list = {300};
    cfg.lambdas = {0.6};
    cfg.reps = 5;
    cfg.seed = 3;
    const StudyResult result = run_power_study_serial(cfg);
    std::set<std::string> names;
    for (const auto& cell : result.cells) {
        names.insert(cell.study);
        CHECK(cell.reps == 5);
    }
    CHECK(names == std::set<std::string>{"ex4.1-ppit/est", "ex4.1-ppit/true"});
}

TEST_CASE("functional study reports the fixed-partition comparison row") {
    StudyConfig cfg;
    cfg.kind = StudyKind::FunctionalComparison;
    cfg.functional = ParamFunctional::Kind::Difference;
    cfg.n_list = {300};
    cfg.lambdas = {1.0};
    cfg.reps = 5;
    cfg.seed = 8;
    const StudyResult result = run_power_study_serial(cfg);
    REQUIRE(result.cells.size() == 2);
    std::set<std::string> names{result.cells[0].study, result.cells[1].study};
    CHECK(names == std::set<std::string>{"ex4.1-functional", "ex4.1-functional/gamma0"});
    for (const auto& cell : result.cells) CHECK(cell.functional == "alpha_D");
}

TEST_CASE("dimension scan walks the d list") {
    StudyConfig cfg;
    cfg.kind = StudyKind::DimensionScan;
    cfg.d_list = {4, 5};
    cfg.n_list = {250};
    cfg.lambdas = {0.5};
    cfg.reps = 3;
    cfg.seed = 12;
    const StudyResult result = run_power_study_serial(cfg);
    REQUIRE(result.cells.size() == 2);
    CHECK(result.cells[0].d == 4);
    CHECK(result.cells[1].d == 5);
    for (const auto& cell : result.cells) CHECK(cell.study == "ex5.1");
}

TEST_CASE("penalty probe summarises the bound distribution") {
    StudyConfig cfg;
    cfg.kind = StudyKind::PenaltyProbe;
    cfg.n_list = {400};
    cfg.reps = 50;
    cfg.seed = 6;
    cfg.candidates = {{1.0, 0.5}};
    const StudyResult result = run_penalty_probe(cfg);
    REQUIRE(result.cells.size() == 1);
    const StudyCell& cell = result.cells[0];
    CHECK(cell.study == "penalty-probe");
    CHECK(cell.lambda == doctest::Approx(1.0 / std::sqrt(400.0)).epsilon(1e-12));
    // Under the null the bound rarely reaches the candidate penalty.
    CHECK(cell.rejections <= cell.reps / 5);
    CHECK(cell.mean_stat < 0.15); // sample maximum of b_n
    CHECK(cell.functional.find("c=1") != std::string::npos);

    // A single replication reports its own bound as the maximum.
    cfg.reps = 1;
    const StudyResult one = run_penalty_probe(cfg);
    CHECK(one.cells[0].reps == 1);
    CHECK((one.cells[0].rejections == 0 || one.cells[0].rejections == 1));
}

TEST_CASE("study CSV has the fixed column layout") {
    const StudyResult result = run_power_study_serial(tiny_config());
    std::ostringstream os;
    write_study_csv(os, result);
    std::istringstream is(os.str());
    std::string line;
    REQUIRE(std::getline(is, line));
    CHECK(line == "study,functional,d,n,lambda,tau,reps,rejections,power,se,mean_stat,mean_ms");
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        CHECK(std::count(line.begin(), line.end(), ',') == 11);
        ++rows;
    }
    CHECK(rows == static_cast<int>(result.cells.size()));
}

TEST_CASE("configuration validation") {
    StudyConfig cfg = tiny_config();
    cfg.reps = 0;
    CHECK_THROWS_AS(run_power_study_serial(cfg), std::invalid_argument);
    cfg = tiny_config();
    cfg.n_list = {5};
    CHECK_THROWS_AS(run_power_study_serial(cfg), std::invalid_argument);
    cfg = tiny_config();
    cfg.kind = StudyKind::PenaltyProbe;
    CHECK_THROWS_AS(run_power_study_serial(cfg), std::invalid_argument);
    cfg = tiny_config(); // probe entry point rejects other kinds
    CHECK_THROWS_AS(run_penalty_probe(cfg), std::invalid_argument);
}
