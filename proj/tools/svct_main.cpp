#include "svct/csv.hpp"
#include "svct/errors.hpp"
#include "svct/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

svct::ParamFunctional::Kind parse_functional(const std::string& name) {
    if (name == "sum" || name == "alpha") return svct::ParamFunctional::Kind::Sum;
    if (name == "interaction" || name == "alpha_I") return svct::ParamFunctional::Kind::Interaction;
    if (name == "difference" || name == "alpha_D") return svct::ParamFunctional::Kind::Difference;
    throw CLI::ValidationError("--functional", "unknown functional '" + name + "'");
}

svct::CovMode parse_cov(const std::string& name, int b, std::uint64_t seed) {
    if (name == "sandwich") return svct::CovMode::sandwich();
    if (name == "oracle") return svct::CovMode::oracle_star();
    if (name == "known-margins") return svct::CovMode::sandwich_known_margins();
    if (name == "bootstrap") return svct::CovMode::bootstrap(b, seed);
    throw CLI::ValidationError("--cov", "unknown covariance mode '" + name + "'");
}

svct::EdgeRef parse_edge(const std::string& text) {
    svct::EdgeRef e;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%d,%d%c", &e.i, &e.j, &extra) != 2) {
        throw CLI::ValidationError("--edge", "expected i,j (e.g. 1,3), got '" + text + "'");
    }
    return e;
}

std::vector<svct::PenaltyCandidate> parse_candidates(const std::string& text) {
    std::vector<svct::PenaltyCandidate> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        svct::PenaltyCandidate cand;
        char extra = 0;
        if (std::sscanf(item.c_str(), "%lf:%lf%c", &cand.c, &cand.beta, &extra) != 2) {
            throw CLI::ValidationError("--candidates", "expected c:beta pairs, got '" + item + "'");
        }
        out.push_back(cand);
    }
    if (out.empty()) throw CLI::ValidationError("--candidates", "empty candidate list");
    return out;
}

void write_output(const std::string& path, const std::string& what,
                  const std::function<void(std::ostream&)>& writer) {
    if (path.empty()) {
        writer(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    writer(os);
    std::cerr << what << " written to " << path << "\n";
}

void print_warnings(const svct::StudyResult& result) {
    for (const auto& cell : result.cells) {
        for (const auto& w : cell.warnings) {
            std::cerr << "warning: " << cell.study << " n=" << cell.n << " lambda=" << cell.lambda
                      << ": " << w << "\n";
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constant conditional correlation test for D-vine copulas"};
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "Draw a pseudo-sample from an example D-vine");
    sim->set_config("--config");
    std::string sim_example = "ex4.1";
    int sim_d = 4, sim_n = 1000;
    double sim_tau = 0.4, sim_lambda = 1.0;
    std::uint64_t sim_seed = 1;
    std::string sim_functional = "sum", sim_out;
    sim->add_option("--example", sim_example, "ex4.1 or ex5.1")
        ->check(CLI::IsMember({"ex4.1", "ex5.1"}));
    sim->add_option("--d", sim_d, "dimension (ex5.1)")->check(CLI::Range(4, 64));
    sim->add_option("--tau", sim_tau, "Kendall tau of the first tree")->check(CLI::Range(0.01, 0.95));
    sim->add_option("--lambda", sim_lambda, "deviation strength in [0,1]")
        ->check(CLI::Range(0.0, 1.0));
    sim->add_option("--functional", sim_functional, "sum | interaction | difference");
    sim->add_option("--n", sim_n, "sample size")->check(CLI::Range(2, 10000000));
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "output CSV (stdout when omitted)");
    sim->callback([&] {
        const auto which =
            sim_example == "ex4.1" ? svct::ExampleStudy::FourDim : svct::ExampleStudy::HighDim;
        const auto spec = svct::build_example_spec(which, sim_d, sim_tau, sim_lambda,
                                                   parse_functional(sim_functional));
        const svct::Matrix u = svct::simulate(spec, sim_n, sim_seed);
        std::vector<std::string> headers;
        for (int c = 1; c <= spec.d; ++c) headers.push_back("u" + std::to_string(c));
        write_output(sim_out, "sample", [&](std::ostream& os) {
            svct::write_matrix_csv(os, u, headers);
        });
    });

    // ---- test --------------------------------------------------------------
    auto* tst = app.add_subcommand("test", "CCC test on a data set");
    tst->set_config("--config");
    std::string tst_data, tst_families = "clayton", tst_edge, tst_cov = "sandwich";
    bool tst_uniform = false;
    double tst_alpha = 0.05, tst_penalty_c = 1.0, tst_penalty_beta = 0.5;
    int tst_jmax = 2, tst_min_leaf = 100, tst_boot_b = 500;
    std::uint64_t tst_boot_seed = 1;
    tst->add_option("--data", tst_data, "input CSV with header row")
        ->required()
        ->check(CLI::ExistingFile);
    tst->add_flag("--already-uniform", tst_uniform,
                  "input is already a pseudo-sample; skip the rank transform");
    tst->add_option("--families", tst_families,
                    "pair-copula family fitted on every edge (e.g. clayton, survival-gumbel)");
    tst->add_option("--edge", tst_edge, "test a single edge i,j instead of the full procedure");
    tst->add_option("--alpha", tst_alpha, "test level")->check(CLI::Range(1e-6, 0.5));
    tst->add_option("--cov", tst_cov, "sandwich | oracle | known-margins | bootstrap");
    tst->add_option("--bootstrap-b", tst_boot_b, "bootstrap replicates")->check(CLI::Range(2, 100000));
    tst->add_option("--bootstrap-seed", tst_boot_seed, "bootstrap seed");
    tst->add_option("--jmax", tst_jmax, "decision tree depth")->check(CLI::Range(1, 6));
    tst->add_option("--min-leaf", tst_min_leaf, "minimum observations per leaf")
        ->check(CLI::Range(2, 1000000));
    tst->add_option("--penalty-c", tst_penalty_c, "penalty constant in c*n^(-beta)");
    tst->add_option("--penalty-beta", tst_penalty_beta, "penalty exponent in c*n^(-beta)");
    tst->callback([&] {
        std::ifstream is(tst_data);
        if (!is) throw std::runtime_error("cannot open " + tst_data);
        const svct::Matrix raw = svct::read_matrix_csv(is);
        const svct::Matrix v = tst_uniform ? raw : svct::rank_pseudo_obs(raw);
        const int d = static_cast<int>(v.cols());
        if (d < 3) throw std::runtime_error("test: need at least 3 columns");

        svct::CccdtConfig tc;
        tc.j_max = tst_jmax;
        tc.min_leaf = tst_min_leaf;
        tc.penalty_c = tst_penalty_c;
        tc.penalty_beta = tst_penalty_beta;
        tc.alpha = tst_alpha;
        tc.mode = parse_cov(tst_cov, tst_boot_b, tst_boot_seed);
        const svct::FamilyGrid families =
            svct::uniform_family_grid(d, svct::family_from_name(tst_families));

        if (!tst_edge.empty()) {
            const svct::EdgeRef edge = parse_edge(tst_edge);
            if (edge.j < 2 || edge.i < 1 || edge.i + edge.j > d) {
                throw std::runtime_error("test: edge out of range for d=" + std::to_string(d));
            }
            const svct::FittedTrees fit = svct::stepwise_fit(v, families, edge.j - 1);
            const svct::TestOutcome outcome = svct::cccdt_test(fit, edge, tc);
            std::cout << svct::test_outcome_to_json(outcome) << "\n";
            std::cerr << "Theta_n=" << outcome.statistic << " df=" << outcome.df
                      << " p=" << outcome.p_value << "\n";
        } else {
            svct::HierConfig hc;
            hc.alpha = tst_alpha;
            hc.families = families;
            hc.test = tc;
            const svct::HierOutcome outcome = svct::hierarchical_test(v, hc);
            std::cout << svct::hier_outcome_to_json(outcome) << "\n";
            std::cerr << svct::render_table(outcome);
        }
    });

    // ---- power -------------------------------------------------------------
    auto* pow = app.add_subcommand("power", "Monte Carlo size/power study");
    pow->set_config("--config");
    std::string pow_study = "ex4.1", pow_functional = "sum", pow_fit_family = "clayton",
                pow_cov = "sandwich", pow_out;
    std::vector<double> pow_lambdas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<int> pow_n{1000}, pow_d{4, 8, 12};
    double pow_tau = 0.4, pow_alpha = 0.05;
    int pow_reps = 200;
    std::uint64_t pow_seed = 1;
    bool pow_hier = false;
    pow->add_option("--study", pow_study, "ex4.1 | ex5.1 | functional | misspec | pseudo-obs")
        ->check(CLI::IsMember({"ex4.1", "ex5.1", "functional", "misspec", "pseudo-obs"}));
    pow->add_option("--lambdas", pow_lambdas, "lambda grid")->delimiter(',');
    pow->add_option("--n", pow_n, "sample sizes")->delimiter(',');
    pow->add_option("--d", pow_d, "dimensions (ex5.1)")->delimiter(',');
    pow->add_option("--tau", pow_tau, "Kendall tau of the first tree");
    pow->add_option("--alpha", pow_alpha, "test level");
    pow->add_option("--reps", pow_reps, "replications per cell")->check(CLI::Range(1, 1000000));
    pow->add_option("--seed", pow_seed, "master seed");
    pow->add_option("--functional", pow_functional, "sum | interaction | difference");
    pow->add_option("--fit-family", pow_fit_family, "family fitted in the misspec study");
    pow->add_option("--cov", pow_cov, "covariance mode for the estimated pipeline");
    pow->add_flag("--hierarchical", pow_hier, "run the full hierarchical procedure per sample");
    pow->add_option("--out", pow_out, "output CSV (stdout when omitted)");
    pow->callback([&] {
        svct::StudyConfig cfg;
        if (pow_study == "ex4.1") cfg.kind = svct::StudyKind::SizePower;
        else if (pow_study == "ex5.1") cfg.kind = svct::StudyKind::DimensionScan;
        else if (pow_study == "functional") cfg.kind = svct::StudyKind::FunctionalComparison;
        else if (pow_study == "misspec") cfg.kind = svct::StudyKind::Misspecification;
        else cfg.kind = svct::StudyKind::PseudoObsEffect;
        cfg.n_list = pow_n;
        cfg.lambdas = pow_lambdas;
        cfg.d_list = pow_d;
        cfg.tau = pow_tau;
        cfg.alpha = pow_alpha;
        cfg.reps = pow_reps;
        cfg.seed = pow_seed;
        cfg.functional = parse_functional(pow_functional);
        cfg.fit_family = svct::family_from_name(pow_fit_family);
        cfg.hierarchical = pow_hier;
        cfg.test.mode = parse_cov(pow_cov, 500, 1);
        const svct::StudyResult result = svct::run_power_study(cfg);
        print_warnings(result);
        write_output(pow_out, "study", [&](std::ostream& os) {
            svct::write_study_csv(os, result);
        });
    });

    // ---- penalty-probe -----------------------------------------------------
    auto* prb = app.add_subcommand("penalty-probe", "Distribution of the penalty bound under H0");
    prb->set_config("--config");
    std::string prb_candidates = "1:0.5", prb_out;
    std::vector<int> prb_n{250, 500, 1000};
    double prb_tau = 0.4, prb_alpha = 0.05;
    int prb_reps = 200;
    std::uint64_t prb_seed = 1;
    prb->add_option("--n", prb_n, "sample sizes")->delimiter(',');
    prb->add_option("--tau", prb_tau, "Kendall tau of the first tree");
    prb->add_option("--alpha", prb_alpha, "level defining the critical value in b_n");
    prb->add_option("--reps", prb_reps, "replications per n")->check(CLI::Range(1, 1000000));
    prb->add_option("--seed", prb_seed, "master seed");
    prb->add_option("--candidates", prb_candidates, "penalty candidates c:beta[,c:beta...]");
    prb->add_option("--out", prb_out, "output CSV (stdout when omitted)");
    prb->callback([&] {
        svct::StudyConfig cfg;
        cfg.kind = svct::StudyKind::PenaltyProbe;
        cfg.n_list = prb_n;
        cfg.lambdas = {0.0};
        cfg.tau = prb_tau;
        cfg.alpha = prb_alpha;
        cfg.reps = prb_reps;
        cfg.seed = prb_seed;
        cfg.candidates = parse_candidates(prb_candidates);
        const svct::StudyResult result = svct::run_penalty_probe(cfg);
        print_warnings(result);
        write_output(prb_out, "probe", [&](std::ostream& os) {
            svct::write_study_csv(os, result);
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
