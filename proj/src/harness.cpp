#include "svct/harness.hpp"

#include "svct/errors.hpp"
#include "svct/rng.hpp"
#include "svct/special.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace svct {

int study_threads() {
    if (const char* env = std::getenv("SVCT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

const char* functional_name(ParamFunctional::Kind kind) {
    switch (kind) {
        case ParamFunctional::Kind::Sum: return "alpha";
        case ParamFunctional::Kind::Interaction: return "alpha_I";
        case ParamFunctional::Kind::Difference: return "alpha_D";
    }
    return "?";
}

struct RepOutcome {
    bool ok = false;
    std::string error;
    double ms = 0.0;
    int tracks = 1;
    std::array<double, 2> stat{0.0, 0.0};
    std::array<bool, 2> reject{false, false};
};

RepOutcome run_single(const StudyConfig& cfg, int d, int n, double lambda, int rep) {
    RepOutcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        const std::uint64_t rep_seed = CounterRng::derive(cfg.seed, static_cast<std::uint64_t>(rep));
        const ExampleStudy which = cfg.kind == StudyKind::DimensionScan ? ExampleStudy::HighDim
                                                                        : ExampleStudy::FourDim;
        const DVineSpec spec = build_example_spec(which, d, cfg.tau, lambda, cfg.functional);
        const Matrix u = simulate(spec, n, rep_seed);
        const EdgeRef edge{1, d - 1};

        CccdtConfig tc = cfg.test;
        tc.alpha = cfg.alpha;

        if (cfg.kind == StudyKind::PseudoObsEffect) {
            // Same draws twice: estimated pipeline with the full sandwich,
            // then true PPITs with the oracle covariance.
            const Matrix v = rank_pseudo_obs(u);
            const FamilyGrid families =
                uniform_family_grid(d, FamilyTag{Family::Clayton, Rotation::None});
            const FittedTrees fit = stepwise_fit(v, families, d - 2);
            const TestOutcome est = cccdt_test(fit, edge, tc);
            out.stat[0] = est.statistic;
            out.reject[0] = est.p_value <= cfg.alpha;

            const FittedTrees truth = propagate_true(spec, u, d - 2);
            CccdtConfig oc = tc;
            oc.mode = CovMode::oracle_star();
            const TestOutcome tru = cccdt_test(truth, edge, oc);
            out.stat[1] = tru.statistic;
            out.reject[1] = tru.p_value <= cfg.alpha;
            out.tracks = 2;
        } else if (cfg.hierarchical) {
            const Matrix v = rank_pseudo_obs(u);
            HierConfig hc;
            hc.alpha = cfg.alpha;
            hc.families = uniform_family_grid(d, cfg.kind == StudyKind::Misspecification
                                                     ? cfg.fit_family
                                                     : FamilyTag{Family::Clayton, Rotation::None});
            hc.test = tc;
            const HierOutcome ho = hierarchical_test(v, hc);
            out.reject[0] = ho.rejected;
            double max_stat = 0.0;
            for (const auto& rec : ho.records) max_stat = std::max(max_stat, rec.outcome.statistic);
            out.stat[0] = max_stat;
        } else {
            const Matrix v = rank_pseudo_obs(u);
            const FamilyGrid families =
                uniform_family_grid(d, cfg.kind == StudyKind::Misspecification
                                           ? cfg.fit_family
                                           : FamilyTag{Family::Clayton, Rotation::None});
            const FittedTrees fit = stepwise_fit(v, families, d - 2);
            const TestOutcome res = cccdt_test(fit, edge, tc);
            out.stat[0] = res.statistic;
            out.reject[0] = res.p_value <= cfg.alpha;
            if (cfg.kind == StudyKind::PenaltyProbe) {
                out.stat[0] = res.penalty->b_n;
                out.reject[0] = false;
            } else if (cfg.kind == StudyKind::FunctionalComparison) {
                // The fixed-partition comparison falls out of the penalty
                // record: T(Gamma_0) on the median partition.
                const double t0 = res.penalty->t_gamma0;
                out.stat[1] = t0;
                out.reject[1] = chi2_sf(res.df, t0) <= cfg.alpha;
                out.tracks = 2;
            }
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                 .count();
    return out;
}

std::vector<RepOutcome> run_reps(const StudyConfig& cfg, int d, int n, double lambda,
                                 bool parallel) {
    std::vector<RepOutcome> reps(cfg.reps);
#ifdef _OPENMP
    if (parallel) {
        const int nt = study_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
        for (int r = 0; r < cfg.reps; ++r) reps[r] = run_single(cfg, d, n, lambda, r);
        return reps;
    }
#else
    (void)parallel;
#endif
    for (int r = 0; r < cfg.reps; ++r) reps[r] = run_single(cfg, d, n, lambda, r);
    return reps;
}

StudyCell reduce_track(const std::vector<RepOutcome>& reps, int track, std::string study,
                       std::string functional, int d, int n, double lambda, double tau) {
    StudyCell cell;
    cell.study = std::move(study);
    cell.functional = std::move(functional);
    cell.d = d;
    cell.n = n;
    cell.lambda = lambda;
    cell.tau = tau;
    double stat_sum = 0.0, ms_sum = 0.0;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        const RepOutcome& rep = reps[r];
        if (!rep.ok) {
            if (track == 0) {
                cell.warnings.push_back("replication " + std::to_string(r) + " failed: " +
                                        rep.error);
            }
            continue;
        }
        ++cell.reps;
        cell.rejections += rep.reject[track];
        stat_sum += rep.stat[track];
        ms_sum += rep.ms;
    }
    if (cell.reps > 0) {
        cell.power = static_cast<double>(cell.rejections) / cell.reps;
        cell.se = std::sqrt(cell.power * (1.0 - cell.power) / cell.reps);
        cell.mean_stat = stat_sum / cell.reps;
        cell.mean_ms = ms_sum / cell.reps;
    }
    return cell;
}

std::array<std::string, 2> study_names(const StudyConfig& cfg) {
    switch (cfg.kind) {
        case StudyKind::SizePower: return {"ex4.1", ""};
        case StudyKind::FunctionalComparison: return {"ex4.1-functional", "ex4.1-functional/gamma0"};
        case StudyKind::DimensionScan: return {"ex5.1", ""};
        case StudyKind::Misspecification:
            return {"ex4.1-misspec(" + family_name(cfg.fit_family) + ")", ""};
        case StudyKind::PseudoObsEffect: return {"ex4.1-ppit/est", "ex4.1-ppit/true"};
        case StudyKind::PenaltyProbe: return {"penalty-probe", ""};
    }
    return {"?", ""};
}

void validate_config(const StudyConfig& cfg) {
    if (cfg.reps < 1) throw std::invalid_argument("study: need reps >= 1");
    if (cfg.n_list.empty()) throw std::invalid_argument("study: empty n list");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw std::domain_error("study: alpha outside (0,1)");
    for (const int n : cfg.n_list) {
        if (n < 10) throw std::invalid_argument("study: n too small");
    }
}

StudyResult run_study_impl(const StudyConfig& cfg, bool parallel) {
    validate_config(cfg);
    if (cfg.kind == StudyKind::PenaltyProbe) {
        throw std::invalid_argument("run_power_study: use run_penalty_probe for PenaltyProbe");
    }
    const std::vector<int> dims =
        cfg.kind == StudyKind::DimensionScan ? cfg.d_list : std::vector<int>{4};
    if (dims.empty()) throw std::invalid_argument("study: empty d list");
    const auto names = study_names(cfg);

    StudyResult result;
    for (const int d : dims) {
        if (d < 4) throw std::invalid_argument("study: need d >= 4");
        for (const int n : cfg.n_list) {
            for (const double lambda : cfg.lambdas) {
                const auto reps = run_reps(cfg, d, n, lambda, parallel);
                result.cells.push_back(reduce_track(reps, 0, names[0],
                                                    functional_name(cfg.functional), d, n, lambda,
                                                    cfg.tau));
                const int tracks = cfg.kind == StudyKind::FunctionalComparison ||
                                           cfg.kind == StudyKind::PseudoObsEffect
                                       ? 2
                                       : 1;
                if (tracks == 2) {
                    result.cells.push_back(reduce_track(reps, 1, names[1],
                                                        functional_name(cfg.functional), d, n,
                                                        lambda, cfg.tau));
                }
            }
        }
    }
    return result;
}

} // namespace

StudyResult run_power_study(const StudyConfig& cfg) {
    return run_study_impl(cfg, study_threads() > 1);
}

StudyResult run_power_study_serial(const StudyConfig& cfg) { return run_study_impl(cfg, false); }

StudyResult run_penalty_probe(const StudyConfig& cfg) {
    validate_config(cfg);
    if (cfg.kind != StudyKind::PenaltyProbe) {
        throw std::invalid_argument("run_penalty_probe: config kind must be PenaltyProbe");
    }
    if (cfg.candidates.empty()) throw std::invalid_argument("run_penalty_probe: no candidates");

    StudyResult result;
    for (const int n : cfg.n_list) {
        // b_n needs only the H0 sample, not the candidate: one sweep per n.
        const auto reps = run_reps(cfg, 4, n, 0.0, study_threads() > 1);
        for (const auto& cand : cfg.candidates) {
            const double lambda_n = cand.c * std::pow(static_cast<double>(n), -cand.beta);
            StudyCell cell;
            cell.study = "penalty-probe";
            char label[64];
            std::snprintf(label, sizeof label, "c=%g,beta=%g", cand.c, cand.beta);
            cell.functional = label;
            cell.d = 4;
            cell.n = n;
            cell.lambda = lambda_n;
            cell.tau = cfg.tau;
            double max_bn = 0.0, ms_sum = 0.0;
            bool any = false;
            for (std::size_t r = 0; r < reps.size(); ++r) {
                const RepOutcome& rep = reps[r];
                if (!rep.ok) {
                    cell.warnings.push_back("replication " + std::to_string(r) + " failed: " +
                                            rep.error);
                    continue;
                }
                ++cell.reps;
                if (rep.stat[0] >= lambda_n) ++cell.rejections; // bound violation
                max_bn = any ? std::max(max_bn, rep.stat[0]) : rep.stat[0];
                any = true;
                ms_sum += rep.ms;
            }
            if (cell.reps > 0) {
                cell.power = static_cast<double>(cell.rejections) / cell.reps;
                cell.se = std::sqrt(cell.power * (1.0 - cell.power) / cell.reps);
                cell.mean_stat = max_bn; // sample maximum of b_n
                cell.mean_ms = ms_sum / cell.reps;
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

void write_study_csv(std::ostream& os, const StudyResult& result) {
    os << "study,functional,d,n,lambda,tau,reps,rejections,power,se,mean_stat,mean_ms\n";
    char buf[128];
    for (const auto& cell : result.cells) {
        os << cell.study << ',' << cell.functional << ',' << cell.d << ',' << cell.n << ',';
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%d,%d,%.6g,%.6g,%.10g,%.6g\n", cell.lambda,
                      cell.tau, cell.reps, cell.rejections, cell.power, cell.se, cell.mean_stat,
                      cell.mean_ms);
        os << buf;
    }
}

} // namespace svct
