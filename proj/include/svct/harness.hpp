#pragma once

#include "svct/hier.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace svct {

enum class StudyKind {
    SizePower,            // Ex 4.1 size/power over the lambda grid
    FunctionalComparison, // one functional; adds a fixed-Gamma_med comparison row
    DimensionScan,        // Ex 5.1 over the d list
    Misspecification,     // lower trees fitted with an overridden family
    PseudoObsEffect,      // estimated vs true PPITs on identical streams
    PenaltyProbe          // distribution of the penalty lower bound b_n under H0
};

struct PenaltyCandidate {
    double c = 1.0;
    double beta = 0.5; // lambda_n = c * n^(-beta)
};

struct StudyConfig {
    StudyKind kind = StudyKind::SizePower;
    std::vector<int> n_list{1000};
    std::vector<double> lambdas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<int> d_list{4}; // DimensionScan only
    double tau = 0.4;
    int reps = 200;
    std::uint64_t seed = 1;
    double alpha = 0.05;
    ParamFunctional::Kind functional = ParamFunctional::Kind::Sum;
    FamilyTag fit_family{Family::Clayton, Rotation::None}; // Misspecification only
    std::vector<PenaltyCandidate> candidates{{1.0, 0.5}};  // PenaltyProbe only
    bool hierarchical = false; // test the full procedure instead of the top edge
    CccdtConfig test;
};

// One row of the result CSV. `reps` counts successful replications; failed
// ones are listed in `warnings` and excluded from every other column.
struct StudyCell {
    std::string study;
    std::string functional;
    int d = 0;
    int n = 0;
    double lambda = 0.0;
    double tau = 0.0;
    int reps = 0;
    int rejections = 0;
    double power = 0.0;
    double se = 0.0;
    double mean_stat = 0.0;
    double mean_ms = 0.0;
    std::vector<std::string> warnings;
};

struct StudyResult {
    std::vector<StudyCell> cells;
};

// Worker cap: SVCT_THREADS when set, otherwise the OpenMP default (1 without
// OpenMP).
int study_threads();

// Replication r of any cell uses the substream derived from (seed, r), so
// results are identical for any worker count; only mean_ms varies.
StudyResult run_power_study(const StudyConfig& cfg);
StudyResult run_power_study_serial(const StudyConfig& cfg);

// Per (n, candidate penalty): how often b_n reaches the candidate lambda_n
// (rejections column), with the sample maximum of b_n in mean_stat.
StudyResult run_penalty_probe(const StudyConfig& cfg);

// Fixed columns: study,functional,d,n,lambda,tau,reps,rejections,power,se,
// mean_stat,mean_ms.
void write_study_csv(std::ostream& os, const StudyResult& result);

} // namespace svct
