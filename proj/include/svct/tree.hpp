#pragma once

#include "svct/ccc.hpp"

#include <optional>
#include <vector>

namespace svct {

// Candidate split inside one leaf: an axis (or the mean aggregation) and an
// empirical quantile of that value over the leaf's members.
struct SplitCandidate {
    int axis = 0; // Condition::kMeanAxis for the mean aggregation
    double quantile = 0.5;
    double threshold = 0.0;
};

struct SplitChoice {
    SplitCandidate split;
    double statistic = 0.0;
};

// Quantile candidates whose children would both keep at least min_leaf
// members; thresholds are computed over the member rows only. Leaves with
// fewer than 4*min_leaf members only try the median. Duplicate thresholds on
// one axis are dropped (lowest quantile wins).
std::vector<SplitCandidate> split_candidates(const std::vector<int>& members, const Matrix& cond,
                                             int min_leaf);

// Candidate maximizing the two-group statistic (oracle form, evaluated on the
// leaf's members only); ties break to the lowest axis, then lowest quantile.
// Candidates with degenerate children are skipped; empty result means the
// leaf stays terminal.
std::optional<SplitChoice> best_split(const std::vector<int>& members, const Vector& x,
                                      const Vector& y, const Matrix& cond,
                                      const std::vector<SplitCandidate>& candidates);

// Greedy breadth-first partition search to depth j_max. Empty result when no
// valid root split exists (caller falls back to the fixed partition).
std::optional<Partition> grow(const Vector& x, const Vector& y, const Matrix& cond, int j_max,
                              int min_leaf);

struct CccdtConfig {
    int j_max = 2;
    int min_leaf = 100;
    double penalty_c = 1.0;    // lambda_n = penalty_c * n^(-penalty_beta)
    double penalty_beta = 0.5;
    double alpha = 0.05;
    CovMode mode = CovMode::sandwich();

    double lambda_n(int n) const;
};

// Penalized CCC test of one edge: T(Gamma_0) on the median partition of the
// edge's conditioning columns, T(Gamma_max) on the grown partition (when one
// exists), combined into Theta_n.
TestOutcome cccdt_test(const FittedTrees& fit, EdgeRef edge, const CccdtConfig& cfg);

// Same test with caller-supplied inputs (used for true-PPIT experiments where
// x, y, cond do not come out of a fit).
TestOutcome cccdt_test_on(const Vector& x, const Vector& y, const Matrix& cond,
                          const CccdtConfig& cfg, const FittedTrees* fit = nullptr,
                          EdgeRef edge = {});

} // namespace svct
