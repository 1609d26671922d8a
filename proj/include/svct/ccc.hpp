#pragma once

#include "svct/dvine.hpp"
#include "svct/partition.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace svct {

// Per-leaf moments of a PPIT pair, computed with the indicator-weighted
// formulas (divisor n_l everywhere, no small-sample corrections).
struct LeafStats {
    int count = 0;      // n_l
    double mass = 0.0;  // pi_l = n_l / n
    double mean_x = 0.0, mean_y = 0.0;
    double var_x = 0.0, var_y = 0.0;
    double cov_xy = 0.0;
    double corr = 0.0;        // r_l
    double var_star = 0.0;    // asymptotic variance of sqrt(n) r_l, influence based
    Vector influence;         // per-member influence value, aligned with members
    std::vector<int> members; // row indices, ascending
};

struct GroupStats {
    int n = 0;
    std::vector<LeafStats> leaves;

    Vector corr_vector() const;
};

enum class CovKind { OracleStar, Sandwich, SandwichKnownMargins, Bootstrap };

struct CovMode {
    CovKind kind = CovKind::Sandwich;
    int bootstrap_b = 500;
    std::uint64_t bootstrap_seed = 1;

    static CovMode oracle_star() { return {CovKind::OracleStar, 0, 0}; }
    static CovMode sandwich() { return {CovKind::Sandwich, 0, 0}; }
    static CovMode sandwich_known_margins() { return {CovKind::SandwichKnownMargins, 0, 0}; }
    static CovMode bootstrap(int b, std::uint64_t seed) { return {CovKind::Bootstrap, b, seed}; }
};

std::string cov_mode_name(const CovMode& mode);

// Edge (i,j): copula of variables (i, i+j) given i+1..i+j-1.
struct EdgeRef {
    int i = 1;
    int j = 2;
};

struct PenaltyRecord {
    double n_lambda = 0.0;
    double t_gamma0 = 0.0;
    double t_gamma_max = 0.0;
    double b_n = 0.0;
};

struct TestOutcome {
    double statistic = 0.0;
    int df = 1;
    double p_value = 1.0;
    CovMode mode;
    Partition partition_used;
    std::optional<PenaltyRecord> penalty;
};

std::string test_outcome_to_json(const TestOutcome& outcome);

// Group moments and correlations per leaf; rows matching no leaf are skipped
// (masses then sum below one). Throws partition_error for an empty leaf and
// degenerate_data_error when x or y is constant within a leaf.
GroupStats group_stats(const Vector& x, const Vector& y, const Matrix& cond,
                       const Partition& part);

// l-th diagonal entry of the oracle covariance of sqrt(n) R_Gamma.
double corr_variance_star(const GroupStats& stats, int leaf);

// Quadratic form T = n (C R)' (C Sigma C')^{-1} (C R) with C the (L-1)xL
// first-difference contrast. Sigma is the covariance of sqrt(n) R.
double quadratic_statistic(const Vector& r, const Matrix& sigma, int n);

// Same statistic through the B-parameterization (differences to the
// mass-weighted average correlation); algebraically equal to the A-form.
double quadratic_statistic_avg(const Vector& r, const Vector& masses, const Matrix& sigma,
                               int n);

// Full covariance of sqrt(n) R_Gamma for the PPIT pair of `edge`, accounting
// for stepwise parameter estimation and (optionally) the rank transform.
Matrix sandwich_covariance(const FittedTrees& fit, EdgeRef edge, const Partition& part,
                           bool include_rank_term);

// Nonparametric bootstrap cross-check: resample rows, re-rank, refit the same
// family grid, recompute PPITs, evaluate the same partition.
Matrix bootstrap_covariance(const FittedTrees& fit, EdgeRef edge, const Partition& part,
                            int b_replicates, std::uint64_t seed);

// CCC test on a fixed partition. Sandwich and bootstrap modes require `fit`
// (with `edge` naming the PPIT pair inside it); OracleStar does not.
TestOutcome statistic_fixed(const Vector& x, const Vector& y, const Matrix& cond,
                            const Partition& part, const CovMode& mode,
                            const FittedTrees* fit = nullptr, EdgeRef edge = {});

// Average-correlation form of the same test; equal to statistic_fixed up to
// 1e-8 relative.
TestOutcome statistic_avg_form(const Vector& x, const Vector& y, const Matrix& cond,
                               const Partition& part, const CovMode& mode,
                               const FittedTrees* fit = nullptr, EdgeRef edge = {});

// Theta_n = max{T(Gamma_0) + n*lambda_n, T(Gamma_1), ...} - n*lambda_n,
// referred to chi2 with Gamma_0's degrees of freedom. The returned partition
// is the maximizing alternative (Gamma_0's when none beats it). `alpha` only
// feeds the critical value used for the recorded penalty bound b_n.
TestOutcome combine_with_penalty(const TestOutcome& t0, const std::vector<TestOutcome>& alternatives,
                                 int n, double lambda_n, double alpha = 0.05);

// Lower bound b_n = (T(Gamma_max) - tau_crit) / n under which the penalized
// and fixed-partition decisions coincide.
double penalty_bound(double t_gamma_max, double tau_crit, int n);

} // namespace svct
