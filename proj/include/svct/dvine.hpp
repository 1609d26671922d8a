#pragma once

#include "svct/bivcop.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace svct {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Parameter of the one non-simplified edge as a function of the first two
// conditioning coordinates:
//   Sum:         1 + 2.5*lambda*(1 - 1.5*(w1+w2))^2
//   Interaction: 1 + 2.5*lambda*(1 - 2*w1*(w1+w2))^2
//   Difference:  1 + 2.5*lambda*(1 - 2*(w1-w2))^2
// lambda = 0 collapses every form to the constant 1.
struct ParamFunctional {
    enum class Kind { Sum, Interaction, Difference };
    Kind kind = Kind::Sum;
    double lambda = 0.0;

    double operator()(double w1, double w2) const;
};

// One edge whose conditional copula parameter varies with its conditioning
// values. Position (i,j) means the copula of (u_i, u_{i+j}) given
// u_{i+1},...,u_{i+j-1}; j >= 2 so a conditioning set exists. The static
// copula stored at that grid position is ignored.
struct ConditionalEdge {
    int i = 1;
    int j = 2;
    FamilyTag family{Family::Frank, Rotation::None};
    ParamFunctional alpha;
};

// D-vine specification: trees[t-1][i-1] is the copula of edge (i, t),
// i.e. C_{i,i+t; i+1:i+t-1}, for t = 1..d-1, i = 1..d-t.
struct DVineSpec {
    int d = 0;
    std::vector<std::vector<BivCopula>> trees;
    std::optional<ConditionalEdge> conditional_edge;

    void validate() const; // throws on malformed shape or edge position
};

enum class ExampleStudy { FourDim, HighDim }; // Example 4.1 / Example 5.1

// The two study DGPs: Clayton lower trees with theta_1 = tau_to_param(tau)
// and theta_j = theta_1 / (1 + (j-1) theta_1), topped by a Frank edge whose
// parameter follows `fn` with the given lambda. FourDim pins d = 4.
DVineSpec build_example_spec(ExampleStudy study, int d, double tau, double lambda,
                             ParamFunctional::Kind fn = ParamFunctional::Kind::Sum);

// Rescaled empirical cdf transform, column by column:
// V_i^k = (1/(n+1)) * #{m : X_i^m <= X_i^k}. Ties count literally.
Matrix rank_pseudo_obs(const Matrix& x);

// Draw n observations from the vine by inverse Rosenblatt, bit-identical for
// a given (spec, n, seed) on any platform. Coordinate i of observation k
// consumes the uniform with counter k*d + i.
Matrix simulate(const DVineSpec& spec, int n, std::uint64_t seed);

struct EdgeFit {
    BivCopula copula;
    double loglik = 0.0;
    bool at_independence_limit = false;
    Vector scores; // per-observation d/dtheta log c at theta-hat; empty at the limit
};

// Output of the stepwise tree-by-tree fit. Level arrays hold the running
// h-function transforms: level_first[0][i-1] is column i of the sample, and
// level t entries are the inputs for tree t+1 edges. With J fitted trees the
// levels run 0..J, so the pairs for testing tree J+1 are available.
struct FittedTrees {
    int d = 0;
    int fitted_trees = 0;
    std::vector<std::vector<Vector>> level_first, level_second;
    std::vector<std::vector<EdgeFit>> tree; // tree[t-1][i-1]

    int n() const { return level_first.empty() ? 0 : static_cast<int>(level_first[0][0].size()); }

    // PPIT pair of edge (i,j): requires fitted_trees >= j-1.
    const Vector& ppit_first(int i, int j) const;
    const Vector& ppit_second(int i, int j) const;

    // Flat vector of estimated parameters over trees 1..up_to_tree in tree-major
    // order, skipping edges at the independence limit.
    std::vector<std::pair<int, int>> estimated_edges(int up_to_tree) const;
};

// Triangular grid of fit families, same addressing as DVineSpec::trees.
using FamilyGrid = std::vector<std::vector<FamilyTag>>;
FamilyGrid uniform_family_grid(int d, FamilyTag tag);

// Maximum-likelihood fit of trees 1..up_to_tree, one edge at a time (Brent on
// the admissible range, tolerance 1e-8). Edges whose best log-likelihood
// improves on independence by less than 1e-6*n are recorded at the family's
// independence limit.
FittedTrees stepwise_fit(const Matrix& v, const FamilyGrid& families, int up_to_tree);

// Propagation with the true copulas of `spec` instead of estimates (scores
// evaluated at the true parameters). The requested trees must all be static;
// a conditional edge inside them is a logic error.
FittedTrees propagate_true(const DVineSpec& spec, const Matrix& u, int up_to_tree);

// Pair columns for every edge of the sub-triangle spanning variables
// [lo_var, hi_var] up to `up_to_tree`, with copulas supplied per edge. Used
// for finite-difference re-propagation in the covariance estimator.
struct SpanPairs {
    int lo_var = 1;
    int hi_var = 0;
    // pairs[t-1][i - lo_var] for tree t edges i = lo_var .. hi_var - t
    std::vector<std::vector<std::pair<Vector, Vector>>> pairs;

    const std::pair<Vector, Vector>& at(int i, int t) const { return pairs[t - 1][i - lo_var]; }
};

SpanPairs propagate_span(const Matrix& v, int lo_var, int hi_var, int up_to_tree,
                         const std::function<const BivCopula&(int tree, int edge)>& cop);

} // namespace svct
