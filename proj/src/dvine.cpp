#include "svct/dvine.hpp"

#include "svct/errors.hpp"
#include "svct/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace svct {

double ParamFunctional::operator()(double w1, double w2) const {
    switch (kind) {
        case Kind::Sum: {
            const double t = 1.0 - 1.5 * (w1 + w2);
            return 1.0 + 2.5 * lambda * t * t;
        }
        case Kind::Interaction: {
            const double t = 1.0 - 2.0 * w1 * (w1 + w2);
            return 1.0 + 2.5 * lambda * t * t;
        }
        case Kind::Difference: {
            const double t = 1.0 - 2.0 * (w1 - w2);
            return 1.0 + 2.5 * lambda * t * t;
        }
    }
    throw std::domain_error("ParamFunctional: unknown kind");
}

void DVineSpec::validate() const {
    if (d < 2) throw std::domain_error("DVineSpec: need d >= 2");
    if (static_cast<int>(trees.size()) != d - 1) {
        throw std::domain_error("DVineSpec: expected " + std::to_string(d - 1) + " trees");
    }
    for (int t = 1; t <= d - 1; ++t) {
        if (static_cast<int>(trees[t - 1].size()) != d - t) {
            throw std::domain_error("DVineSpec: tree " + std::to_string(t) + " must have " +
                                    std::to_string(d - t) + " edges");
        }
    }
    if (conditional_edge) {
        const auto& ce = *conditional_edge;
        if (ce.j < 2 || ce.i < 1 || ce.i + ce.j > d) {
            throw std::domain_error("DVineSpec: conditional edge (" + std::to_string(ce.i) +
                                    "," + std::to_string(ce.j) + ") out of range");
        }
    }
}

DVineSpec build_example_spec(ExampleStudy study, int d, double tau, double lambda,
                             ParamFunctional::Kind fn) {
    if (study == ExampleStudy::FourDim) d = 4;
    if (d < 4) throw std::domain_error("build_example_spec: need d >= 4");
    if (!(tau > 0.0 && tau < 1.0)) throw std::domain_error("build_example_spec: need tau in (0,1)");
    if (lambda < 0.0) throw std::domain_error("build_example_spec: need lambda >= 0");

    const FamilyTag clayton{Family::Clayton, Rotation::None};
    const double theta1 = tau_to_param(clayton, tau);

    DVineSpec spec;
    spec.d = d;
    spec.trees.resize(d - 1);
    for (int t = 1; t <= d - 1; ++t) {
        const double theta_t = theta1 / (1.0 + (t - 1) * theta1);
        for (int i = 1; i <= d - t; ++i) {
            spec.trees[t - 1].emplace_back(clayton, theta_t);
        }
    }
    // Top edge: Frank copula whose parameter follows the functional of the
    // first two conditioning coordinates. The Clayton copula placed on the
    // grid above is overridden (and at lambda = 0 the edge is Frank(1)).
    ConditionalEdge ce;
    ce.i = 1;
    ce.j = d - 1;
    ce.family = FamilyTag{Family::Frank, Rotation::None};
    ce.alpha = ParamFunctional{fn, lambda};
    spec.conditional_edge = ce;
    spec.validate();
    return spec;
}

Matrix rank_pseudo_obs(const Matrix& x) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (n < 2) throw degenerate_data_error("rank_pseudo_obs: need at least 2 observations");
    Matrix v(n, d);
    std::vector<double> sorted(n);
    for (int c = 0; c < d; ++c) {
        for (int k = 0; k < n; ++k) {
            const double xk = x(k, c);
            if (std::isnan(xk)) throw std::domain_error("rank_pseudo_obs: NaN in column " +
                                                        std::to_string(c + 1));
            sorted[k] = xk;
        }
        std::sort(sorted.begin(), sorted.end());
        for (int k = 0; k < n; ++k) {
            const auto le = std::upper_bound(sorted.begin(), sorted.end(), x(k, c));
            v(k, c) = static_cast<double>(le - sorted.begin()) / (n + 1.0);
        }
    }
    return v;
}

namespace {

// Copula of edge (edge, tree) for one observation whose realized coordinates
// are x[1..d]; routes the conditional edge through its parameter functional.
BivCopula edge_copula(const DVineSpec& spec, int tree, int edge, const std::vector<double>& x) {
    if (spec.conditional_edge && spec.conditional_edge->j == tree &&
        spec.conditional_edge->i == edge) {
        const auto& ce = *spec.conditional_edge;
        const double w1 = x[ce.i + 1];
        const double w2 = (ce.j >= 3) ? x[ce.i + 2] : w1;
        return BivCopula(ce.family, ce.alpha(w1, w2));
    }
    return spec.trees[tree - 1][edge - 1];
}

} // namespace

Matrix simulate(const DVineSpec& spec, int n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw std::domain_error("simulate: need n >= 1");
    const int d = spec.d;
    const CounterRng rng(CounterRng::derive(seed, 0));

    Matrix u(n, d);
    std::vector<double> x(d + 1), cond_f(d + 1), b(d + 1);
    for (int k = 0; k < n; ++k) {
        // Inverse Rosenblatt: x_i = F^{-1}(w_i | x_1..x_{i-1}). cond_f[a]
        // holds F(x_a | x_{a+1:i-1}); the inversion peels conditioning
        // variables off w_i from the outermost tree inwards and leaves
        // b[a] = F(x_i | x_{a+1:i-1}) on the way, which the update loop then
        // uses to extend cond_f by the new coordinate.
        x[1] = rng.unit_at(static_cast<std::uint64_t>(k) * d);
        cond_f[1] = x[1];
        for (int i = 2; i <= d; ++i) {
            double z = rng.unit_at(static_cast<std::uint64_t>(k) * d + (i - 1));
            for (int a = 1; a <= i - 1; ++a) {
                const BivCopula cop = edge_copula(spec, i - a, a, x);
                z = hinv(cop, z, cond_f[a], CondOn::First);
                b[a] = z;
            }
            x[i] = z;
            for (int a = 1; a <= i - 1; ++a) {
                const BivCopula cop = edge_copula(spec, i - a, a, x);
                cond_f[a] = hfunc(cop, cond_f[a], b[a], CondOn::Second);
            }
            cond_f[i] = x[i];
        }
        for (int c = 0; c < d; ++c) u(k, c) = x[c + 1];
    }
    return u;
}

namespace {

// Brent minimization on [a,b] without derivatives.
template <typename F>
double brent_minimize(F&& f, double a, double b, double tol, int max_iter, double& fmin) {
    constexpr double kGold = 0.3819660112501051;
    double x = a + kGold * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const double m = 0.5 * (a + b);
        const double tol1 = tol * std::fabs(x) + 1e-12;
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) break;
        bool parabolic = false;
        if (std::fabs(e) > tol1) {
            double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            if (std::fabs(p) < std::fabs(0.5 * q * e) && p > q * (a - x) && p < q * (b - x)) {
                e = d;
                d = p / q;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = kGold * e;
        }
        const double xn = (std::fabs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
        const double fn = f(xn);
        if (fn <= fx) {
            if (xn < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = xn; fx = fn;
        } else {
            if (xn < x) a = xn; else b = xn;
            if (fn <= fw || w == x) {
                v = w; fv = fw;
                w = xn; fw = fn;
            } else if (fn <= fv || v == x || v == w) {
                v = xn; fv = fn;
            }
        }
    }
    fmin = fx;
    return x;
}

std::pair<double, double> fit_range(FamilyTag tag) {
    switch (tag.family) {
        case Family::Clayton: return {kClaytonIndepEps, kClaytonThetaMax};
        case Family::Frank: return {-kFrankThetaMax, kFrankThetaMax};
        case Family::Gumbel: return {1.0 + kGumbelIndepEps, kGumbelThetaMax};
        case Family::Gaussian: return {-kGaussianRhoMax, kGaussianRhoMax};
        default:
            throw unsupported_operation("fit_range: independence has no parameter");
    }
}

double independence_limit(FamilyTag tag) {
    return tag.family == Family::Gumbel ? 1.0 : 0.0;
}

EdgeFit fit_edge(const Vector& uu, const Vector& vv, FamilyTag fam, int tree, int edge) {
    const int n = static_cast<int>(uu.size());
    EdgeFit out;
    if (fam.family == Family::Independence) {
        out.copula = BivCopula{};
        out.at_independence_limit = true;
        return out;
    }

    const auto [lo, hi] = fit_range(fam);
    const auto negll = [&](double theta) {
        const BivCopula c(fam, theta);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += log_density(c, uu[k], vv[k]);
        return -s;
    };

    // Coarse scan to bracket the optimum, then Brent inside the bracket.
    constexpr int kScan = 5;
    double best_theta = lo, best_f = negll(lo);
    double grid[kScan];
    for (int g = 0; g < kScan; ++g) {
        grid[g] = lo + (hi - lo) * (g + 0.5) / kScan;
        const double fg = negll(grid[g]);
        if (fg < best_f) {
            best_f = fg;
            best_theta = grid[g];
        }
    }
    double bra = std::max(lo, best_theta - (hi - lo) / kScan);
    double brb = std::min(hi, best_theta + (hi - lo) / kScan);
    double fmin = 0.0;
    const double theta = brent_minimize(negll, bra, brb, 1e-8, 200, fmin);
    const double loglik = -fmin;

    const std::string where = " (edge " + std::to_string(edge) + ", tree " +
                              std::to_string(tree) + ")";
    if (loglik < 1e-6 * n) {
        // No real improvement over independence: pin at the limit so later
        // h-chains are exact identities instead of boundary noise.
        out.copula = BivCopula(fam, independence_limit(fam));
        out.loglik = 0.0;
        out.at_independence_limit = true;
        return out;
    }
    // Margin of 1e-4*(range) keeps theta far enough inside that downstream
    // finite-difference perturbations (step 1e-5*max(1,|theta|)) stay admissible.
    if (hi - theta < 1e-4 * (hi - lo) || (fam.family == Family::Frank || fam.family == Family::Gaussian
                                              ? theta - lo < 1e-4 * (hi - lo)
                                              : false)) {
        throw numeric_error("stepwise_fit: no interior optimum, parameter pinned at range boundary" +
                            where);
    }
    out.copula = BivCopula(fam, theta);
    out.loglik = loglik;
    if (!out.copula.is_independence()) {
        out.scores.resize(n);
        for (int k = 0; k < n; ++k) out.scores[k] = score(out.copula, uu[k], vv[k]);
    } else {
        out.at_independence_limit = true;
    }
    return out;
}

void check_grid(const FamilyGrid& families, int d, int up_to_tree) {
    if (static_cast<int>(families.size()) < up_to_tree) {
        throw std::invalid_argument("stepwise_fit: family grid has too few trees");
    }
    for (int t = 1; t <= up_to_tree; ++t) {
        if (static_cast<int>(families[t - 1].size()) < d - t) {
            throw std::invalid_argument("stepwise_fit: family grid tree " + std::to_string(t) +
                                        " has too few edges");
        }
    }
}

} // namespace

FamilyGrid uniform_family_grid(int d, FamilyTag tag) {
    FamilyGrid g(d - 1);
    for (int t = 1; t <= d - 1; ++t) g[t - 1].assign(d - t, tag);
    return g;
}

const Vector& FittedTrees::ppit_first(int i, int j) const {
    if (j < 1 || j > fitted_trees + 1 || i < 1 || i > d - j) {
        throw std::logic_error("ppit_first: edge (" + std::to_string(i) + "," +
                               std::to_string(j) + ") not available");
    }
    return level_first[j - 1][i - 1];
}

const Vector& FittedTrees::ppit_second(int i, int j) const {
    if (j < 1 || j > fitted_trees + 1 || i < 1 || i > d - j) {
        throw std::logic_error("ppit_second: edge (" + std::to_string(i) + "," +
                               std::to_string(j) + ") not available");
    }
    return level_second[j - 1][i - 1];
}

std::vector<std::pair<int, int>> FittedTrees::estimated_edges(int up_to_tree) const {
    if (up_to_tree > fitted_trees) {
        throw std::logic_error("estimated_edges: tree " + std::to_string(up_to_tree) +
                               " not fitted");
    }
    std::vector<std::pair<int, int>> out;
    for (int t = 1; t <= up_to_tree; ++t) {
        for (int i = 1; i <= d - t; ++i) {
            if (!tree[t - 1][i - 1].at_independence_limit) out.emplace_back(t, i);
        }
    }
    return out;
}

namespace {

FittedTrees propagate_impl(const Matrix& v, int up_to_tree,
                           const std::function<EdgeFit(const Vector&, const Vector&, int, int)>& fit) {
    const int d = static_cast<int>(v.cols());
    const int n = static_cast<int>(v.rows());
    if (d < 2) throw std::invalid_argument("stepwise_fit: need at least 2 columns");
    if (n < 2) throw degenerate_data_error("stepwise_fit: need at least 2 observations");
    if (up_to_tree < 1 || up_to_tree > d - 1) {
        throw std::invalid_argument("stepwise_fit: up_to_tree must be in [1, d-1]");
    }

    FittedTrees out;
    out.d = d;
    out.fitted_trees = up_to_tree;
    out.level_first.resize(up_to_tree + 1);
    out.level_second.resize(up_to_tree + 1);
    out.tree.resize(up_to_tree);

    out.level_first[0].resize(d - 1);
    out.level_second[0].resize(d - 1);
    for (int i = 1; i <= d - 1; ++i) {
        out.level_first[0][i - 1] = v.col(i - 1);
        out.level_second[0][i - 1] = v.col(i);
    }

    for (int t = 1; t <= up_to_tree; ++t) {
        out.tree[t - 1].reserve(d - t);
        for (int i = 1; i <= d - t; ++i) {
            out.tree[t - 1].push_back(
                fit(out.level_first[t - 1][i - 1], out.level_second[t - 1][i - 1], t, i));
        }
        // Pairs feeding tree t+1 (these are the PPITs for its edges):
        // first  = dC/dv of edge (i,t) applied to its pair,
        // second = dC/du of edge (i+1,t) applied to its pair.
        const int next_edges = d - t - 1;
        if (next_edges < 1) continue;
        out.level_first[t].resize(next_edges);
        out.level_second[t].resize(next_edges);
        for (int i = 1; i <= next_edges; ++i) {
            const auto& left = out.tree[t - 1][i - 1];
            const auto& right = out.tree[t - 1][i];
            Vector f(n), s(n);
            for (int k = 0; k < n; ++k) {
                f[k] = hfunc(left.copula, out.level_first[t - 1][i - 1][k],
                             out.level_second[t - 1][i - 1][k], CondOn::Second);
                s[k] = hfunc(right.copula, out.level_first[t - 1][i][k],
                             out.level_second[t - 1][i][k], CondOn::First);
            }
            out.level_first[t][i - 1] = std::move(f);
            out.level_second[t][i - 1] = std::move(s);
        }
    }
    return out;
}

} // namespace

FittedTrees stepwise_fit(const Matrix& v, const FamilyGrid& families, int up_to_tree) {
    check_grid(families, static_cast<int>(v.cols()), up_to_tree);
    return propagate_impl(v, up_to_tree, [&](const Vector& uu, const Vector& vv, int t, int i) {
        return fit_edge(uu, vv, families[t - 1][i - 1], t, i);
    });
}

FittedTrees propagate_true(const DVineSpec& spec, const Matrix& u, int up_to_tree) {
    spec.validate();
    if (static_cast<int>(u.cols()) != spec.d) {
        throw std::invalid_argument("propagate_true: sample has wrong dimension");
    }
    if (spec.conditional_edge && spec.conditional_edge->j <= up_to_tree) {
        throw std::logic_error("propagate_true: requested trees contain the conditional edge");
    }
    return propagate_impl(u, up_to_tree, [&](const Vector& uu, const Vector& vv, int t, int i) {
        EdgeFit ef;
        ef.copula = spec.trees[t - 1][i - 1];
        const int n = static_cast<int>(uu.size());
        double ll = 0.0;
        for (int k = 0; k < n; ++k) ll += log_density(ef.copula, uu[k], vv[k]);
        ef.loglik = ll;
        if (ef.copula.is_independence()) {
            ef.at_independence_limit = true;
        } else {
            ef.scores.resize(n);
            for (int k = 0; k < n; ++k) ef.scores[k] = score(ef.copula, uu[k], vv[k]);
        }
        return ef;
    });
}

SpanPairs propagate_span(const Matrix& v, int lo_var, int hi_var, int up_to_tree,
                         const std::function<const BivCopula&(int tree, int edge)>& cop) {
    const int n = static_cast<int>(v.rows());
    if (lo_var < 1 || hi_var > static_cast<int>(v.cols()) || hi_var - lo_var < 1) {
        throw std::invalid_argument("propagate_span: bad variable span");
    }
    if (up_to_tree > hi_var - lo_var) {
        throw std::invalid_argument("propagate_span: span too narrow for requested trees");
    }
    SpanPairs out;
    out.lo_var = lo_var;
    out.hi_var = hi_var;
    out.pairs.resize(up_to_tree);
    out.pairs[0].resize(hi_var - lo_var);
    for (int i = lo_var; i <= hi_var - 1; ++i) {
        out.pairs[0][i - lo_var] = {v.col(i - 1), v.col(i)};
    }
    for (int t = 2; t <= up_to_tree; ++t) {
        out.pairs[t - 1].resize(hi_var - lo_var - t + 1);
        for (int i = lo_var; i <= hi_var - t; ++i) {
            const auto& left = out.pairs[t - 2][i - lo_var];
            const auto& right = out.pairs[t - 2][i + 1 - lo_var];
            const BivCopula& cl = cop(t - 1, i);
            const BivCopula& cr = cop(t - 1, i + 1);
            Vector f(n), s(n);
            for (int k = 0; k < n; ++k) {
                f[k] = hfunc(cl, left.first[k], left.second[k], CondOn::Second);
                s[k] = hfunc(cr, right.first[k], right.second[k], CondOn::First);
            }
            out.pairs[t - 1][i - lo_var] = {std::move(f), std::move(s)};
        }
    }
    return out;
}

} // namespace svct
