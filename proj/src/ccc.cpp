#include "svct/ccc.hpp"

#include "svct/errors.hpp"
#include "svct/rng.hpp"
#include "svct/special.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace svct {

Vector GroupStats::corr_vector() const {
    Vector r(leaves.size());
    for (std::size_t l = 0; l < leaves.size(); ++l) r[l] = leaves[l].corr;
    return r;
}

std::string cov_mode_name(const CovMode& mode) {
    switch (mode.kind) {
        case CovKind::OracleStar: return "oracle-star";
        case CovKind::Sandwich: return "sandwich";
        case CovKind::SandwichKnownMargins: return "sandwich-known-margins";
        case CovKind::Bootstrap: return "bootstrap";
    }
    return "unknown";
}

GroupStats group_stats(const Vector& x, const Vector& y, const Matrix& cond,
                       const Partition& part) {
    const int n = static_cast<int>(x.size());
    if (y.size() != n || cond.rows() != n) {
        throw std::invalid_argument("group_stats: x, y, cond must share the observation count");
    }
    if (part.size() < 1) throw partition_error("group_stats: partition has no leaves");

    const std::vector<int> assign = leaf_assignment(part, cond);
    GroupStats out;
    out.n = n;
    out.leaves.resize(part.size());
    for (int k = 0; k < n; ++k) {
        if (assign[k] >= 0) out.leaves[assign[k]].members.push_back(k);
    }

    for (int l = 0; l < part.size(); ++l) {
        LeafStats& ls = out.leaves[l];
        ls.count = static_cast<int>(ls.members.size());
        if (ls.count == 0) throw partition_error("group_stats: leaf " + std::to_string(l) + " is empty");
        if (ls.count < 2) {
            throw partition_error("group_stats: leaf " + std::to_string(l) +
                                  " has fewer than 2 members");
        }
        ls.mass = static_cast<double>(ls.count) / n;
        double sx = 0.0, sy = 0.0;
        for (int k : ls.members) {
            sx += x[k];
            sy += y[k];
        }
        ls.mean_x = sx / ls.count;
        ls.mean_y = sy / ls.count;
        double vx = 0.0, vy = 0.0, cxy = 0.0;
        for (int k : ls.members) {
            const double dx = x[k] - ls.mean_x;
            const double dy = y[k] - ls.mean_y;
            vx += dx * dx;
            vy += dy * dy;
            cxy += dx * dy;
        }
        ls.var_x = vx / ls.count;
        ls.var_y = vy / ls.count;
        ls.cov_xy = cxy / ls.count;
        if (ls.var_x <= 0.0) {
            throw degenerate_data_error("group_stats: x constant within leaf " + std::to_string(l));
        }
        if (ls.var_y <= 0.0) {
            throw degenerate_data_error("group_stats: y constant within leaf " + std::to_string(l));
        }
        ls.corr = ls.cov_xy / std::sqrt(ls.var_x * ls.var_y);
        ls.corr = std::max(-1.0, std::min(1.0, ls.corr));

        // Influence values of r_l: the r-component of the inverted per-leaf
        // estimating equations, used for the oracle variance.
        ls.influence.resize(ls.count);
        const double sdx = std::sqrt(ls.var_x), sdy = std::sqrt(ls.var_y);
        double sum_sq = 0.0;
        for (int m = 0; m < ls.count; ++m) {
            const int k = ls.members[m];
            const double zx = (x[k] - ls.mean_x) / sdx;
            const double zy = (y[k] - ls.mean_y) / sdy;
            const double inf = 0.5 * ls.corr * (zx * zx + zy * zy) - zx * zy;
            ls.influence[m] = inf;
            sum_sq += inf * inf;
        }
        ls.var_star = sum_sq / (n * ls.mass * ls.mass);
    }
    return out;
}

double corr_variance_star(const GroupStats& stats, int leaf) {
    if (leaf < 0 || leaf >= static_cast<int>(stats.leaves.size())) {
        throw std::out_of_range("corr_variance_star: leaf index out of range");
    }
    return stats.leaves[leaf].var_star;
}

namespace {

// Solve m * z = rhs with an explicit conditioning check.
Matrix solve_checked(const Matrix& m, const Matrix& rhs, const char* what) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0) || smax / smin > 1e12) {
        throw numeric_error(std::string(what) + ": matrix singular or ill-conditioned");
    }
    return svd.solve(rhs);
}

double contrast_statistic(const Vector& r, const Matrix& contrast, const Matrix& sigma, int n) {
    const Vector diff = contrast * r;
    const Matrix m = contrast * sigma * contrast.transpose();
    const Matrix sol = solve_checked(m, diff, "statistic");
    const double t = n * diff.dot(sol.col(0));
    return std::max(0.0, t);
}

void check_psd(const Matrix& sigma, const char* what) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-10 * std::max(1.0, sigma.trace())) {
        throw numeric_error(std::string(what) + ": covariance not positive semidefinite");
    }
}

} // namespace

double quadratic_statistic(const Vector& r, const Matrix& sigma, int n) {
    const int big_l = static_cast<int>(r.size());
    if (big_l < 2) throw std::invalid_argument("quadratic_statistic: need at least 2 groups");
    if (sigma.rows() != big_l || sigma.cols() != big_l) {
        throw std::invalid_argument("quadratic_statistic: covariance shape mismatch");
    }
    Matrix a = Matrix::Zero(big_l - 1, big_l);
    for (int l = 0; l < big_l - 1; ++l) {
        a(l, l) = 1.0;
        a(l, l + 1) = -1.0;
    }
    return contrast_statistic(r, a, sigma, n);
}

double quadratic_statistic_avg(const Vector& r, const Vector& masses, const Matrix& sigma,
                               int n) {
    const int big_l = static_cast<int>(r.size());
    if (big_l < 2) throw std::invalid_argument("quadratic_statistic_avg: need at least 2 groups");
    if (masses.size() != big_l) {
        throw std::invalid_argument("quadratic_statistic_avg: mass vector shape mismatch");
    }
    const double total = masses.sum();
    if (!(total > 0.0)) throw std::invalid_argument("quadratic_statistic_avg: zero total mass");
    // Rows sqrt(pi_l) (e_l - pi); with normalized masses each row is a
    // contrast, so the quadratic form equals the first-difference one.
    Matrix b(big_l - 1, big_l);
    for (int l = 0; l < big_l - 1; ++l) {
        const double w = std::sqrt(masses[l] / total);
        for (int m = 0; m < big_l; ++m) {
            b(l, m) = w * ((l == m ? 1.0 : 0.0) - masses[m] / total);
        }
    }
    return contrast_statistic(r, b, sigma, n);
}

// ---------------------------------------------------------------------------
// Sandwich covariance
// ---------------------------------------------------------------------------

namespace {

Matrix sample_from(const FittedTrees& fit) {
    const int d = fit.d;
    const int n = fit.n();
    Matrix v(n, d);
    for (int c = 0; c + 1 < d; ++c) v.col(c) = fit.level_first[0][c];
    v.col(d - 1) = fit.level_second[0][d - 2];
    return v;
}

void check_edge(const FittedTrees& fit, EdgeRef edge) {
    if (edge.j < 2 || edge.i < 1 || edge.i + edge.j > fit.d) {
        throw std::invalid_argument("edge (" + std::to_string(edge.i) + "," +
                                    std::to_string(edge.j) + ") out of range for d=" +
                                    std::to_string(fit.d));
    }
    if (fit.fitted_trees < edge.j - 1) {
        throw std::logic_error("edge (" + std::to_string(edge.i) + "," + std::to_string(edge.j) +
                               "): trees fitted only through " + std::to_string(fit.fitted_trees));
    }
}

// Five estimating-function components of one leaf at fixed phi.
inline void h_values(double xx, double yy, const LeafStats& ls, double* out) {
    const double dx = xx - ls.mean_x;
    const double dy = yy - ls.mean_y;
    out[0] = dx;
    out[1] = dy;
    out[2] = dx * dx - ls.var_x;
    out[3] = dy * dy - ls.var_y;
    out[4] = dx * dy / std::sqrt(ls.var_x * ls.var_y) - ls.corr;
}

using CopAccessor = std::function<const BivCopula&(int tree, int edge)>;

// Pair values of the sub-vine over variables [lo,hi] for a single observation
// given as w[0..d-1]; lv[t-1][a-lo] is the pair feeding edge (a,t).
std::vector<std::vector<std::pair<double, double>>> propagate_row(
    const double* w, int lo, int hi, int up_to_tree, const CopAccessor& cop) {
    std::vector<std::vector<std::pair<double, double>>> lv(up_to_tree);
    lv[0].resize(hi - lo);
    for (int a = lo; a <= hi - 1; ++a) lv[0][a - lo] = {w[a - 1], w[a]};
    for (int t = 2; t <= up_to_tree; ++t) {
        lv[t - 1].resize(hi - lo - t + 1);
        for (int a = lo; a <= hi - t; ++a) {
            const auto& left = lv[t - 2][a - lo];
            const auto& right = lv[t - 2][a + 1 - lo];
            lv[t - 1][a - lo] = {hfunc(cop(t - 1, a), left.first, left.second, CondOn::Second),
                                 hfunc(cop(t - 1, a + 1), right.first, right.second, CondOn::First)};
        }
    }
    return lv;
}

} // namespace

Matrix sandwich_covariance(const FittedTrees& fit, EdgeRef edge, const Partition& part,
                           bool include_rank_term) {
    check_edge(fit, edge);
    const int i = edge.i, j = edge.j;
    const int n = fit.n();
    const Matrix v = sample_from(fit);
    const Vector& x = fit.ppit_first(i, j);
    const Vector& y = fit.ppit_second(i, j);
    const Matrix cond = v.middleCols(i, j - 1);
    const GroupStats stats = group_stats(x, y, cond, part);
    const int big_l = part.size();
    const std::vector<int> leaf_of = leaf_assignment(part, cond);

    // Parameters entering the PPITs of this edge: every estimated edge (a,t)
    // of the sub-vine over variables [i, i+j] with t <= j-1.
    std::vector<std::pair<int, int>> cone;
    for (int t = 1; t <= j - 1; ++t) {
        for (int a = i; a + t <= i + j; ++a) {
            if (!fit.tree[t - 1][a - 1].at_independence_limit) cone.emplace_back(t, a);
        }
    }
    const int p = static_cast<int>(cone.size());
    const int q = p + 5 * big_l;

    const auto fitted_cop = [&](int t, int a) -> const BivCopula& {
        return fit.tree[t - 1][a - 1].copula;
    };

    // Per-observation stacked estimating function at the estimates.
    Matrix g = Matrix::Zero(n, q);
    for (int f = 0; f < p; ++f) {
        g.col(f) = fit.tree[cone[f].first - 1][cone[f].second - 1].scores;
    }
    for (int k = 0; k < n; ++k) {
        const int l = leaf_of[k];
        if (l < 0) continue;
        double h[5];
        h_values(x[k], y[k], stats.leaves[l], h);
        for (int c = 0; c < 5; ++c) g(k, p + 5 * l + c) = h[c];
    }

    // Mean Jacobian. The phi-block is analytic; at the moment estimates all
    // entries except the diagonal and the r-row vanish exactly.
    Matrix big_g = Matrix::Zero(q, q);
    for (int l = 0; l < big_l; ++l) {
        const LeafStats& ls = stats.leaves[l];
        const int base = p + 5 * l;
        for (int c = 0; c < 5; ++c) big_g(base + c, base + c) = -ls.mass;
        big_g(base + 4, base + 2) = -ls.mass * ls.corr / (2.0 * ls.var_x);
        big_g(base + 4, base + 3) = -ls.mass * ls.corr / (2.0 * ls.var_y);
    }

    // Theta columns by central differences with sub-vine re-propagation: a
    // parameter shift moves every PPIT above it, so scores and h-components
    // are re-evaluated on the re-propagated pairs (phi held fixed).
    for (int f = 0; f < p; ++f) {
        const auto [tf, af] = cone[f];
        const BivCopula& base_cop = fit.tree[tf - 1][af - 1].copula;
        const double theta = base_cop.theta();
        const double step = 1e-5 * std::max(1.0, std::fabs(theta));
        for (const int sgn : {1, -1}) {
            const BivCopula pert(base_cop.tag(), theta + sgn * step);
            const CopAccessor cop = [&](int t, int a) -> const BivCopula& {
                if (t == tf && a == af) return pert;
                return fit.tree[t - 1][a - 1].copula;
            };
            const SpanPairs sp = propagate_span(v, i, i + j, j, cop);
            for (int e = 0; e < p; ++e) {
                const auto [te, ae] = cone[e];
                const auto& pr = sp.at(ae, te);
                const BivCopula& ce = (e == f) ? pert : fit.tree[te - 1][ae - 1].copula;
                double mean_score = 0.0;
                for (int k = 0; k < n; ++k) mean_score += score(ce, pr.first[k], pr.second[k]);
                mean_score /= n;
                big_g(e, f) += sgn * mean_score / (2.0 * step);
            }
            const auto& top = sp.at(i, j);
            std::vector<std::array<double, 5>> mean_h(big_l, {0, 0, 0, 0, 0});
            for (int k = 0; k < n; ++k) {
                const int l = leaf_of[k];
                if (l < 0) continue;
                double h[5];
                h_values(top.first[k], top.second[k], stats.leaves[l], h);
                for (int c = 0; c < 5; ++c) mean_h[l][c] += h[c];
            }
            for (int l = 0; l < big_l; ++l) {
                for (int c = 0; c < 5; ++c) {
                    big_g(p + 5 * l + c, f) += sgn * (mean_h[l][c] / n) / (2.0 * step);
                }
            }
        }
    }

    Matrix g_used = g;
    if (include_rank_term) {
        // Rank-transform correction: for each variable column the PPITs (and
        // through them g) depend on, add W_col(k) = (1/n) sum_m d_{u_col}
        // g(V^m) (1{V_col^k <= V_col^m} - V_col^m). Leaf memberships are
        // frozen during the column perturbation: the thresholds are
        // empirical quantiles, so the membership indicator of the
        // quantile-defining observation would flip under any shift and turn
        // the difference quotient into a 1/step artifact.
        Matrix d_col(n, q);
        std::vector<double> w_row(fit.d);
        for (int col = i - 1; col <= i + j - 1; ++col) {
            for (int m = 0; m < n; ++m) {
                Eigen::Map<Eigen::VectorXd>(w_row.data(), fit.d) = v.row(m);
                const double v0 = v(m, col);
                const double vp = std::min(kUMax, v0 + 1e-4);
                const double vm = std::max(kUMin, v0 - 1e-4);
                Vector gplus = Vector::Zero(q), gminus = Vector::Zero(q);
                for (const int side : {0, 1}) {
                    w_row[col] = side == 0 ? vp : vm;
                    const auto lv = propagate_row(w_row.data(), i, i + j, j, fitted_cop);
                    Vector& dst = side == 0 ? gplus : gminus;
                    for (int e = 0; e < p; ++e) {
                        const auto [te, ae] = cone[e];
                        const auto& pr = lv[te - 1][ae - i];
                        dst[e] = score(fit.tree[te - 1][ae - 1].copula, pr.first, pr.second);
                    }
                    const int l = leaf_of[m];
                    if (l >= 0) {
                        const auto& top = lv[j - 1][0];
                        double h[5];
                        h_values(top.first, top.second, stats.leaves[l], h);
                        for (int c = 0; c < 5; ++c) dst[p + 5 * l + c] = h[c];
                    }
                }
                d_col.row(m) = (gplus - gminus).transpose() / (vp - vm);
            }

            // Suffix sums over the column order give the indicator average in
            // O(n log n).
            std::vector<int> order(n);
            for (int m = 0; m < n; ++m) order[m] = m;
            std::sort(order.begin(), order.end(),
                      [&](int a, int b) { return v(a, col) < v(b, col); });
            Matrix suffix(n + 1, q);
            suffix.row(n).setZero();
            for (int r = n - 1; r >= 0; --r) {
                suffix.row(r) = suffix.row(r + 1) + d_col.row(order[r]);
            }
            // First sorted position holding each value (ties share it).
            std::vector<int> first_pos(n);
            for (int r = 0; r < n; ++r) {
                if (r > 0 && v(order[r], col) == v(order[r - 1], col)) {
                    first_pos[order[r]] = first_pos[order[r - 1]];
                } else {
                    first_pos[order[r]] = r;
                }
            }
            Eigen::RowVectorXd weighted = Eigen::RowVectorXd::Zero(q);
            for (int m = 0; m < n; ++m) weighted += d_col.row(m) * v(m, col);
            for (int k = 0; k < n; ++k) {
                g_used.row(k) += (suffix.row(first_pos[k]) - weighted) / n;
            }
        }
    }

    // Influence of the correlation vector: select the r-rows of G^{-1} g.
    Matrix delta = Matrix::Zero(q, big_l);
    for (int l = 0; l < big_l; ++l) delta(p + 5 * l + 4, l) = 1.0;
    const Matrix z = solve_checked(big_g.transpose(), delta, "sandwich_covariance");
    Matrix psi = g_used * z; // n x L
    const Eigen::RowVectorXd mean = psi.colwise().mean();
    psi.rowwise() -= mean;
    Matrix sigma = (psi.transpose() * psi) / n;
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    check_psd(sigma, "sandwich_covariance");
    return sigma;
}

Matrix bootstrap_covariance(const FittedTrees& fit, EdgeRef edge, const Partition& part,
                            int b_replicates, std::uint64_t seed) {
    check_edge(fit, edge);
    if (b_replicates < 2) throw std::invalid_argument("bootstrap_covariance: need B >= 2");
    const int i = edge.i, j = edge.j;
    const int n = fit.n();
    const int d = fit.d;
    const Matrix v = sample_from(fit);
    const int big_l = part.size();

    FamilyGrid families(j - 1);
    for (int t = 1; t <= j - 1; ++t) {
        families[t - 1].reserve(d - t);
        for (int a = 1; a <= d - t; ++a) {
            families[t - 1].push_back(fit.tree[t - 1][a - 1].copula.tag());
        }
    }

    std::vector<Vector> draws;
    draws.reserve(b_replicates);
    Matrix resampled(n, d);
    for (int b = 0; b < b_replicates; ++b) {
        const CounterRng rng(CounterRng::derive(seed, static_cast<std::uint64_t>(b) + 1));
        for (int k = 0; k < n; ++k) {
            const int row = std::min(n - 1, static_cast<int>(rng.unit_at(k) * n));
            resampled.row(k) = v.row(row);
        }
        try {
            const Matrix vb = rank_pseudo_obs(resampled);
            const FittedTrees fb = stepwise_fit(vb, families, j - 1);
            const GroupStats sb = group_stats(fb.ppit_first(i, j), fb.ppit_second(i, j),
                                              vb.middleCols(i, j - 1), part);
            draws.push_back(sb.corr_vector());
        } catch (const std::runtime_error&) {
            // Resample landed a leaf empty or a fit on a boundary: skip it.
        }
    }
    const int good = static_cast<int>(draws.size());
    if (good < std::max(2, b_replicates / 2)) {
        throw numeric_error("bootstrap_covariance: " + std::to_string(b_replicates - good) +
                            " of " + std::to_string(b_replicates) + " replicates failed");
    }
    Vector mean = Vector::Zero(big_l);
    for (const auto& r : draws) mean += r;
    mean /= good;
    Matrix sigma = Matrix::Zero(big_l, big_l);
    for (const auto& r : draws) {
        const Vector c = r - mean;
        sigma += c * c.transpose();
    }
    sigma *= static_cast<double>(n) / good;
    check_psd(sigma, "bootstrap_covariance");
    return sigma;
}

namespace {

Matrix covariance_for(const GroupStats& stats, const Partition& part, const CovMode& mode,
                      const FittedTrees* fit, EdgeRef edge) {
    switch (mode.kind) {
        case CovKind::OracleStar: {
            Vector diag(stats.leaves.size());
            for (std::size_t l = 0; l < stats.leaves.size(); ++l) {
                diag[l] = stats.leaves[l].var_star;
            }
            return diag.asDiagonal();
        }
        case CovKind::Sandwich:
        case CovKind::SandwichKnownMargins:
            if (!fit) {
                throw std::invalid_argument("statistic: sandwich modes need the fitted trees");
            }
            return sandwich_covariance(*fit, edge, part, mode.kind == CovKind::Sandwich);
        case CovKind::Bootstrap:
            if (!fit) {
                throw std::invalid_argument("statistic: bootstrap mode needs the fitted trees");
            }
            return bootstrap_covariance(*fit, edge, part, mode.bootstrap_b, mode.bootstrap_seed);
    }
    throw std::logic_error("statistic: unknown covariance mode");
}

TestOutcome statistic_impl(const Vector& x, const Vector& y, const Matrix& cond,
                           const Partition& part, const CovMode& mode, const FittedTrees* fit,
                           EdgeRef edge, bool avg_form) {
    if (part.size() < 2) throw partition_error("statistic: need at least 2 leaves");
    const GroupStats stats = group_stats(x, y, cond, part);
    const Matrix sigma = covariance_for(stats, part, mode, fit, edge);
    check_psd(sigma, "statistic");

    double t;
    if (avg_form) {
        Vector masses(stats.leaves.size());
        for (std::size_t l = 0; l < stats.leaves.size(); ++l) masses[l] = stats.leaves[l].mass;
        t = quadratic_statistic_avg(stats.corr_vector(), masses, sigma, stats.n);
    } else {
        t = quadratic_statistic(stats.corr_vector(), sigma, stats.n);
    }

    TestOutcome out;
    out.statistic = t;
    out.df = part.size() - 1;
    out.p_value = chi2_sf(out.df, t);
    out.mode = mode;
    out.partition_used = part;
    return out;
}

} // namespace

TestOutcome statistic_fixed(const Vector& x, const Vector& y, const Matrix& cond,
                            const Partition& part, const CovMode& mode, const FittedTrees* fit,
                            EdgeRef edge) {
    return statistic_impl(x, y, cond, part, mode, fit, edge, false);
}

TestOutcome statistic_avg_form(const Vector& x, const Vector& y, const Matrix& cond,
                               const Partition& part, const CovMode& mode, const FittedTrees* fit,
                               EdgeRef edge) {
    return statistic_impl(x, y, cond, part, mode, fit, edge, true);
}

TestOutcome combine_with_penalty(const TestOutcome& t0, const std::vector<TestOutcome>& alternatives,
                                 int n, double lambda_n, double alpha) {
    if (n < 1) throw std::domain_error("combine_with_penalty: need n >= 1");
    if (!(lambda_n > 0.0)) throw std::domain_error("combine_with_penalty: need lambda_n > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("combine_with_penalty: alpha outside (0,1)");
    }

    const double n_lambda = n * lambda_n;
    double best = t0.statistic + n_lambda;
    double t_max = t0.statistic;
    const TestOutcome* winner = nullptr;
    for (const auto& alt : alternatives) {
        t_max = std::max(t_max, alt.statistic);
        if (alt.statistic > best) {
            best = alt.statistic;
            winner = &alt;
        }
    }
    const double theta = best - n_lambda;
    if (theta < t0.statistic - 1e-9 * std::max(1.0, std::fabs(t0.statistic))) {
        throw std::logic_error("combine_with_penalty: penalized statistic below T(Gamma_0)");
    }

    TestOutcome out;
    out.statistic = theta;
    out.df = t0.df;
    out.p_value = chi2_sf(out.df, theta);
    out.mode = t0.mode;
    out.partition_used = winner ? winner->partition_used : t0.partition_used;
    PenaltyRecord rec;
    rec.n_lambda = n_lambda;
    rec.t_gamma0 = t0.statistic;
    rec.t_gamma_max = alternatives.empty() ? t0.statistic : t_max;
    rec.b_n = penalty_bound(rec.t_gamma_max, chi2_quantile(t0.df, 1.0 - alpha), n);
    out.penalty = rec;
    return out;
}

double penalty_bound(double t_gamma_max, double tau_crit, int n) {
    if (n < 1) throw std::domain_error("penalty_bound: need n >= 1");
    return (t_gamma_max - tau_crit) / n;
}

std::string test_outcome_to_json(const TestOutcome& outcome) {
    nlohmann::json j;
    j["statistic"] = outcome.statistic;
    j["df"] = outcome.df;
    j["p_value"] = outcome.p_value;
    j["mode"] = cov_mode_name(outcome.mode);
    if (outcome.penalty) {
        j["penalty"] = {{"n_lambda", outcome.penalty->n_lambda},
                        {"t_gamma0", outcome.penalty->t_gamma0},
                        {"t_gamma_max", outcome.penalty->t_gamma_max},
                        {"b_n", outcome.penalty->b_n}};
    }
    j["partition"] = nlohmann::json::parse(partition_to_json(outcome.partition_used));
    return j.dump();
}

} // namespace svct
