#include "svct/tree.hpp"

#include "svct/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace svct {

std::vector<SplitCandidate> split_candidates(const std::vector<int>& members, const Matrix& cond,
                                             int min_leaf) {
    if (min_leaf < 2) throw std::invalid_argument("split_candidates: need min_leaf >= 2");
    const int m = static_cast<int>(members.size());
    std::vector<SplitCandidate> out;
    if (m < 2 * min_leaf) return out;

    const int p = static_cast<int>(cond.cols());
    std::vector<int> axes;
    for (int a = 0; a < p; ++a) axes.push_back(a);
    if (p >= 2) axes.push_back(Condition::kMeanAxis);

    // Small leaves only try the median; larger ones the three quartiles.
    std::vector<double> quantiles;
    if (m < 4 * min_leaf) {
        quantiles = {0.5};
    } else {
        quantiles = {0.25, 0.5, 0.75};
    }

    std::vector<double> values(m);
    for (const int axis : axes) {
        Condition probe;
        probe.axis = axis;
        for (int r = 0; r < m; ++r) values[r] = condition_value(probe, cond, members[r]);
        double last_threshold = std::numeric_limits<double>::quiet_NaN();
        for (const double q : quantiles) {
            const double t = empirical_quantile(values, q);
            if (t == last_threshold) continue; // duplicate quantile on near-discrete data
            int left = 0;
            for (const double v : values) left += v <= t;
            if (left < min_leaf || m - left < min_leaf) continue;
            out.push_back(SplitCandidate{axis, q, t});
            last_threshold = t;
        }
    }
    return out;
}

namespace {

struct ChildMoments {
    int count = 0;
    double corr = 0.0;
    double var_star = 0.0; // scaled to the leaf-local sample size
    bool ok = false;
};

ChildMoments child_moments(const std::vector<int>& rows, const Vector& x, const Vector& y,
                           int m_total) {
    ChildMoments cm;
    cm.count = static_cast<int>(rows.size());
    if (cm.count < 2) return cm;
    double sx = 0.0, sy = 0.0;
    for (const int k : rows) {
        sx += x[k];
        sy += y[k];
    }
    const double mx = sx / cm.count, my = sy / cm.count;
    double vx = 0.0, vy = 0.0, cxy = 0.0;
    for (const int k : rows) {
        const double dx = x[k] - mx, dy = y[k] - my;
        vx += dx * dx;
        vy += dy * dy;
        cxy += dx * dy;
    }
    vx /= cm.count;
    vy /= cm.count;
    cxy /= cm.count;
    if (vx <= 0.0 || vy <= 0.0) return cm;
    cm.corr = std::max(-1.0, std::min(1.0, cxy / std::sqrt(vx * vy)));
    const double sdx = std::sqrt(vx), sdy = std::sqrt(vy);
    double sum_sq = 0.0;
    for (const int k : rows) {
        const double zx = (x[k] - mx) / sdx, zy = (y[k] - my) / sdy;
        const double inf = 0.5 * cm.corr * (zx * zx + zy * zy) - zx * zy;
        sum_sq += inf * inf;
    }
    const double mass = static_cast<double>(cm.count) / m_total;
    cm.var_star = sum_sq / (m_total * mass * mass);
    cm.ok = true;
    return cm;
}

} // namespace

std::optional<SplitChoice> best_split(const std::vector<int>& members, const Vector& x,
                                      const Vector& y, const Matrix& cond,
                                      const std::vector<SplitCandidate>& candidates) {
    const int m = static_cast<int>(members.size());
    std::optional<SplitChoice> best;
    std::vector<int> left, right;
    left.reserve(m);
    right.reserve(m);
    for (const auto& cand : candidates) {
        Condition probe;
        probe.axis = cand.axis;
        left.clear();
        right.clear();
        for (const int k : members) {
            (condition_value(probe, cond, k) <= cand.threshold ? left : right).push_back(k);
        }
        const ChildMoments a = child_moments(left, x, y, m);
        const ChildMoments b = child_moments(right, x, y, m);
        if (!a.ok || !b.ok) continue;
        const double denom = a.var_star + b.var_star;
        if (!(denom > 0.0)) continue;
        const double diff = a.corr - b.corr;
        const double t = m * diff * diff / denom;
        // Candidates arrive ordered by axis then quantile; strict comparison
        // keeps the first maximizer, which is the documented tie-break.
        if (!best || t > best->statistic) best = SplitChoice{cand, t};
    }
    return best;
}

std::optional<Partition> grow(const Vector& x, const Vector& y, const Matrix& cond, int j_max,
                              int min_leaf) {
    if (j_max < 1) throw std::invalid_argument("grow: need j_max >= 1");
    const int n = static_cast<int>(x.size());
    if (y.size() != n || cond.rows() != n) {
        throw std::invalid_argument("grow: x, y, cond must share the observation count");
    }

    struct GrowLeaf {
        std::vector<int> members;
        LeafPredicate pred;
    };
    GrowLeaf root;
    root.members.resize(n);
    for (int k = 0; k < n; ++k) root.members[k] = k;

    std::vector<GrowLeaf> frontier{std::move(root)}, done;
    for (int depth = 1; depth <= j_max && !frontier.empty(); ++depth) {
        std::vector<GrowLeaf> next;
        for (auto& leaf : frontier) {
            const auto cands = split_candidates(leaf.members, cond, min_leaf);
            const auto choice = best_split(leaf.members, x, y, cond, cands);
            if (!choice) {
                done.push_back(std::move(leaf));
                continue;
            }
            Condition cut;
            cut.axis = choice->split.axis;
            cut.threshold = choice->split.threshold;
            GrowLeaf lo, hi;
            for (const int k : leaf.members) {
                (condition_value(cut, cond, k) <= cut.threshold ? lo : hi).members.push_back(k);
            }
            lo.pred = leaf.pred;
            hi.pred = leaf.pred;
            cut.upper = false;
            lo.pred.conditions.push_back(cut);
            cut.upper = true;
            hi.pred.conditions.push_back(cut);
            next.push_back(std::move(lo));
            next.push_back(std::move(hi));
        }
        frontier = std::move(next);
    }
    for (auto& leaf : frontier) done.push_back(std::move(leaf));

    if (done.size() < 2) return std::nullopt;
    Partition part;
    for (auto& leaf : done) part.leaves.push_back(std::move(leaf.pred));
    return part;
}

double CccdtConfig::lambda_n(int n) const {
    if (n < 1) throw std::domain_error("lambda_n: need n >= 1");
    return penalty_c * std::pow(static_cast<double>(n), -penalty_beta);
}

TestOutcome cccdt_test_on(const Vector& x, const Vector& y, const Matrix& cond,
                          const CccdtConfig& cfg, const FittedTrees* fit, EdgeRef edge) {
    const int n = static_cast<int>(x.size());
    const Partition gamma0 = median_partition(cond);
    const TestOutcome t0 = statistic_fixed(x, y, cond, gamma0, cfg.mode, fit, edge);
    std::vector<TestOutcome> alternatives;
    if (const auto gamma_max = grow(x, y, cond, cfg.j_max, cfg.min_leaf)) {
        alternatives.push_back(statistic_fixed(x, y, cond, *gamma_max, cfg.mode, fit, edge));
    }
    return combine_with_penalty(t0, alternatives, n, cfg.lambda_n(n), cfg.alpha);
}

TestOutcome cccdt_test(const FittedTrees& fit, EdgeRef edge, const CccdtConfig& cfg) {
    const Vector& x = fit.ppit_first(edge.i, edge.j);
    const Vector& y = fit.ppit_second(edge.i, edge.j);
    Matrix cond(fit.n(), edge.j - 1);
    for (int c = 0; c < edge.j - 1; ++c) {
        // Conditioning variables i+1..i+j-1 are original sample columns.
        cond.col(c) = fit.level_first[0][edge.i + c];
    }
    return cccdt_test_on(x, y, cond, cfg, &fit, edge);
}

} // namespace svct
