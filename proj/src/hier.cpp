#include "svct/hier.hpp"

#include "svct/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <stdexcept>

namespace svct {

HierOutcome hierarchical_test(const Matrix& v, const HierConfig& cfg) {
    const int d = static_cast<int>(v.cols());
    if (d < 3) throw std::invalid_argument("hierarchical_test: need d >= 3");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
        throw std::domain_error("hierarchical_test: alpha outside (0,1)");
    }
    const FamilyGrid families = cfg.families.empty()
                                    ? uniform_family_grid(d, FamilyTag{Family::Clayton, Rotation::None})
                                    : cfg.families;

    HierOutcome out;
    out.d = d;
    out.m_tests = (d - 1) * (d - 2) / 2;
    const double level = cfg.alpha / out.m_tests;

    for (int j = 2; j <= d - 1; ++j) {
        const FittedTrees fit = stepwise_fit(v, families, j - 1);
        bool tree_rejects = false;
        for (int i = 1; i <= d - j; ++i) {
            CccdtConfig tc = cfg.test;
            tc.alpha = level;
            EdgeRecord rec;
            rec.i = i;
            rec.j = j;
            rec.level = level;
            rec.outcome = cccdt_test(fit, EdgeRef{i, j}, tc);
            rec.rejected = rec.outcome.p_value <= level;
            tree_rejects = tree_rejects || rec.rejected;
            out.records.push_back(std::move(rec));
        }
        if (tree_rejects) {
            out.rejected = true;
            out.stop_tree = j;
            break;
        }
    }
    return out;
}

std::string hier_outcome_to_json(const HierOutcome& outcome) {
    nlohmann::json j;
    j["d"] = outcome.d;
    j["m_tests"] = outcome.m_tests;
    j["rejected"] = outcome.rejected;
    if (outcome.stop_tree > 0) {
        j["stop_tree"] = outcome.stop_tree;
    } else {
        j["stop_tree"] = nullptr;
    }
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : outcome.records) {
        nlohmann::json jr;
        jr["i"] = rec.i;
        jr["j"] = rec.j;
        jr["level"] = rec.level;
        jr["rejected"] = rec.rejected;
        jr["outcome"] = nlohmann::json::parse(test_outcome_to_json(rec.outcome));
        records.push_back(std::move(jr));
    }
    j["records"] = std::move(records);
    return j.dump();
}

std::string render_table(const HierOutcome& outcome) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line,
                  "hierarchical CCC test: d=%d, M=%d, per-edge level=%.5f\n", outcome.d,
                  outcome.m_tests, outcome.records.empty() ? 0.0 : outcome.records[0].level);
    out += line;
    int current_tree = 0;
    for (const auto& rec : outcome.records) {
        if (rec.j != current_tree) {
            current_tree = rec.j;
            std::snprintf(line, sizeof line, "tree %d\n  %-14s %10s %3s %10s %s\n", current_tree,
                          "edge", "Theta_n", "df", "p-value", "decision");
            out += line;
        }
        char label[32];
        if (rec.j == 2) {
            std::snprintf(label, sizeof label, "(%d,%d|%d)", rec.i, rec.i + rec.j, rec.i + 1);
        } else {
            std::snprintf(label, sizeof label, "(%d,%d|%d:%d)", rec.i, rec.i + rec.j, rec.i + 1,
                          rec.i + rec.j - 1);
        }
        std::snprintf(line, sizeof line, "  %-14s %10.4f %3d %10.6f %s\n", label,
                      rec.outcome.statistic, rec.outcome.df, rec.outcome.p_value,
                      rec.rejected ? "reject" : "keep");
        out += line;
    }
    if (outcome.rejected) {
        std::snprintf(line, sizeof line,
                      "simplifying assumption rejected in tree %d; higher trees not tested\n",
                      outcome.stop_tree);
    } else {
        std::snprintf(line, sizeof line, "no rejection; simplifying assumption not rejected\n");
    }
    out += line;
    return out;
}

} // namespace svct
