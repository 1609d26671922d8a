#pragma once

#include "svct/tree.hpp"

#include <string>
#include <vector>

namespace svct {

struct HierConfig {
    double alpha = 0.05;  // family-wise level; each edge tested at alpha / M
    FamilyGrid families;  // empty: Clayton everywhere
    CccdtConfig test;
};

struct EdgeRecord {
    int i = 0;
    int j = 0;
    double level = 0.0; // alpha / M
    bool rejected = false;
    TestOutcome outcome;
};

struct HierOutcome {
    int d = 0;
    int m_tests = 0;    // (d-1)(d-2)/2
    bool rejected = false;
    int stop_tree = 0;  // first tree with a rejection, 0 when none
    std::vector<EdgeRecord> records;
};

// Test every edge of trees j = 2..d-1 at level alpha/M, stopping after the
// first tree containing a rejection. Lower trees are refitted stepwise as
// needed; nothing is refitted after a rejection.
HierOutcome hierarchical_test(const Matrix& v, const HierConfig& cfg);

std::string hier_outcome_to_json(const HierOutcome& outcome);

// Fixed-width per-tree table for terminal output.
std::string render_table(const HierOutcome& outcome);

} // namespace svct
