#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace svct {

using Matrix = Eigen::MatrixXd;

// One threshold condition over the conditioning columns. `axis` is a 0-based
// column index, or kMeanAxis for the mean aggregation of all columns.
struct Condition {
    static constexpr int kMeanAxis = -1;

    int axis = 0;
    bool upper = false; // false: value <= threshold, true: value > threshold
    double threshold = 0.5;
};

// Conjunction of conditions; an empty list matches everything.
struct LeafPredicate {
    std::vector<Condition> conditions;
};

// Ordered list of disjoint leaves over the conditioning space.
struct Partition {
    std::vector<LeafPredicate> leaves;

    int size() const { return static_cast<int>(leaves.size()); }
};

// Value the condition compares against for one row of the conditioning matrix.
double condition_value(const Condition& c, const Matrix& cond, int row);

bool leaf_contains(const LeafPredicate& leaf, const Matrix& cond, int row);

// Leaf index per row, -1 where no leaf matches. Throws partition_error if a
// row matches more than one leaf (leaves must be disjoint).
std::vector<int> leaf_assignment(const Partition& part, const Matrix& cond);

// The fixed null partition: median split on the single conditioning variable
// when there is one column, on the mean aggregation otherwise.
Partition median_partition(const Matrix& cond);

// Empirical quantile as an order statistic of `values` (lower convention:
// the ceil(q*m)-th smallest), the same rule the split search uses.
double empirical_quantile(std::vector<double> values, double q);

// JSON round trip; schema: [[{"axis":0|"mean","op":"<="|">","threshold":x},...],...]
std::string partition_to_json(const Partition& part);
Partition partition_from_json(const std::string& text);

} // namespace svct
