#include "svct/partition.hpp"

#include "svct/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svct {

double condition_value(const Condition& c, const Matrix& cond, int row) {
    if (c.axis == Condition::kMeanAxis) return cond.row(row).mean();
    if (c.axis < 0 || c.axis >= cond.cols()) {
        throw std::domain_error("condition_value: axis " + std::to_string(c.axis) +
                                " out of range for " + std::to_string(cond.cols()) + " columns");
    }
    return cond(row, c.axis);
}

bool leaf_contains(const LeafPredicate& leaf, const Matrix& cond, int row) {
    for (const auto& c : leaf.conditions) {
        const double v = condition_value(c, cond, row);
        if (c.upper ? !(v > c.threshold) : !(v <= c.threshold)) return false;
    }
    return true;
}

std::vector<int> leaf_assignment(const Partition& part, const Matrix& cond) {
    const int n = static_cast<int>(cond.rows());
    std::vector<int> out(n, -1);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < part.size(); ++l) {
            if (!leaf_contains(part.leaves[l], cond, k)) continue;
            if (out[k] >= 0) {
                throw partition_error("leaf_assignment: leaves " + std::to_string(out[k]) +
                                      " and " + std::to_string(l) + " overlap at row " +
                                      std::to_string(k));
            }
            out[k] = l;
        }
    }
    return out;
}

double empirical_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::domain_error("empirical_quantile: empty sample");
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("empirical_quantile: q outside (0,1)");
    std::sort(values.begin(), values.end());
    const int m = static_cast<int>(values.size());
    int idx = static_cast<int>(std::ceil(q * m)) - 1;
    idx = std::max(0, std::min(m - 1, idx));
    return values[idx];
}

Partition median_partition(const Matrix& cond) {
    if (cond.rows() < 2) throw degenerate_data_error("median_partition: need at least 2 rows");
    Condition c;
    c.axis = cond.cols() == 1 ? 0 : Condition::kMeanAxis;
    std::vector<double> vals(cond.rows());
    for (int k = 0; k < cond.rows(); ++k) vals[k] = condition_value(c, cond, k);
    c.threshold = empirical_quantile(std::move(vals), 0.5);

    Partition part;
    c.upper = false;
    part.leaves.push_back(LeafPredicate{{c}});
    c.upper = true;
    part.leaves.push_back(LeafPredicate{{c}});
    return part;
}

std::string partition_to_json(const Partition& part) {
    nlohmann::json leaves = nlohmann::json::array();
    for (const auto& leaf : part.leaves) {
        nlohmann::json conds = nlohmann::json::array();
        for (const auto& c : leaf.conditions) {
            nlohmann::json jc;
            if (c.axis == Condition::kMeanAxis) {
                jc["axis"] = "mean";
            } else {
                jc["axis"] = c.axis;
            }
            jc["op"] = c.upper ? ">" : "<=";
            jc["threshold"] = c.threshold;
            conds.push_back(jc);
        }
        leaves.push_back(conds);
    }
    return nlohmann::json{{"leaves", leaves}}.dump();
}

Partition partition_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("partition_from_json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("leaves") || !j["leaves"].is_array()) {
        throw std::invalid_argument("partition_from_json: expected {\"leaves\": [...]}");
    }
    Partition part;
    for (const auto& jleaf : j["leaves"]) {
        LeafPredicate leaf;
        for (const auto& jc : jleaf) {
            Condition c;
            const auto& axis = jc.at("axis");
            if (axis.is_string()) {
                if (axis.get<std::string>() != "mean") {
                    throw std::invalid_argument("partition_from_json: unknown axis name");
                }
                c.axis = Condition::kMeanAxis;
            } else {
                c.axis = axis.get<int>();
            }
            const std::string op = jc.at("op").get<std::string>();
            if (op != "<=" && op != ">") {
                throw std::invalid_argument("partition_from_json: op must be <= or >");
            }
            c.upper = op == ">";
            c.threshold = jc.at("threshold").get<double>();
            leaf.conditions.push_back(c);
        }
        part.leaves.push_back(std::move(leaf));
    }
    return part;
}

} // namespace svct
