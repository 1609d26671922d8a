#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace svct {

// Numeric CSV with a header row: '.' decimal separator, values written with
// enough digits to round-trip exactly.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& headers);

Eigen::MatrixXd read_matrix_csv(std::istream& is, std::vector<std::string>* headers = nullptr);

} // namespace svct
