#include "svct/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace svct {

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& headers) {
    if (static_cast<Eigen::Index>(headers.size()) != m.cols()) {
        throw std::invalid_argument("write_matrix_csv: header count does not match columns");
    }
    for (std::size_t c = 0; c < headers.size(); ++c) {
        if (c) os << ',';
        os << headers[c];
    }
    os << '\n';
    char buf[40];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ',';
            std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
            os << buf;
        }
        os << '\n';
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (const char ch : line) {
        if (ch == ',') {
            out.push_back(field);
            field.clear();
        } else if (ch != '\r') {
            field += ch;
        }
    }
    out.push_back(field);
    return out;
}

} // namespace

Eigen::MatrixXd read_matrix_csv(std::istream& is, std::vector<std::string>* headers) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_matrix_csv: empty input");
    const std::vector<std::string> head = split_line(line);
    const int cols = static_cast<int>(head.size());
    if (headers) *headers = head;

    std::vector<double> values;
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_line(line);
        if (static_cast<int>(fields.size()) != cols) {
            throw std::invalid_argument("read_matrix_csv: row " + std::to_string(rows + 2) +
                                        " has " + std::to_string(fields.size()) +
                                        " fields, expected " + std::to_string(cols));
        }
        for (const auto& f : fields) {
            std::size_t used = 0;
            double x = 0.0;
            try {
                x = std::stod(f, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("read_matrix_csv: bad number '" + f + "' in row " +
                                            std::to_string(rows + 2));
            }
            if (used != f.size()) {
                throw std::invalid_argument("read_matrix_csv: bad number '" + f + "' in row " +
                                            std::to_string(rows + 2));
            }
            values.push_back(x);
        }
        ++rows;
    }
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = values[static_cast<std::size_t>(r) * cols + c];
    }
    return m;
}

} // namespace svct
