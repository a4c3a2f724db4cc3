#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "napmin/network.hpp"

namespace napmin {

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty dataset file: " + path);

    // Header x0,...,x{d-1},label fixes the dimension.
    int dim = 0;
    {
        std::stringstream header(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(header, field, ',')) fields.push_back(field);
        if (fields.size() < 2 || fields.back() != "label")
            throw std::runtime_error("dataset header must be x0,...,label: " + path);
        dim = static_cast<int>(fields.size()) - 1;
        for (int i = 0; i < dim; ++i) {
            if (fields[i] != "x" + std::to_string(i))
                throw std::runtime_error("dataset header column " + std::to_string(i) +
                                         " must be x" + std::to_string(i));
        }
    }

    std::vector<Eigen::VectorXd> rows;
    std::vector<int> labels;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        Eigen::VectorXd x(dim);
        for (int i = 0; i < dim; ++i) {
            if (!std::getline(ss, field, ','))
                throw std::runtime_error("dataset line " + std::to_string(lineno) + ": too few fields");
            x[i] = std::stod(field);
        }
        if (!std::getline(ss, field, ','))
            throw std::runtime_error("dataset line " + std::to_string(lineno) + ": missing label");
        labels.push_back(std::stoi(field));
        rows.push_back(std::move(x));
    }

    Dataset data;
    data.xs.resize(static_cast<int>(rows.size()), dim);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) data.xs.row(r) = rows[r];
    data.labels = std::move(labels);
    return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    const int dim = static_cast<int>(data.xs.cols());
    for (int i = 0; i < dim; ++i) out << "x" << i << ",";
    out << "label\n";
    char buf[64];
    for (int r = 0; r < data.size(); ++r) {
        for (int i = 0; i < dim; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", data.xs(r, i));
            out << buf << ",";
        }
        out << data.labels[r] << "\n";
    }
}

}  // namespace napmin
