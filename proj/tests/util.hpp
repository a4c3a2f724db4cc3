#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unistd.h>

#include "napmin/network.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(NAPMIN_FIXTURE_DIR) + "/" + name;
}

inline napmin::Network load_fixture2x2() {
    return napmin::load_model(fixture_path("fixture2x2.json"));
}

inline napmin::Network load_fixture1d() {
    return napmin::load_model(fixture_path("fixture1d.json"));
}

inline napmin::Dataset load_train() {
    return napmin::load_dataset(fixture_path("fixture2x2_train.csv"));
}

inline napmin::Dataset load_test() {
    return napmin::load_dataset(fixture_path("fixture2x2_test.csv"));
}

// Per-process scratch directory, cleaned up on exit.
class TempDir {
public:
    TempDir() {
        const auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate =
                base / ("napmin_test_" + std::to_string(::getpid()) + "_" + std::to_string(i));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("could not create a scratch directory");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

inline Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

}  // namespace testutil
