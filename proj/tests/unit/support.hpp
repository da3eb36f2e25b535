#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "stclust/grid.hpp"
#include "stclust/ingest.hpp"

namespace testing {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("stclust_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline stclust::GridGeometry planar(std::size_t nrows, std::size_t ncols, double cell = 1.0) {
    return {stclust::GridMode::planar, 0.0, 0.0, cell, cell, nrows, ncols};
}

inline stclust::ScalarField field(std::size_t nrows, std::size_t ncols, std::vector<double> values,
                                  stclust::Units units = stclust::Units::celsius) {
    const auto g = planar(nrows, ncols);
    return stclust::ScalarField(g, std::move(values), std::vector<std::uint8_t>(g.cell_count(), 1), units);
}

inline std::string read_text(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream(file, std::ios::binary) << text;
}

}  // namespace testing
