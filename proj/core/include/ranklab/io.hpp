#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ranklab {

/// Shortest round-trip decimal text for a double ("%.17g" fallback).
std::string format_double(double v);

/// Write via a temporary file in the same directory, then rename.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// Comma-separated table with one optional "# ..." header line.
struct Table {
    std::string header;                     // without the leading '#'
    std::vector<std::vector<double>> rows;  // ragged rows allowed
    std::string to_csv() const;
};

void write_table(const std::filesystem::path& path, const Table& t);

}  // namespace ranklab
