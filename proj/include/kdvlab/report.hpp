#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace kdvlab {

// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const Table& table);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace kdvlab
