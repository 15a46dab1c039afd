#pragma once

// Plain CSV output with a header row. Numbers are written with 17
// significant digits so they round-trip exactly.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sqzcomb {

std::string format_number(double v);

class CsvWriter {
 public:
  // Throws std::runtime_error if the file cannot be opened.
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  // Throws std::invalid_argument if the column count differs from the header.
  void row(std::span<const double> values);
  void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }

  // Flushes and checks the stream; throws std::runtime_error on failure.
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

}  // namespace sqzcomb
