#include "sqzcomb/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace sqzcomb {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != columns_) {
    throw std::invalid_argument("CsvWriter: row has " + std::to_string(values.size()) +
                                " columns, header has " + std::to_string(columns_));
  }
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
}

void CsvWriter::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failed for " + path_.string());
  out_.close();
}

}  // namespace sqzcomb
