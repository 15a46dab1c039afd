#pragma once

// Binary trace files.
//
// Layout, all little-endian:
//   "SQZT"            4 bytes
//   version           u32 (currently 1)
//   sample_rate       f64
//   quadrature        u8  (0 amplitude, 1 phase)
//   sample_count      u64
//   samples           f64 * sample_count

#include "sqzcomb/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace sqzcomb {

inline constexpr std::uint32_t trace_format_version = 1;

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedVersionError : public TraceFormatError {
 public:
  UnsupportedVersionError(std::uint32_t found)
      : TraceFormatError("unsupported trace format version: expected " +
                         std::to_string(trace_format_version) + ", found " + std::to_string(found)),
        found_(found) {}
  std::uint32_t found() const { return found_; }

 private:
  std::uint32_t found_;
};

// Throws std::runtime_error if the file cannot be written.
void write_trace(const std::filesystem::path& path, const Trace& trace);

// Throws TraceFormatError on bad magic, truncation, trailing bytes or an
// invalid header field, UnsupportedVersionError on a version mismatch.
// Nothing is returned unless the whole file parsed.
Trace read_trace(const std::filesystem::path& path);

}  // namespace sqzcomb
