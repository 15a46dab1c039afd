#include "sqzcomb/trace_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <vector>

namespace sqzcomb {

namespace {

constexpr std::array<char, 4> magic{'S', 'Q', 'Z', 'T'};
constexpr std::size_t header_size = 4 + 4 + 8 + 1 + 8;

template <typename U>
void put_le(std::vector<unsigned char>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<unsigned char>((value >> (8 * i)) & 0xFFu));
  }
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void write_trace(const std::filesystem::path& path, const Trace& trace) {
  if (!(trace.sample_rate > 0.0) || !std::isfinite(trace.sample_rate)) {
    throw std::invalid_argument("write_trace: sample rate must be > 0");
  }
  std::vector<unsigned char> buf;
  buf.reserve(header_size + 8 * trace.samples.size());
  buf.insert(buf.end(), magic.begin(), magic.end());
  put_le<std::uint32_t>(buf, trace_format_version);
  put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(trace.sample_rate));
  buf.push_back(static_cast<unsigned char>(trace.quadrature));
  put_le<std::uint64_t>(buf, trace.samples.size());
  for (double s : trace.samples) put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(s));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_trace: cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("write_trace: write failed for " + path.string());
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_trace: cannot open " + path.string());
  const std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in),
                                       std::istreambuf_iterator<char>()};

  if (buf.size() < magic.size()) throw TraceFormatError("read_trace: truncated header");
  if (!std::equal(magic.begin(), magic.end(), buf.begin(),
                  [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw TraceFormatError("read_trace: bad magic: expected \"SQZT\", found \"" +
                           std::string(buf.begin(), buf.begin() + 4) + "\"");
  }
  if (buf.size() < 8) throw TraceFormatError("read_trace: truncated header");
  const auto version = get_le<std::uint32_t>(buf.data() + 4);
  if (version != trace_format_version) throw UnsupportedVersionError(version);
  if (buf.size() < header_size) throw TraceFormatError("read_trace: truncated header");

  Trace t;
  t.sample_rate = std::bit_cast<double>(get_le<std::uint64_t>(buf.data() + 8));
  if (!(t.sample_rate > 0.0) || !std::isfinite(t.sample_rate)) {
    throw TraceFormatError("read_trace: invalid sample rate");
  }
  const unsigned char q = buf[16];
  if (q > 1) throw TraceFormatError("read_trace: invalid quadrature tag " + std::to_string(q));
  t.quadrature = static_cast<Quadrature>(q);
  const auto count = get_le<std::uint64_t>(buf.data() + 17);

  const std::size_t payload = buf.size() - header_size;
  if (count > payload / 8) {
    throw TraceFormatError("read_trace: truncated payload: header declares " +
                           std::to_string(count) + " samples, file holds " +
                           std::to_string(payload / 8));
  }
  if (payload != 8 * count) throw TraceFormatError("read_trace: trailing bytes after payload");
  t.samples.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    t.samples[i] = std::bit_cast<double>(get_le<std::uint64_t>(buf.data() + header_size + 8 * i));
  }
  return t;
}

}  // namespace sqzcomb
