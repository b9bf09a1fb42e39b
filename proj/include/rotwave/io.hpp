#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "rotwave/errors.hpp"
#include "rotwave/expansion.hpp"

namespace rotwave {
namespace detail {

/// Shortest round-trip decimal form; locale-independent.
inline std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw format_error(context + ": bad number '" + std::string(s) + "'");
  return v;
}

inline long parse_int(std::string_view s, const std::string& context) {
  long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw format_error(context + ": bad integer '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t p = 0;
  while (p < line.size()) {
    while (p < line.size() && (line[p] == ' ' || line[p] == '\t' || line[p] == '\r')) ++p;
    std::size_t q = p;
    while (q < line.size() && line[q] != ' ' && line[q] != '\t' && line[q] != '\r') ++q;
    if (q > p) out.push_back(line.substr(p, q - p));
    p = q;
  }
  return out;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k) {
    s[static_cast<std::size_t>(k)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open for writing: " + path);
  return f;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open for reading: " + path);
  return f;
}

inline void finish_output(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f.good()) throw io_error("write failed: " + path);
}

using HeaderList = std::vector<std::pair<std::string, std::string>>;

inline void write_headers(std::ostream& os, const HeaderList& kv) {
  for (const auto& [k, v] : kv) os << "# " << k << ": " << v << "\n";
}

/// Parse a "# key: value" comment line; returns false for non-header lines.
inline bool parse_header(std::string_view line, std::string& key, std::string& value) {
  if (line.empty() || line[0] != '#') return false;
  std::size_t p = 1;
  while (p < line.size() && line[p] == ' ') ++p;
  const std::size_t colon = line.find(':', p);
  if (colon == std::string_view::npos) {
    key.assign(line.substr(p));
    value.clear();
    return true;
  }
  key.assign(line.substr(p, colon - p));
  std::size_t v = colon + 1;
  while (v < line.size() && line[v] == ' ') ++v;
  std::size_t e = line.size();
  while (e > v && (line[e - 1] == '\r' || line[e - 1] == ' ')) --e;
  value.assign(line.substr(v, e - v));
  return true;
}

}  // namespace detail

/// Shared coefficient file format: '#' headers (n, eta, symmetry, frame,
/// provenance) followed by one `I M re(b) im(b)` record per line.
inline void write_coefficients(const std::string& path, const SHExpansion& wp,
                               const detail::HeaderList& extra = {}) {
  auto f = detail::open_output(path);
  detail::HeaderList headers;
  headers.emplace_back("rotwave-coefficients", "1");
  for (const auto& kv : extra) headers.push_back(kv);
  for (const auto& kv : wp.meta) headers.push_back(kv);
  headers.emplace_back("frame", frame_name(wp.frame));
  headers.emplace_back("i-max", std::to_string(wp.i_max));
  headers.emplace_back("columns", "I M re(b) im(b)");
  detail::write_headers(f, headers);
  for (const auto& c : wp.coeffs)
    f << c.i << " " << c.m << " " << detail::format_double(c.b.real()) << " "
      << detail::format_double(c.b.imag()) << "\n";
  detail::finish_output(f, path);
}

inline SHExpansion read_coefficients(const std::string& path) {
  auto f = detail::open_input(path);
  SHExpansion wp;
  std::string line, key, value;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (detail::parse_header(line, key, value)) {
      if (key == "frame") {
        if (value == "symmetry-axis-z")
          wp.frame = Frame::SymmetryAxisIsZ;
        else if (value == "symmetry-axis-x")
          wp.frame = Frame::SymmetryAxisIsX;
        else
          throw format_error(path + ": unknown frame '" + value + "'");
      } else if (key == "n" || key == "eta" || key == "symmetry" || key == "source-note") {
        set_meta(wp, key, value);
      }
      continue;
    }
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 4)
      throw format_error(path + ":" + std::to_string(line_no) + ": expected 'I M re im'");
    const std::string ctx = path + ":" + std::to_string(line_no);
    const int i = static_cast<int>(detail::parse_int(fields[0], ctx));
    const int m = static_cast<int>(detail::parse_int(fields[1], ctx));
    if (i < 0 || std::abs(m) > i) throw format_error(ctx + ": |M| <= I violated");
    const double re = detail::parse_double(fields[2], ctx);
    const double im = detail::parse_double(fields[3], ctx);
    wp.coeffs.push_back({i, m, {re, im}});
  }
  if (wp.coeffs.empty()) throw format_error(path + ": no coefficient records");
  sort_coefficients(wp);
  for (std::size_t k = 1; k < wp.coeffs.size(); ++k)
    if (wp.coeffs[k].i == wp.coeffs[k - 1].i && wp.coeffs[k].m == wp.coeffs[k - 1].m)
      throw format_error(path + ": duplicate (I, M) record");
  const double n = norm(wp);
  if (std::abs(n - 1.0) > 1e-3)
    throw format_error(path + ": coefficients are not unit norm (|b| = " +
                       detail::format_double(n) + ")");
  // renormalise only on real drift, so freshly written files round-trip bit-exactly
  if (std::abs(n - 1.0) > 1e-12) normalize(wp);
  apply_storage_floor(wp);
  return wp;
}

}  // namespace rotwave
