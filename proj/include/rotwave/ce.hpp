#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rotwave/carpets.hpp"
#include "rotwave/dynamics.hpp"
#include "rotwave/errors.hpp"
#include "rotwave/expansion.hpp"
#include "rotwave/io.hpp"

namespace rotwave {

/// Excitation amplitudes of the ground-band states populated by a
/// backscattering collision: M is implicitly 0 and only even I appear.
struct CEAmplitude {
  int i;
  std::complex<double> amp;
};

struct CEAmplitudeSet {
  std::vector<CEAmplitude> entries;
  std::string source_note;  // projectile/energy free text, e.g. "40Ar 170 MeV"
};

/// Amplitude file: '#' headers (`source-note` recognised) then
/// `I re(amp) im(amp)` lines.
inline CEAmplitudeSet read_amplitudes(const std::string& path) {
  auto f = detail::open_input(path);
  CEAmplitudeSet set;
  std::string line, key, value;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (detail::parse_header(line, key, value)) {
      if (key == "source-note") set.source_note = value;
      continue;
    }
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    const std::string ctx = path + ":" + std::to_string(line_no);
    if (fields.size() != 3) throw format_error(ctx + ": expected 'I re(amp) im(amp)'");
    const int i = static_cast<int>(detail::parse_int(fields[0], ctx));
    const double re = detail::parse_double(fields[1], ctx);
    const double im = detail::parse_double(fields[2], ctx);
    set.entries.push_back({i, {re, im}});
  }
  return set;
}

inline void write_amplitudes(const std::string& path, const CEAmplitudeSet& set,
                             const detail::HeaderList& extra = {}) {
  auto f = detail::open_output(path);
  detail::HeaderList headers;
  headers.emplace_back("rotwave-amplitudes", "1");
  for (const auto& kv : extra) headers.push_back(kv);
  if (!set.source_note.empty()) headers.emplace_back("source-note", set.source_note);
  headers.emplace_back("columns", "I re(amp) im(amp)");
  detail::write_headers(f, headers);
  for (const auto& e : set.entries)
    f << e.i << " " << detail::format_double(e.amp.real()) << " "
      << detail::format_double(e.amp.imag()) << "\n";
  detail::finish_output(f, path);
}

/// Build the unit-norm M = 0 expansion from an amplitude set.  Odd-I
/// entries are a format violation, an all-zero set an empty packet.
inline SHExpansion expansion_from_amplitudes(const CEAmplitudeSet& set) {
  SHExpansion wp;
  wp.frame = Frame::SymmetryAxisIsZ;
  for (const auto& e : set.entries) {
    if (e.i < 0 || e.i % 2 != 0)
      throw format_error("amplitude set: I=" + std::to_string(e.i) +
                         " (entries must carry even non-negative I)");
    if (std::abs(e.amp) == 0.0) continue;
    wp.coeffs.push_back({e.i, 0, e.amp});
  }
  if (wp.coeffs.empty()) throw empty_packet_error("amplitude set carries no weight");
  sort_coefficients(wp);
  for (std::size_t k = 1; k < wp.coeffs.size(); ++k)
    if (wp.coeffs[k].i == wp.coeffs[k - 1].i)
      throw format_error("amplitude set: duplicate entry for I=" + std::to_string(wp.coeffs[k].i));
  normalize(wp);
  apply_storage_floor(wp);
  set_meta(wp, "symmetry", "linear");
  if (!set.source_note.empty()) set_meta(wp, "source-note", set.source_note);
  return wp;
}

inline SHExpansion ingest(const std::string& path) {
  return expansion_from_amplitudes(read_amplitudes(path));
}

/// Gaussian profile over the even-I lattice, standing in for externally
/// computed excitation amplitude sets.  Real and positive by construction;
/// optional seeded noise stays clamped at zero.  Outputs are tagged
/// synthetic wherever they land.
inline CEAmplitudeSet synthetic_amplitudes(double center, double width, int i_cap = 0,
                                           double noise_sigma = 0.0, std::uint64_t seed = 0) {
  if (!(center >= 0.0)) throw std::invalid_argument("synthetic_amplitudes: center must be >= 0");
  if (!(width > 0.0)) throw std::invalid_argument("synthetic_amplitudes: width must be positive");
  if (noise_sigma < 0.0) throw std::invalid_argument("synthetic_amplitudes: negative noise");
  int cap = i_cap > 0 ? i_cap : static_cast<int>(std::ceil(center + 8.0 * width));
  if (cap % 2 != 0) ++cap;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CEAmplitudeSet set;
  for (int i = 0; i <= cap; i += 2) {
    double a = std::exp(-(i - center) * (i - center) / (4.0 * width * width));
    if (noise_sigma > 0.0) a = std::max(0.0, a + noise_sigma * gauss(rng));
    set.entries.push_back({i, {a, 0.0}});
  }
  set.source_note = "synthetic gaussian center=" + detail::format_double(center) +
                    " width=" + detail::format_double(width);
  return set;
}

/// Ibar from the ingested coefficients, Ibar(Ibar+1) = <L^2>.
inline double ibar_from_coefficients(const SHExpansion& wp) { return i_bar(wp); }

struct ReplaySpec {
  int angle_samples = 257;
  int t_samples = 129;
  double t_begin = 0.0;  // units of each model's own T_rev
  double t_end = 1.0;
  int workers = 1;
};

struct ReplayResult {
  CarpetGrid ideal;
  CarpetGrid realistic;
  TimeScales ideal_scales;
  TimeScales realistic_scales;
  double i_bar_used = 0.0;
};

/// Side-by-side ring-profile carpets: the packet under a perfect I(I+1)
/// spectrum and under the supplied realistic model, each over its own
/// estimated revival period.
inline ReplayResult replay(const SHExpansion& wp, const RigidRotor& ideal,
                           const EnergyModel& realistic, const ReplaySpec& spec) {
  CarpetSpec cs;
  cs.kind = CarpetKind::RingProfile;
  cs.angle_samples = spec.angle_samples;
  cs.t_samples = spec.t_samples;
  cs.t_begin = spec.t_begin;
  cs.t_end = spec.t_end;
  cs.workers = spec.workers;

  ReplayResult r;
  r.i_bar_used = i_bar(wp);
  r.ideal_scales = time_scales(EnergyModel{ideal}, r.i_bar_used);
  r.realistic_scales = time_scales(realistic, r.i_bar_used);
  r.ideal = carpet(wp, EnergyModel{ideal}, cs);
  r.realistic = carpet(wp, realistic, cs);
  r.ideal.meta.emplace_back("replay-role", "ideal");
  r.realistic.meta.emplace_back("replay-role", "realistic");
  return r;
}

}  // namespace rotwave
