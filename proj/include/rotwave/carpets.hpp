#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "rotwave/angular.hpp"
#include "rotwave/dynamics.hpp"
#include "rotwave/errors.hpp"
#include "rotwave/expansion.hpp"
#include "rotwave/io.hpp"

namespace rotwave {

/// |Psi(theta, phi)|^2 from the coefficient expansion.
inline double density(const SHExpansion& wp, double theta, double phi) {
  if (!(theta >= 0.0 && theta <= kPi))
    throw std::invalid_argument("density: theta outside [0, pi]");
  const detail::LegendreTable tab(theta, wp.i_max);
  std::complex<double> psi{};
  for (const auto& c : wp.coeffs) psi += c.b * tab(c.i, c.m) * std::polar(1.0, c.m * phi);
  return std::norm(psi);
}

namespace detail {

// Contiguous chunks over [0, n); disjoint writes keep the result independent
// of the worker count, so artifact bytes do not depend on parallelism.
inline void parallel_chunks(int n, int workers, const std::function<void(int, int)>& fn) {
  const int w = std::clamp(workers, 1, 256);
  if (w <= 1 || n < 2 * w) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + w - 1) / w;
  for (int k = 0; k < w; ++k) {
    const int b = k * chunk;
    const int e = std::min(n, b + chunk);
    if (b < e) pool.emplace_back(fn, b, e);
  }
  for (auto& t : pool) t.join();
}

// Spectrally exact sphere quadrature of |Psi|^2: Gauss-Legendre in
// cos(theta) (the integrand is a polynomial there) and uniform trapezoid in
// phi (a trigonometric polynomial).
inline double sphere_norm_quadrature(const SHExpansion& wp) {
  const int nth = wp.i_max + 1;
  int mspan = 1;
  for (const auto& c : wp.coeffs) mspan = std::max(mspan, std::abs(c.m));
  const int nphi = 2 * mspan + 2;
  const auto gl = gauss_legendre(nth);
  long double total = 0.0L;
  for (int j = 0; j < nth; ++j) {
    const double theta = std::acos(gl.x[static_cast<std::size_t>(j)]);
    const LegendreTable tab(theta, wp.i_max);
    long double ring = 0.0L;
    for (int k = 0; k < nphi; ++k) {
      const double phi = 2.0 * kPi * k / nphi;
      std::complex<double> psi{};
      for (const auto& c : wp.coeffs) psi += c.b * tab(c.i, c.m) * std::polar(1.0, c.m * phi);
      ring += std::norm(psi);
    }
    total += gl.w[static_cast<std::size_t>(j)] * ring * (2.0 * kPi / nphi);
  }
  return static_cast<double>(total);
}

}  // namespace detail

enum class CarpetKind { EquatorialCut, RingProfile };

inline const char* carpet_kind_name(CarpetKind k) {
  return k == CarpetKind::EquatorialCut ? "equatorial-cut" : "ring-profile";
}

struct CarpetSpec {
  CarpetKind kind = CarpetKind::EquatorialCut;
  int angle_samples = 256;
  int t_samples = 128;
  double t_begin = 0.0;  // units of T_rev
  double t_end = 0.5;
  int workers = 1;
};

/// Probability density sampled over (angle, time).  Rows are angle samples,
/// columns time samples.  Equatorial cuts hold |Psi(pi/2, phi; t)|^2 on the
/// periodic phi grid; ring profiles hold 2 pi sin(theta) |Psi(theta; t)|^2 on
/// the inclusive theta grid and exist only for axially symmetric states.
struct CarpetGrid {
  CarpetKind kind = CarpetKind::EquatorialCut;
  int angle_samples = 0;
  int t_samples = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  double t_rev = 0.0;  // absolute revival period of the model used
  double angle_period = 2.0 * kPi;
  bool even_m_only = false;
  std::vector<double> values;  // row-major [angle][time]
  std::vector<std::pair<std::string, std::string>> meta;

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * t_samples + col];
  }
  std::vector<double> column(int col) const {
    std::vector<double> out(static_cast<std::size_t>(angle_samples));
    for (int r = 0; r < angle_samples; ++r) out[static_cast<std::size_t>(r)] = at(r, col);
    return out;
  }
  double angle(int row) const {
    if (kind == CarpetKind::EquatorialCut) return 2.0 * kPi * row / angle_samples;
    return kPi * row / (angle_samples - 1);
  }
  double time_frac(int col) const {
    return t_begin + (t_end - t_begin) * col / (t_samples - 1);
  }
};

inline CarpetGrid carpet(const SHExpansion& wp, const EnergyModel& model, const CarpetSpec& spec) {
  if (spec.angle_samples < 16 || spec.t_samples < 16)
    throw std::invalid_argument("carpet: grid resolution must be at least 16x16");
  if (spec.kind == CarpetKind::RingProfile && !is_axially_symmetric(wp))
    throw symmetry_violation_error(
        "carpet: ring profile requires an axially symmetric state (M = 0 only)");
  if (!(spec.t_end > spec.t_begin))
    throw std::invalid_argument("carpet: empty time range");

  const TimeScales ts = time_scales(model, i_bar(wp));
  CarpetGrid g;
  g.kind = spec.kind;
  g.angle_samples = spec.angle_samples;
  g.t_samples = spec.t_samples;
  g.t_begin = spec.t_begin;
  g.t_end = spec.t_end;
  g.t_rev = ts.t_rev;
  g.even_m_only = has_only_even_m(wp);
  g.values.assign(static_cast<std::size_t>(spec.angle_samples) * spec.t_samples, 0.0);

  const int nc = static_cast<int>(wp.coeffs.size());
  std::vector<double> energies(static_cast<std::size_t>(nc));
  for (int c = 0; c < nc; ++c) energies[static_cast<std::size_t>(c)] = energy_at(model, wp.coeffs[static_cast<std::size_t>(c)].i);

  if (spec.kind == CarpetKind::EquatorialCut) {
    g.angle_period = 2.0 * kPi;
    // One theta row: Legendre values and the phi phase table are shared by
    // every time column -- the dominant cost saving on large grids.
    const detail::LegendreTable tab(0.5 * kPi, wp.i_max);
    std::vector<double> y_eq(static_cast<std::size_t>(nc));
    int m_lo = 0, m_hi = 0;
    for (int c = 0; c < nc; ++c) {
      y_eq[static_cast<std::size_t>(c)] = tab(wp.coeffs[static_cast<std::size_t>(c)].i, wp.coeffs[static_cast<std::size_t>(c)].m);
      m_lo = std::min(m_lo, wp.coeffs[static_cast<std::size_t>(c)].m);
      m_hi = std::max(m_hi, wp.coeffs[static_cast<std::size_t>(c)].m);
    }
    const int nm = m_hi - m_lo + 1;
    std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(nm) * spec.angle_samples);
    for (int mi = 0; mi < nm; ++mi)
      for (int j = 0; j < spec.angle_samples; ++j)
        twiddle[static_cast<std::size_t>(mi) * spec.angle_samples + j] =
            std::polar(1.0, (m_lo + mi) * (2.0 * kPi * j / spec.angle_samples));

    detail::parallel_chunks(spec.t_samples, spec.workers, [&](int k0, int k1) {
      std::vector<std::complex<double>> cm(static_cast<std::size_t>(nm));
      for (int k = k0; k < k1; ++k) {
        const double t = (g.t_begin + (g.t_end - g.t_begin) * k / (spec.t_samples - 1)) * ts.t_rev;
        std::fill(cm.begin(), cm.end(), std::complex<double>{});
        for (int c = 0; c < nc; ++c) {
          const auto& cf = wp.coeffs[static_cast<std::size_t>(c)];
          cm[static_cast<std::size_t>(cf.m - m_lo)] +=
              cf.b * detail::evolution_phase(energies[static_cast<std::size_t>(c)], t) *
              y_eq[static_cast<std::size_t>(c)];
        }
        for (int j = 0; j < spec.angle_samples; ++j) {
          std::complex<double> psi{};
          for (int mi = 0; mi < nm; ++mi)
            psi += cm[static_cast<std::size_t>(mi)] *
                   twiddle[static_cast<std::size_t>(mi) * spec.angle_samples + j];
          g.values[static_cast<std::size_t>(j) * spec.t_samples + k] = std::norm(psi);
        }
      }
    });
  } else {
    g.angle_period = kPi;
    // P_I0 table per theta row, reused across columns.
    const int ni = wp.i_max + 1;
    std::vector<double> ptab(static_cast<std::size_t>(spec.angle_samples) * ni);
    std::vector<double> sines(static_cast<std::size_t>(spec.angle_samples));
    for (int j = 0; j < spec.angle_samples; ++j) {
      const double theta = kPi * j / (spec.angle_samples - 1);
      sines[static_cast<std::size_t>(j)] = std::sin(theta);
      const detail::LegendreTable tab(theta, wp.i_max);
      for (int i = 0; i < ni; ++i)
        ptab[static_cast<std::size_t>(j) * ni + i] = tab(i, 0);
    }
    detail::parallel_chunks(spec.t_samples, spec.workers, [&](int k0, int k1) {
      std::vector<std::complex<double>> u(static_cast<std::size_t>(nc));
      for (int k = k0; k < k1; ++k) {
        const double t = (g.t_begin + (g.t_end - g.t_begin) * k / (spec.t_samples - 1)) * ts.t_rev;
        for (int c = 0; c < nc; ++c)
          u[static_cast<std::size_t>(c)] =
              wp.coeffs[static_cast<std::size_t>(c)].b *
              detail::evolution_phase(energies[static_cast<std::size_t>(c)], t);
        for (int j = 0; j < spec.angle_samples; ++j) {
          std::complex<double> psi{};
          for (int c = 0; c < nc; ++c)
            psi += u[static_cast<std::size_t>(c)] *
                   ptab[static_cast<std::size_t>(j) * ni + wp.coeffs[static_cast<std::size_t>(c)].i];
          g.values[static_cast<std::size_t>(j) * spec.t_samples + k] =
              2.0 * kPi * sines[static_cast<std::size_t>(j)] * std::norm(psi);
        }
      }
    });
  }

  g.meta.emplace_back("kind", carpet_kind_name(spec.kind));
  g.meta.emplace_back("angle", spec.kind == CarpetKind::EquatorialCut ? "phi" : "theta");
  g.meta.emplace_back("angle-samples", std::to_string(spec.angle_samples));
  g.meta.emplace_back("t-samples", std::to_string(spec.t_samples));
  g.meta.emplace_back("t-min", detail::format_double(spec.t_begin));
  g.meta.emplace_back("t-max", detail::format_double(spec.t_end));
  g.meta.emplace_back("t-unit", "t_rev");
  g.meta.emplace_back("t-rev", detail::format_double(ts.t_rev));
  g.meta.emplace_back("i-bar", detail::format_double(ts.i_bar_used));
  g.meta.emplace_back("even-m-only", g.even_m_only ? "1" : "0");
  return g;
}

struct SnapshotSpec {
  int theta_samples = 181;
  int phi_samples = 360;
  double t = 0.0;  // units of T_rev
  double phi_offset = 0.0;
  int workers = 1;
};

/// Full |Psi(theta, phi)|^2 mesh at one time.  quad_norm holds an exact
/// sphere quadrature of the density, independent of the display mesh.
struct SnapshotGrid {
  int theta_samples = 0;
  int phi_samples = 0;
  double t = 0.0;
  double phi_offset = 0.0;
  double quad_norm = 0.0;
  std::vector<double> values;  // row-major [theta][phi]
  std::vector<std::pair<std::string, std::string>> meta;

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * phi_samples + col];
  }
};

inline SnapshotGrid snapshot(const SHExpansion& wp, const EnergyModel& model,
                             const SnapshotSpec& spec) {
  if (spec.theta_samples < 16 || spec.phi_samples < 16)
    throw std::invalid_argument("snapshot: mesh must be at least 16x16");
  const TimeScales ts = time_scales(model, i_bar(wp));
  const SHExpansion st = evolve(wp, model, spec.t * ts.t_rev);

  SnapshotGrid g;
  g.theta_samples = spec.theta_samples;
  g.phi_samples = spec.phi_samples;
  g.t = spec.t;
  g.phi_offset = spec.phi_offset;
  g.values.assign(static_cast<std::size_t>(spec.theta_samples) * spec.phi_samples, 0.0);

  const int nc = static_cast<int>(st.coeffs.size());
  int m_lo = 0, m_hi = 0;
  for (const auto& c : st.coeffs) {
    m_lo = std::min(m_lo, c.m);
    m_hi = std::max(m_hi, c.m);
  }
  const int nm = m_hi - m_lo + 1;
  std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(nm) * spec.phi_samples);
  for (int mi = 0; mi < nm; ++mi)
    for (int k = 0; k < spec.phi_samples; ++k)
      twiddle[static_cast<std::size_t>(mi) * spec.phi_samples + k] =
          std::polar(1.0, (m_lo + mi) * (spec.phi_offset + 2.0 * kPi * k / spec.phi_samples));

  detail::parallel_chunks(spec.theta_samples, spec.workers, [&](int j0, int j1) {
    std::vector<std::complex<double>> cm(static_cast<std::size_t>(nm));
    for (int j = j0; j < j1; ++j) {
      const double theta = kPi * j / (spec.theta_samples - 1);
      const detail::LegendreTable tab(theta, st.i_max);
      std::fill(cm.begin(), cm.end(), std::complex<double>{});
      for (int c = 0; c < nc; ++c) {
        const auto& cf = st.coeffs[static_cast<std::size_t>(c)];
        cm[static_cast<std::size_t>(cf.m - m_lo)] += cf.b * tab(cf.i, cf.m);
      }
      for (int k = 0; k < spec.phi_samples; ++k) {
        std::complex<double> psi{};
        for (int mi = 0; mi < nm; ++mi)
          psi += cm[static_cast<std::size_t>(mi)] *
                 twiddle[static_cast<std::size_t>(mi) * spec.phi_samples + k];
        g.values[static_cast<std::size_t>(j) * spec.phi_samples + k] = std::norm(psi);
      }
    }
  });

  g.quad_norm = detail::sphere_norm_quadrature(st);
  g.meta.emplace_back("kind", "snapshot");
  g.meta.emplace_back("theta-samples", std::to_string(spec.theta_samples));
  g.meta.emplace_back("phi-samples", std::to_string(spec.phi_samples));
  g.meta.emplace_back("t", detail::format_double(spec.t));
  g.meta.emplace_back("t-unit", "t_rev");
  g.meta.emplace_back("phi-offset", detail::format_double(spec.phi_offset));
  g.meta.emplace_back("quad-norm", detail::format_double(g.quad_norm));
  return g;
}

/// Count local maxima at or above half the column peak.  For states with
/// only even M the density repeats under phi -> phi + pi, and a fractional
/// wave is the antipodal lobe pair, so the count then runs over half the
/// periodic grid.
inline int count_dominant_maxima(const std::vector<double>& column, bool half_period) {
  const int n = static_cast<int>(column.size());
  if (n < 3) return 0;
  const int lim = (half_period && n % 2 == 0) ? n / 2 : n;
  double vmax = 0.0;
  for (int j = 0; j < lim; ++j) vmax = std::max(vmax, column[static_cast<std::size_t>(j)]);
  if (!(vmax > 0.0)) return 0;
  const double threshold = 0.5 * vmax;
  int count = 0;
  for (int j = 0; j < lim; ++j) {
    const double c0 = column[static_cast<std::size_t>(j)];
    const double cm1 = column[static_cast<std::size_t>((j + lim - 1) % lim)];
    const double cp1 = column[static_cast<std::size_t>((j + 1) % lim)];
    if (c0 > cm1 && c0 >= cp1 && c0 >= threshold) ++count;
  }
  return count;
}

enum class ArtifactFormat { Csv, Pgm, Ppm };

struct EmitOptions {
  bool log_scale = false;
  int log_decades = 6;
  std::vector<std::pair<std::string, std::string>> extra_headers;
};

namespace detail {

inline void check_finite(const std::vector<double>& values) {
  for (const double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("emit: non-finite grid value");
}

inline void write_matrix_csv(const std::string& path, const HeaderList& headers,
                             const std::vector<double>& values, int rows, int cols) {
  auto f = open_output(path);
  write_headers(f, headers);
  std::string line;
  for (int r = 0; r < rows; ++r) {
    line.clear();
    for (int c = 0; c < cols; ++c) {
      if (c) line += ',';
      line += format_double(values[static_cast<std::size_t>(r) * cols + c]);
    }
    line += '\n';
    f << line;
  }
  finish_output(f, path);
}

inline std::uint8_t scale_intensity(double v, double vmax, const EmitOptions& opt) {
  if (!(vmax > 0.0)) return 0;
  double s;
  if (opt.log_scale) {
    const double floor_ratio = std::pow(10.0, -opt.log_decades);
    const double r = std::max(v / vmax, floor_ratio);
    s = 1.0 + std::log10(r) / opt.log_decades;
  } else {
    s = v / vmax;
  }
  const long p = std::lround(std::clamp(s, 0.0, 1.0) * 255.0);
  return static_cast<std::uint8_t>(p);
}

// Fixed thermal ramp for the colour variant; anchors interpolated linearly.
inline void ramp_rgb(std::uint8_t level, std::uint8_t rgb[3]) {
  static constexpr std::uint8_t anchors[6][3] = {
      {0, 0, 0}, {32, 12, 96}, {120, 28, 109}, {208, 78, 60}, {246, 170, 28}, {252, 254, 164}};
  const double pos = level / 255.0 * 5.0;
  const int seg = std::min(4, static_cast<int>(pos));
  const double f = pos - seg;
  for (int k = 0; k < 3; ++k)
    rgb[k] = static_cast<std::uint8_t>(
        std::lround((1.0 - f) * anchors[seg][k] + f * anchors[seg + 1][k]));
}

inline void write_pixmap(const std::string& path, const HeaderList& headers,
                         const std::vector<double>& values, int rows, int cols, bool color,
                         const EmitOptions& opt) {
  double vmax = 0.0;
  for (const double v : values) vmax = std::max(vmax, v);
  auto f = open_output(path);
  f << (color ? "P6\n" : "P5\n");
  write_headers(f, headers);
  f << cols << " " << rows << "\n255\n";
  std::vector<char> line(static_cast<std::size_t>(cols) * (color ? 3 : 1));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::uint8_t level =
          scale_intensity(values[static_cast<std::size_t>(r) * cols + c], vmax, opt);
      if (color) {
        std::uint8_t rgb[3];
        ramp_rgb(level, rgb);
        for (int k = 0; k < 3; ++k) line[static_cast<std::size_t>(c) * 3 + k] = static_cast<char>(rgb[k]);
      } else {
        line[static_cast<std::size_t>(c)] = static_cast<char>(level);
      }
    }
    f.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  finish_output(f, path);
}

inline HeaderList artifact_headers(const std::vector<std::pair<std::string, std::string>>& meta,
                                   const EmitOptions& opt) {
  HeaderList headers;
  headers.emplace_back("carpet-format", "1");
  for (const auto& kv : opt.extra_headers) headers.push_back(kv);
  for (const auto& kv : meta) headers.push_back(kv);
  headers.emplace_back("scale", opt.log_scale ? "log" : "linear");
  return headers;
}

}  // namespace detail

inline void emit(const CarpetGrid& g, ArtifactFormat format, const std::string& path,
                 const EmitOptions& opt = {}) {
  detail::check_finite(g.values);
  const auto headers = detail::artifact_headers(g.meta, opt);
  switch (format) {
    case ArtifactFormat::Csv:
      detail::write_matrix_csv(path, headers, g.values, g.angle_samples, g.t_samples);
      break;
    case ArtifactFormat::Pgm:
      detail::write_pixmap(path, headers, g.values, g.angle_samples, g.t_samples, false, opt);
      break;
    case ArtifactFormat::Ppm:
      detail::write_pixmap(path, headers, g.values, g.angle_samples, g.t_samples, true, opt);
      break;
  }
}

inline void emit(const SnapshotGrid& g, ArtifactFormat format, const std::string& path,
                 const EmitOptions& opt = {}) {
  detail::check_finite(g.values);
  const auto headers = detail::artifact_headers(g.meta, opt);
  switch (format) {
    case ArtifactFormat::Csv:
      detail::write_matrix_csv(path, headers, g.values, g.theta_samples, g.phi_samples);
      break;
    case ArtifactFormat::Pgm:
      detail::write_pixmap(path, headers, g.values, g.theta_samples, g.phi_samples, false, opt);
      break;
    case ArtifactFormat::Ppm:
      detail::write_pixmap(path, headers, g.values, g.theta_samples, g.phi_samples, true, opt);
      break;
  }
}

}  // namespace rotwave
