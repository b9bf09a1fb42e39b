#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <string>
#include <variant>

#include "rotwave/errors.hpp"
#include "rotwave/expansion.hpp"
#include "rotwave/io.hpp"

namespace rotwave {

// hbar = 1 throughout; physical units ride along as metadata only.

/// E_I = omega0 * I(I+1).
struct RigidRotor {
  double omega0 = 1.0;
};

/// E_I = a*x + b*x^2 with x = I(I+1).
struct PolynomialEnergy {
  double a = 1.0;
  double b = 0.0;
  std::string unit = "internal";
};

struct TabulatedLevels {
  std::map<int, double> levels;
  std::string unit = "internal";
};

using EnergyModel = std::variant<RigidRotor, PolynomialEnergy, TabulatedLevels>;

/// Reject level sets that run backwards; a band must not relax with I.
inline void validate(const TabulatedLevels& t) {
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& [i, e] : t.levels) {
    if (i < 0) throw std::invalid_argument("TabulatedLevels: negative I");
    if (e < prev)
      throw std::invalid_argument("TabulatedLevels: levels not monotone non-decreasing at I=" +
                                  std::to_string(i));
    prev = e;
  }
}

inline double energy_at(const EnergyModel& model, int i) {
  return std::visit(
      [i](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        const double x = static_cast<double>(i) * (i + 1);
        if constexpr (std::is_same_v<T, RigidRotor>) {
          return m.omega0 * x;
        } else if constexpr (std::is_same_v<T, PolynomialEnergy>) {
          return m.a * x + m.b * x * x;
        } else {
          const auto it = m.levels.find(i);
          if (it == m.levels.end()) throw missing_level_error(i);
          return it->second;
        }
      },
      model);
}

namespace detail {

// e^{-i E t} with the phase reduced mod 2pi in extended precision, so that
// evolutions far beyond the revival period keep full accuracy.
inline std::complex<double> evolution_phase(double energy, double t) {
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  const long double ph =
      std::fmod(static_cast<long double>(energy) * static_cast<long double>(t), two_pi);
  return {static_cast<double>(std::cos(ph)), static_cast<double>(-std::sin(ph))};
}

}  // namespace detail

/// Multiply each coefficient by e^{-i E_I t}; unitary by construction.
inline SHExpansion evolve(const SHExpansion& wp, const EnergyModel& model, double t) {
  SHExpansion out = wp;
  for (auto& c : out.coeffs) c.b *= detail::evolution_phase(energy_at(model, c.i), t);
  return out;
}

struct TimeScales {
  double t_cl = 0;
  double t_rev = 0;
  double i_bar_used = 0;
};

/// T_rev = 2pi / (|E''|/2) and T_cl = 2pi / |E'| at I = Ibar.  The rigid
/// rotor reduces to T_rev = 2pi/omega0, T_cl = T_rev/(2 Ibar + 1); tabulated
/// spectra use central differences on their own I lattice with linear
/// interpolation to non-integer Ibar.
inline TimeScales time_scales(const EnergyModel& model, double ibar) {
  if (!(ibar >= 0.0)) throw std::invalid_argument("time_scales: Ibar must be non-negative");
  double d1 = 0.0, d2 = 0.0;
  if (const auto* r = std::get_if<RigidRotor>(&model)) {
    if (!(r->omega0 > 0.0)) throw std::invalid_argument("time_scales: omega0 must be positive");
    d1 = r->omega0 * (2.0 * ibar + 1.0);
    d2 = 2.0 * r->omega0;
  } else if (const auto* p = std::get_if<PolynomialEnergy>(&model)) {
    const double x = ibar * (ibar + 1.0);
    d1 = (p->a + 2.0 * p->b * x) * (2.0 * ibar + 1.0);
    d2 = 2.0 * p->a + 2.0 * p->b * (6.0 * ibar * ibar + 6.0 * ibar + 1.0);
  } else {
    const auto& tab = std::get<TabulatedLevels>(model);
    bool has_odd = false;
    for (const auto& [i, e] : tab.levels)
      if (i % 2 != 0) has_odd = true;
    const int step = has_odd ? 1 : 2;
    const auto ecs = [&](int i) { return energy_at(model, i); };
    const auto diff1 = [&](int i) { return (ecs(i + step) - ecs(i - step)) / (2.0 * step); };
    const auto diff2 = [&](int i) {
      return (ecs(i + step) - 2.0 * ecs(i) + ecs(i - step)) / (static_cast<double>(step) * step);
    };
    int i0 = static_cast<int>(std::floor(ibar / step)) * step;
    i0 = std::max(i0, step);  // need i0 - step >= 0
    const double f = (ibar - i0) / step;
    d1 = (1.0 - f) * diff1(i0) + f * diff1(i0 + step);
    d2 = (1.0 - f) * diff2(i0) + f * diff2(i0 + step);
  }
  if (std::abs(d2) < 1e-15)
    throw degenerate_spectrum_error("time_scales: |E''| below 1e-15, revival period undefined");
  TimeScales ts;
  ts.t_rev = 2.0 * kPi / (0.5 * std::abs(d2));
  ts.t_cl = std::abs(d1) > 0.0 ? 2.0 * kPi / std::abs(d1) : std::numeric_limits<double>::infinity();
  ts.i_bar_used = ibar;
  return ts;
}

struct PolynomialFit {
  PolynomialEnergy model;
  double rms = 0.0;
  int n_levels = 0;
};

/// Least squares for E = a*x + b*x^2 in x = I(I+1); long double accumulators
/// keep the normal equations exact for the level counts seen in practice.
inline PolynomialFit fit_polynomial(const std::map<int, double>& levels) {
  if (levels.size() < 3)
    throw insufficient_data_error("fit_polynomial: need at least 3 levels, got " +
                                  std::to_string(levels.size()));
  long double s22 = 0, s23 = 0, s44 = 0, s1e = 0, s2e = 0;
  for (const auto& [i, e] : levels) {
    const long double x = static_cast<long double>(i) * (i + 1);
    const long double x2 = x * x;
    s22 += x * x;
    s23 += x * x2;
    s44 += x2 * x2;
    s1e += x * e;
    s2e += x2 * e;
  }
  const long double det = s22 * s44 - s23 * s23;
  if (std::abs(det) < 1e-30)
    throw insufficient_data_error("fit_polynomial: degenerate level set");
  PolynomialFit fit;
  fit.model.a = static_cast<double>((s1e * s44 - s2e * s23) / det);
  fit.model.b = static_cast<double>((s2e * s22 - s1e * s23) / det);
  fit.n_levels = static_cast<int>(levels.size());
  long double ss = 0;
  for (const auto& [i, e] : levels) {
    const long double x = static_cast<long double>(i) * (i + 1);
    const long double r = fit.model.a * x + fit.model.b * x * x - e;
    ss += r * r;
  }
  fit.rms = static_cast<double>(std::sqrt(ss / static_cast<long double>(levels.size())));
  return fit;
}

/// Level file: '#' headers (`unit` recognised) then `I energy` lines.
inline TabulatedLevels read_levels(const std::string& path) {
  auto f = detail::open_input(path);
  TabulatedLevels tab;
  std::string line, key, value;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (detail::parse_header(line, key, value)) {
      if (key == "unit") tab.unit = value;
      continue;
    }
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 2)
      throw format_error(path + ":" + std::to_string(line_no) + ": expected 'I energy'");
    const std::string ctx = path + ":" + std::to_string(line_no);
    const int i = static_cast<int>(detail::parse_int(fields[0], ctx));
    if (i < 0) throw format_error(ctx + ": negative I");
    if (!tab.levels.emplace(i, detail::parse_double(fields[1], ctx)).second)
      throw format_error(ctx + ": duplicate level for I=" + std::to_string(i));
  }
  if (tab.levels.empty()) throw format_error(path + ": no levels");
  validate(tab);
  return tab;
}

inline void write_levels(const std::string& path, const TabulatedLevels& tab,
                         const detail::HeaderList& extra = {}) {
  auto f = detail::open_output(path);
  detail::HeaderList headers;
  headers.emplace_back("rotwave-levels", "1");
  for (const auto& kv : extra) headers.push_back(kv);
  headers.emplace_back("unit", tab.unit);
  headers.emplace_back("columns", "I energy");
  detail::write_headers(f, headers);
  for (const auto& [i, e] : tab.levels) f << i << " " << detail::format_double(e) << "\n";
  detail::finish_output(f, path);
}

}  // namespace rotwave
