#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <vector>

#include "rotwave/dynamics.hpp"
#include "rotwave/errors.hpp"
#include "rotwave/expansion.hpp"
#include "rotwave/io.hpp"

namespace rotwave {

/// Reduced fraction m/n of the revival period.
struct RationalTime {
  int m = 1;
  int n = 1;

  RationalTime(int m_, int n_) {
    if (m_ <= 0 || n_ <= 0) throw std::invalid_argument("RationalTime: m, n must be positive");
    const int g = std::gcd(m_, n_);
    m = m_ / g;
    n = n_ / g;
  }

  double fraction() const { return static_cast<double>(m) / n; }
};

enum class Parity { AllI, EvenIOnly };

inline const char* parity_name(Parity p) { return p == Parity::AllI ? "all" : "even"; }

struct ScheduleTerm {
  int s;
  std::complex<double> a;
};

/// Finite expansion of the quadratic Gauss phase at t = (m/n) T_rev: the
/// state splits into q fractional waves, each a plain rotation-like phase
/// e^{-2 pi i I (m/n + s/l)} applied to the initial coefficients.
struct RevivalSchedule {
  int l = 1;  // phase-grid size: effective times are (m/n + s/l) T_rev
  int q = 1;  // number of non-zero amplitudes
  Parity parity = Parity::AllI;
  std::vector<ScheduleTerm> amps;  // the q non-zero terms, |a_s| = 1/sqrt(q)
};

/// Closed-form wave count from the parity case analysis; the numerically
/// computed schedule is checked against this prediction in the tests.
inline int predicted_wave_count(int n, Parity parity) {
  if (parity == Parity::EvenIOnly) n /= std::gcd(n, 4);
  return (n % 2 != 0) ? n : n / 2;
}

namespace detail {

struct ReducedGaussSum {
  int m_eff;
  int n_eff;
  int l_dft;     // period of the reduced quadratic phase
  int l_report;  // grid size in the original I variable
};

// Restricting the quadratic phase to even I is the same problem at the
// effective ratio 4m/n reduced to lowest terms, on a grid twice as fine in
// the original variable.
inline ReducedGaussSum reduce_gauss_sum(int m, int n, Parity parity) {
  int m_eff = m;
  int n_eff = n;
  int scale = 1;
  if (parity == Parity::EvenIOnly) {
    const int g = std::gcd(n, 4);
    n_eff = n / g;
    m_eff = static_cast<int>((4LL / g * m) % n_eff);
    scale = 2;
  }
  const int l = (n_eff % 4 == 0) ? n_eff / 2 : n_eff;
  return {m_eff, n_eff, l, scale * l};
}

}  // namespace detail

/// Amplitudes a_s by inverse DFT of e^{-2 pi i j^2 m/n} over one period.
/// Phases are reduced with exact integer arithmetic, so the computed moduli
/// are 1/sqrt(q) to rounding.
inline RevivalSchedule schedule(const RationalTime& rt, Parity parity) {
  const auto red = detail::reduce_gauss_sum(rt.m, rt.n, parity);
  const int l = red.l_dft;
  RevivalSchedule sch;
  sch.parity = parity;
  sch.l = red.l_report;
  const long long den = static_cast<long long>(red.n_eff) * l;
  for (int s = 0; s < l; ++s) {
    std::complex<double> acc{};
    for (int j = 0; j < l; ++j) {
      // -j^2 m_eff/n_eff + j s/l, as an exact residue over the common denominator
      long long num = -static_cast<long long>(j) * j * red.m_eff * l +
                      static_cast<long long>(j) * s * red.n_eff;
      num %= den;
      if (num < 0) num += den;
      acc += std::polar(1.0, 2.0 * kPi * static_cast<double>(num) / static_cast<double>(den));
    }
    acc /= static_cast<double>(l);
    if (std::abs(acc) > 1e-8) sch.amps.push_back({s, acc});
  }
  sch.q = static_cast<int>(sch.amps.size());
  return sch;
}

struct FractionalWave {
  int s;
  std::complex<double> amplitude;
  SHExpansion state;  // effective time t_s = (m/n + s/l) T_rev
};

/// Split Psi(mT_rev/n) into its fractional waves.  Exact only under the
/// rigid rotor, so any other model is refused.  The parity of the input
/// decides which schedule applies; the amplitude-weighted sum of the
/// returned states reconstructs the directly evolved packet.
inline std::vector<FractionalWave> fractional_waves(const SHExpansion& wp, const RationalTime& rt,
                                                    const EnergyModel& model) {
  if (!std::holds_alternative<RigidRotor>(model))
    throw unsupported_model_error("fractional_waves: decomposition requires a rigid-rotor model");
  const Parity parity = has_only_even_i(wp) ? Parity::EvenIOnly : Parity::AllI;
  const auto sch = schedule(rt, parity);
  std::vector<FractionalWave> waves;
  waves.reserve(sch.amps.size());
  const long long den = static_cast<long long>(rt.n) * sch.l;
  for (const auto& term : sch.amps) {
    SHExpansion st = wp;
    for (auto& c : st.coeffs) {
      long long num = static_cast<long long>(c.i) *
                      (static_cast<long long>(rt.m) * sch.l + static_cast<long long>(term.s) * rt.n);
      num %= den;
      c.b *= std::polar(1.0, -2.0 * kPi * static_cast<double>(num) / static_cast<double>(den));
    }
    waves.push_back({term.s, term.a, std::move(st)});
  }
  return waves;
}

struct ClonePeak {
  double phi;
  double overlap;  // C(phi) = |<R_z(phi) Psi(0) | Psi(t)>|^2
};

enum class CloneClass { Clones, Mutants, Mixed };

inline const char* clone_class_name(CloneClass c) {
  switch (c) {
    case CloneClass::Clones: return "clones";
    case CloneClass::Mutants: return "mutants";
    default: return "mixed";
  }
}

struct CloneReport {
  std::vector<ClonePeak> peaks;  // sorted by overlap, descending
  CloneClass classification = CloneClass::Mutants;
  int q_observed = 0;
  double total_overlap = 0.0;
  double period = 2.0 * kPi;  // pi when both states carry only even M
};

/// Scan C(phi0) = |<R_z(phi0) Psi(0)|Psi(t)>|^2 on a 2048-point grid with
/// parabolic sub-sample refinement; peaks above half the global maximum are
/// reported.  A state is called a set of clones when the rotated copies of
/// the initial packet account for the evolved state to within 1e-3 in norm
/// and each peak carries its equal 1/q share; rotated-copy overlap clearly
/// below that marks mutants.  States with only even M repeat under a pi
/// rotation, so the scan then runs over [0, pi).
inline CloneReport clone_scan(const SHExpansion& wp0, const SHExpansion& wpt) {
  if (wp0.i_max != wpt.i_max)
    throw invalid_pair_error("clone_scan: expansions use different truncation");
  if (wp0.frame != wpt.frame)
    throw invalid_pair_error("clone_scan: expansions use different frames");

  std::map<int, std::complex<double>> g;  // G_M = sum_I conj(b0) bt
  for (const auto& c : wpt.coeffs)
    if (const auto* b0 = wp0.find(c.i, c.m)) g[c.m] += std::conj(*b0) * c.b;

  CloneReport rep;
  rep.period = (has_only_even_m(wp0) && has_only_even_m(wpt)) ? kPi : 2.0 * kPi;
  constexpr int ns = 2048;
  std::vector<double> cv(ns);
  for (int j = 0; j < ns; ++j) {
    const double phi = rep.period * j / ns;
    std::complex<double> a{};
    for (const auto& [m, gm] : g) a += gm * std::polar(1.0, -m * phi);
    cv[static_cast<std::size_t>(j)] = std::norm(a);
  }
  const double cmax = *std::max_element(cv.begin(), cv.end());
  if (cmax > 0.0) {
    const double threshold = 0.5 * cmax;
    for (int j = 0; j < ns; ++j) {
      const double c0 = cv[static_cast<std::size_t>(j)];
      const double cm1 = cv[static_cast<std::size_t>((j + ns - 1) % ns)];
      const double cp1 = cv[static_cast<std::size_t>((j + 1) % ns)];
      if (!(c0 > cm1 && c0 >= cp1 && c0 >= threshold)) continue;
      // parabola through the three samples
      const double curv = cm1 + cp1 - 2.0 * c0;
      double delta = 0.0, value = c0;
      if (curv < 0.0) {
        delta = std::clamp(0.5 * (cm1 - cp1) / curv, -0.5, 0.5);
        value = c0 - 0.25 * (cm1 - cp1) * delta;
      }
      double phi = rep.period * (j + delta) / ns;
      if (phi < 0.0) phi += rep.period;
      rep.peaks.push_back({phi, std::min(value, 1.0)});
    }
  }
  std::sort(rep.peaks.begin(), rep.peaks.end(), [](const ClonePeak& a, const ClonePeak& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return a.phi < b.phi;
  });
  rep.q_observed = static_cast<int>(rep.peaks.size());
  for (const auto& p : rep.peaks) rep.total_overlap += p.overlap;

  if (rep.q_observed > 0) {
    const double q = static_cast<double>(rep.q_observed);
    bool all_clone_like = true;
    bool any_clone_like = false;
    for (const auto& p : rep.peaks) {
      const bool like = p.overlap * q >= 1.0 - 1e-2;
      all_clone_like = all_clone_like && like;
      any_clone_like = any_clone_like || like;
    }
    if (all_clone_like && rep.total_overlap >= 1.0 - 1e-3)
      rep.classification = CloneClass::Clones;
    else if (any_clone_like)
      rep.classification = CloneClass::Mixed;
    else
      rep.classification = CloneClass::Mutants;
  }
  return rep;
}

struct RevivalWindow {
  int m;
  int n;
  int q_all;
  int q_even;
};

/// All coprime m/n <= 1/2 with n <= n_max, sorted by value, with the
/// predicted wave counts for both parities.  Used to annotate carpets.
inline std::vector<RevivalWindow> revival_windows(int n_max) {
  if (n_max < 2) throw std::invalid_argument("revival_windows: n_max must be at least 2");
  std::vector<RevivalWindow> out;
  for (int n = 2; n <= n_max; ++n)
    for (int m = 1; 2 * m <= n; ++m)
      if (std::gcd(m, n) == 1)
        out.push_back({m, n, predicted_wave_count(n, Parity::AllI),
                       predicted_wave_count(n, Parity::EvenIOnly)});
  std::sort(out.begin(), out.end(), [](const RevivalWindow& a, const RevivalWindow& b) {
    const long long lhs = static_cast<long long>(a.m) * b.n;
    const long long rhs = static_cast<long long>(b.m) * a.n;
    if (lhs != rhs) return lhs < rhs;
    return a.n < b.n;
  });
  return out;
}

/// Schedule dump: `m n parity l q s re(a_s) im(a_s)` per non-zero term.
inline void write_schedule(std::ostream& os, const RationalTime& rt, const RevivalSchedule& sch,
                           const detail::HeaderList& extra = {}) {
  detail::HeaderList headers;
  headers.emplace_back("rotwave-schedule", "1");
  for (const auto& kv : extra) headers.push_back(kv);
  headers.emplace_back("columns", "m n parity l q s re(a_s) im(a_s)");
  detail::write_headers(os, headers);
  for (const auto& term : sch.amps)
    os << rt.m << " " << rt.n << " " << parity_name(sch.parity) << " " << sch.l << " " << sch.q
       << " " << term.s << " " << detail::format_double(term.a.real()) << " "
       << detail::format_double(term.a.imag()) << "\n";
}

}  // namespace rotwave
