#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "rotwave/angular.hpp"
#include "rotwave/errors.hpp"
#include "rotwave/expansion.hpp"
#include "rotwave/io.hpp"

namespace rotwave {

/// Keep I shells until the cumulative weight reaches 1 - epsilon; the hard
/// cap guards against policies that can never converge.
struct TruncationPolicy {
  double epsilon = 1e-12;
  int i_cap = 0;  // 0: use 4N + 40

  int resolve_cap(double n) const {
    return i_cap > 0 ? i_cap : static_cast<int>(std::lround(4.0 * n + 40.0));
  }
};

enum class Symmetry { Asymmetric, Symmetric };

/// Recipe for the exponential packet exp{N sin(theta)(cos(phi) + i eta sin(phi))}.
/// eta = 1 is the circular packet (eigenstate of L+), eta = 0 the linear one,
/// intermediate values elliptic.
struct WavePacketSpec {
  double n = 1.0;
  double eta = 1.0;
  Symmetry symmetry = Symmetry::Asymmetric;
  TruncationPolicy truncation{};

  void validate() const {
    if (!(n > 0.0)) throw std::invalid_argument("WavePacketSpec: N must be positive");
    if (!(eta >= 0.0 && eta <= 1.0))
      throw std::invalid_argument("WavePacketSpec: eta must lie in [0, 1]");
  }
};

struct Observables {
  double lx = 0, ly = 0, lz = 0;
  double var_lx = 0, var_ly = 0;
  double l2 = 0;
  double i_bar = 0;
};

namespace detail {

inline double log_sinh(double x) {
  return x > 20.0 ? x + std::log1p(-std::exp(-2.0 * x)) - std::log(2.0) : std::log(std::sinh(x));
}

// <I,M+1|L+|I,M>
inline double ladder_up(int i, int m) {
  return std::sqrt(static_cast<double>(i - m) * (i + m + 1));
}
// <I,M-1|L-|I,M>
inline double ladder_down(int i, int m) {
  return std::sqrt(static_cast<double>(i + m) * (i - m + 1));
}

}  // namespace detail

/// Single expansion coefficient of the closed-form exponential packet: the
/// double (l, l') coupling sum collapsed to one index by l - l' = M.  Real
/// for real eta; exactly zero unless I - M is even (reflection symmetry in
/// the z = 0 plane).  For eta = 1 only the l' = 0 term survives, so the
/// packet is purely M = I.  The sign follows the Condon-Shortley harmonics,
/// fixed against direct quadrature of the closed form.
inline double asymmetric_coefficient(double n, double eta, int i, int m) {
  if (!(n > 0.0) || !(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("asymmetric_coefficient: need N > 0 and eta in [0, 1]");
  if (i < 0 || std::abs(m) > i)
    throw std::invalid_argument("asymmetric_coefficient: |M| <= I required");
  if ((i - m) % 2 != 0) return 0.0;
  const bool circular = (eta == 1.0);
  if (circular && m != i) return 0.0;

  const long double log_pre =
      0.5L * (std::log(static_cast<long double>(2.0 * n)) -
              static_cast<long double>(detail::log_sinh(2.0 * n)));
  const long double log_n = std::log(static_cast<long double>(n));
  const long double log_1p_eta = std::log1p(static_cast<long double>(eta));
  const long double log_1m_eta = circular ? 0.0L : std::log1p(-static_cast<long double>(eta));

  const int l0 = (i + m) / 2;
  long double acc = 0.0L;
  long double peak_w = 0.0L;
  for (int l = l0;; ++l) {
    const int lp = l - m;
    if (circular && lp > 0) break;
    const long double logw = (l + lp) * log_n + l * log_1p_eta + lp * log_1m_eta -
                             0.5L * (detail::log_factorial(2 * l) +
                                     detail::log_factorial(2 * lp));
    const long double w = std::exp(logw + log_pre);
    if (!(w > 0.0L)) break;  // underflowed past the tail
    peak_w = std::max(peak_w, w);
    if (w < peak_w * 1e-25L && l > l0 + 4) break;
    const double cg0 = clebsch_gordan(l, lp, 0, 0, i, 0);
    const double cgm = clebsch_gordan(l, lp, l, -lp, i, m);
    acc += (l % 2 ? -1.0L : 1.0L) * w * static_cast<long double>(cg0) *
           static_cast<long double>(cgm);
  }
  return static_cast<double>(acc / std::sqrt(static_cast<long double>(2 * i + 1)));
}

/// Expand the exponential packet over Y^I_M.  The peak sits along x; the
/// quantisation axis is z.  I shells accumulate until the weight threshold.
inline SHExpansion build_asymmetric(const WavePacketSpec& spec) {
  spec.validate();
  const double n = spec.n;
  const double eta = spec.eta;
  const int cap = spec.truncation.resolve_cap(n);
  const bool circular = (eta == 1.0);

  SHExpansion wp;
  wp.frame = Frame::SymmetryAxisIsX;
  long double captured = 0.0L;
  bool converged = false;
  for (int i = 0; i <= cap; ++i) {
    long double shell = 0.0L;
    for (int m = -i; m <= i; ++m) {
      if ((i - m) % 2 != 0) continue;
      if (circular && m != i) continue;
      const double b = asymmetric_coefficient(n, eta, i, m);
      if (b != 0.0) wp.coeffs.push_back({i, m, {b, 0.0}});
      shell += static_cast<long double>(b) * b;
    }
    captured += shell;
    wp.i_max = i;
    if (static_cast<double>(captured) >= 1.0 - spec.truncation.epsilon) {
      converged = true;
      break;
    }
  }
  if (!converged) throw truncation_error(static_cast<double>(captured), cap);

  normalize(wp);
  apply_storage_floor(wp);
  normalize(wp);
  set_meta(wp, "n", detail::format_double(n));
  set_meta(wp, "eta", detail::format_double(eta));
  set_meta(wp, "symmetry", "asymmetric");
  return wp;
}

/// Axially symmetric (eta = 0) packet in the rotated frame where the
/// symmetry axis is z: b_I0 = sqrt(2N/sinh 2N) sqrt(2I+1) i_I(N), all real
/// and positive.  Evaluated through i_I/i_0 ratios so nothing overflows.
inline SHExpansion build_linear(double n, const TruncationPolicy& policy = {}) {
  if (!(n > 0.0)) throw std::invalid_argument("build_linear: N must be positive");
  const int cap = policy.resolve_cap(n);
  const auto ratios = detail::bessel_i_ratios(cap, n);
  // sqrt(2N/sinh 2N) * i_0(N) = sqrt(tanh(N)/N)
  const double base = std::sqrt(std::tanh(n) / n);

  SHExpansion wp;
  wp.frame = Frame::SymmetryAxisIsZ;
  long double captured = 0.0L;
  bool converged = false;
  for (int i = 0; i <= cap; ++i) {
    const double b = std::sqrt(2.0 * i + 1.0) * ratios[static_cast<std::size_t>(i)] * base;
    if (b != 0.0) wp.coeffs.push_back({i, 0, {b, 0.0}});
    captured += static_cast<long double>(b) * b;
    wp.i_max = i;
    if (static_cast<double>(captured) >= 1.0 - policy.epsilon) {
      converged = true;
      break;
    }
  }
  if (!converged) throw truncation_error(static_cast<double>(captured), cap);

  normalize(wp);
  apply_storage_floor(wp);
  normalize(wp);
  set_meta(wp, "n", detail::format_double(n));
  set_meta(wp, "eta", "0");
  set_meta(wp, "symmetry", "linear");
  return wp;
}

/// Superpose the packet with its antipodal image: odd-I coefficients vanish,
/// even-I ones rescale by the exact normalisation of the two-wave
/// combination (the interference term keeps this off sqrt(2) at small eta*N).
inline SHExpansion symmetrize(const SHExpansion& asym, const WavePacketSpec& spec) {
  spec.validate();
  const double n = spec.n;
  const double eta = spec.eta;
  double interference;  // sin(2 eta N) / (eta sinh 2N)
  if (2.0 * n > 700.0)
    interference = 0.0;
  else if (eta < 1e-8)
    interference = 2.0 * n / std::sinh(2.0 * n);
  else
    interference = std::sin(2.0 * eta * n) / (eta * std::sinh(2.0 * n));
  const double kappa = std::sqrt(2.0) / std::sqrt(1.0 + interference);

  SHExpansion out;
  out.frame = asym.frame;
  out.meta = asym.meta;
  for (const auto& c : asym.coeffs)
    if (c.i % 2 == 0) out.coeffs.push_back({c.i, c.m, kappa * c.b});
  normalize(out);
  apply_storage_floor(out);
  normalize(out);
  set_meta(out, "symmetry", "symmetric");
  return out;
}

/// Angular-momentum expectations and variances through ladder-operator
/// matrix elements on the (I, M) basis; Ibar from Ibar(Ibar+1) = <L^2>.
inline Observables observables(const SHExpansion& wp) {
  long double lz = 0.0L, lz2 = 0.0L, l2 = 0.0L;
  std::complex<double> lp{};   // <L+>
  std::complex<double> lpp{};  // <L+^2>
  for (const auto& c : wp.coeffs) {
    const double w = std::norm(c.b);
    lz += c.m * w;
    lz2 += static_cast<long double>(c.m) * c.m * w;
    l2 += static_cast<long double>(c.i) * (c.i + 1) * w;
    if (const auto* up = wp.find(c.i, c.m + 1))
      lp += std::conj(*up) * (detail::ladder_up(c.i, c.m) * c.b);
    if (const auto* up2 = wp.find(c.i, c.m + 2))
      lpp += std::conj(*up2) *
             (detail::ladder_up(c.i, c.m + 1) * detail::ladder_up(c.i, c.m) * c.b);
  }
  Observables o;
  o.lz = static_cast<double>(lz);
  o.l2 = static_cast<double>(l2);
  o.lx = lp.real();  // (L+ + L-)/2 with <L-> = conj <L+>
  o.ly = lp.imag();  // (L+ - L-)/(2i)
  const double trans = 0.5 * static_cast<double>(l2 - lz2);
  const double lx2 = 0.5 * lpp.real() + trans;
  const double ly2 = -0.5 * lpp.real() + trans;
  o.var_lx = std::max(0.0, lx2 - o.lx * o.lx);
  o.var_ly = std::max(0.0, ly2 - o.ly * o.ly);
  o.i_bar = 0.5 * (std::sqrt(1.0 + 4.0 * o.l2) - 1.0);
  return o;
}

/// ||(Lx + i eta Ly) Psi|| in the coefficient basis; vanishing residual
/// certifies the minimum-uncertainty (intelligent-state) property.
inline double intelligent_residual(const SHExpansion& wp, double eta) {
  std::map<std::pair<int, int>, std::complex<double>> out;
  // Lx + i eta Ly = ((1+eta) L+ + (1-eta) L-)/2
  for (const auto& c : wp.coeffs) {
    if (c.m + 1 <= c.i)
      out[{c.i, c.m + 1}] += 0.5 * (1.0 + eta) * detail::ladder_up(c.i, c.m) * c.b;
    if (c.m - 1 >= -c.i)
      out[{c.i, c.m - 1}] += 0.5 * (1.0 - eta) * detail::ladder_down(c.i, c.m) * c.b;
  }
  long double s = 0.0L;
  for (const auto& [k, v] : out) s += std::norm(v);
  return std::sqrt(static_cast<double>(s));
}

}  // namespace rotwave
