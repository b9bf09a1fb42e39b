#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "rotwave/errors.hpp"

namespace rotwave {

inline constexpr double kPi = 3.14159265358979323846;

/// (I, M) index pair; |M| <= I enforced at construction.
struct AngularIndex {
  int i;
  int m;
  AngularIndex(int i_, int m_) : i(i_), m(m_) {
    if (i < 0) throw std::invalid_argument("AngularIndex: I must be non-negative");
    if (std::abs(m) > i) throw std::invalid_argument("AngularIndex: |M| <= I required");
  }
};

namespace detail {

// ln(n!), table-backed for the sizes that show up in practice.
inline long double log_factorial(int n) {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(4096);
    t[0] = 0.0L;
    for (std::size_t k = 1; k < t.size(); ++k)
      t[k] = t[k - 1] + std::log(static_cast<long double>(k));
    return t;
  }();
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (static_cast<std::size_t>(n) < table.size()) return table[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<long double>(n) + 1.0L);
}

inline long double pairwise_sum(const long double* v, std::size_t n) {
  if (n == 0) return 0.0L;
  if (n == 1) return v[0];
  if (n == 2) return v[0] + v[1];
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace detail

/// <l1 l2 m1 m2 | L M> in the Condon-Shortley convention.
///
/// Evaluated through the closed factorial sum with log-factorials, so large
/// momenta neither overflow nor lose the alternating-sum cancellation to
/// naive factorial growth.  Selection-rule failures return exactly 0.
inline double clebsch_gordan(int l1, int l2, int m1, int m2, int L, int M) {
  if (l1 < 0 || l2 < 0 || L < 0)
    throw std::invalid_argument("clebsch_gordan: negative angular momentum");
  if (M != m1 + m2) return 0.0;
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(M) > L) return 0.0;
  if (L < std::abs(l1 - l2) || L > l1 + l2) return 0.0;

  using detail::log_factorial;
  const long double log_pre =
      0.5L * (std::log(static_cast<long double>(2 * L + 1)) +
              log_factorial(l1 + l2 - L) + log_factorial(l1 - l2 + L) +
              log_factorial(-l1 + l2 + L) - log_factorial(l1 + l2 + L + 1) +
              log_factorial(l1 + m1) + log_factorial(l1 - m1) +
              log_factorial(l2 + m2) + log_factorial(l2 - m2) +
              log_factorial(L + M) + log_factorial(L - M));

  const int k_min = std::max({0, l2 - L - m1, l1 + m2 - L});
  const int k_max = std::min({l1 + l2 - L, l1 - m1, l2 + m2});
  const std::size_t n_terms = static_cast<std::size_t>(k_max - k_min + 1);

  long double stack_terms[512] = {};
  std::vector<long double> heap_terms;
  long double* terms = stack_terms;
  if (n_terms > 512) {
    heap_terms.resize(n_terms);
    terms = heap_terms.data();
  }
  for (int k = k_min; k <= k_max; ++k) {
    const long double lt = log_pre - log_factorial(k) - log_factorial(l1 + l2 - L - k) -
                           log_factorial(l1 - m1 - k) - log_factorial(l2 + m2 - k) -
                           log_factorial(L - l2 + m1 + k) - log_factorial(L - l1 - m2 + k);
    terms[k - k_min] = (k % 2 ? -1.0L : 1.0L) * std::exp(lt);
  }
  return static_cast<double>(detail::pairwise_sum(terms, n_terms));
}

namespace detail {

inline constexpr double kY00 = 0.28209479177387814;  // 1/sqrt(4 pi)

// Fully normalised associated Legendre values at one theta:
//   Y_IM(theta, phi) = nalp(I, M) * exp(i M phi).
// Upward recurrence in I at fixed M carries the normalisation along, which
// keeps the values in range up to I of several hundred.
class LegendreTable {
public:
  LegendreTable(double theta, int i_max)
      : i_max_(i_max), v_(static_cast<std::size_t>(i_max + 1) * (i_max + 2) / 2, 0.0) {
    const double x = std::cos(theta);
    const double s = std::sin(theta);
    double diag = kY00;
    at(0, 0) = diag;
    for (int m = 0; m <= i_max_; ++m) {
      if (m > 0) {
        diag *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        at(m, m) = diag;
      }
      double pm2 = 0.0;
      double pm1 = diag;
      for (int i = m + 1; i <= i_max_; ++i) {
        const double a =
            std::sqrt((4.0 * i * i - 1.0) / (static_cast<double>(i) * i - static_cast<double>(m) * m));
        const double b = std::sqrt(
            ((static_cast<double>(i - 1) * (i - 1) - static_cast<double>(m) * m)) /
            (4.0 * (i - 1.0) * (i - 1.0) - 1.0));
        const double p = a * (x * pm1 - b * pm2);
        at(i, m) = p;
        pm2 = pm1;
        pm1 = p;
      }
    }
  }

  // Negative M via P(I,-M) = (-1)^M P(I,M) for the normalised functions.
  double operator()(int i, int m) const {
    const int am = std::abs(m);
    const double val = v_[static_cast<std::size_t>(i) * (i + 1) / 2 + am];
    return (m < 0 && (am & 1)) ? -val : val;
  }

  int i_max() const { return i_max_; }

private:
  double& at(int i, int m) { return v_[static_cast<std::size_t>(i) * (i + 1) / 2 + m]; }
  int i_max_;
  std::vector<double> v_;
};

}  // namespace detail

/// Orthonormal spherical harmonic Y^I_M(theta, phi), Condon-Shortley phase.
inline std::complex<double> spherical_harmonic(const AngularIndex& idx, double theta, double phi) {
  if (!(theta >= 0.0 && theta <= kPi))
    throw std::invalid_argument("spherical_harmonic: theta outside [0, pi]");
  const int am = std::abs(idx.m);
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  double diag = detail::kY00;
  for (int m = 1; m <= am; ++m) diag *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
  double pm2 = 0.0;
  double pm1 = diag;
  for (int i = am + 1; i <= idx.i; ++i) {
    const double a =
        std::sqrt((4.0 * i * i - 1.0) / (static_cast<double>(i) * i - static_cast<double>(am) * am));
    const double b =
        std::sqrt(((static_cast<double>(i - 1) * (i - 1) - static_cast<double>(am) * am)) /
                  (4.0 * (i - 1.0) * (i - 1.0) - 1.0));
    const double p = a * (x * pm1 - b * pm2);
    pm2 = pm1;
    pm1 = p;
  }
  double nalp = pm1;
  if (idx.m < 0 && (am & 1)) nalp = -nalp;
  return nalp * std::polar(1.0, idx.m * phi);
}

namespace detail {

// i_I(x) / i_0(x) for I = 0..i_max by downward (Miller) recurrence seeded
// well above max(i_max, x); normalising against the I=0 closed form removes
// the arbitrary seed.  Forward recurrence would lose all accuracy for I >> x.
inline std::vector<double> bessel_i_ratios(int i_max, double x) {
  std::vector<double> r(static_cast<std::size_t>(i_max) + 1, 0.0);
  if (x == 0.0) {
    r[0] = 1.0;
    return r;
  }
  const int start = std::max(i_max, static_cast<int>(std::ceil(1.2 * x))) + 40;
  std::vector<long double> f(static_cast<std::size_t>(i_max) + 1, 0.0L);
  long double fp = 0.0L;     // f_{I+1}
  long double fc = 1e-280L;  // f_I
  for (int i = start; i >= 1; --i) {
    const long double fm = fp + (2.0L * i + 1.0L) / x * fc;
    fp = fc;
    fc = fm;
    if (fc > 1e280L) {
      fc *= 1e-280L;
      fp *= 1e-280L;
      for (auto& y : f) y *= 1e-280L;
    }
    if (i - 1 <= i_max) f[static_cast<std::size_t>(i - 1)] = fc;
  }
  for (int i = 0; i <= i_max; ++i) r[static_cast<std::size_t>(i)] = static_cast<double>(f[i] / f[0]);
  return r;
}

}  // namespace detail

/// Modified spherical Bessel function of the first kind,
/// i_I(x) = sqrt(pi/(2x)) I_{I+1/2}(x).  At x = 0: 1 for I = 0, else 0.
inline double mod_sph_bessel_i(int i, double x) {
  if (i < 0) throw std::invalid_argument("mod_sph_bessel_i: negative order");
  if (x < 0.0) throw std::invalid_argument("mod_sph_bessel_i: negative argument");
  if (x == 0.0) return i == 0 ? 1.0 : 0.0;
  if (i == 0) return std::sinh(x) / x;
  const auto r = detail::bessel_i_ratios(i, x);
  return r[static_cast<std::size_t>(i)] * std::sinh(x) / x;
}

namespace detail {

struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};

// Nodes/weights on [-1, 1]; Newton on P_n.  Used for spectrally exact
// sphere quadrature of |Psi|^2 (polynomial in cos(theta)).
inline GaussLegendre gauss_legendre(int n) {
  GaussLegendre g;
  g.x.resize(static_cast<std::size_t>(n));
  g.w.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double xi = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * xi * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double dx = p1 / pp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.x[static_cast<std::size_t>(k)] = xi;
    g.x[static_cast<std::size_t>(n - 1 - k)] = -xi;
    const double w = 2.0 / ((1.0 - xi * xi) * pp * pp);
    g.w[static_cast<std::size_t>(k)] = w;
    g.w[static_cast<std::size_t>(n - 1 - k)] = w;
  }
  return g;
}

}  // namespace detail

}  // namespace rotwave
