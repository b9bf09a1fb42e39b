#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "rotwave/angular.hpp"
#include "rotwave/errors.hpp"

namespace rotwave {

/// Which axis the packet's symmetry axis sits on in the frame the
/// coefficients are expressed in.  The closed-form exponential packet is
/// built with its peak along x (quantisation axis z); the axially symmetric
/// packet is built in the rotated frame where the symmetry axis is z.
enum class Frame { SymmetryAxisIsX, SymmetryAxisIsZ };

inline const char* frame_name(Frame f) {
  return f == Frame::SymmetryAxisIsX ? "symmetry-axis-x" : "symmetry-axis-z";
}

struct Coefficient {
  int i;
  int m;
  std::complex<double> b;
};

/// Spherical-harmonic expansion: the universal state representation.
/// Coefficients are kept sorted by (I, M); builders leave the state at unit
/// norm and never store entries below the 1e-16 floor.
struct SHExpansion {
  std::vector<Coefficient> coeffs;
  int i_max = 0;
  Frame frame = Frame::SymmetryAxisIsX;
  std::vector<std::pair<std::string, std::string>> meta;

  const std::complex<double>* find(int i, int m) const {
    auto it = std::lower_bound(coeffs.begin(), coeffs.end(), std::pair<int, int>{i, m},
                               [](const Coefficient& c, const std::pair<int, int>& k) {
                                 return std::pair<int, int>{c.i, c.m} < k;
                               });
    if (it == coeffs.end() || it->i != i || it->m != m) return nullptr;
    return &it->b;
  }
};

inline constexpr double kStorageFloor = 1e-16;

inline void sort_coefficients(SHExpansion& wp) {
  std::sort(wp.coeffs.begin(), wp.coeffs.end(), [](const Coefficient& a, const Coefficient& b) {
    return std::pair<int, int>{a.i, a.m} < std::pair<int, int>{b.i, b.m};
  });
}

inline double norm_squared(const SHExpansion& wp) {
  long double s = 0.0L;
  for (const auto& c : wp.coeffs) s += std::norm(c.b);
  return static_cast<double>(s);
}

inline double norm(const SHExpansion& wp) { return std::sqrt(norm_squared(wp)); }

inline void normalize(SHExpansion& wp) {
  const double n2 = norm_squared(wp);
  if (n2 <= 0.0) throw empty_packet_error("expansion has no weight to normalise");
  const double s = 1.0 / std::sqrt(n2);
  for (auto& c : wp.coeffs) c.b *= s;
}

/// Drop stored coefficients below the storage floor; recompute i_max.
inline void apply_storage_floor(SHExpansion& wp) {
  std::erase_if(wp.coeffs, [](const Coefficient& c) { return std::abs(c.b) < kStorageFloor; });
  int im = 0;
  for (const auto& c : wp.coeffs) im = std::max(im, c.i);
  wp.i_max = im;
}

/// <a|b> over the union of the two supports.
inline std::complex<double> inner_product(const SHExpansion& a, const SHExpansion& b) {
  std::complex<double> s{};
  auto ia = a.coeffs.begin();
  auto ib = b.coeffs.begin();
  while (ia != a.coeffs.end() && ib != b.coeffs.end()) {
    const auto ka = std::pair<int, int>{ia->i, ia->m};
    const auto kb = std::pair<int, int>{ib->i, ib->m};
    if (ka < kb) {
      ++ia;
    } else if (kb < ka) {
      ++ib;
    } else {
      s += std::conj(ia->b) * ib->b;
      ++ia;
      ++ib;
    }
  }
  return s;
}

/// max_{I,M} |a_IM - b_IM| over the union of supports.
inline double max_coefficient_difference(const SHExpansion& a, const SHExpansion& b) {
  double d = 0.0;
  auto ia = a.coeffs.begin();
  auto ib = b.coeffs.begin();
  while (ia != a.coeffs.end() || ib != b.coeffs.end()) {
    if (ib == b.coeffs.end() ||
        (ia != a.coeffs.end() &&
         std::pair<int, int>{ia->i, ia->m} < std::pair<int, int>{ib->i, ib->m})) {
      d = std::max(d, std::abs(ia->b));
      ++ia;
    } else if (ia == a.coeffs.end() ||
               std::pair<int, int>{ib->i, ib->m} < std::pair<int, int>{ia->i, ia->m}) {
      d = std::max(d, std::abs(ib->b));
      ++ib;
    } else {
      d = std::max(d, std::abs(ia->b - ib->b));
      ++ia;
      ++ib;
    }
  }
  return d;
}

/// R_z(beta): coefficients b_IM * e^{i M beta}, i.e. Psi'(theta, phi) =
/// Psi(theta, phi + beta).
inline SHExpansion rotate_z(const SHExpansion& wp, double beta) {
  SHExpansion out = wp;
  for (auto& c : out.coeffs) c.b *= std::polar(1.0, c.m * beta);
  return out;
}

inline bool has_only_even_i(const SHExpansion& wp) {
  for (const auto& c : wp.coeffs)
    if (c.i % 2 != 0) return false;
  return true;
}

inline bool has_only_even_m(const SHExpansion& wp) {
  for (const auto& c : wp.coeffs)
    if (c.m % 2 != 0) return false;
  return true;
}

inline bool is_axially_symmetric(const SHExpansion& wp) {
  for (const auto& c : wp.coeffs)
    if (c.m != 0) return false;
  return true;
}

inline double mean_l2(const SHExpansion& wp) {
  long double s = 0.0L;
  for (const auto& c : wp.coeffs)
    s += static_cast<long double>(c.i) * (c.i + 1) * std::norm(c.b);
  return static_cast<double>(s);
}

/// Ibar from Ibar(Ibar+1) = <L^2>, positive root.
inline double i_bar(const SHExpansion& wp) {
  const double l2 = mean_l2(wp);
  return 0.5 * (std::sqrt(1.0 + 4.0 * l2) - 1.0);
}

inline void set_meta(SHExpansion& wp, const std::string& key, const std::string& value) {
  for (auto& kv : wp.meta)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  wp.meta.emplace_back(key, value);
}

inline const std::string* get_meta(const SHExpansion& wp, const std::string& key) {
  for (const auto& kv : wp.meta)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

}  // namespace rotwave
