#pragma once

#include <cmath>
#include <complex>

namespace pk {

// Values that should sit on the negative real axis but carry rounding noise in
// the imaginary part are snapped to the upper side of the cut, so x and its
// formal conjugate pick the same branch.
inline std::complex<double> snap_to_cut(std::complex<double> b) {
  if (b.real() < 0.0 && std::abs(b.imag()) <= 1e-10 * std::abs(b.real()))
    return {b.real(), 0.0};
  return b;
}

inline std::complex<double> branch_log(std::complex<double> b) {
  return std::log(snap_to_cut(b));
}

inline std::complex<double> branch_pow(std::complex<double> b, std::complex<double> e) {
  if (e.imag() == 0.0) {
    const double r = e.real();
    const double n = std::nearbyint(r);
    if (r == n && std::abs(n) <= 64.0) {
      long k = static_cast<long>(std::abs(n));
      std::complex<double> acc(1.0, 0.0), base = b;
      while (k) {
        if (k & 1) acc *= base;
        base *= base;
        k >>= 1;
      }
      return n < 0 ? 1.0 / acc : acc;
    }
    if (b == 0.0) return r > 0 ? std::complex<double>(0.0) : std::complex<double>(INFINITY, 0.0);
    return std::pow(snap_to_cut(b), r);
  }
  return std::exp(e * branch_log(b));
}

}  // namespace pk
