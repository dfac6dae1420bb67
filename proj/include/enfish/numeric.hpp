#pragma once

#include <cmath>
#include <string>

#include "enfish/errors.hpp"

namespace enfish::num {

// Bisection on a bracketed sign change. f(lo) and f(hi) are passed in so
// callers that already evaluated the endpoints don't pay twice. Returns
// the bracket midpoint once the interval is narrower than xtol.
template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, double f_hi, double xtol,
              int max_iter = 200) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0))
    throw solver_error("bisect: endpoints do not bracket a sign change");
  for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for a maximum of a unimodal function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double xtol, int max_iter = 400) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && b - a > xtol; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace enfish::num
