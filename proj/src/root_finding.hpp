#pragma once

#include <cmath>
#include <optional>
#include <utility>

namespace qosgame::detail {

/// Root of a monotone function on [lo, hi] where fn(lo) and fn(hi) have
/// opposite signs. Bisection keeps the bracket; when a derivative is
/// supplied a Newton step is taken whenever it lands strictly inside the
/// current bracket. Stops when the bracket (or the Newton step) is below
/// `abs_tol`.
template <typename Fn, typename Deriv>
double solve_bracketed(Fn&& fn, Deriv&& deriv, double lo, double hi,
                       double abs_tol, int max_iter = 400) {
  const double f_lo = fn(lo);
  if (f_lo == 0.0) return lo;
  const bool increasing = f_lo < 0.0;

  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter && (hi - lo) > abs_tol; ++it) {
    const double fx = fn(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == increasing) {
      lo = x;
    } else {
      hi = x;
    }

    double next = 0.5 * (lo + hi);
    if (const std::optional<double> d = deriv(x); d && std::isfinite(*d) && *d != 0.0) {
      const double newton = x - fx / *d;
      if (newton > lo && newton < hi) {
        if (std::abs(newton - x) < 0.25 * abs_tol) return newton;
        next = newton;
      }
    }
    x = next;
  }
  return x;
}

template <typename Fn>
double solve_bracketed(Fn&& fn, double lo, double hi, double abs_tol) {
  return solve_bracketed(std::forward<Fn>(fn),
                         [](double) { return std::optional<double>{}; }, lo, hi,
                         abs_tol);
}

}  // namespace qosgame::detail
