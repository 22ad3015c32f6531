// Internal 1-D maximization helper.
#pragma once

#include <cmath>
#include <functional>

namespace frk::detail {

// Golden-section maximization of a unimodal-enough objective on [lo, hi].
// Returns the best abscissa found; robust to flat regions.
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         int iters = 60) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

}  // namespace frk::detail
