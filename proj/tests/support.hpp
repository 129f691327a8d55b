#pragma once

#include <algorithm>
#include <cmath>

#include "doctest.h"

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}
