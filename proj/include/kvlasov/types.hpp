#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace kvlasov {

// Boyer-Lindquist index order used everywhere: t, r, theta, phi.
enum Coord : int { kT = 0, kR = 1, kTh = 2, kPh = 3 };

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point or parameters outside the exterior chart.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Integrator breakdown, NaN, or a failed internal consistency check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

inline Vec4 contract(const Mat4& m, const Vec4& v) {
  Vec4 out{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) out[a] += m[a][b] * v[b];
  return out;
}

inline double quadratic_form(const Mat4& m, const Vec4& u, const Vec4& v) {
  double s = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) s += m[a][b] * u[a] * v[b];
  return s;
}

inline Mat4 zero_mat4() { return Mat4{}; }

}  // namespace kvlasov
