#pragma once

#include <array>
#include <cmath>

#include "airy/core.hpp"

namespace airy {

// Bivariate Taylor polynomial truncated at total degree 3 around a base point.
// Coefficient c[k] multiplies dx^i dy^j with k = slot(i, j).
class Jet3 {
 public:
  static constexpr int kSize = 10;

  constexpr Jet3() = default;
  constexpr Jet3(double constant) { c_[0] = constant; }  // NOLINT: scalars promote implicitly

  static constexpr int slot(int i, int j) {
    // (0,0) (1,0) (0,1) (2,0) (1,1) (0,2) (3,0) (2,1) (1,2) (0,3)
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }
  static Jet3 variable_x(double x0) {
    Jet3 r(x0);
    r.c_[slot(1, 0)] = 1.0;
    return r;
  }
  static Jet3 variable_y(double y0) {
    Jet3 r(y0);
    r.c_[slot(0, 1)] = 1.0;
    return r;
  }

  double coefficient(int i, int j) const { return c_[static_cast<std::size_t>(slot(i, j))]; }
  // Partial derivative d^(i+j) / dx^i dy^j at the base point.
  double derivative(int i, int j) const {
    static constexpr std::array<double, 4> fact{1.0, 1.0, 2.0, 6.0};
    return coefficient(i, j) * fact[static_cast<std::size_t>(i)] * fact[static_cast<std::size_t>(j)];
  }
  double value() const { return c_[0]; }

  Jet3& operator+=(const Jet3& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet3& operator-=(const Jet3& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet3& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  friend Jet3 operator-(Jet3 a) { return a *= -1.0; }
  friend Jet3 operator*(Jet3 a, double s) { return a *= s; }
  friend Jet3 operator*(double s, Jet3 a) { return a *= s; }
  friend Jet3 operator/(Jet3 a, double s) { return a *= 1.0 / s; }
  friend Jet3 operator*(const Jet3& a, const Jet3& b);
  friend Jet3 operator/(const Jet3& a, const Jet3& b) { return a * reciprocal(b); }
  friend Jet3 reciprocal(const Jet3& a);
  friend Jet3 log(const Jet3& a);

 private:
  std::array<double, kSize> c_{};
};

inline Jet3 operator*(const Jet3& a, const Jet3& b) {
  Jet3 r;
  for (int da = 0; da <= 3; ++da) {
    for (int ja = 0; ja <= da; ++ja) {
      const double ca = a.c_[static_cast<std::size_t>(Jet3::slot(da - ja, ja))];
      if (ca == 0.0) continue;
      for (int db = 0; da + db <= 3; ++db) {
        for (int jb = 0; jb <= db; ++jb) {
          r.c_[static_cast<std::size_t>(Jet3::slot(da - ja + db - jb, ja + jb))] +=
              ca * b.c_[static_cast<std::size_t>(Jet3::slot(db - jb, jb))];
        }
      }
    }
  }
  return r;
}

// With a = a0 (1 + w) and w nilpotent of order 4, 1/a = (1 - w + w^2 - w^3) / a0.
inline Jet3 reciprocal(const Jet3& a) {
  const double a0 = a.c_[0];
  Jet3 w = a / a0;
  w.c_[0] = 0.0;
  const Jet3 w2 = w * w;
  const Jet3 w3 = w2 * w;
  return (Jet3(1.0) - w + w2 - w3) / a0;
}

// log a = log a0 + w - w^2/2 + w^3/3; requires a0 > 0.
inline Jet3 log(const Jet3& a) {
  const double a0 = a.c_[0];
  Jet3 w = a / a0;
  w.c_[0] = 0.0;
  const Jet3 w2 = w * w;
  const Jet3 w3 = w2 * w;
  Jet3 r = w - 0.5 * w2 + w3 / 3.0;
  r.c_[0] = std::log(a0);
  return r;
}

inline double log(double x) { return std::log(x); }
inline double reciprocal(double x) { return 1.0 / x; }

}  // namespace airy
