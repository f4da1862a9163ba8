#ifndef BIMANUAL_SRC_JET_H_
#define BIMANUAL_SRC_JET_H_

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace bimanual {

// Forward-mode dual number carrying N partial derivatives.
template <int N>
struct Jet {
  using Derivative = Eigen::Matrix<double, N, 1>;

  double a = 0.0;
  Derivative v = Derivative::Zero();

  Jet() = default;
  Jet(double value) : a(value) {}  // NOLINT(runtime/explicit)
  Jet(double value, const Derivative& dv) : a(value), v(dv) {}

  static Jet Variable(double value, int index) {
    Jet j(value);
    j.v(index) = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) { a += o.a; v += o.v; return *this; }
  Jet& operator-=(const Jet& o) { a -= o.a; v -= o.v; return *this; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(const Jet& x) { return x; }
  friend Jet operator-(const Jet& x) { return Jet(-x.a, -x.v); }
  friend Jet operator+(const Jet& x, const Jet& y) {
    return Jet(x.a + y.a, x.v + y.v);
  }
  friend Jet operator-(const Jet& x, const Jet& y) {
    return Jet(x.a - y.a, x.v - y.v);
  }
  friend Jet operator*(const Jet& x, const Jet& y) {
    return Jet(x.a * y.a, x.a * y.v + y.a * x.v);
  }
  friend Jet operator/(const Jet& x, const Jet& y) {
    const double inv = 1.0 / y.a;
    const double q = x.a * inv;
    return Jet(q, (x.v - q * y.v) * inv);
  }
  friend Jet operator+(const Jet& x, double s) { return Jet(x.a + s, x.v); }
  friend Jet operator+(double s, const Jet& x) { return Jet(x.a + s, x.v); }
  friend Jet operator-(const Jet& x, double s) { return Jet(x.a - s, x.v); }
  friend Jet operator-(double s, const Jet& x) { return Jet(s - x.a, -x.v); }
  friend Jet operator*(const Jet& x, double s) { return Jet(x.a * s, x.v * s); }
  friend Jet operator*(double s, const Jet& x) { return Jet(x.a * s, x.v * s); }
  friend Jet operator/(const Jet& x, double s) { return Jet(x.a / s, x.v / s); }
  friend Jet operator/(double s, const Jet& x) {
    const double q = s / x.a;
    return Jet(q, x.v * (-q / x.a));
  }

  friend bool operator<(const Jet& x, const Jet& y) { return x.a < y.a; }
  friend bool operator>(const Jet& x, const Jet& y) { return x.a > y.a; }
  friend bool operator<=(const Jet& x, const Jet& y) { return x.a <= y.a; }
  friend bool operator>=(const Jet& x, const Jet& y) { return x.a >= y.a; }
  friend bool operator==(const Jet& x, const Jet& y) { return x.a == y.a; }
  friend bool operator!=(const Jet& x, const Jet& y) { return x.a != y.a; }

  friend Jet sqrt(const Jet& x) {
    const double s = std::sqrt(x.a);
    return Jet(s, x.v * (0.5 / s));
  }
  friend Jet sin(const Jet& x) { return Jet(std::sin(x.a), std::cos(x.a) * x.v); }
  friend Jet cos(const Jet& x) { return Jet(std::cos(x.a), -std::sin(x.a) * x.v); }
  friend Jet atan2(const Jet& y, const Jet& x) {
    const double r2 = x.a * x.a + y.a * y.a;
    return Jet(std::atan2(y.a, x.a), (x.a * y.v - y.a * x.v) / r2);
  }
  friend Jet exp(const Jet& x) {
    const double e = std::exp(x.a);
    return Jet(e, e * x.v);
  }
  friend Jet abs(const Jet& x) { return x.a < 0.0 ? -x : x; }
  friend bool isfinite(const Jet& x) {
    return std::isfinite(x.a) && x.v.allFinite();
  }
};

inline double Value(double x) { return x; }
template <int N>
double Value(const Jet<N>& x) {
  return x.a;
}

}  // namespace bimanual

namespace Eigen {

template <int N>
struct NumTraits<bimanual::Jet<N>> : GenericNumTraits<bimanual::Jet<N>> {
  using Real = bimanual::Jet<N>;
  using NonInteger = bimanual::Jet<N>;
  using Nested = bimanual::Jet<N>;
  using Literal = bimanual::Jet<N>;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 1,
    MulCost = 3
  };

  static Real epsilon() { return Real(std::numeric_limits<double>::epsilon()); }
  static Real dummy_precision() { return Real(1e-12); }
  static Real highest() { return Real(std::numeric_limits<double>::max()); }
  static Real lowest() { return Real(-std::numeric_limits<double>::max()); }
  static int digits10() { return std::numeric_limits<double>::digits10; }
};

template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<bimanual::Jet<N>, double, BinaryOp> {
  using ReturnType = bimanual::Jet<N>;
};

template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<double, bimanual::Jet<N>, BinaryOp> {
  using ReturnType = bimanual::Jet<N>;
};

}  // namespace Eigen

#endif  // BIMANUAL_SRC_JET_H_
