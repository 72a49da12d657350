#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include "hofa/errors.hpp"

namespace hofa {

/// Reduced fraction with 64-bit components and overflow-checked arithmetic.
struct Rat {
    long long num = 0;
    long long den = 1; // always > 0, gcd(|num|, den) == 1

    Rat() = default;
    Rat(long long n, long long d);
    static Rat of(long long n) { return Rat(n, 1); }

    Rat operator+(const Rat& o) const;
    Rat operator-(const Rat& o) const;
    Rat operator-() const;
    Rat operator*(const Rat& o) const;
    Rat operator/(const Rat& o) const;
    bool operator==(const Rat& o) const { return num == o.num && den == o.den; }
    bool operator!=(const Rat& o) const { return !(*this == o); }
    bool operator<(const Rat& o) const;
    bool operator<=(const Rat& o) const { return *this < o || *this == o; }

    /// Representative in [0, 1).
    Rat mod1() const;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

/// Point of the circle group written additively as a value in [0, 1).
/// Exact mode stores a rational; float mode stores a double.  Arithmetic
/// stays exact as long as every operand is exact.
class Angle {
  public:
    Angle() : exact_(true), r_(), v_(0.0) {}
    static Angle rational(long long p, long long q);
    static Angle rational(const Rat& r);
    static Angle real(double x);

    bool exact() const { return exact_; }
    const Rat& rat() const;
    double value() const { return v_; }

    Angle operator+(const Angle& o) const;
    Angle operator-(const Angle& o) const;
    Angle operator-() const;
    Angle times(long long k) const;

    /// e(angle) = exp(2 pi i angle)
    std::complex<double> unit() const;

    /// Exact equality; requires both operands exact.
    bool equals_exact(const Angle& o) const;

    /// Circle metric, shorter arc normalized to [0, 1/2].
    static double dist(const Angle& a, const Angle& b);
    /// Exact circle metric; requires both operands exact.
    static Rat dist_exact(const Angle& a, const Angle& b);

  private:
    bool exact_;
    Rat r_; // valid when exact_, reduced mod 1
    double v_; // always maintained, in [0, 1)
};

/// exp(2 pi i t)
std::complex<double> unit_angle(double t);

} // namespace hofa
