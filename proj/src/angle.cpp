#include "hofa/angle.hpp"

#include <cmath>
#include <numeric>

namespace hofa {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

long long checked_ll(__int128 v, const char* what) {
    if (v > static_cast<__int128>(INT64_MAX) || v < static_cast<__int128>(INT64_MIN))
        throw internal_error(std::string("rational overflow in ") + what);
    return static_cast<long long>(v);
}

Rat make_reduced(__int128 n, __int128 d, const char* what) {
    if (d == 0) throw validation_error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a == 0) a = 1;
    Rat r;
    r.num = checked_ll(n / a, what);
    r.den = checked_ll(d / a, what);
    return r;
}

} // namespace

Rat::Rat(long long n, long long d) { *this = make_reduced(n, d, "construction"); }

Rat Rat::operator+(const Rat& o) const {
    return make_reduced(static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den,
                        static_cast<__int128>(den) * o.den, "addition");
}

Rat Rat::operator-(const Rat& o) const {
    return make_reduced(static_cast<__int128>(num) * o.den - static_cast<__int128>(o.num) * den,
                        static_cast<__int128>(den) * o.den, "subtraction");
}

Rat Rat::operator-() const {
    Rat r;
    r.num = -num;
    r.den = den;
    return r;
}

Rat Rat::operator*(const Rat& o) const {
    return make_reduced(static_cast<__int128>(num) * o.num, static_cast<__int128>(den) * o.den,
                        "multiplication");
}

Rat Rat::operator/(const Rat& o) const {
    if (o.num == 0) throw validation_error("rational division by zero");
    return make_reduced(static_cast<__int128>(num) * o.den, static_cast<__int128>(den) * o.num,
                        "division");
}

bool Rat::operator<(const Rat& o) const {
    return static_cast<__int128>(num) * o.den < static_cast<__int128>(o.num) * den;
}

Rat Rat::mod1() const {
    long long r = num % den;
    if (r < 0) r += den;
    Rat out;
    out.num = r;
    out.den = den;
    return out;
}

std::string Rat::str() const { return std::to_string(num) + "/" + std::to_string(den); }

Angle Angle::rational(long long p, long long q) { return rational(Rat(p, q)); }

Angle Angle::rational(const Rat& r) {
    Angle a;
    a.exact_ = true;
    a.r_ = r.mod1();
    a.v_ = a.r_.value();
    return a;
}

Angle Angle::real(double x) {
    Angle a;
    a.exact_ = false;
    double v = x - std::floor(x);
    if (v >= 1.0) v = 0.0; // guard against floor rounding at the boundary
    a.v_ = v;
    return a;
}

const Rat& Angle::rat() const {
    if (!exact_) throw validation_error("exact angle required but value is floating point");
    return r_;
}

Angle Angle::operator+(const Angle& o) const {
    if (exact_ && o.exact_) return rational(r_ + o.r_);
    return real(v_ + o.v_);
}

Angle Angle::operator-(const Angle& o) const {
    if (exact_ && o.exact_) return rational(r_ - o.r_);
    return real(v_ - o.v_);
}

Angle Angle::operator-() const {
    if (exact_) return rational(-r_);
    return real(-v_);
}

Angle Angle::times(long long k) const {
    if (exact_) {
        return rational(make_reduced(static_cast<__int128>(r_.num) * k, r_.den, "scaling"));
    }
    return real(v_ * static_cast<double>(k));
}

std::complex<double> Angle::unit() const { return unit_angle(v_); }

bool Angle::equals_exact(const Angle& o) const { return rat() == o.rat(); }

double Angle::dist(const Angle& a, const Angle& b) {
    double d = std::fabs(a.v_ - b.v_);
    if (d > 0.5) d = 1.0 - d;
    return d;
}

Rat Angle::dist_exact(const Angle& a, const Angle& b) {
    Rat d = (a.rat() - b.rat()).mod1();
    Rat half(1, 2);
    if (half < d) d = Rat(1, 1) - d;
    return d;
}

std::complex<double> unit_angle(double t) {
    return std::complex<double>(std::cos(kTau * t), std::sin(kTau * t));
}

} // namespace hofa
