#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace fedpir {

// Exact rational arithmetic on 128-bit integers. All operations keep the
// value normalized (gcd-reduced, positive denominator) and throw
// std::overflow_error if a product or sum leaves the 128-bit range.
struct Rational {
    __int128 num = 0;
    __int128 den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}
    Rational(__int128 n, __int128 d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        __int128 g = gcd128(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a < 0 ? -a : a;
    }

    static __int128 checked_mul(__int128 a, __int128 b) {
        __int128 out;
        if (__builtin_mul_overflow(a, b, &out))
            throw std::overflow_error("rational: 128-bit overflow");
        return out;
    }

    static __int128 checked_add(__int128 a, __int128 b) {
        __int128 out;
        if (__builtin_add_overflow(a, b, &out))
            throw std::overflow_error("rational: 128-bit overflow");
        return out;
    }

    bool is_zero() const { return num == 0; }
    bool is_negative() const { return num < 0; }
    bool is_integer() const { return den == 1; }
};

inline Rational operator+(const Rational& a, const Rational& b) {
    return Rational(Rational::checked_add(Rational::checked_mul(a.num, b.den),
                                          Rational::checked_mul(b.num, a.den)),
                    Rational::checked_mul(a.den, b.den));
}

inline Rational operator-(const Rational& a, const Rational& b) {
    return Rational(Rational::checked_add(Rational::checked_mul(a.num, b.den),
                                          -Rational::checked_mul(b.num, a.den)),
                    Rational::checked_mul(a.den, b.den));
}

inline Rational operator*(const Rational& a, const Rational& b) {
    return Rational(Rational::checked_mul(a.num, b.num),
                    Rational::checked_mul(a.den, b.den));
}

inline Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw std::invalid_argument("rational: division by zero");
    return Rational(Rational::checked_mul(a.num, b.den),
                    Rational::checked_mul(a.den, b.num));
}

inline Rational operator-(const Rational& a) { return Rational(-a.num, a.den); }

inline bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
}
inline bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }

inline bool operator<(const Rational& a, const Rational& b) {
    return Rational::checked_mul(a.num, b.den) < Rational::checked_mul(b.num, a.den);
}
inline bool operator>(const Rational& a, const Rational& b) { return b < a; }
inline bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
inline bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

inline std::string int128_to_string(__int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
    std::string digits;
    while (u > 0) {
        digits.push_back(char('0' + (int)(u % 10)));
        u /= 10;
    }
    if (neg) digits.push_back('-');
    return std::string(digits.rbegin(), digits.rend());
}

// "num/den", or just "num" for integers.
inline std::string to_fraction(const Rational& r) {
    if (r.den == 1) return int128_to_string(r.num);
    return int128_to_string(r.num) + "/" + int128_to_string(r.den);
}

inline long double to_long_double(const Rational& r) {
    return (long double)r.num / (long double)r.den;
}

// Decimal rendering with 12 significant digits, enough to compare against
// published double-precision values at 1e-9 relative error.
inline std::string to_decimal(const Rational& r) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12Lg", to_long_double(r));
    return std::string(buf);
}

// Floor of sqrt(v) for v >= 0, exact. Long-double seed plus Newton correction.
inline __int128 isqrt128(__int128 v) {
    if (v < 0) throw std::invalid_argument("isqrt128: negative input");
    if (v == 0) return 0;
    __int128 x = (__int128)sqrtl((long double)v);
    if (x < 0) x = 0;
    while (x > 0 && x > v / x) --x;
    while (x + 1 <= v / (x + 1)) ++x;
    return x;
}

}  // namespace fedpir
