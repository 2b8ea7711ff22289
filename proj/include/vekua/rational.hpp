#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vekua {

using Int128 = __int128;

inline Int128 abs128(Int128 x) { return x < 0 ? -x : x; }

inline Int128 gcd128(Int128 a, Int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        Int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline std::string int128_to_string(Int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -(unsigned __int128)v : (unsigned __int128)v;
    char buf[48];
    int pos = 48;
    while (u != 0) {
        buf[--pos] = char('0' + int(u % 10));
        u /= 10;
    }
    std::string s(buf + pos, buf + 48);
    return neg ? "-" + s : s;
}

inline Int128 int128_from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer literal");
    bool neg = false;
    size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) throw std::invalid_argument("bare sign in integer literal");
    Int128 v = 0;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c < '0' || c > '9') throw std::invalid_argument("bad digit in integer literal");
        if (v > (Int128(1) << 120)) throw std::overflow_error("integer literal too large");
        v = v * 10 + (c - '0');
    }
    return neg ? -v : v;
}

inline Int128 checked_mul(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational arithmetic overflow");
    return r;
}

inline bool try_mul128(Int128 a, Int128 b, Int128& r) { return !__builtin_mul_overflow(a, b, &r); }

/// Compare a/b against c/d for a, b, c, d > 0 by Euclidean descent, so the
/// result is exact even when the cross products would not fit in 128 bits.
inline int compare_pos_frac(Int128 a, Int128 b, Int128 c, Int128 d) {
    int flip = 1;
    for (;;) {
        Int128 qa = a / b, qc = c / d;
        if (qa != qc) return (qa < qc ? -1 : 1) * flip;
        Int128 ra = a % b, rc = c % d;
        if (ra == 0 && rc == 0) return 0;
        if (ra == 0) return -flip;
        if (rc == 0) return flip;
        // Equal integer parts: compare ra/b vs rc/d through the reciprocals.
        Int128 nb = ra;
        a = b;
        b = nb;
        Int128 nd = rc;
        c = d;
        d = nd;
        flip = -flip;
    }
}

inline Int128 checked_add(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational arithmetic overflow");
    return r;
}

// Signed 256-bit scratch value (hi * 2^128 + lo, two's complement) for the
// addition cross terms: products of convergent-scale operands can overflow
// 128 bits even when the reduced sum fits, e.g. squares of consecutive
// continued-fraction convergents, where the difference collapses by almost
// the full width.
struct Int256 {
    Int128 hi;
    unsigned __int128 lo;
};

inline Int256 mul_wide(Int128 a, Int128 b) {
    bool neg = (a < 0) != (b < 0);
    unsigned __int128 ua = a < 0 ? -(unsigned __int128)a : (unsigned __int128)a;
    unsigned __int128 ub = b < 0 ? -(unsigned __int128)b : (unsigned __int128)b;
    unsigned __int128 a0 = (std::uint64_t)ua, a1 = ua >> 64;
    unsigned __int128 b0 = (std::uint64_t)ub, b1 = ub >> 64;
    unsigned __int128 ll = a0 * b0, lh = a0 * b1, hl = a1 * b0, hh = a1 * b1;
    unsigned __int128 mid = lh + hl;
    unsigned __int128 hi = hh + (mid >> 64) + (mid < lh ? ((unsigned __int128)1 << 64) : 0);
    unsigned __int128 lo = ll + (mid << 64);
    if (lo < ll) ++hi;
    if (neg) {
        lo = ~lo + 1;
        hi = ~hi + (lo == 0 ? 1 : 0);
    }
    return {(Int128)hi, lo};
}

inline Int256 add_wide(const Int256& x, const Int256& y) {
    unsigned __int128 lo = x.lo + y.lo;
    return {x.hi + y.hi + (lo < x.lo ? 1 : 0), lo};
}

// Integer square root via Newton iteration from a power-of-two overshoot.
inline Int128 isqrt128(Int128 n) {
    if (n < 0) throw std::domain_error("isqrt128 of negative value");
    if (n == 0) return 0;
    unsigned long long hi = (unsigned long long)(unsigned __int128)(n >> 64);
    int bitlen = hi ? 128 - __builtin_clzll(hi) : 64 - __builtin_clzll((unsigned long long)(unsigned __int128)n);
    Int128 x = (Int128)1 << (bitlen / 2 + 1);
    Int128 y = (x + n / x) / 2;
    while (y < x) {
        x = y;
        y = (x + n / x) / 2;
    }
    return x;
}

inline bool is_perfect_square(Int128 n, Int128& root) {
    if (n < 0) return false;
    Int128 r = isqrt128(n);
    if (r * r == n) {
        root = r;
        return true;
    }
    return false;
}

/// Exact rational with 128-bit numerator/denominator, always normalized
/// (den > 0, gcd(num, den) = 1). Cross terms are pre-reduced before
/// multiplication; a genuine overflow throws instead of wrapping.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(Int128 n) : num_(n), den_(1) {}
    Rational(Int128 n, Int128 d) : num_(n), den_(d) { normalize(); }
    Rational(int n) : num_(n), den_(1) {}
    Rational(long n) : num_(n), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}

    static Rational from_string(std::string_view s) {
        size_t slash = s.find('/');
        if (slash == std::string_view::npos) return Rational(int128_from_string(s));
        return Rational(int128_from_string(s.substr(0, slash)), int128_from_string(s.substr(slash + 1)));
    }

    Int128 num() const { return num_; }
    Int128 den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }
    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

    Rational operator-() const { return raw(-num_, den_); }

    Rational operator+(const Rational& o) const {
        Int128 g = gcd128(den_, o.den_);
        Int128 db = den_ / g, ob = o.den_ / g;
        Int128 x, y, n;
        if (try_mul128(num_, ob, x) && try_mul128(o.num_, db, y) && !__builtin_add_overflow(x, y, &n))
            return Rational(n, checked_mul(den_, ob));
        return add_slow(o, g, db, ob);
    }
    Rational operator-(const Rational& o) const { return *this + (-o); }

    Rational operator*(const Rational& o) const {
        Int128 g1 = gcd128(num_, o.den_);
        Int128 g2 = gcd128(o.num_, den_);
        return raw(checked_mul(num_ / g1, o.num_ / g2), checked_mul(den_ / g2, o.den_ / g1));
    }

    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::invalid_argument("rational division by zero");
        Int128 g1 = gcd128(num_, o.num_);
        Int128 g2 = gcd128(o.den_, den_);
        Int128 n = checked_mul(num_ / g1, o.den_ / g2);
        Int128 d = checked_mul(den_ / g2, o.num_ / g1);
        if (d < 0) {
            n = -n;
            d = -d;
        }
        return raw(n, d);
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const {
        int s = sign(), t = o.sign();
        if (s != t) return s < t;
        if (s == 0) return false;
        Int128 g = gcd128(den_, o.den_);
        Int128 a, b;
        if (try_mul128(num_, o.den_ / g, a) && try_mul128(o.num_, den_ / g, b)) return a < b;
        // Reduced cross products can still overflow for deep enclosures.
        if (s > 0) return compare_pos_frac(num_, den_, o.num_, o.den_) < 0;
        return compare_pos_frac(-o.num_, o.den_, -num_, den_) < 0;
    }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    Rational abs() const { return raw(abs128(num_), den_); }

    Rational pow(int e) const {
        if (e < 0) return (Rational(1) / *this).pow(-e);
        Rational r(1), base = *this;
        while (e > 0) {
            if (e & 1) r *= base;
            base *= base;
            e >>= 1;
        }
        return r;
    }

    double to_double() const { return double((long double)num_ / (long double)den_); }

    std::string to_string() const {
        if (den_ == 1) return int128_to_string(num_);
        return int128_to_string(num_) + "/" + int128_to_string(den_);
    }

    /// True iff this = (v/denominator)^2 for some integer v; returns v >= 0.
    bool square_root_in(Int128 denominator, Int128& v) const {
        // this = v^2/denominator^2  <=>  num*denominator^2 = v^2 * den and den | denominator^2
        Rational scaled = *this * Rational(checked_mul(denominator, denominator));
        if (!scaled.is_integer() || scaled.num() < 0) return false;
        return is_perfect_square(scaled.num(), v);
    }

private:
    // Wide-arithmetic fallback for +: redo the cross terms in 256 bits, peel
    // off the only factor the sum can share with the denominator (a divisor
    // of g = gcd of the input denominators), and land back in 128 bits or
    // report a real overflow.
    Rational add_slow(const Rational& o, Int128 g, Int128 db, Int128 ob) const {
        Int256 w = add_wide(mul_wide(num_, ob), mul_wide(o.num_, db));
        bool neg = w.hi < 0;
        if (neg) {
            w.lo = ~w.lo + 1;
            w.hi = ~w.hi + (w.lo == 0 ? 1 : 0);
        }
        std::uint64_t limbs[4] = {(std::uint64_t)((unsigned __int128)w.hi >> 64), (std::uint64_t)w.hi,
                                  (std::uint64_t)(w.lo >> 64), (std::uint64_t)w.lo};
        Int128 g2 = 1;
        if (g > 1 && (g >> 64) == 0) {
            unsigned __int128 r = 0;
            std::uint64_t gd = (std::uint64_t)g;
            for (int i = 0; i < 4; ++i) r = ((r << 64) | limbs[i]) % gd;
            g2 = gcd128(Int128(r), g);
            if (g2 > 1) {
                unsigned __int128 rem = 0;
                std::uint64_t d2 = (std::uint64_t)g2;
                for (int i = 0; i < 4; ++i) {
                    unsigned __int128 cur = (rem << 64) | limbs[i];
                    limbs[i] = (std::uint64_t)(cur / d2);
                    rem = cur % d2;
                }
            }
        }
        unsigned __int128 mag = ((unsigned __int128)limbs[2] << 64) | limbs[3];
        unsigned __int128 lim = ((unsigned __int128)1 << 127) - (neg ? 0 : 1);
        if (limbs[0] || limbs[1] || mag > lim) throw std::overflow_error("rational arithmetic overflow");
        Int128 n = neg && mag < ((unsigned __int128)1 << 127) ? -(Int128)mag : (Int128)mag;
        return Rational(n, checked_mul(den_ / g2, ob));
    }

    static Rational raw(Int128 n, Int128 d) {
        Rational r;
        r.num_ = n;
        r.den_ = d;
        return r;
    }
    void normalize() {
        if (den_ == 0) throw std::invalid_argument("rational with zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        Int128 g = gcd128(num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    Int128 num_, den_;
};

inline Rational lcm_rat(Int128 a, Int128 b) { return Rational(checked_mul(a / gcd128(a, b), b)); }

} // namespace vekua
