#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "vekua/rational.hpp"

namespace vekua {

/// Thrown when a value is only known through a continued-fraction descriptor
/// and the requested operation needs an exact closed form.
struct CFExactnessError : std::runtime_error {
    explicit CFExactnessError(const std::string& what) : std::runtime_error(what) {}
};

/// Closed rational interval [lo, hi]; the basic enclosure used whenever a
/// quantity has no exact rational value (surd bounds, CF coefficients).
struct RatInterval {
    Rational lo, hi;

    RatInterval() = default;
    RatInterval(Rational point) : lo(point), hi(point) {}
    RatInterval(Rational l, Rational h) : lo(l), hi(h) {
        if (hi < lo) throw std::invalid_argument("interval with hi < lo");
    }

    bool is_point() const { return lo == hi; }
    bool contains_zero() const { return lo.sign() <= 0 && hi.sign() >= 0; }
    bool strictly_positive() const { return lo.sign() > 0; }
    bool strictly_negative() const { return hi.sign() < 0; }
    Rational width() const { return hi - lo; }

    RatInterval operator-() const { return {-hi, -lo}; }
    RatInterval operator+(const RatInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    RatInterval operator-(const RatInterval& o) const { return *this + (-o); }

    RatInterval operator*(const RatInterval& o) const {
        Rational c[4] = {lo * o.lo, lo * o.hi, hi * o.lo, hi * o.hi};
        Rational mn = c[0], mx = c[0];
        for (int i = 1; i < 4; ++i) {
            if (c[i] < mn) mn = c[i];
            if (mx < c[i]) mx = c[i];
        }
        return {mn, mx};
    }

    RatInterval square() const {
        if (lo.sign() >= 0) return {lo * lo, hi * hi};
        if (hi.sign() <= 0) return {hi * hi, lo * lo};
        Rational l2 = lo * lo, h2 = hi * hi;
        return {Rational(0), l2 < h2 ? h2 : l2};
    }

    /// Upper bound for |x| over the interval.
    Rational abs_upper() const {
        Rational a = lo.abs(), b = hi.abs();
        return a < b ? b : a;
    }

    /// Outward rounding onto the grid 2^-bits * Z. Caps denominator growth
    /// so that powers of deep continued-fraction enclosures stay in range.
    RatInterval coarsen(int bits = 40) const {
        Int128 scale = Int128(1) << bits;
        auto floor_scaled = [&](const Rational& r) {
            Int128 n = checked_mul(r.num(), scale);
            Int128 q = n / r.den();
            if (n % r.den() != 0 && n < 0) --q;
            return Rational(q, scale);
        };
        Rational lo2 = floor_scaled(lo);
        Rational hi2 = floor_scaled(hi);
        if (hi2 < hi) hi2 += Rational(1, scale);
        return {lo2, hi2};
    }
};

/// Rational enclosure of sqrt(d) with denominator 2^40.
inline RatInterval sqrt_enclosure(std::int64_t d) {
    if (d < 0) throw std::domain_error("sqrt of negative radicand");
    Int128 scale = Int128(1) << 40;
    Int128 s = isqrt128(Int128(d) * scale * scale);
    return {Rational(s, scale), Rational(s + 1, scale)};
}

inline void check_square_free(std::int64_t d) {
    if (d < 0) throw std::invalid_argument("negative radicand");
    for (std::int64_t f = 2; f * f <= d; ++f)
        if (d % (f * f) == 0) throw std::invalid_argument("radicand is not square-free");
}

/// Continued fraction [a0; a1, a2, ...] given by a finite prefix of its
/// quotients. The represented number is only known to lie between the last
/// two convergents; all exact arithmetic on it is refused.
struct ContinuedFraction {
    std::vector<std::int64_t> quotients;

    explicit ContinuedFraction(std::vector<std::int64_t> q) : quotients(std::move(q)) {
        if (quotients.size() < 2) throw std::invalid_argument("continued fraction needs at least two quotients");
        if (quotients[0] < 0) throw std::invalid_argument("continued fraction with negative leading quotient");
        for (size_t i = 1; i < quotients.size(); ++i)
            if (quotients[i] < 1) throw std::invalid_argument("continued fraction quotients must be positive");
        auto conv = convergents();
        Rational a = conv[conv.size() - 2], b = conv[conv.size() - 1];
        enc_ = a < b ? RatInterval(a, b) : RatInterval(b, a);
    }

    /// Convergents h_k/q_k for k = 0..n via the standard recurrence.
    std::vector<Rational> convergents() const {
        std::vector<Rational> out;
        Int128 h0 = 1, h1 = quotients[0];
        Int128 q0 = 0, q1 = 1;
        out.push_back(Rational(h1, q1));
        for (size_t i = 1; i < quotients.size(); ++i) {
            Int128 h2 = checked_add(checked_mul(quotients[i], h1), h0);
            Int128 q2 = checked_add(checked_mul(quotients[i], q1), q0);
            out.push_back(Rational(h2, q2));
            h0 = h1;
            h1 = h2;
            q0 = q1;
            q1 = q2;
        }
        return out;
    }

    /// The value lies strictly between the last two convergents; cached, the
    /// row scans ask for it once per slot.
    const RatInterval& enclosure() const { return enc_; }

    double to_double() const { return enclosure().lo.to_double(); }

    bool operator==(const ContinuedFraction& o) const { return quotients == o.quotients; }

private:
    RatInterval enc_;
};

/// Element of the real quadratic field Q(sqrt(D)): value rat + surd*sqrt(D)
/// with D square-free. D = 0 marks a plain rational. Alternatively the value
/// may be a continued-fraction descriptor (vector-field coefficients only);
/// in that state field arithmetic throws CFExactnessError and the value is
/// handled through its interval enclosure.
class ExactReal {
public:
    ExactReal() : rat_(0), surd_(0), d_(0) {}
    ExactReal(Rational r) : rat_(r), surd_(0), d_(0) {}
    ExactReal(Int128 n) : rat_(n), surd_(0), d_(0) {}
    ExactReal(int n) : rat_(n), surd_(0), d_(0) {}

    ExactReal(Rational rat, Rational surd, std::int64_t d) : rat_(rat), surd_(surd), d_(d) {
        if (d <= 1) {
            if (d < 0) throw std::invalid_argument("negative radicand");
            if (d == 1) rat_ += surd_;
            surd_ = Rational(0);
            d_ = 0;
        } else if (surd_.is_zero()) {
            d_ = 0;
        } else {
            check_square_free(d);
        }
    }

    static ExactReal continued_fraction(std::vector<std::int64_t> quotients) {
        ExactReal x;
        x.cf_.emplace(std::move(quotients));
        return x;
    }

    bool is_cf() const { return cf_.has_value(); }
    const ContinuedFraction& cf() const {
        if (!cf_) throw std::logic_error("not a continued-fraction value");
        return *cf_;
    }

    Rational rat() const { return require_exact("rat part"), rat_; }
    Rational surd() const { return require_exact("surd part"), surd_; }
    std::int64_t radicand() const { return require_exact("radicand"), d_; }
    bool is_rational() const { return !cf_ && surd_.is_zero(); }

    bool is_zero() const { return !cf_ && rat_.is_zero() && surd_.is_zero(); }

    ExactReal operator-() const {
        require_exact("negation");
        ExactReal r = *this;
        r.rat_ = -r.rat_;
        r.surd_ = -r.surd_;
        return r;
    }

    ExactReal operator+(const ExactReal& o) const {
        std::int64_t d = merged_radicand(o, "addition");
        return ExactReal(rat_ + o.rat_, surd_ + o.surd_, d);
    }
    ExactReal operator-(const ExactReal& o) const { return *this + (-o); }

    ExactReal operator*(const ExactReal& o) const {
        std::int64_t d = merged_radicand(o, "multiplication");
        // (a + b sqrt(D))(c + e sqrt(D)) = ac + beD + (ae + bc) sqrt(D)
        Rational rp = rat_ * o.rat_;
        if (!surd_.is_zero() && !o.surd_.is_zero()) rp += surd_ * o.surd_ * Rational(d);
        Rational sp(0);
        if (!o.surd_.is_zero()) sp += rat_ * o.surd_;
        if (!surd_.is_zero()) sp += surd_ * o.rat_;
        return ExactReal(rp, sp, d);
    }

    ExactReal operator/(const ExactReal& o) const {
        if (o.is_zero()) throw std::domain_error("division by zero ExactReal");
        std::int64_t d = merged_radicand(o, "division");
        if (o.surd_.is_zero()) return ExactReal(rat_ / o.rat_, surd_ / o.rat_, d);
        // Multiply by the surd conjugate; the norm c^2 - e^2 D is nonzero
        // because D is square-free and o != 0.
        Rational norm = o.rat_ * o.rat_ - o.surd_ * o.surd_ * Rational(d);
        ExactReal conj(o.rat_ / norm, -o.surd_ / norm, d);
        return *this * conj;
    }

    ExactReal& operator+=(const ExactReal& o) { return *this = *this + o; }
    ExactReal& operator-=(const ExactReal& o) { return *this = *this - o; }
    ExactReal& operator*=(const ExactReal& o) { return *this = *this * o; }
    ExactReal& operator/=(const ExactReal& o) { return *this = *this / o; }

    bool operator==(const ExactReal& o) const {
        if (cf_ || o.cf_) return cf_ && o.cf_ && *cf_ == *o.cf_;
        if (surd_.is_zero() != o.surd_.is_zero()) return false;
        return rat_ == o.rat_ && surd_ == o.surd_ && (surd_.is_zero() || d_ == o.d_);
    }
    bool operator!=(const ExactReal& o) const { return !(*this == o); }

    /// Exact sign of rat + surd*sqrt(D).
    int sign() const {
        if (cf_) {
            auto enc = cf_->enclosure();
            if (enc.strictly_positive()) return 1;
            if (enc.strictly_negative()) return -1;
            throw CFExactnessError("sign of continued fraction straddling zero");
        }
        if (surd_.is_zero()) return rat_.sign();
        if (rat_.is_zero()) return surd_.sign();
        int sr = rat_.sign(), ss = surd_.sign();
        if (sr == ss) return sr;
        // Opposite signs: compare rat^2 against surd^2 * D.
        Rational r2 = rat_ * rat_, s2d = surd_ * surd_ * Rational(d_);
        if (r2 == s2d) return 0;
        return r2 > s2d ? sr : ss;
    }

    bool operator<(const ExactReal& o) const { return (*this - o).sign() < 0; }
    bool operator<=(const ExactReal& o) const { return (*this - o).sign() <= 0; }
    bool operator>(const ExactReal& o) const { return (*this - o).sign() > 0; }
    bool operator>=(const ExactReal& o) const { return (*this - o).sign() >= 0; }

    ExactReal abs() const { return sign() < 0 ? -*this : *this; }

    RatInterval to_interval() const {
        if (cf_) return cf_->enclosure();
        if (surd_.is_zero()) return RatInterval(rat_);
        RatInterval root = sqrt_enclosure(d_);
        return RatInterval(rat_) + RatInterval(surd_) * root;
    }

    double to_double() const {
        if (cf_) return cf_->to_double();
        return rat_.to_double() + surd_.to_double() * std::sqrt(double(d_));
    }

    std::string to_string() const {
        if (cf_) {
            std::string s = "cf[";
            for (size_t i = 0; i < cf_->quotients.size(); ++i)
                s += (i ? "," : "") + std::to_string(cf_->quotients[i]);
            return s + "]";
        }
        if (surd_.is_zero()) return rat_.to_string();
        std::string s = rat_.to_string();
        s += surd_.sign() < 0 ? "-" : "+";
        s += surd_.abs().to_string() + "*sqrt(" + std::to_string(d_) + ")";
        return s;
    }

private:
    void require_exact(const char* op) const {
        if (cf_) throw CFExactnessError(std::string("continued-fraction value has no exact ") + op);
    }
    std::int64_t merged_radicand(const ExactReal& o, const char* op) const {
        require_exact(op);
        o.require_exact(op);
        if (surd_.is_zero()) return o.d_;
        if (o.surd_.is_zero()) return d_;
        if (d_ != o.d_) throw std::domain_error("mixed radicands in ExactReal arithmetic");
        return d_;
    }

    Rational rat_, surd_;
    std::int64_t d_;
    std::optional<ContinuedFraction> cf_;
};

inline ExactReal operator*(const Rational& r, const ExactReal& x) { return ExactReal(r) * x; }

/// Complex number with ExactReal components.
struct ExactComplex {
    ExactReal re, im;

    ExactComplex() = default;
    ExactComplex(ExactReal r) : re(std::move(r)) {}
    ExactComplex(ExactReal r, ExactReal i) : re(std::move(r)), im(std::move(i)) {}
    ExactComplex(int r) : re(r) {}

    static ExactComplex i() { return {ExactReal(0), ExactReal(1)}; }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    bool is_real() const { return im.is_zero(); }

    ExactComplex conj() const { return {re, -im}; }
    ExactComplex operator-() const { return {-re, -im}; }

    ExactComplex operator+(const ExactComplex& o) const { return {re + o.re, im + o.im}; }
    ExactComplex operator-(const ExactComplex& o) const { return {re - o.re, im - o.im}; }
    ExactComplex operator*(const ExactComplex& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    ExactComplex operator/(const ExactComplex& o) const {
        ExactReal n = o.norm_squared();
        if (n.is_zero()) throw std::domain_error("division by zero ExactComplex");
        ExactComplex num = *this * o.conj();
        return {num.re / n, num.im / n};
    }

    ExactComplex& operator+=(const ExactComplex& o) { return *this = *this + o; }
    ExactComplex& operator-=(const ExactComplex& o) { return *this = *this - o; }
    ExactComplex& operator*=(const ExactComplex& o) { return *this = *this * o; }

    bool operator==(const ExactComplex& o) const { return re == o.re && im == o.im; }
    bool operator!=(const ExactComplex& o) const { return !(*this == o); }

    ExactReal norm_squared() const { return re * re + im * im; }

    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

    std::string to_string() const { return "(" + re.to_string() + ", " + im.to_string() + ")"; }
};

inline ExactComplex operator*(const ExactReal& r, const ExactComplex& z) {
    return ExactComplex(r) * z;
}

} // namespace vekua
