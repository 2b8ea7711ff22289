#pragma once

#include <array>
#include <set>
#include <type_traits>

#include "vekua/coeffs.hpp"

namespace vekua {

/// The operator P u = X u - q u - p conj(u) on its group, with p != 0.
/// Exact coefficient components must all live in one quadratic field.
struct OperatorSpec {
    GroupSpec group;
    VectorFieldSpec vf;
    ExactComplex q, p;

    /// |q|^2 - |p|^2, the constant part of Delta.
    ExactReal k_const() const { return q.norm_squared() - p.norm_squared(); }
};

/// Shared radicand of every exact coefficient component (0 if all rational).
inline std::int64_t operator_radicand(const OperatorSpec& op) {
    std::int64_t d = 0;
    auto fold = [&](const ExactReal& x) {
        if (x.is_cf() || x.is_rational()) return;
        if (d == 0)
            d = x.radicand();
        else if (d != x.radicand())
            throw std::invalid_argument("operator coefficients mix radicands");
    };
    fold(op.q.re);
    fold(op.q.im);
    fold(op.p.re);
    fold(op.p.im);
    for (const auto& c : op.vf.torus_coeffs) fold(c);
    for (const auto& c : op.vf.su2_coeffs) fold(c);
    return d;
}

inline void validate_operator(const OperatorSpec& op) {
    validate_vector_field(op.group, op.vf);
    if (op.p.is_zero()) throw std::invalid_argument("operator requires p != 0");
    if (op.q.re.is_cf() || op.q.im.is_cf() || op.p.re.is_cf() || op.p.im.is_cf())
        throw std::invalid_argument("q and p must be exact (continued fractions are vector-field only)");
    operator_radicand(op);
}

enum class ZeroStatus { Zero, NonZero, Unknown };

/// Delta(slot) = -lambda^2 + |q|^2 - |p|^2 - 2 i lambda Re(q). Exact when
/// lambda is; otherwise known through component enclosures only.
struct DeltaEval {
    std::optional<ExactComplex> exact;
    RatInterval re_enc, im_enc;

    bool is_exact() const { return exact.has_value(); }

    ZeroStatus zero_status() const {
        if (exact) return exact->is_zero() ? ZeroStatus::Zero : ZeroStatus::NonZero;
        if (!re_enc.contains_zero() || !im_enc.contains_zero()) return ZeroStatus::NonZero;
        return ZeroStatus::Unknown;
    }

    std::complex<double> to_complex() const {
        if (exact) return exact->to_complex();
        return {(re_enc.lo.to_double() + re_enc.hi.to_double()) / 2,
                (im_enc.lo.to_double() + im_enc.hi.to_double()) / 2};
    }

    /// Exact upper bound for |Delta|^2, valid in both states. Enclosures are
    /// regridded before squaring so deep denominators cannot overflow.
    Rational abs_squared_upper() const {
        Rational r = re_enc.coarsen().abs_upper(), i = im_enc.coarsen().abs_upper();
        return r * r + i * i;
    }
};

inline DeltaEval delta_from_lambda(const OperatorSpec& op, const LambdaEval& lam) {
    DeltaEval out;
    ExactReal k = op.k_const();
    ExactReal req = op.q.re;
    if (lam.is_exact()) {
        ExactReal l = *lam.exact;
        ExactComplex d(k - l * l, ExactReal(Rational(-2)) * l * req);
        out.exact = d;
        out.re_enc = d.re.to_interval();
        out.im_enc = d.im.to_interval();
    } else {
        // Regrid the enclosure first: convergent denominators square under
        // lambda^2 and would outgrow 128 bits within the scan radius.
        RatInterval lc = lam.enclosure.coarsen();
        out.re_enc = k.to_interval() - lc.square();
        out.im_enc = RatInterval(Rational(-2)) * req.to_interval() * lc;
    }
    return out;
}

inline DeltaEval delta(const OperatorSpec& op, const Slot& slot) {
    return delta_from_lambda(op, lambda(op.vf, slot));
}

/// Floating-point prefilter for Delta != 0 over full row scans. Every value
/// carries a first-order absolute error bound fat enough to absorb rounding
/// and the coefficient enclosure widths, so a pass certifies the row is
/// nonsingular; anything near zero falls back to exact evaluation.
class DeltaFilter {
public:
    explicit DeltaFilter(const OperatorSpec& op) {
        for (const auto& c : op.vf.torus_coeffs) torus_.push_back(from_exact(c));
        for (const auto& a : op.vf.su2_coeffs) su2_.push_back(from_exact(a));
        k_ = from_exact(op.k_const());
        rq_ = from_exact(op.q.re);
    }

    /// Certify Delta != 0 on the row (taus, twice_ms); on success *approx
    /// receives the approximate value for diagnostics.
    bool certified_nonzero(const std::vector<std::int64_t>& taus,
                           const std::vector<std::int64_t>& twice_ms,
                           std::complex<double>* approx = nullptr) const {
        double lam = 0, lerr = 0, mag = 0;
        for (size_t i = 0; i < torus_.size(); ++i) {
            double t = torus_[i].val * (double)taus[i];
            lam += t;
            mag += std::abs(t);
            lerr += torus_[i].err * std::abs((double)taus[i]);
        }
        for (size_t j = 0; j < su2_.size(); ++j) {
            double t = su2_[j].val * (0.5 * (double)twice_ms[j]);
            lam += t;
            mag += std::abs(t);
            lerr += su2_[j].err * std::abs(0.5 * (double)twice_ms[j]);
        }
        lerr += (mag + 1.0) * kSlack;
        double l2 = lam * lam;
        double l2err = 2 * std::abs(lam) * lerr + lerr * lerr + (l2 + 1.0) * kSlack;
        double re = k_.val - l2;
        double re_err = k_.err + l2err + (std::abs(re) + 1.0) * kSlack;
        double im = -2 * lam * rq_.val;
        double im_err = 2 * (std::abs(lam) * rq_.err + lerr * std::abs(rq_.val) + lerr * rq_.err) +
                        (std::abs(im) + 1.0) * kSlack;
        if (std::abs(re) <= re_err && std::abs(im) <= im_err) return false;
        if (approx) *approx = {re, im};
        return true;
    }

private:
    struct Term {
        double val = 0, err = 0;
    };

    // Doubled slack over the 2^-53 unit roundoff, applied per aggregate.
    static constexpr double kSlack = 1e-13;

    static Term from_exact(const ExactReal& x) {
        RatInterval e = x.to_interval();
        double lo = e.lo.to_double(), hi = e.hi.to_double();
        Term t;
        t.val = 0.5 * (lo + hi);
        t.err = (hi - lo) + (std::abs(t.val) + 1.0) * kSlack;
        return t;
    }

    std::vector<Term> torus_, su2_;
    Term k_, rq_;
};

/// One orbit of the slot involution: either a fixed slot (all indices zero
/// in the conjugation sense) or a conjugate pair {primary, partner} with
/// primary the zigzag-smaller side. phase is the conjugation sign of the
/// orbit, +1 on fixed slots.
struct SlotOrbit {
    Slot primary;
    std::optional<Slot> partner;
    int phase = 1;
    LambdaEval lam;
    Rational weight2;

    bool fixed() const { return !partner.has_value(); }
};

inline SlotOrbit make_orbit(const VectorFieldSpec& vf, const Slot& s) {
    SlotOrbit orbit;
    ConjugateSlot c = conjugate_slot(s);
    if (c.slot == s) {
        orbit.primary = s;
    } else if (slot_zigzag_less(s, c.slot)) {
        orbit.primary = s;
        orbit.partner = c.slot;
    } else {
        orbit.primary = c.slot;
        orbit.partner = s;
    }
    orbit.phase = c.phase;
    orbit.lam = lambda(vf, orbit.primary);
    orbit.weight2 = weight_squared(s.rep);
    return orbit;
}

/// All orbits with <xi> <= xi_max, each conjugate pair listed once, in
/// deterministic (rep, row, column) enumeration order of the primary side.
inline std::vector<SlotOrbit> slot_orbits(const GroupSpec& group, const VectorFieldSpec& vf,
                                          const Rational& xi_max) {
    std::vector<SlotOrbit> out;
    for (const auto& rep : enumerate_reps(group, xi_max)) {
        Slot s;
        s.rep = rep;
        for_each_m(rep, [&](const std::vector<std::int64_t>& m) {
            s.twice_ms = m;
            for_each_m(rep, [&](const std::vector<std::int64_t>& n) {
                s.twice_ns = n;
                ConjugateSlot c = conjugate_slot(s);
                if (c.slot == s || slot_zigzag_less(s, c.slot)) out.push_back(make_orbit(vf, s));
            });
        });
    }
    return out;
}

/// Fourier-side action of P: out(s) = (i lambda(s) - q) u(s)
///                                    - p phase(s) conj(u(conj slot of s)).
/// Exact mode requires an exact lambda on every touched slot.
template <typename Scalar>
FourierData<Scalar> apply(const OperatorSpec& op, const FourierData<Scalar>& u) {
    constexpr bool exact_mode = std::is_same_v<Scalar, ExactComplex>;
    if (u.group() != op.group) throw std::invalid_argument("data group does not match operator group");

    std::set<RepIndex> reps;
    for (const auto& [rep, block] : u.blocks()) {
        reps.insert(rep);
        reps.insert(conjugate_rep(rep));
    }

    FourierData<Scalar> out(u.group(), u.xi_max());
    const std::complex<double> qf = op.q.to_complex(), pf = op.p.to_complex();

    for (const auto& rep : reps) {
        RepIndex crep = conjugate_rep(rep);
        const RepBlock<Scalar>* ub = u.has_rep(rep) ? &u.blocks().at(rep) : nullptr;
        const RepBlock<Scalar>* cb = u.has_rep(crep) ? &u.blocks().at(crep) : nullptr;
        if (!ub && !cb) continue;

        auto& ob = out.ensure_block(rep);
        Slot s;
        s.rep = rep;

        for_each_m(rep, [&](const std::vector<std::int64_t>& m) {
            s.twice_ms = m;
            s.twice_ns = m;
            LambdaEval lam = lambda(op.vf, s);

            std::vector<std::int64_t> neg_m(m.size());
            std::int64_t sm = 0;
            for (size_t j = 0; j < m.size(); ++j) {
                neg_m[j] = -m[j];
                sm += m[j];
            }
            std::int64_t row = flat_index(rep, m);
            std::int64_t crow = flat_index(crep, neg_m);

            if constexpr (exact_mode) {
                if (!lam.is_exact())
                    throw CFExactnessError("exact apply needs an exact symbol at " + s.to_string());
                ExactComplex ilmq(-op.q.re, *lam.exact - op.q.im);
                for_each_m(rep, [&](const std::vector<std::int64_t>& n) {
                    std::int64_t sn = 0;
                    std::vector<std::int64_t> neg_n(n.size());
                    for (size_t j = 0; j < n.size(); ++j) {
                        neg_n[j] = -n[j];
                        sn += n[j];
                    }
                    std::int64_t col = flat_index(rep, n);
                    ExactComplex val = ub ? ilmq * ub->at(row, col) : ExactComplex();
                    if (cb) {
                        ExactComplex cval = cb->at(crow, flat_index(crep, neg_n)).conj();
                        if (((sm - sn) / 2) & 1) cval = -cval;
                        val -= op.p * cval;
                    }
                    ob.at(row, col) = val;
                });
            } else {
                std::complex<double> ilmq = std::complex<double>(0, lam.to_double()) - qf;
                for_each_m(rep, [&](const std::vector<std::int64_t>& n) {
                    std::int64_t sn = 0;
                    std::vector<std::int64_t> neg_n(n.size());
                    for (size_t j = 0; j < n.size(); ++j) {
                        neg_n[j] = -n[j];
                        sn += n[j];
                    }
                    std::int64_t col = flat_index(rep, n);
                    std::complex<double> val = ub ? ilmq * ub->at(row, col) : std::complex<double>();
                    if (cb) {
                        std::complex<double> cval = std::conj(cb->at(crow, flat_index(crep, neg_n)));
                        if (((sm - sn) / 2) & 1) cval = -cval;
                        val -= pf * cval;
                    }
                    ob.at(row, col) = val;
                });
            }
        });
    }
    return out;
}

/// The linear system P induces on one orbit.
///
/// Paired orbit, unknowns (a, B) = (u(primary), conj(u(partner))):
///   [ i lam - q        -p phase   ] [a]   [ f(primary)       ]
///   [ -conj(p) phase   i lam - conj(q) ] [B] = [ conj(f(partner)) ]
/// with determinant exactly Delta(primary).
///
/// Fixed orbit, unknowns (Re a, Im a), real 2x2 with determinant |q|^2-|p|^2.
struct OrbitSystem {
    bool paired = false;
    DeltaEval delta;
    std::array<ExactComplex, 4> cmat;
    std::array<ExactReal, 4> rmat;
};

inline OrbitSystem orbit_system(const OperatorSpec& op, const SlotOrbit& orbit) {
    OrbitSystem sys;
    sys.paired = !orbit.fixed();
    sys.delta = delta_from_lambda(op, orbit.lam);
    if (sys.paired) {
        if (!orbit.lam.is_exact())
            throw CFExactnessError("orbit system needs an exact symbol at " + orbit.primary.to_string());
        ExactReal l = *orbit.lam.exact;
        ExactReal eps(orbit.phase);
        sys.cmat[0] = ExactComplex(-op.q.re, l - op.q.im);
        sys.cmat[1] = -(eps * op.p);
        sys.cmat[2] = -(eps * op.p.conj());
        sys.cmat[3] = ExactComplex(-op.q.re, l + op.q.im);
    } else {
        // -q a - p conj(a) = f over (Re a, Im a)
        sys.rmat[0] = -(op.q.re + op.p.re);
        sys.rmat[1] = op.q.im - op.p.im;
        sys.rmat[2] = -(op.q.im + op.p.im);
        sys.rmat[3] = op.p.re - op.q.re;
    }
    return sys;
}

} // namespace vekua
