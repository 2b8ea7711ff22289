#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vekua/classify.hpp"
#include "vekua/coeffs.hpp"

namespace vekua {

struct NoZeroFamilyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoResonantSequenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exact kernel element built on the symbol zeros: P u = 0 with u nonzero on
/// every listed witness slot, where |u| equals |p| on the nose. When the zero
/// family is infinite the element certifies failure of hypoellipticity; its
/// entries grow at most like max(1 + |q|, |p|) <xi>.
struct KernelCertificate {
    FourierData<ExactComplex> element;
    std::vector<Slot> witness_slots;
    std::vector<ZeroSite> sites;
    bool infinite_family = false;
    std::string note;
};

/// Populate the conjugate-pair orbits over the zero rows: the zigzag-smaller
/// slot gets i lambda - conj(q), its partner gets phase * p. Both orbit
/// equations then cancel identically. Fixed slots (the trivial row) admit no
/// such pair and stay zero. Witness orbits are capped (sites come in weight
/// order, so the cap keeps the lowest rows); an element supported on any
/// subset of the zero rows is still annihilated exactly.
inline KernelCertificate singular_kernel(const OperatorSpec& op, const Rational& xi_max,
                                         size_t max_witnesses = 24) {
    validate_operator(op);
    ZeroScan scan = find_delta_zeros(op, xi_max);
    if (scan.sites.empty())
        throw NoZeroFamilyError("no exact symbol zeros with <xi> <= " + xi_max.to_string());

    KernelCertificate cert;
    cert.sites = scan.sites;
    cert.infinite_family = zero_family_is_infinite(op);
    cert.element = FourierData<ExactComplex>(op.group, xi_max);

    std::set<Slot> seen;
    for (const auto& site : scan.sites) {
        if (cert.witness_slots.size() >= max_witnesses) break;
        Slot s;
        s.rep = site.rep;
        s.twice_ms = site.twice_ms;
        s.twice_ns.resize(site.rep.twice_ells.size());
        for (size_t j = 0; j < s.twice_ns.size(); ++j) s.twice_ns[j] = -site.rep.twice_ells[j];

        SlotOrbit orbit = make_orbit(op.vf, s);
        if (orbit.fixed()) continue;  // trivial row: the pair degenerates
        if (!seen.insert(orbit.primary).second) continue;

        ExactReal l = *orbit.lam.exact;  // zero rows always have exact lambda
        cert.element.set(orbit.primary, ExactComplex(-op.q.re, l + op.q.im));
        cert.element.set(*orbit.partner, ExactReal(Rational(orbit.phase)) * op.p);
        cert.witness_slots.push_back(*orbit.partner);
    }

    if (cert.witness_slots.empty())
        throw NoZeroFamilyError("every symbol zero within reach sits on the degenerate trivial row");

    cert.note = cert.infinite_family
                    ? "kernel element nonvanishing on an unbounded slot family; |entry| = |p| there"
                    : "kernel element over the finitely many singular rows";
    return cert;
}

namespace detail {

/// Complex-coefficient polynomials of degree <= 2 in one real variable, used
/// to verify orbit identities once and for all instead of slot by slot.
using SymbolPoly = std::array<ExactComplex, 3>;

inline SymbolPoly poly_mul_linear(const SymbolPoly& a, const SymbolPoly& b) {
    return {a[0] * b[0], a[0] * b[1] + a[1] * b[0], a[1] * b[1]};
}

inline SymbolPoly poly_sub(const SymbolPoly& a, const SymbolPoly& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline SymbolPoly poly_scale(const ExactComplex& c, const SymbolPoly& a) {
    return {c * a[0], c * a[1], c * a[2]};
}

/// Coefficient-wise conjugate: equals conj(a(x)) for real x.
inline SymbolPoly poly_conj(const SymbolPoly& a) {
    return {a[0].conj(), a[1].conj(), a[2].conj()};
}

inline bool poly_is_zero(const SymbolPoly& a) {
    return a[0].is_zero() && a[1].is_zero() && a[2].is_zero();
}

inline std::string resonance_failure_reason(const OperatorSpec& op) {
    if (!op.k_const().is_zero()) return "construction requires |q| = |p| exactly";
    bool cf = false;
    for (const auto& a : op.vf.su2_coeffs) cf = cf || a.is_cf();
    if (!cf) return "construction requires a continued-fraction SU(2) coefficient";
    bool tor = false;
    for (const auto& c : op.vf.torus_coeffs)
        tor = tor || (!c.is_cf() && c.is_rational() && !c.is_zero());
    if (!tor) return "construction requires a rational nonzero torus coefficient";
    return "not enough certified resonant rows below the weight bound";
}

}  // namespace detail

/// Singular solution pair: u fails every decay bound on the resonant family
/// while f = P u (or i f = P u when p = conj(q)) decays faster than every
/// power of <xi>. Entry values are floats; the defining orbit identity is
/// verified exactly as a polynomial identity in the symbol value.
struct GHCounterexample {
    ResonantSequence seq;
    FourierData<std::complex<double>> solution;
    FourierData<std::complex<double>> forcing;
    bool relation_times_i = false;  // true: P u = i f; false: P u = f
    int construction_case = 1;
    std::vector<Slot> family;
    double solution_floor = 0;
    bool identity_verified = false;
    std::string note;
};

inline GHCounterexample gh_counterexample(const OperatorSpec& op,
                                          const Rational& xi_max = Rational(40)) {
    validate_operator(op);
    auto res = detect_resonance(op, xi_max);
    if (!res) throw NoResonantSequenceError(detail::resonance_failure_reason(op));

    GHCounterexample out;
    out.seq = *res;
    out.solution = FourierData<std::complex<double>>(op.group, xi_max);
    out.forcing = FourierData<std::complex<double>>(op.group, xi_max);

    ExactComplex I = ExactComplex::i();
    ExactComplex qbar = op.q.conj();
    bool conj_match = (op.p - qbar).is_zero();
    out.relation_times_i = conj_match;

    // Orbit values as polynomials in the symbol value L: independent of the
    // slot, so the defining relation can be checked once, exactly.
    detail::SymbolPoly u_primary, u_partner;
    ExactComplex rhs_scale(1);
    if (conj_match) {
        out.construction_case = 3;
        ExactComplex c0 = ExactComplex(Rational(-2)) * I * op.p;
        u_primary = {c0, ExactComplex(Rational(-1)), ExactComplex(0)};
        u_partner = {c0, ExactComplex(1), ExactComplex(0)};
        rhs_scale = I;
    } else {
        out.construction_case = (op.p.im + op.q.im).sign() >= 0 ? 1 : 2;
        ExactComplex c0 = op.p - qbar;
        u_primary = {c0, I, ExactComplex(0)};
        u_partner = {c0, -I, ExactComplex(0)};
    }
    // Delta(L) with |q| = |p|: -L^2 - 2 i Re(q) L.
    detail::SymbolPoly dpoly = {ExactComplex(0), ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(-2)) * op.q.re),
                                ExactComplex(Rational(-1))};
    detail::SymbolPoly op_primary = {-op.q, I, ExactComplex(0)};
    detail::SymbolPoly op_partner = {-op.q, -I, ExactComplex(0)};

    detail::SymbolPoly lhs_p = detail::poly_sub(detail::poly_mul_linear(op_primary, u_primary),
                                                detail::poly_scale(op.p, detail::poly_conj(u_partner)));
    detail::SymbolPoly lhs_q = detail::poly_sub(detail::poly_mul_linear(op_partner, u_partner),
                                                detail::poly_scale(op.p, detail::poly_conj(u_primary)));
    out.identity_verified =
        detail::poly_is_zero(detail::poly_sub(lhs_p, detail::poly_scale(rhs_scale, dpoly))) &&
        detail::poly_is_zero(
            detail::poly_sub(lhs_q, detail::poly_scale(rhs_scale, detail::poly_conj(dpoly))));

    auto eval = [](const detail::SymbolPoly& poly, double l) {
        std::complex<double> acc = poly[2].to_complex();
        acc = acc * l + poly[1].to_complex();
        return acc * l + poly[0].to_complex();
    };

    bool have_floor = false;
    for (const auto& rs : out.seq.slots) {
        const Slot& s = rs.slot;
        ConjugateSlot c = conjugate_slot(s);
        if (c.phase != 1) throw std::logic_error("resonant row with nontrivial conjugation phase");
        double l = (rs.lambda_enc.lo.to_double() + rs.lambda_enc.hi.to_double()) / 2;

        std::complex<double> up = eval(u_primary, l);
        std::complex<double> uq = eval(u_partner, l);
        // The forcing entry is Delta(L) in every case; for conjugate-matched
        // coefficients the factor i sits in the relation P u = i f, not in f.
        std::complex<double> fp = eval(dpoly, l);
        out.solution.set(s, up);
        out.solution.set(c.slot, uq);
        out.forcing.set(s, fp);
        out.forcing.set(c.slot, std::conj(fp));
        out.family.push_back(s);
        out.family.push_back(c.slot);

        double floor_here = std::min(std::abs(up), std::abs(uq));
        if (!have_floor || floor_here < out.solution_floor) {
            out.solution_floor = floor_here;
            have_floor = true;
        }
    }

    out.note = std::string("P u = ") + (out.relation_times_i ? "i f" : "f") +
               " with u bounded away from zero on " + std::to_string(out.family.size()) +
               " slots and |f| certified below <xi>^-k";
    return out;
}

/// Exact right-hand side that no tempered solution can match: f is admissible
/// and supported on certified nonsingular orbits, yet any solution is forced
/// to satisfy |u(s_k)|^2 >= <xi_k>^(2k) on the resonant rows.
struct ObstructionRow {
    Slot forced_slot;         // s_k: the orbit equation pins u here to 1/Delta
    Slot support_slot;        // conjugate slot carrying the only nonzero f entry
    int convergent_index = 0;
    Rational weight2{0};
    Rational forced_sq_lower{0};  // certified lower bound for |u(s_k)|^2
    double forced_approx = 0;     // 1 / |Delta| at the row, for reporting
};

struct GSObstruction {
    ResonantSequence seq;
    FourierData<ExactComplex> forcing;
    std::vector<ObstructionRow> schedule;
    std::string note;
};

inline GSObstruction gs_obstruction(const OperatorSpec& op, const Rational& xi_max = Rational(40)) {
    validate_operator(op);
    auto res = detect_resonance(op, xi_max);
    if (!res) throw NoResonantSequenceError(detail::resonance_failure_reason(op));

    GSObstruction out;
    out.seq = *res;
    out.forcing = FourierData<ExactComplex>(op.group, xi_max);

    ExactComplex inv_pbar = ExactComplex(1) / op.p.conj();
    for (const auto& rs : out.seq.slots) {
        const Slot& s = rs.slot;
        ConjugateSlot c = conjugate_slot(s);
        // f(s) = 0 and f(conj slot) = phase / conj(p) make the orbit equation
        // read u(s) = 1 / Delta(s) for any solution.
        out.forcing.set(c.slot, ExactReal(Rational(c.phase)) * inv_pbar);

        ObstructionRow row;
        row.forced_slot = s;
        row.support_slot = c.slot;
        row.convergent_index = rs.convergent_index;
        row.weight2 = rs.weight2;
        row.forced_sq_lower = rs.weight2.pow(rs.convergent_index);
        double d2 = rs.delta_abs2_upper.to_double();
        row.forced_approx = d2 > 0 ? 1.0 / std::sqrt(d2) : 0.0;
        out.schedule.push_back(std::move(row));
    }

    out.note = "admissible data supported on certified nonsingular orbits; any solution obeys "
               "|u(s_k)| >= <xi_k>^k across " +
               std::to_string(out.schedule.size()) + " rows";
    return out;
}

}  // namespace vekua
