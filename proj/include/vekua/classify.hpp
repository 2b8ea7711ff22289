#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vekua/vekua_op.hpp"

namespace vekua {

enum class Property { GloballyHypoelliptic, GloballySolvable };
enum class Answer { Yes, No, Inconclusive };

/// What backs a verdict.
///   Margin     - strict coefficient-size inequality between |p| and |q|
///   LatticeGap - certified lower bound for |Delta| on the realized symbol
///                lattice, all quantities rational
///   SurdGap    - same bound with a quadratic surd in the lattice scale or
///                in |q|^2 - |p|^2
///   ZeroFamily - infinite family of exact symbol zeros (kernel witnesses)
///   Resonance  - certified super-polynomially small nonzero divisors
///   Empirical  - scan diagnostics only; certifies nothing
enum class CertKind { None, Margin, LatticeGap, SurdGap, ZeroFamily, Resonance, Empirical };

inline const char* property_name(Property p) {
    return p == Property::GloballyHypoelliptic ? "globally-hypoelliptic" : "globally-solvable";
}

inline const char* answer_name(Answer a) {
    switch (a) {
        case Answer::Yes: return "yes";
        case Answer::No: return "no";
        default: return "inconclusive";
    }
}

inline const char* cert_kind_name(CertKind c) {
    switch (c) {
        case CertKind::Margin: return "margin";
        case CertKind::LatticeGap: return "lattice-gap";
        case CertKind::SurdGap: return "surd-gap";
        case CertKind::ZeroFamily: return "zero-family";
        case CertKind::Resonance: return "resonance";
        case CertKind::Empirical: return "empirical";
        default: return "none";
    }
}

/// A row (rep, 2m) on which Delta vanishes exactly. Delta depends on the
/// column index only through nothing at all, so zeros come in whole rows.
struct ZeroSite {
    RepIndex rep;
    std::vector<std::int64_t> twice_ms;
    Rational weight2;

    std::string to_string() const {
        std::string s = rep.to_string() + " 2m=[";
        for (size_t j = 0; j < twice_ms.size(); ++j) s += (j ? "," : "") + std::to_string(twice_ms[j]);
        return s + "]";
    }
};

struct ZeroScan {
    bool conclusive = true;  // false when some row's Delta could not be decided
    int rows_scanned = 0;
    std::vector<ZeroSite> sites;
};

/// Scan every row with <xi> <= xi_max and record the exact zeros of Delta.
/// Rows whose symbol value is known only through an enclosure that straddles
/// zero make the scan inconclusive but are never reported as zeros.
inline ZeroScan find_delta_zeros(const OperatorSpec& op, const Rational& xi_max) {
    ZeroScan scan;
    DeltaFilter filter(op);
    for (const auto& rep : enumerate_reps(op.group, xi_max)) {
        Rational w2 = weight_squared(rep);
        Slot s;
        s.rep = rep;
        for_each_m(rep, [&](const std::vector<std::int64_t>& m) {
            ++scan.rows_scanned;
            if (filter.certified_nonzero(rep.taus, m)) return;
            s.twice_ms = m;
            s.twice_ns = m;  // lambda ignores the column index
            DeltaEval d = delta(op, s);
            switch (d.zero_status()) {
                case ZeroStatus::Zero: scan.sites.push_back({rep, m, w2}); break;
                case ZeroStatus::Unknown: scan.conclusive = false; break;
                case ZeroStatus::NonZero: break;
            }
        });
    }
    return scan;
}

/// Rank over Q of a 2 x n matrix given as columns.
inline int rational_rank_2xn(std::vector<std::array<Rational, 2>> cols) {
    int rank = 0;
    size_t start = 0;
    for (int row = 0; row < 2; ++row) {
        size_t pivot = start;
        while (pivot < cols.size() && cols[pivot][row].is_zero()) ++pivot;
        if (pivot == cols.size()) continue;
        std::swap(cols[start], cols[pivot]);
        int other = 1 - row;
        Rational ratio = cols[start][other] / cols[start][row];
        for (size_t j = start; j < cols.size(); ++j) cols[j][other] -= ratio * cols[j][row];
        ++rank;
        ++start;
    }
    return rank;
}

/// Whether an exact zero row, once one exists, generates infinitely many.
/// Any SU(2) factor does it by raising the spin while keeping the row index;
/// on a pure torus the zero translates along the integer kernel of the exact
/// coefficient rows (continued-fraction columns are pinned at tau = 0, since
/// an exact zero forces their index to vanish).
inline bool zero_family_is_infinite(const OperatorSpec& op) {
    if (op.group.su2_count >= 1) return true;
    std::vector<std::array<Rational, 2>> cols;
    for (const auto& c : op.vf.torus_coeffs) {
        if (c.is_cf()) continue;
        cols.push_back({c.rat(), c.surd()});
    }
    return (int)cols.size() - rational_rank_2xn(cols) >= 1;
}

/// Certified divisor gap on the realized symbol values. Available when the
/// values lambda form a lattice mu * Z with exact mu: either every vector
/// field coefficient is rational, or the group is a single SU(2) factor with
/// an exact coefficient. The gap lower-bounds |Delta| over every row where
/// Delta != 0, with no truncation.
struct GapCertificate {
    CertKind kind = CertKind::LatticeGap;
    ExactReal step;                       // mu; 0 when the field vanishes
    ExactReal gap;                        // min |Delta| over nonsingular rows
    bool gap_trivial = false;             // no nonsingular rows exist at all
    bool zeros_exist = false;
    bool zeros_infinite = false;
    std::optional<std::int64_t> t_star;   // zeros sit at lambda = +- t_star * mu
    std::string note;
};

inline std::optional<GapCertificate> certify_gap(const OperatorSpec& op) {
    ExactReal mu;
    if (op.vf.all_rational()) {
        // Common denominator of all realized lambda values: torus indices are
        // integers, SU(2) row indices are half-integers.
        Int128 l0 = 1;
        auto fold_den = [&](Int128 den) { l0 = l0 / gcd128(l0, den) * den; };
        for (const auto& c : op.vf.torus_coeffs) fold_den(c.rat().den());
        for (const auto& a : op.vf.su2_coeffs) fold_den(2 * a.rat().den());
        Int128 g = 0;
        for (const auto& c : op.vf.torus_coeffs) g = gcd128(g, abs128((c.rat() * Rational(l0)).num()));
        for (const auto& a : op.vf.su2_coeffs) g = gcd128(g, abs128((a.rat() * Rational(l0, 2)).num()));
        mu = ExactReal(Rational(g, l0));
    } else if (op.group.torus_dim == 0 && op.group.su2_count == 1 && !op.vf.su2_coeffs[0].is_cf()) {
        mu = op.vf.su2_coeffs[0] * ExactReal(Rational(1, 2));
        if (mu.sign() < 0) mu = -mu;
    } else {
        return std::nullopt;
    }

    ExactReal k = op.k_const();
    GapCertificate gc;
    gc.step = mu;
    bool surd = !k.is_rational() || !mu.is_rational();
    gc.kind = surd ? CertKind::SurdGap : CertKind::LatticeGap;

    if (mu.is_zero()) {
        // The field vanishes identically: Delta is the constant |q|^2 - |p|^2.
        if (k.is_zero()) {
            gc.zeros_exist = true;
            gc.zeros_infinite = true;
            gc.gap_trivial = true;
            gc.gap = ExactReal(Rational(0));
            gc.note = "field vanishes and |q| = |p|: every row is singular";
        } else {
            gc.gap = k.abs();
            gc.note = "field vanishes: |Delta| = ||q|^2 - |p|^2| on every row";
        }
        return gc;
    }

    ExactReal mu2 = mu * mu;

    // Rows with lambda^2 = k, if the lattice realizes them.
    ExactReal ratio = k / mu2;
    std::optional<std::int64_t> tstar;
    if (ratio.is_rational() && ratio.sign() >= 0 && ratio.rat().den() == 1) {
        Int128 root = 0;
        if (is_perfect_square(ratio.rat().num(), root)) tstar = (std::int64_t)root;
    }
    gc.t_star = tstar;
    bool req_zero = op.q.re.is_zero();
    gc.zeros_exist = tstar.has_value() && (req_zero || *tstar == 0);
    gc.zeros_infinite =
        gc.zeros_exist && (op.group.su2_count >= 1 || op.group.torus_dim >= 2);

    // Candidate A: distance from k to the nearest other value of lambda^2.
    // lambda^2 is monotone along the lattice, so the scan stops one step past
    // the crossover.
    std::optional<ExactReal> best;
    auto offer = [&](const ExactReal& cand) {
        if (!best || cand < *best) best = cand;
    };
    for (Int128 t = 0;; ++t) {
        if (t > 2000000) throw std::runtime_error("divisor gap scan exceeded its iteration bound");
        ExactReal val = mu2 * ExactReal(Rational(t * t));
        if (!(tstar && *tstar == t)) offer((val - k).abs());
        if (val > k) break;
    }
    // Candidate B: rows with lambda^2 = k but lambda Re q != 0, where Delta
    // is purely imaginary and |Delta| = 2 |lambda| |Re q|.
    if (tstar && *tstar != 0 && !req_zero)
        offer(ExactReal(Rational(2 * Int128(*tstar))) * mu * op.q.re.abs());

    gc.gap = *best;
    if (gc.zeros_exist) {
        gc.note = "singular rows at lambda = ";
        gc.note += (*tstar == 0) ? "0" : ("+-" + (ExactReal(Rational(*tstar)) * mu).to_string());
    }
    return gc;
}

/// Scan diagnostics for verdicts that certify nothing: the smallest nonzero
/// divisor seen, and the exponent fitting it against the scan radius, i.e.
/// M with min |Delta| = xi_max^-M. A divisor that small costs M derivatives
/// when inverting over the scanned ball, so on resonant operators M keeps
/// climbing as the radius grows.
struct EmpiricalDiagnostics {
    Rational scan_xi{0};
    int rows_scanned = 0;
    int exact_zero_rows = 0;
    int undecided_rows = 0;
    double min_abs_delta = 0;
    double fitted_exponent = 0;
};

inline EmpiricalDiagnostics empirical_scan(const OperatorSpec& op, const Rational& xi_max) {
    EmpiricalDiagnostics e;
    e.scan_xi = xi_max;
    DeltaFilter filter(op);
    bool have_min = false;
    for (const auto& rep : enumerate_reps(op.group, xi_max)) {
        Slot s;
        s.rep = rep;
        for_each_m(rep, [&](const std::vector<std::int64_t>& m) {
            ++e.rows_scanned;
            std::complex<double> approx;
            if (!filter.certified_nonzero(rep.taus, m, &approx)) {
                s.twice_ms = m;
                s.twice_ns = m;
                DeltaEval d = delta(op, s);
                ZeroStatus st = d.zero_status();
                if (st == ZeroStatus::Zero) {
                    ++e.exact_zero_rows;
                    return;
                }
                if (st == ZeroStatus::Unknown) ++e.undecided_rows;
                approx = d.to_complex();
            }
            double mag = std::abs(approx);
            if (mag <= 0) return;
            if (!have_min || mag < e.min_abs_delta) {
                e.min_abs_delta = mag;
                have_min = true;
            }
        });
    }
    // Fit the floor against the radius rather than against the weight of the
    // row carrying it: a small divisor repeats on every spin above its rep,
    // so a per-row slope is pinned by whatever shallow row repeats it first.
    double logxi = std::log(xi_max.to_double());
    if (have_min && logxi > 0) e.fitted_exponent = -std::log(e.min_abs_delta) / logxi;
    return e;
}

/// One certified near-resonant row: the divisor is nonzero but smaller than
/// <xi>^-k in modulus, witnessed by interval bounds with exact endpoints.
struct ResonantSlot {
    Slot slot;                  // row m = l on the CF factor, column n = -l
    int convergent_index = 0;   // k
    Rational weight2{0};
    RatInterval lambda_enc;     // excludes zero
    Rational delta_abs2_upper;  // certified |Delta|^2 <= this
    Rational bound_product;     // |Delta|^2 upper * weight2^k, certified <= 1
};

struct ResonantSequence {
    int cf_su2_factor = -1;   // SU(2) factor carrying the continued fraction
    int torus_factor = -1;    // torus factor with rational nonzero coefficient
    std::vector<ResonantSlot> slots;
    std::string note;
};

/// Look for certified super-polynomially small divisors. The construction
/// needs |q| = |p| exactly (so Delta = -lambda^2 - 2 i lambda Re q), one
/// SU(2) coefficient given as a continued fraction alpha, and one torus
/// coefficient with rational nonzero value u/v. Convergents h/m of alpha
/// then give rows tau = -sgn(u) v h, 2l = 2m' = 2|u| m where
/// lambda = |u| (m alpha - h) is tiny but certified nonzero.
inline std::optional<ResonantSequence> detect_resonance(const OperatorSpec& op,
                                                        const Rational& xi_max) {
    if (!op.k_const().is_zero()) return std::nullopt;

    int jcf = -1, itor = -1;
    for (size_t j = 0; j < op.vf.su2_coeffs.size(); ++j)
        if (op.vf.su2_coeffs[j].is_cf()) {
            jcf = (int)j;
            break;
        }
    for (size_t i = 0; i < op.vf.torus_coeffs.size(); ++i) {
        const ExactReal& c = op.vf.torus_coeffs[i];
        if (!c.is_cf() && c.is_rational() && !c.is_zero()) {
            itor = (int)i;
            break;
        }
    }
    if (jcf < 0 || itor < 0) return std::nullopt;

    const ContinuedFraction& cf = op.vf.su2_coeffs[jcf].cf();
    std::vector<Rational> conv = cf.convergents();
    RatInterval alpha = cf.enclosure();
    Rational c = op.vf.torus_coeffs[itor].rat();
    Int128 u = c.num(), v = c.den();
    Int128 au = abs128(u);
    Rational req2_up = (op.q.re * op.q.re).to_interval().hi;
    Rational xi2 = xi_max * xi_max;

    ResonantSequence seq;
    seq.cf_su2_factor = jcf;
    seq.torus_factor = itor;

    // The last two convergents bound alpha itself; rows built from them would
    // put zero on the boundary of the lambda enclosure, so stop short.
    for (size_t k = 1; k + 2 < conv.size(); ++k) {
        Int128 h = conv[k].num(), m = conv[k].den();
        std::int64_t tau;
        std::int64_t twice_m;
        Rational w2;
        try {
            Int128 tau128 = -(u > 0 ? 1 : -1) * checked_mul(v, h);
            Int128 twm128 = 2 * checked_mul(au, m);
            Int128 cap = std::numeric_limits<std::int64_t>::max();
            if (abs128(tau128) > cap || twm128 > cap) break;
            tau = (std::int64_t)tau128;
            twice_m = (std::int64_t)twm128;
            w2 = Rational(1) + Rational(checked_mul(tau128, tau128)) +
                 Rational(checked_mul(twm128, twm128 + 2), 4);
        } catch (const std::overflow_error&) {
            break;
        }
        if (w2 > xi2) break;

        Slot s;
        s.rep.taus.assign(op.group.torus_dim, 0);
        s.rep.twice_ells.assign(op.group.su2_count, 0);
        s.rep.taus[itor] = tau;
        s.rep.twice_ells[jcf] = twice_m;
        s.twice_ms.assign(op.group.su2_count, 0);
        s.twice_ns.assign(op.group.su2_count, 0);
        s.twice_ms[jcf] = twice_m;
        s.twice_ns[jcf] = -twice_m;

        // lambda = c tau + alpha m' = |u| (m alpha - h), via exact cancellation
        // of the rational part against the convergent numerator.
        RatInterval lam =
            RatInterval(Rational(checked_mul(au, m))) * alpha - RatInterval(Rational(checked_mul(au, h)));
        if (lam.contains_zero()) break;

        ResonantSlot rs;
        rs.slot = s;
        rs.convergent_index = (int)k;
        rs.weight2 = w2;
        rs.lambda_enc = lam;
        try {
            RatInterval lam2 = lam.coarsen().square().coarsen();
            Rational l2up = lam2.hi;
            rs.delta_abs2_upper = l2up * l2up + Rational(4) * l2up * req2_up;
            rs.bound_product = rs.delta_abs2_upper * w2.pow((int)k);
        } catch (const std::overflow_error&) {
            break;
        }
        if (rs.bound_product > Rational(1)) break;
        if (w2 < Rational(Int128(k) * Int128(k))) break;
        seq.slots.push_back(std::move(rs));
    }

    if (seq.slots.size() < 3) return std::nullopt;
    seq.note = "divisors certified below <xi>^-k at " + std::to_string(seq.slots.size()) +
               " convergent rows";
    return seq;
}

/// Everything a classification run asserts, including what certifies it.
struct Verdict {
    Property property = Property::GloballyHypoelliptic;
    Answer answer = Answer::Inconclusive;
    int condition = 0;  // 1, 2, 3 when a sufficient condition fired, else 0
    CertKind cert = CertKind::None;
    std::optional<ExactReal> margin;          // condition 1/2: ||p|^2 - |q|^2|
    std::optional<GapCertificate> gap;        // condition 3
    std::vector<ZeroSite> zero_sites;         // exact zeros within the scan radius
    bool infinite_zero_family = false;
    bool asserted_cf_input = false;  // verdict takes the CF prefix at face value
    std::optional<ResonantSequence> resonance;
    std::optional<EmpiricalDiagnostics> empirical;
    std::string note;

    std::string summary() const {
        std::string s = std::string(property_name(property)) + ": " + answer_name(answer);
        if (condition) s += " (condition " + std::to_string(condition) + ")";
        s += " [" + std::string(cert_kind_name(cert)) + "]";
        return s;
    }
};

namespace detail {

inline bool condition1(const OperatorSpec& op, Verdict& v) {
    ExactReal k = op.k_const();
    if (k.sign() >= 0) return false;
    v.answer = Answer::Yes;
    v.condition = 1;
    v.cert = CertKind::Margin;
    v.margin = -k;
    v.note = "|p|^2 - |q|^2 = " + (-k).to_string();
    return true;
}

inline bool condition2(const OperatorSpec& op, Verdict& v) {
    ExactReal k = op.k_const();
    if (k.sign() <= 0 || op.q.re.is_zero()) return false;
    v.answer = Answer::Yes;
    v.condition = 2;
    v.cert = CertKind::Margin;
    v.margin = k;
    v.note = "|q|^2 - |p|^2 = " + k.to_string() + " and Re q = " + op.q.re.to_string() + " != 0";
    return true;
}

}  // namespace detail

/// Decide global hypoellipticity. Complete whenever the realized symbol
/// values form an exact lattice (rational field, or a single SU(2) factor
/// with exact coefficient); otherwise a zero family still refutes, and the
/// rest is reported inconclusive with scan diagnostics.
inline Verdict classify_gh(const OperatorSpec& op, const Rational& xi_max = Rational(50)) {
    validate_operator(op);
    Verdict v;
    v.property = Property::GloballyHypoelliptic;
    if (detail::condition1(op, v)) return v;
    if (detail::condition2(op, v)) return v;

    ZeroScan scan = find_delta_zeros(op, xi_max);
    v.zero_sites = scan.sites;

    if (auto gc = certify_gap(op)) {
        if (gc->zeros_exist && gc->zeros_infinite) {
            v.answer = Answer::No;
            v.cert = CertKind::ZeroFamily;
            v.infinite_zero_family = true;
            v.gap = gc;
            v.note = scan.sites.empty()
                         ? "symbol zeros form an infinite family; first row lies beyond the scan radius"
                         : "symbol zeros form an infinite family; kernel contains non-smooth elements";
            return v;
        }
        v.answer = Answer::Yes;
        v.condition = 3;
        v.cert = gc->kind;
        v.note = gc->zeros_exist
                     ? "divisor gap " + gc->gap.to_string() + " outside finitely many singular rows"
                     : "divisor gap " + gc->gap.to_string() + " on every row";
        v.gap = gc;
        return v;
    }

    if (!scan.sites.empty() && zero_family_is_infinite(op)) {
        v.answer = Answer::No;
        v.cert = CertKind::ZeroFamily;
        v.infinite_zero_family = true;
        v.asserted_cf_input = op.vf.has_cf();
        v.note = "exact symbol zeros recur without bound";
        return v;
    }

    v.answer = Answer::Inconclusive;
    v.cert = CertKind::Empirical;
    v.asserted_cf_input = op.vf.has_cf();
    v.empirical = empirical_scan(op, xi_max);
    v.note = scan.sites.empty() ? "no certified divisor gap and no zero family within the scan radius"
                                : "finitely many exact zeros found; tail behavior uncertified";
    if (!scan.conclusive) v.note += "; some rows undecidable from the given enclosures";
    return v;
}

/// Decide global solvability. A certified divisor gap settles it for every
/// admissible right-hand side; certified resonances refute it for continued
/// fraction data (taking the prefix as the number it describes).
inline Verdict classify_gs(const OperatorSpec& op, const Rational& xi_max = Rational(50)) {
    validate_operator(op);
    Verdict v;
    v.property = Property::GloballySolvable;
    if (detail::condition1(op, v)) return v;
    if (detail::condition2(op, v)) return v;

    if (auto gc = certify_gap(op)) {
        v.answer = Answer::Yes;
        v.condition = 3;
        v.cert = gc->kind;
        if (gc->zeros_exist) {
            ZeroScan scan = find_delta_zeros(op, xi_max);
            v.zero_sites = scan.sites;
            v.infinite_zero_family = gc->zeros_infinite;
            v.note = "solvable for admissible data; " +
                     (gc->gap_trivial
                          ? std::string("every row is singular")
                          : "divisor gap " + gc->gap.to_string() + " outside the singular rows");
        } else {
            v.note = "divisor gap " + gc->gap.to_string() + " on every row";
        }
        v.gap = gc;
        return v;
    }

    if (op.vf.has_cf()) {
        v.asserted_cf_input = true;
        v.empirical = empirical_scan(op, xi_max);
        if (auto res = detect_resonance(op, xi_max)) {
            v.answer = Answer::No;
            v.cert = CertKind::Resonance;
            v.note = "resonant rows force any solution to grow faster than every <xi>^-k bound";
            v.resonance = std::move(res);
            return v;
        }
        v.answer = Answer::Inconclusive;
        v.cert = CertKind::Empirical;
        v.note = "continued-fraction field without a certified resonant sequence in range";
        return v;
    }

    v.answer = Answer::Inconclusive;
    v.cert = CertKind::Empirical;
    v.empirical = empirical_scan(op, xi_max);
    v.note = "no certified divisor gap for this coefficient pattern";
    return v;
}

}  // namespace vekua
