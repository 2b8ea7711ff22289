#pragma once

#include "vekua/vekua_op.hpp"

namespace vekua {

enum class AdmissibilityStatus { Admissible, NotAdmissible, Undecidable };

struct AdmissibilityViolation {
    Slot slot;
    std::string residual;
};

struct AdmissibilityReport {
    AdmissibilityStatus status = AdmissibilityStatus::Admissible;
    std::vector<AdmissibilityViolation> violations;
    std::string note;

    bool ok() const { return status == AdmissibilityStatus::Admissible; }
};

struct NotAdmissibleError : std::runtime_error {
    AdmissibilityReport report;
    explicit NotAdmissibleError(AdmissibilityReport r)
        : std::runtime_error("right-hand side is not admissible (" +
                             std::to_string(r.violations.size()) + " violating orbit(s))"),
          report(std::move(r)) {}
};

struct CFZeroUndecidableError : std::runtime_error {
    explicit CFZeroUndecidableError(const std::string& what) : std::runtime_error(what) {}
};

struct FloatPrecisionError : std::runtime_error {
    explicit FloatPrecisionError(const std::string& what) : std::runtime_error(what) {}
};

struct SolveOptions {
    double float_tol = 1e-10;
    /// Exact lower bound for |Delta| on nonzero orbits, e.g. from a
    /// condition-3 certificate; waives the float-mode small-divisor refusal.
    std::optional<double> certified_gap;
};

namespace detail {

/// Visits each orbit meeting the support of f once. The callback receives
/// the primary slot, the partner slot (equal to the primary on fixed slots),
/// the conjugation phase, the symbol, Delta, and the two rhs values
/// (f at primary, f at partner).
template <typename Scalar, typename F>
void for_each_support_orbit(const OperatorSpec& op, const FourierData<Scalar>& f, F&& fn) {
    std::set<RepIndex> seen;
    std::vector<RepIndex> roots;
    for (const auto& [rep, block] : f.blocks()) {
        roots.push_back(rep);
        roots.push_back(conjugate_rep(rep));
    }

    for (const auto& rep0 : roots) {
        if (seen.count(rep0)) continue;
        RepIndex crep0 = conjugate_rep(rep0);
        seen.insert(rep0);
        seen.insert(crep0);

        bool self_pair = crep0 == rep0;
        // On a non-self-conjugate rep pair, every slot of the zigzag-smaller
        // side is primary; tau indices decide.
        RepIndex pr = rep0;
        if (!self_pair) {
            Slot a, b;
            a.rep = rep0;
            b.rep = crep0;
            if (!slot_zigzag_less(a, b)) pr = crep0;
        }
        RepIndex cpr = conjugate_rep(pr);

        const RepBlock<Scalar>* fb = f.has_rep(pr) ? &f.blocks().at(pr) : nullptr;
        const RepBlock<Scalar>* fcb = f.has_rep(cpr) ? &f.blocks().at(cpr) : nullptr;
        if (!fb && !fcb) continue;

        Slot s;
        s.rep = pr;
        for_each_m(pr, [&](const std::vector<std::int64_t>& m) {
            s.twice_ms = m;
            s.twice_ns = m;
            LambdaEval lam = lambda(op.vf, s);
            DeltaEval del = delta_from_lambda(op, lam);

            std::vector<std::int64_t> neg_m(m.size());
            std::int64_t sm = 0;
            for (size_t j = 0; j < m.size(); ++j) {
                neg_m[j] = -m[j];
                sm += m[j];
            }
            std::int64_t row = flat_index(pr, m);
            std::int64_t crow = flat_index(cpr, neg_m);

            Slot t = s;
            for_each_m(pr, [&](const std::vector<std::int64_t>& n) {
                t.twice_ms = m;
                t.twice_ns = n;
                std::vector<std::int64_t> neg_n(n.size());
                std::int64_t sn = 0;
                for (size_t j = 0; j < n.size(); ++j) {
                    neg_n[j] = -n[j];
                    sn += n[j];
                }

                Slot partner;
                partner.rep = cpr;
                partner.twice_ms = neg_m;
                partner.twice_ns = neg_n;
                bool fixed = self_pair && t == partner;
                if (self_pair && !fixed && !slot_zigzag_less(t, partner)) return;

                int phase = (((sm - sn) / 2) & 1) ? -1 : 1;
                std::int64_t col = flat_index(pr, n);
                Scalar f1 = fb ? fb->at(row, col) : Scalar{};
                Scalar f2 = fixed ? f1
                                  : (fcb ? fcb->at(crow, flat_index(cpr, neg_n)) : Scalar{});
                fn(t, partner, fixed, phase, lam, del, f1, f2);
            });
        });
    }
}

inline ExactComplex i_lambda_minus(const ExactReal& l, const ExactComplex& z) {
    return ExactComplex(-z.re, l - z.im);
}

template <typename Scalar>
std::string render_value(const Scalar& v) {
    if constexpr (std::is_same_v<Scalar, ExactComplex>) {
        return v.to_string();
    } else {
        return "(" + std::to_string(v.real()) + ", " + std::to_string(v.imag()) + ")";
    }
}

} // namespace detail

/// Checks the compatibility conditions: on every orbit where Delta vanishes,
/// (i lambda - conj(q)) f(s) + p phase conj(f(partner)) must be zero. Float
/// mode compares against float_tol times the orbit scale. Orbits whose Delta
/// cannot be decided (CF symbol) make the report Undecidable unless the rhs
/// vanishes there.
template <typename Scalar>
AdmissibilityReport check_admissible(const OperatorSpec& op, const FourierData<Scalar>& f,
                                     double float_tol = 1e-10) {
    constexpr bool exact_mode = std::is_same_v<Scalar, ExactComplex>;
    if (f.group() != op.group) throw std::invalid_argument("data group does not match operator group");
    AdmissibilityReport report;

    detail::for_each_support_orbit(op, f, [&](const Slot& s, const Slot&, bool, int phase,
                                              const LambdaEval& lam, const DeltaEval& del,
                                              const Scalar& f1, const Scalar& f2) {
        ZeroStatus zs = del.zero_status();
        if (zs == ZeroStatus::NonZero) return;
        bool have_data = !scalar_is_zero(f1) || !scalar_is_zero(f2);
        if (zs == ZeroStatus::Unknown) {
            if (have_data) {
                report.status = AdmissibilityStatus::Undecidable;
                report.note = "Delta undecidable on populated orbit at " + s.to_string();
            }
            return;
        }
        if (!have_data) return;

        if constexpr (exact_mode) {
            ExactComplex r = detail::i_lambda_minus(*lam.exact, op.q.conj()) * f1;
            ExactComplex pc = op.p * f2.conj();
            r = phase > 0 ? r + pc : r - pc;
            if (!r.is_zero()) {
                report.status = AdmissibilityStatus::NotAdmissible;
                report.violations.push_back({s, detail::render_value(r)});
            }
        } else {
            std::complex<double> ilmq = std::complex<double>(0, lam.to_double()) - std::conj(op.q.to_complex());
            std::complex<double> r = ilmq * f1 + op.p.to_complex() * double(phase) * std::conj(f2);
            double scale = std::max({1.0, std::abs(f1), std::abs(f2)});
            if (std::abs(r) > float_tol * scale) {
                report.status = AdmissibilityStatus::NotAdmissible;
                report.violations.push_back({s, detail::render_value(r)});
            }
        }
    });
    return report;
}

/// Solves P u = f orbit by orbit.
///
/// Nonsingular orbits invert the 2x2 orbit system; the determinant is
/// exactly Delta. Singular paired orbits take the canonical branch: the
/// zigzag-smaller slot gets 0 and the partner carries
/// -phase conj(f(primary)) / conj(p). Singular fixed slots get
/// -f / (2 q). Float mode refuses a nonzero |Delta| below 1000 ulps of the
/// orbit scale unless a certified gap accompanies the call.
template <typename Scalar>
FourierData<Scalar> solve(const OperatorSpec& op, const FourierData<Scalar>& f,
                          const SolveOptions& opts = {}) {
    constexpr bool exact_mode = std::is_same_v<Scalar, ExactComplex>;

    AdmissibilityReport adm = check_admissible(op, f, opts.float_tol);
    if (adm.status == AdmissibilityStatus::NotAdmissible) throw NotAdmissibleError(std::move(adm));
    if (adm.status == AdmissibilityStatus::Undecidable) throw CFZeroUndecidableError(adm.note);

    FourierData<Scalar> u(f.group(), f.xi_max());

    detail::for_each_support_orbit(op, f, [&](const Slot& s, const Slot& partner, bool fixed,
                                              int phase, const LambdaEval& lam, const DeltaEval& del,
                                              const Scalar& f1, const Scalar& f2) {
        if (scalar_is_zero(f1) && scalar_is_zero(f2)) return;
        ZeroStatus zs = del.zero_status();
        if (zs == ZeroStatus::Unknown)
            throw CFZeroUndecidableError("Delta undecidable on populated orbit at " + s.to_string());

        if constexpr (exact_mode) {
            // A row can be certified nonsingular through a CF enclosure alone;
            // inverting it still needs the symbol value itself.
            if (!lam.is_exact())
                throw CFExactnessError("exact solve needs an exact symbol at " + s.to_string());
            ExactReal l = *lam.exact;
            ExactReal eps(phase);
            if (zs == ZeroStatus::Zero) {
                if (fixed) {
                    u.set(s, -(f1 / (ExactComplex(2) * op.q)));
                } else {
                    u.set(s, ExactComplex());
                    u.set(partner, -(eps * (f1.conj() / op.p.conj())));
                }
                return;
            }
            ExactComplex d = *del.exact;
            if (fixed) {
                ExactComplex num = -(op.q.conj() * f1) + op.p * f1.conj();
                u.set(s, num / d);
                return;
            }
            ExactComplex a = (detail::i_lambda_minus(l, op.q.conj()) * f1 + eps * (op.p * f2.conj())) / d;
            ExactComplex b =
                (detail::i_lambda_minus(-l, op.q.conj()) * f2 + eps * (op.p * f1.conj())) / d.conj();
            u.set(s, a);
            u.set(partner, b);
        } else {
            double l = lam.to_double();
            std::complex<double> qf = op.q.to_complex(), pf = op.p.to_complex();
            double eps = phase;
            if (zs == ZeroStatus::Zero) {
                if (fixed) {
                    u.set(s, -f1 / (2.0 * qf));
                } else {
                    u.set(s, std::complex<double>());
                    u.set(partner, -eps * std::conj(f1) / std::conj(pf));
                }
                return;
            }
            std::complex<double> d = del.to_complex();
            double scale = 1 + l * l + std::abs(op.k_const().to_double());
            if (std::abs(d) < 1e3 * std::numeric_limits<double>::epsilon() * scale && !opts.certified_gap)
                throw FloatPrecisionError("|Delta| below float resolution at " + s.to_string() +
                                          "; pass a certified gap to proceed");
            if (fixed) {
                u.set(s, (-std::conj(qf) * f1 + pf * std::conj(f1)) / d);
                return;
            }
            std::complex<double> ilmq(-qf.real(), l + qf.imag());
            std::complex<double> ilmqc(-qf.real(), -l + qf.imag());
            u.set(s, (ilmq * f1 + eps * pf * std::conj(f2)) / d);
            u.set(partner, (ilmqc * f2 + eps * pf * std::conj(f1)) / std::conj(d));
        }
    });
    return u;
}

/// Plancherel norm of apply(op, u) - f.
template <typename Scalar>
double residual(const OperatorSpec& op, const FourierData<Scalar>& u, const FourierData<Scalar>& f) {
    return plancherel_norm(data_sub(apply(op, u), f));
}

/// Exact-mode slotwise identity apply(op, u) == f.
inline bool exact_residual_is_zero(const OperatorSpec& op, const FourierData<ExactComplex>& u,
                                   const FourierData<ExactComplex>& f) {
    return data_sub(apply(op, u), f).all_zero();
}

} // namespace vekua
