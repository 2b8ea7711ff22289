#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vekua/classify.hpp"

namespace vekua {

/// Expected classification for a bundled operator, exact where the verdict
/// carries exact data.
struct ExpectedVerdict {
    Answer answer = Answer::Inconclusive;
    int condition = 0;
    CertKind cert = CertKind::None;
    std::optional<ExactReal> margin;
    std::optional<ExactReal> gap;
};

struct ExampleRow {
    std::string name;
    std::string blurb;
    OperatorSpec op;
    ExpectedVerdict gh;
    ExpectedVerdict gs;
};

namespace detail {

inline ExpectedVerdict expect(Answer a, int cond, CertKind c) {
    ExpectedVerdict e;
    e.answer = a;
    e.condition = cond;
    e.cert = c;
    return e;
}

inline ExpectedVerdict expect_margin(int cond, const ExactReal& m) {
    ExpectedVerdict e = expect(Answer::Yes, cond, CertKind::Margin);
    e.margin = m;
    return e;
}

inline ExpectedVerdict expect_gap(const ExactReal& g) {
    ExpectedVerdict e = expect(Answer::Yes, 3, CertKind::LatticeGap);
    e.gap = g;
    return e;
}

}  // namespace detail

/// The bundled operator collection: every construction the toolkit certifies,
/// one per row, with frozen expected verdicts. Names are stable and usable
/// from the command line.
inline const std::vector<ExampleRow>& bundled_examples() {
    static const std::vector<ExampleRow> rows = [] {
        std::vector<ExampleRow> out;
        {
            ExampleRow r;
            r.name = "circle-cond1";
            r.blurb = "T^1, X = d/dt, q = i, p = 2: |p| > |q| settles both questions";
            r.op.group = GroupSpec(1, 0);
            r.op.vf.torus_coeffs = {ExactReal(1)};
            r.op.q = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(1)));
            r.op.p = ExactComplex(2);
            r.gh = detail::expect_margin(1, ExactReal(3));
            r.gs = detail::expect_margin(1, ExactReal(3));
            out.push_back(std::move(r));
        }
        {
            ExampleRow r;
            r.name = "circle-cond2";
            r.blurb = "T^1, X = d/dt, q = 6, p = 3+4i: |q| > |p| with Re q != 0";
            r.op.group = GroupSpec(1, 0);
            r.op.vf.torus_coeffs = {ExactReal(1)};
            r.op.q = ExactComplex(6);
            r.op.p = ExactComplex(ExactReal(Rational(3)), ExactReal(Rational(4)));
            r.gh = detail::expect_margin(2, ExactReal(11));
            r.gs = detail::expect_margin(2, ExactReal(11));
            out.push_back(std::move(r));
        }
        {
            ExampleRow r;
            r.name = "su2-gap";
            r.blurb = "SU(2), q = i, p = sqrt(3)/3: no symbol zeros, divisor gap 1/3";
            r.op.group = GroupSpec(0, 1);
            r.op.vf.su2_coeffs = {ExactReal(1)};
            r.op.q = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(1)));
            r.op.p = ExactComplex(ExactReal(Rational(0), Rational(1, 3), 3));
            r.gh = detail::expect_gap(ExactReal(Rational(1, 3)));
            r.gs = detail::expect_gap(ExactReal(Rational(1, 3)));
            out.push_back(std::move(r));
        }
        {
            ExampleRow r;
            r.name = "mixed-half-zeros";
            r.blurb = "T^1 x SU(2), q = i sqrt(5)/2, p = 1: zeros at lambda = +-1/2, gap 1/4";
            r.op.group = GroupSpec(1, 1);
            r.op.vf.torus_coeffs = {ExactReal(1)};
            r.op.vf.su2_coeffs = {ExactReal(1)};
            r.op.q = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(0), Rational(1, 2), 5));
            r.op.p = ExactComplex(1);
            r.gh = detail::expect(Answer::No, 0, CertKind::ZeroFamily);
            r.gs = detail::expect_gap(ExactReal(Rational(1, 4)));
            out.push_back(std::move(r));
        }
        {
            ExampleRow r;
            r.name = "su2-spin-zeros";
            r.blurb = "SU(2), q = 5i, p = 4: zeros on the spin-3 ladder, gap 11/4";
            r.op.group = GroupSpec(0, 1);
            r.op.vf.su2_coeffs = {ExactReal(1)};
            r.op.q = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(5)));
            r.op.p = ExactComplex(4);
            r.gh = detail::expect(Answer::No, 0, CertKind::ZeroFamily);
            r.gs = detail::expect_gap(ExactReal(Rational(11, 4)));
            out.push_back(std::move(r));
        }
        {
            ExampleRow r;
            r.name = "su2-balanced";
            r.blurb = "SU(2), q = 1+i, p = i sqrt(2): |q| = |p|, zeros only at lambda = 0";
            r.op.group = GroupSpec(0, 1);
            r.op.vf.su2_coeffs = {ExactReal(1)};
            r.op.q = ExactComplex(ExactReal(Rational(1)), ExactReal(Rational(1)));
            r.op.p = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(0), Rational(1), 2));
            r.gh = detail::expect(Answer::No, 0, CertKind::ZeroFamily);
            r.gs = detail::expect_gap(ExactReal(Rational(1, 4)));
            out.push_back(std::move(r));
        }
        {
            ExampleRow r;
            r.name = "liouville";
            r.blurb = "T^1 x SU(2) with a Liouville-type spin coefficient: resonant, unsolvable";
            r.op.group = GroupSpec(1, 1);
            r.op.vf.torus_coeffs = {ExactReal(1)};
            r.op.vf.su2_coeffs = {ExactReal::continued_fraction({1, 1, 2, 6, 24, 120, 720, 5040})};
            r.op.q = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(1)));
            r.op.p = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(1)));
            r.gh = detail::expect(Answer::No, 0, CertKind::ZeroFamily);
            r.gs = detail::expect(Answer::No, 0, CertKind::Resonance);
            out.push_back(std::move(r));
        }
        {
            ExampleRow r;
            r.name = "liouville-conjugate";
            r.blurb = "same field with p = conj(q): the singular pair satisfies P u = i f";
            r.op.group = GroupSpec(1, 1);
            r.op.vf.torus_coeffs = {ExactReal(1)};
            r.op.vf.su2_coeffs = {ExactReal::continued_fraction({1, 1, 2, 6, 24, 120, 720, 5040})};
            r.op.q = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(1)));
            r.op.p = ExactComplex(ExactReal(Rational(0)), ExactReal(Rational(-1)));
            r.gh = detail::expect(Answer::No, 0, CertKind::ZeroFamily);
            r.gs = detail::expect(Answer::No, 0, CertKind::Resonance);
            out.push_back(std::move(r));
        }
        return out;
    }();
    return rows;
}

inline const ExampleRow* find_example(const std::string& name) {
    for (const auto& r : bundled_examples())
        if (r.name == name) return &r;
    return nullptr;
}

struct ExampleOutcome {
    std::string name;
    Verdict gh;
    Verdict gs;
    bool matches = true;
    std::string mismatch;  // empty when the run reproduced the expected verdicts
};

namespace detail {

inline void check_expected(const char* tag, const ExpectedVerdict& e, const Verdict& v,
                           ExampleOutcome& o) {
    auto fail = [&](const std::string& what) {
        o.matches = false;
        if (!o.mismatch.empty()) o.mismatch += "; ";
        o.mismatch += std::string(tag) + ": " + what;
    };
    if (v.answer != e.answer)
        fail(std::string("answer ") + answer_name(v.answer) + ", expected " + answer_name(e.answer));
    if (v.condition != e.condition)
        fail("condition " + std::to_string(v.condition) + ", expected " + std::to_string(e.condition));
    if (v.cert != e.cert)
        fail(std::string("certificate ") + cert_kind_name(v.cert) + ", expected " + cert_kind_name(e.cert));
    if (e.margin) {
        if (!v.margin || !(*v.margin - *e.margin).is_zero())
            fail("margin " + (v.margin ? v.margin->to_string() : std::string("absent")) +
                 ", expected " + e.margin->to_string());
    }
    if (e.gap) {
        if (!v.gap || !(v.gap->gap - *e.gap).is_zero())
            fail("gap " + (v.gap ? v.gap->gap.to_string() : std::string("absent")) + ", expected " +
                 e.gap->to_string());
    }
}

}  // namespace detail

/// Classify every bundled operator and compare against the frozen verdicts.
inline std::vector<ExampleOutcome> run_examples(const Rational& xi_max = Rational(50)) {
    std::vector<ExampleOutcome> out;
    for (const auto& r : bundled_examples()) {
        ExampleOutcome o;
        o.name = r.name;
        o.gh = classify_gh(r.op, xi_max);
        o.gs = classify_gs(r.op, xi_max);
        detail::check_expected("gh", r.gh, o.gh, o);
        detail::check_expected("gs", r.gs, o.gs, o);
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace vekua
