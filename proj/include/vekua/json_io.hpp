#pragma once

#include <complex>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "vekua/classify.hpp"
#include "vekua/counterexample.hpp"
#include "vekua/solve.hpp"

namespace vekua {

using ojson = nlohmann::ordered_json;

/// Exact reals serialize as "n/d" strings, surds as {rat, surd, radicand},
/// continued fractions as {cf: [quotients]}. Floats never appear, so a file
/// round-trips to the identical value.
inline ojson exact_real_to_json(const ExactReal& x) {
    if (x.is_cf()) {
        ojson o;
        o["cf"] = x.cf().quotients;
        return o;
    }
    if (x.is_rational()) return ojson(x.rat().to_string());
    ojson o;
    o["rat"] = x.rat().to_string();
    o["surd"] = x.surd().to_string();
    o["radicand"] = x.radicand();
    return o;
}

inline ExactReal exact_real_from_json(const ojson& j) {
    if (j.is_string()) return ExactReal(Rational::from_string(j.get<std::string>()));
    if (j.is_number_integer()) return ExactReal(Rational(Int128(j.get<std::int64_t>())));
    if (!j.is_object()) throw std::runtime_error("exact real must be a string, integer, or object");
    if (j.contains("cf")) return ExactReal::continued_fraction(j.at("cf").get<std::vector<std::int64_t>>());
    Rational rat = Rational::from_string(j.value("rat", std::string("0")));
    Rational surd = Rational::from_string(j.at("surd").get<std::string>());
    return ExactReal(rat, surd, j.at("radicand").get<std::int64_t>());
}

inline ojson exact_complex_to_json(const ExactComplex& z) {
    ojson o;
    o["re"] = exact_real_to_json(z.re);
    o["im"] = exact_real_to_json(z.im);
    return o;
}

inline ExactComplex exact_complex_from_json(const ojson& j) {
    return ExactComplex(exact_real_from_json(j.at("re")), exact_real_from_json(j.at("im")));
}

inline ojson group_to_json(const GroupSpec& g) {
    ojson o;
    o["torus_dim"] = g.torus_dim;
    o["su2_count"] = g.su2_count;
    return o;
}

inline GroupSpec group_from_json(const ojson& j) {
    return GroupSpec(j.at("torus_dim").get<int>(), j.at("su2_count").get<int>());
}

inline ojson rep_to_json(const RepIndex& rep) {
    ojson o;
    o["taus"] = rep.taus;
    o["twice_ells"] = rep.twice_ells;
    return o;
}

inline RepIndex rep_from_json(const ojson& j) {
    RepIndex rep;
    rep.taus = j.at("taus").get<std::vector<std::int64_t>>();
    rep.twice_ells = j.at("twice_ells").get<std::vector<std::int64_t>>();
    return rep;
}

inline ojson slot_to_json(const Slot& s) {
    ojson o = rep_to_json(s.rep);
    o["twice_ms"] = s.twice_ms;
    o["twice_ns"] = s.twice_ns;
    return o;
}

inline Slot slot_from_json(const ojson& j) {
    Slot s;
    s.rep = rep_from_json(j);
    s.twice_ms = j.at("twice_ms").get<std::vector<std::int64_t>>();
    s.twice_ns = j.at("twice_ns").get<std::vector<std::int64_t>>();
    return s;
}

// ---- operator files: schema vekua-operator/1 ----

inline ojson operator_to_json(const OperatorSpec& op) {
    ojson o;
    o["schema"] = "vekua-operator/1";
    o["group"] = group_to_json(op.group);
    ojson field;
    field["torus"] = ojson::array();
    for (const auto& c : op.vf.torus_coeffs) field["torus"].push_back(exact_real_to_json(c));
    field["su2"] = ojson::array();
    for (const auto& a : op.vf.su2_coeffs) field["su2"].push_back(exact_real_to_json(a));
    o["field"] = field;
    o["q"] = exact_complex_to_json(op.q);
    o["p"] = exact_complex_to_json(op.p);
    return o;
}

inline OperatorSpec operator_from_json(const ojson& j) {
    if (j.value("schema", std::string()) != "vekua-operator/1")
        throw std::runtime_error("expected schema vekua-operator/1");
    OperatorSpec op;
    op.group = group_from_json(j.at("group"));
    for (const auto& c : j.at("field").at("torus")) op.vf.torus_coeffs.push_back(exact_real_from_json(c));
    for (const auto& a : j.at("field").at("su2")) op.vf.su2_coeffs.push_back(exact_real_from_json(a));
    op.q = exact_complex_from_json(j.at("q"));
    op.p = exact_complex_from_json(j.at("p"));
    validate_operator(op);
    return op;
}

// ---- coefficient files: schema vekua-fourier/1 ----

inline ojson fourier_to_json(const FourierData<ExactComplex>& data) {
    ojson o;
    o["schema"] = "vekua-fourier/1";
    o["mode"] = "exact";
    o["group"] = group_to_json(data.group());
    o["xi_max"] = data.xi_max().to_string();
    o["blocks"] = ojson::array();
    for (const auto& [rep, block] : data.blocks()) {
        ojson b;
        b["rep"] = rep_to_json(rep);
        ojson entries = ojson::array();
        for (const auto& z : block.a) entries.push_back(exact_complex_to_json(z));
        b["entries"] = std::move(entries);
        o["blocks"].push_back(std::move(b));
    }
    return o;
}

inline ojson fourier_to_json(const FourierData<std::complex<double>>& data) {
    ojson o;
    o["schema"] = "vekua-fourier/1";
    o["mode"] = "float";
    o["group"] = group_to_json(data.group());
    o["xi_max"] = data.xi_max().to_string();
    o["blocks"] = ojson::array();
    for (const auto& [rep, block] : data.blocks()) {
        ojson b;
        b["rep"] = rep_to_json(rep);
        ojson entries = ojson::array();
        for (const auto& z : block.a) entries.push_back(ojson::array({z.real(), z.imag()}));
        b["entries"] = std::move(entries);
        o["blocks"].push_back(std::move(b));
    }
    return o;
}

inline std::string fourier_mode(const ojson& j) {
    if (j.value("schema", std::string()) != "vekua-fourier/1")
        throw std::runtime_error("expected schema vekua-fourier/1");
    std::string mode = j.at("mode").get<std::string>();
    if (mode != "exact" && mode != "float") throw std::runtime_error("unknown coefficient mode " + mode);
    return mode;
}

namespace detail {

template <typename Scalar, typename EntryParse>
FourierData<Scalar> fourier_from_json_impl(const ojson& j, EntryParse&& parse) {
    FourierData<Scalar> data(group_from_json(j.at("group")),
                             Rational::from_string(j.at("xi_max").get<std::string>()));
    for (const auto& b : j.at("blocks")) {
        RepIndex rep = rep_from_json(b.at("rep"));
        auto& block = data.ensure_block(rep);
        const auto& entries = b.at("entries");
        if ((std::int64_t)entries.size() != block.dim * block.dim)
            throw std::runtime_error("block entry count does not match rep dimension for " +
                                     rep.to_string());
        for (size_t i = 0; i < entries.size(); ++i) block.a[i] = parse(entries[i]);
    }
    return data;
}

}  // namespace detail

inline FourierData<ExactComplex> fourier_exact_from_json(const ojson& j) {
    if (fourier_mode(j) != "exact") throw std::runtime_error("coefficient file is not exact mode");
    return detail::fourier_from_json_impl<ExactComplex>(
        j, [](const ojson& e) { return exact_complex_from_json(e); });
}

inline FourierData<std::complex<double>> fourier_float_from_json(const ojson& j) {
    if (fourier_mode(j) != "float") throw std::runtime_error("coefficient file is not float mode");
    return detail::fourier_from_json_impl<std::complex<double>>(j, [](const ojson& e) {
        return std::complex<double>(e.at(0).get<double>(), e.at(1).get<double>());
    });
}

// ---- verdicts and certificates: schema vekua-verdict/1 ----

inline ojson zero_site_to_json(const ZeroSite& z) {
    ojson o = rep_to_json(z.rep);
    o["twice_ms"] = z.twice_ms;
    o["weight2"] = z.weight2.to_string();
    return o;
}

inline ojson gap_to_json(const GapCertificate& g) {
    ojson o;
    o["kind"] = cert_kind_name(g.kind);
    o["step"] = exact_real_to_json(g.step);
    o["gap"] = exact_real_to_json(g.gap);
    o["gap_trivial"] = g.gap_trivial;
    o["zeros_exist"] = g.zeros_exist;
    o["zeros_infinite"] = g.zeros_infinite;
    if (g.t_star) o["t_star"] = *g.t_star;
    if (!g.note.empty()) o["note"] = g.note;
    return o;
}

inline ojson resonance_to_json(const ResonantSequence& r) {
    ojson o;
    o["cf_su2_factor"] = r.cf_su2_factor;
    o["torus_factor"] = r.torus_factor;
    o["slots"] = ojson::array();
    for (const auto& rs : r.slots) {
        ojson s;
        s["slot"] = slot_to_json(rs.slot);
        s["convergent_index"] = rs.convergent_index;
        s["weight2"] = rs.weight2.to_string();
        s["lambda_lo"] = rs.lambda_enc.lo.to_string();
        s["lambda_hi"] = rs.lambda_enc.hi.to_string();
        s["delta_abs2_upper"] = rs.delta_abs2_upper.to_string();
        s["bound_product"] = rs.bound_product.to_string();
        o["slots"].push_back(std::move(s));
    }
    o["note"] = r.note;
    return o;
}

inline ojson empirical_to_json(const EmpiricalDiagnostics& e) {
    ojson o;
    o["scan_xi"] = e.scan_xi.to_string();
    o["rows_scanned"] = e.rows_scanned;
    o["exact_zero_rows"] = e.exact_zero_rows;
    o["undecided_rows"] = e.undecided_rows;
    o["min_abs_delta"] = e.min_abs_delta;
    o["fitted_exponent"] = e.fitted_exponent;
    return o;
}

inline ojson verdict_to_json(const Verdict& v) {
    ojson o;
    o["schema"] = "vekua-verdict/1";
    o["property"] = property_name(v.property);
    o["answer"] = answer_name(v.answer);
    o["condition"] = v.condition;
    o["certificate"] = cert_kind_name(v.cert);
    if (v.margin) o["margin"] = exact_real_to_json(*v.margin);
    if (v.gap) o["gap"] = gap_to_json(*v.gap);
    if (!v.zero_sites.empty()) {
        ojson sites = ojson::array();
        for (const auto& z : v.zero_sites) sites.push_back(zero_site_to_json(z));
        o["zero_sites"] = std::move(sites);
    }
    o["infinite_zero_family"] = v.infinite_zero_family;
    o["asserted_cf_input"] = v.asserted_cf_input;
    if (v.resonance) o["resonance"] = resonance_to_json(*v.resonance);
    if (v.empirical) o["empirical"] = empirical_to_json(*v.empirical);
    o["note"] = v.note;
    return o;
}

inline ojson admissibility_to_json(const AdmissibilityReport& r) {
    ojson o;
    o["schema"] = "vekua-admissibility/1";
    o["status"] = r.status == AdmissibilityStatus::Admissible
                      ? "admissible"
                      : (r.status == AdmissibilityStatus::NotAdmissible ? "not-admissible" : "undecidable");
    ojson viols = ojson::array();
    for (const auto& viol : r.violations) {
        ojson v;
        v["slot"] = slot_to_json(viol.slot);
        v["residual"] = viol.residual;
        viols.push_back(std::move(v));
    }
    o["violations"] = std::move(viols);
    if (!r.note.empty()) o["note"] = r.note;
    return o;
}

inline ojson kernel_to_json(const KernelCertificate& k) {
    ojson o;
    o["schema"] = "vekua-kernel/1";
    o["element"] = fourier_to_json(k.element);
    ojson ws = ojson::array();
    for (const auto& s : k.witness_slots) ws.push_back(slot_to_json(s));
    o["witness_slots"] = std::move(ws);
    ojson sites = ojson::array();
    for (const auto& z : k.sites) sites.push_back(zero_site_to_json(z));
    o["sites"] = std::move(sites);
    o["infinite_family"] = k.infinite_family;
    o["note"] = k.note;
    return o;
}

inline ojson gh_counterexample_to_json(const GHCounterexample& g) {
    ojson o;
    o["schema"] = "vekua-gh-counterexample/1";
    o["resonance"] = resonance_to_json(g.seq);
    o["relation"] = g.relation_times_i ? "P u = i f" : "P u = f";
    o["construction_case"] = g.construction_case;
    o["identity_verified"] = g.identity_verified;
    o["solution_floor"] = g.solution_floor;
    o["solution"] = fourier_to_json(g.solution);
    o["forcing"] = fourier_to_json(g.forcing);
    ojson fam = ojson::array();
    for (const auto& s : g.family) fam.push_back(slot_to_json(s));
    o["family"] = std::move(fam);
    o["note"] = g.note;
    return o;
}

inline ojson gs_obstruction_to_json(const GSObstruction& g) {
    ojson o;
    o["schema"] = "vekua-gs-obstruction/1";
    o["resonance"] = resonance_to_json(g.seq);
    o["forcing"] = fourier_to_json(g.forcing);
    o["schedule"] = ojson::array();
    for (const auto& row : g.schedule) {
        ojson r;
        r["forced_slot"] = slot_to_json(row.forced_slot);
        r["support_slot"] = slot_to_json(row.support_slot);
        r["convergent_index"] = row.convergent_index;
        r["weight2"] = row.weight2.to_string();
        r["forced_sq_lower"] = row.forced_sq_lower.to_string();
        r["forced_approx"] = row.forced_approx;
        o["schedule"].push_back(std::move(r));
    }
    o["note"] = g.note;
    return o;
}

// ---- file helpers ----

inline ojson load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    ojson j;
    in >> j;
    return j;
}

inline void save_json(const std::string& path, const ojson& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace vekua
