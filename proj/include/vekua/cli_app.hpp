#pragma once

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vekua/counterexample.hpp"
#include "vekua/examples_suite.hpp"
#include "vekua/json_io.hpp"
#include "vekua/oracle.hpp"
#include "vekua/solve.hpp"

namespace vekua::cli {

// Exit codes: 0 success, 1 usage or internal error, 2 inadmissible data,
// 3 exactness refusal (continued-fraction input the run cannot decide,
// inconclusive verdict, missing construction), 4 bundled example mismatch.
enum ExitCode { kOk = 0, kError = 1, kNotAdmissible = 2, kRefusal = 3, kExampleMismatch = 4 };

namespace detail {

inline void emit(const ojson& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << "\n";
    else
        save_json(out_path, j);
}

inline GroupSpec parse_group(const std::string& s) {
    if (s == "T1") return GroupSpec(1, 0);
    if (s == "T2") return GroupSpec(2, 0);
    if (s == "SU2") return GroupSpec(0, 1);
    if (s == "T1xSU2") return GroupSpec(1, 1);
    throw CLI::ValidationError("--group", "unknown group " + s + " (T1, T2, SU2, T1xSU2)");
}

inline int do_classify(const std::string& op_path, const std::string& property, long xi,
                       const std::string& out_path) {
    OperatorSpec op = operator_from_json(load_json(op_path));
    Rational xim(xi);
    ojson j;
    j["schema"] = "vekua-classification/1";
    j["operator"] = operator_to_json(op);
    bool inconclusive = false;
    auto run_one = [&](Property p) {
        Verdict v = p == Property::GloballyHypoelliptic ? classify_gh(op, xim) : classify_gs(op, xim);
        std::cout << v.summary() << "\n  " << v.note << "\n";
        inconclusive = inconclusive || v.answer == Answer::Inconclusive;
        j[p == Property::GloballyHypoelliptic ? "gh" : "gs"] = verdict_to_json(v);
    };
    if (property == "gh" || property == "both") run_one(Property::GloballyHypoelliptic);
    if (property == "gs" || property == "both") run_one(Property::GloballySolvable);
    emit(j, out_path);
    return inconclusive ? kRefusal : kOk;
}

inline int do_solve(const std::string& op_path, const std::string& rhs_path,
                    const std::string& out_path, double float_tol, double assumed_gap) {
    OperatorSpec op = operator_from_json(load_json(op_path));
    ojson rhs_json = load_json(rhs_path);
    SolveOptions opts;
    opts.float_tol = float_tol;
    if (assumed_gap > 0) opts.certified_gap = assumed_gap;

    if (fourier_mode(rhs_json) == "exact") {
        auto f = fourier_exact_from_json(rhs_json);
        auto u = solve(op, f, opts);
        if (!exact_residual_is_zero(op, u, f)) throw std::logic_error("exact solve left a nonzero residual");
        std::cout << "solved exactly; residual is identically zero\n";
        emit(fourier_to_json(u), out_path);
    } else {
        auto f = fourier_float_from_json(rhs_json);
        auto u = solve(op, f, opts);
        double r = residual(op, u, f);
        std::cout << "solved in floating point; residual " << r << "\n";
        emit(fourier_to_json(u), out_path);
    }
    return kOk;
}

inline int do_admissible(const std::string& op_path, const std::string& rhs_path,
                         const std::string& out_path, double float_tol) {
    OperatorSpec op = operator_from_json(load_json(op_path));
    ojson rhs_json = load_json(rhs_path);
    AdmissibilityReport report = fourier_mode(rhs_json) == "exact"
                                     ? check_admissible(op, fourier_exact_from_json(rhs_json))
                                     : check_admissible(op, fourier_float_from_json(rhs_json), float_tol);
    const char* what = report.status == AdmissibilityStatus::Admissible      ? "admissible"
                       : report.status == AdmissibilityStatus::NotAdmissible ? "not admissible"
                                                                             : "undecidable";
    std::cout << what << "\n";
    size_t shown = 0;
    for (const auto& v : report.violations) {
        if (++shown > 8) {
            std::cout << "  ... " << report.violations.size() - 8 << " more\n";
            break;
        }
        std::cout << "  " << v.slot.to_string() << " residual " << v.residual << "\n";
    }
    if (!report.note.empty()) std::cout << "  " << report.note << "\n";
    emit(admissibility_to_json(report), out_path);
    if (report.status == AdmissibilityStatus::NotAdmissible) return kNotAdmissible;
    if (report.status == AdmissibilityStatus::Undecidable) return kRefusal;
    return kOk;
}

inline int do_counterexample(const std::string& op_path, const std::string& kind, long xi,
                             const std::string& out_path) {
    OperatorSpec op = operator_from_json(load_json(op_path));
    Rational xim(xi);
    if (kind == "kernel") {
        KernelCertificate cert = singular_kernel(op, xim);
        std::cout << "kernel element on " << cert.witness_slots.size() << " witness slots ("
                  << (cert.infinite_family ? "infinite family" : "finite family") << ")\n  "
                  << cert.note << "\n";
        emit(kernel_to_json(cert), out_path);
        return kOk;
    }
    if (kind == "growth") {
        GHCounterexample g = gh_counterexample(op, xim);
        std::cout << "singular pair, construction case " << g.construction_case << ": P u = "
                  << (g.relation_times_i ? "i f" : "f") << "\n  |u| >= " << g.solution_floor
                  << " on " << g.family.size() << " slots; identity "
                  << (g.identity_verified ? "verified exactly" : "NOT verified") << "\n";
        emit(gh_counterexample_to_json(g), out_path);
        return g.identity_verified ? kOk : kError;
    }
    if (kind == "forcing") {
        GSObstruction g = gs_obstruction(op, xim);
        std::cout << "forcing obstruction across " << g.schedule.size() << " rows\n  " << g.note
                  << "\n";
        emit(gs_obstruction_to_json(g), out_path);
        return kOk;
    }
    throw CLI::ValidationError("--kind", "unknown kind " + kind + " (kernel, growth, forcing)");
}

inline int do_verify(const std::string& op_path, const std::string& u_path,
                     const std::string& rhs_path, int grid_n, double tol, double grid_tol) {
    OperatorSpec op = operator_from_json(load_json(op_path));
    ojson uj = load_json(u_path), fj = load_json(rhs_path);
    if (fourier_mode(uj) != fourier_mode(fj))
        throw std::invalid_argument("solution and right-hand side use different entry modes");

    if (fourier_mode(uj) == "exact") {
        auto u = fourier_exact_from_json(uj);
        auto f = fourier_exact_from_json(fj);
        if (exact_residual_is_zero(op, u, f)) {
            std::cout << "P u = f holds exactly\n";
            return kOk;
        }
        std::cout << "P u differs from f\n";
        return kError;
    }

    auto u = fourier_float_from_json(uj);
    auto f = fourier_float_from_json(fj);
    double r = residual(op, u, f);
    double scale = 1.0 + plancherel_norm(f);
    std::cout << "residual " << r << " against scale " << scale << "\n";
    bool ok = r <= tol * scale;
    if (grid_n > 0) {
        GridOracleReport rep = torus_grid_apply(op, u, vekua::apply(op, u), grid_n);
        double bound = grid_tol * std::max(1.0, rep.max_ref);
        std::cout << "grid check at n = " << rep.grid_n << ": max error " << rep.max_abs_error
                  << " (bound " << bound << ")\n";
        ok = ok && rep.max_abs_error <= bound;
    }
    std::cout << (ok ? "verified\n" : "verification failed\n");
    return ok ? kOk : kError;
}

inline int do_examples(long xi, const std::string& out_path, const std::string& dump_dir) {
    if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        for (const auto& r : bundled_examples())
            save_json((std::filesystem::path(dump_dir) / (r.name + ".json")).string(),
                      operator_to_json(r.op));
        std::cout << "wrote " << bundled_examples().size() << " operator files to " << dump_dir
                  << "\n";
    }

    auto outcomes = run_examples(Rational(xi));
    size_t width = 0;
    for (const auto& o : outcomes) width = std::max(width, o.name.size());
    bool all_match = true;
    ojson rows = ojson::array();
    for (const auto& o : outcomes) {
        std::cout << o.name << std::string(width - o.name.size() + 2, ' ') << "gh: "
                  << answer_name(o.gh.answer) << " [" << cert_kind_name(o.gh.cert) << "]  gs: "
                  << answer_name(o.gs.answer) << " [" << cert_kind_name(o.gs.cert) << "]"
                  << (o.matches ? "" : "  MISMATCH") << "\n";
        if (!o.matches) {
            std::cout << "    " << o.mismatch << "\n";
            all_match = false;
        }
        ojson row;
        row["name"] = o.name;
        row["gh"] = verdict_to_json(o.gh);
        row["gs"] = verdict_to_json(o.gs);
        row["matches"] = o.matches;
        if (!o.mismatch.empty()) row["mismatch"] = o.mismatch;
        rows.push_back(std::move(row));
    }
    std::cout << (all_match ? "all verdicts match" : "verdict mismatches present") << "\n";
    if (!out_path.empty()) {
        ojson j;
        j["schema"] = "vekua-examples/1";
        j["xi_max"] = xi;
        j["rows"] = std::move(rows);
        save_json(out_path, j);
    }
    return all_match ? kOk : kExampleMismatch;
}

inline int do_fixture(const std::string& group_s, long xi, unsigned seed, double decay,
                      const std::string& mode, const std::string& out_path) {
    GroupSpec g = parse_group(group_s);
    ojson j = mode == "exact" ? fourier_to_json(random_fourier_data_exact(g, Rational(xi), seed))
                              : fourier_to_json(random_fourier_data(g, Rational(xi), decay, seed));
    emit(j, out_path);
    return kOk;
}

}  // namespace detail

inline int run(int argc, char** argv) {
    CLI::App app{"Fourier-side toolkit for the perturbed derivative P u = X u - q u - p conj(u) "
                 "on T^d x SU(2)^k"};
    app.require_subcommand(1);

    std::string op_path, rhs_path, u_path, out_path, dump_dir;
    std::string property = "both", kind = "kernel", group_s = "T1", mode = "float";
    long xi = 50;
    int grid_n = 0;
    unsigned seed = 1;
    double decay = 3.0, float_tol = 1e-10, tol = 1e-9, grid_tol = 1e-6, assumed_gap = 0;

    auto* c_classify = app.add_subcommand("classify", "decide hypoellipticity / solvability");
    c_classify->add_option("--op", op_path, "operator JSON")->required();
    c_classify->add_option("--property", property, "gh, gs, or both")
        ->check(CLI::IsMember({"gh", "gs", "both"}));
    c_classify->add_option("--xi-max", xi, "scan radius");
    c_classify->add_option("--out", out_path, "write the verdict JSON here");

    auto* c_solve = app.add_subcommand("solve", "solve P u = f for the given right-hand side");
    c_solve->add_option("--op", op_path, "operator JSON")->required();
    c_solve->add_option("--rhs", rhs_path, "right-hand side JSON (mode inferred)")->required();
    c_solve->add_option("--out", out_path, "write the solution JSON here");
    c_solve->add_option("--float-tol", float_tol, "admissibility tolerance in float mode");
    c_solve->add_option("--gap", assumed_gap, "certified |Delta| lower bound, waives the float refusal");

    auto* c_adm = app.add_subcommand("admissible", "check the compatibility conditions");
    c_adm->add_option("--op", op_path, "operator JSON")->required();
    c_adm->add_option("--rhs", rhs_path, "right-hand side JSON")->required();
    c_adm->add_option("--out", out_path, "write the report JSON here");
    c_adm->add_option("--float-tol", float_tol, "tolerance in float mode");

    auto* c_ce = app.add_subcommand("counterexample", "emit a certified counterexample");
    c_ce->add_option("--op", op_path, "operator JSON")->required();
    c_ce->add_option("--kind", kind, "kernel, growth, or forcing")
        ->check(CLI::IsMember({"kernel", "growth", "forcing"}));
    c_ce->add_option("--xi-max", xi, "scan radius");
    c_ce->add_option("--out", out_path, "write the certificate JSON here");

    auto* c_verify = app.add_subcommand("verify", "check P u = f for given data");
    c_verify->add_option("--op", op_path, "operator JSON")->required();
    c_verify->add_option("--u", u_path, "candidate solution JSON")->required();
    c_verify->add_option("--rhs", rhs_path, "right-hand side JSON")->required();
    c_verify->add_option("--grid", grid_n, "also check on an n x n torus grid (float mode)");
    c_verify->add_option("--tol", tol, "relative residual bound in float mode");
    c_verify->add_option("--grid-tol", grid_tol, "relative bound for the grid check");

    auto* c_ex = app.add_subcommand("examples", "run the bundled operators against frozen verdicts");
    c_ex->add_option("--xi-max", xi, "scan radius");
    c_ex->add_option("--out", out_path, "write the outcome JSON here");
    c_ex->add_option("--dump-ops", dump_dir, "also write each operator JSON into this directory");

    auto* c_fix = app.add_subcommand("fixture", "generate seeded random Fourier data");
    c_fix->add_option("--group", group_s, "T1, T2, SU2, or T1xSU2")->required();
    c_fix->add_option("--xi-max", xi, "support radius");
    c_fix->add_option("--seed", seed, "RNG seed");
    c_fix->add_option("--decay", decay, "polynomial decay exponent (float mode)");
    c_fix->add_option("--mode", mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    c_fix->add_option("--out", out_path, "write the data JSON here");

    try {
        app.parse(argc, argv);
        if (c_classify->parsed()) return detail::do_classify(op_path, property, xi, out_path);
        if (c_solve->parsed()) return detail::do_solve(op_path, rhs_path, out_path, float_tol, assumed_gap);
        if (c_adm->parsed()) return detail::do_admissible(op_path, rhs_path, out_path, float_tol);
        if (c_ce->parsed()) return detail::do_counterexample(op_path, kind, xi, out_path);
        if (c_verify->parsed()) return detail::do_verify(op_path, u_path, rhs_path, grid_n, tol, grid_tol);
        if (c_ex->parsed()) return detail::do_examples(xi, out_path, dump_dir);
        if (c_fix->parsed()) return detail::do_fixture(group_s, xi, seed, decay, mode, out_path);
        return kError;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const NotAdmissibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNotAdmissible;
    } catch (const CFZeroUndecidableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRefusal;
    } catch (const CFExactnessError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRefusal;
    } catch (const FloatPrecisionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRefusal;
    } catch (const NoZeroFamilyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRefusal;
    } catch (const NoResonantSequenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRefusal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
}

}  // namespace vekua::cli
