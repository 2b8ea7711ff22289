#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "test_support.hpp"
#include "vekua/counterexample.hpp"
#include "vekua/json_io.hpp"

using namespace vekua;
using namespace vekua::testsupport;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

namespace fs = std::filesystem;

Slot su2_slot(std::int64_t twice_ell, std::int64_t twice_m, std::int64_t twice_n) {
    Slot s;
    s.rep.twice_ells = {twice_ell};
    s.twice_ms = {twice_m};
    s.twice_ns = {twice_n};
    return s;
}

Slot mixed_slot(std::int64_t tau, std::int64_t twice_ell, std::int64_t twice_m,
                std::int64_t twice_n) {
    Slot s;
    s.rep.taus = {tau};
    s.rep.twice_ells = {twice_ell};
    s.twice_ms = {twice_m};
    s.twice_ns = {twice_n};
    return s;
}

std::string shipped_op(const std::string& name) {
    return std::string(VEKUA_SOURCE_DIR) + "/data/ops/" + name + ".json";
}

fs::path temp_dir() {
    fs::path dir = fs::temp_directory_path() / "vekua-json-cli-tests";
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& output_file = {}) {
    std::string cmd = std::string(VEKUA_CLI_PATH) + " " + args;
    if (output_file.empty())
        cmd += " > /dev/null 2>&1";
    else
        cmd += " > " + output_file.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("exact values take distinct JSON forms per kind", "[json]") {
    ojson jr = exact_real_to_json(ExactReal(Rational(-3, 2)));
    REQUIRE(jr.is_string());
    REQUIRE(jr.get<std::string>() == "-3/2");
    REQUIRE(exact_real_from_json(jr) == ExactReal(Rational(-3, 2)));
    REQUIRE(exact_real_from_json(ojson(7)) == ExactReal(7));

    ExactReal phi(Rational(1, 2), Rational(1, 2), 5);
    ojson js = exact_real_to_json(phi);
    REQUIRE(js.is_object());
    REQUIRE(js.at("rat").get<std::string>() == "1/2");
    REQUIRE(js.at("surd").get<std::string>() == "1/2");
    REQUIRE(js.at("radicand").get<std::int64_t>() == 5);
    REQUIRE(exact_real_from_json(js) == phi);

    ExactReal alpha = ExactReal::continued_fraction({1, 1, 2, 6});
    ojson jc = exact_real_to_json(alpha);
    REQUIRE(jc.at("cf").get<std::vector<std::int64_t>>() == std::vector<std::int64_t>{1, 1, 2, 6});
    ExactReal back = exact_real_from_json(jc);
    REQUIRE(back.is_cf());
    REQUIRE(back.cf().quotients == alpha.cf().quotients);
    REQUIRE(back.cf().enclosure().lo == alpha.cf().enclosure().lo);
    REQUIRE(back.cf().enclosure().hi == alpha.cf().enclosure().hi);

    ExactComplex z(ExactReal(Rational(2, 7)), phi);
    REQUIRE(exact_complex_from_json(exact_complex_to_json(z)) == z);

    REQUIRE_THROWS_MATCHES(exact_real_from_json(ojson::array()), std::runtime_error,
                           MessageMatches(ContainsSubstring("string, integer, or object")));
}

TEST_CASE("operator JSON round trips for every bundled operator", "[json]") {
    for (const auto& row : bundled_examples()) {
        INFO("operator " << row.name);
        ojson j = operator_to_json(row.op);
        REQUIRE(j.at("schema").get<std::string>() == "vekua-operator/1");
        OperatorSpec back = operator_from_json(j);
        REQUIRE(operator_to_json(back).dump() == j.dump());
    }

    // Kind-specific encodings: a continued-fraction field coefficient and a
    // surd zero-order coefficient survive the trip structurally.
    ojson liou = operator_to_json(example_op("liouville"));
    REQUIRE(liou.at("field").at("su2").at(0).contains("cf"));
    ojson mixed = operator_to_json(example_op("mixed-half-zeros"));
    REQUIRE(mixed.at("q").at("im").at("radicand").get<std::int64_t>() == 5);

    ojson bad = operator_to_json(example_op("circle-cond1"));
    bad["schema"] = "vekua-operator/2";
    REQUIRE_THROWS_MATCHES(operator_from_json(bad), std::runtime_error,
                           MessageMatches(ContainsSubstring("vekua-operator/1")));

    // Loading validates: p = 0 is not a member of the family.
    ojson zero_p = operator_to_json(example_op("circle-cond1"));
    zero_p["p"] = exact_complex_to_json(ExactComplex());
    REQUIRE_THROWS_AS(operator_from_json(zero_p), std::invalid_argument);
}

TEST_CASE("coefficient JSON round trips in both modes", "[json]") {
    auto fe = random_fourier_data_exact(GroupSpec(1, 1), Rational(3), 5);
    ojson je = fourier_to_json(fe);
    REQUIRE(je.at("mode").get<std::string>() == "exact");
    REQUIRE(je.at("xi_max").get<std::string>() == "3");
    auto fe2 = fourier_exact_from_json(je);
    REQUIRE(fourier_to_json(fe2).dump() == je.dump());
    Slot probe = mixed_slot(1, 1, 1, -1);
    REQUIRE(fe2.get(probe) == fe.get(probe));

    auto ff = random_fourier_data(GroupSpec(2, 0), Rational(3), 3, 5);
    ojson jf = fourier_to_json(ff);
    REQUIRE(jf.at("mode").get<std::string>() == "float");
    auto ff2 = fourier_float_from_json(jf);
    REQUIRE(fourier_to_json(ff2).dump() == jf.dump());

    REQUIRE_THROWS_MATCHES(fourier_exact_from_json(jf), std::runtime_error,
                           MessageMatches(ContainsSubstring("not exact mode")));
    REQUIRE_THROWS_MATCHES(fourier_float_from_json(je), std::runtime_error,
                           MessageMatches(ContainsSubstring("not float mode")));

    ojson truncated = je;
    truncated["blocks"][0]["entries"].erase(0);
    REQUIRE_THROWS_MATCHES(fourier_exact_from_json(truncated), std::runtime_error,
                           MessageMatches(ContainsSubstring("entry count")));
}

TEST_CASE("verdict JSON carries the certificate payload", "[json]") {
    ojson gap = verdict_to_json(classify_gh(example_op("su2-gap"), Rational(12)));
    REQUIRE(gap.at("schema").get<std::string>() == "vekua-verdict/1");
    REQUIRE(gap.at("property").get<std::string>() == "globally-hypoelliptic");
    REQUIRE(gap.at("answer").get<std::string>() == "yes");
    REQUIRE(gap.at("condition").get<int>() == 3);
    REQUIRE(gap.at("certificate").get<std::string>() == "lattice-gap");
    REQUIRE(gap.at("gap").at("step").get<std::string>() == "1/2");
    REQUIRE(gap.at("gap").at("gap").get<std::string>() == "1/3");
    REQUIRE(!gap.contains("margin"));

    ojson margin = verdict_to_json(classify_gh(example_op("circle-cond1"), Rational(12)));
    REQUIRE(margin.at("condition").get<int>() == 1);
    REQUIRE(margin.at("certificate").get<std::string>() == "margin");
    REQUIRE(margin.at("margin").get<std::string>() == "3");

    ojson zf = verdict_to_json(classify_gh(example_op("mixed-half-zeros"), Rational(12)));
    REQUIRE(zf.at("answer").get<std::string>() == "no");
    REQUIRE(zf.at("certificate").get<std::string>() == "zero-family");
    REQUIRE(zf.at("infinite_zero_family").get<bool>());
    REQUIRE(!zf.at("zero_sites").empty());

    ojson res = verdict_to_json(classify_gs(example_op("liouville"), Rational(40)));
    REQUIRE(res.at("answer").get<std::string>() == "no");
    REQUIRE(res.at("certificate").get<std::string>() == "resonance");
    REQUIRE(res.at("asserted_cf_input").get<bool>());
    const ojson& slots = res.at("resonance").at("slots");
    REQUIRE(slots.size() == 3);
    REQUIRE(slots.at(0).at("convergent_index").get<int>() == 1);
    REQUIRE(slots.at(0).at("weight2").get<std::string>() == "7");
    REQUIRE(res.at("empirical").at("rows_scanned").get<int>() > 0);
}

TEST_CASE("certificate JSON for kernels, growth, and forcing", "[json]") {
    ojson k = kernel_to_json(singular_kernel(example_op("su2-balanced"), Rational(8)));
    REQUIRE(k.at("schema").get<std::string>() == "vekua-kernel/1");
    REQUIRE(k.at("element").at("mode").get<std::string>() == "exact");
    REQUIRE(k.at("infinite_family").get<bool>());
    REQUIRE(!k.at("witness_slots").empty());
    REQUIRE(!k.at("sites").empty());

    ojson g = gh_counterexample_to_json(gh_counterexample(example_op("liouville")));
    REQUIRE(g.at("schema").get<std::string>() == "vekua-gh-counterexample/1");
    REQUIRE(g.at("relation").get<std::string>() == "P u = f");
    REQUIRE(g.at("construction_case").get<int>() == 1);
    REQUIRE(g.at("identity_verified").get<bool>());
    REQUIRE(g.at("family").size() == 6);

    ojson gi = gh_counterexample_to_json(gh_counterexample(example_op("liouville-conjugate")));
    REQUIRE(gi.at("relation").get<std::string>() == "P u = i f");
    REQUIRE(gi.at("construction_case").get<int>() == 3);

    ojson o = gs_obstruction_to_json(gs_obstruction(example_op("liouville")));
    REQUIRE(o.at("schema").get<std::string>() == "vekua-gs-obstruction/1");
    REQUIRE(o.at("schedule").size() == 3);
    REQUIRE(o.at("schedule").at(0).at("weight2").get<std::string>() == "7");
    REQUIRE(o.at("schedule").at(0).at("forced_sq_lower").get<std::string>() == "7");

    FourierData<ExactComplex> bad(example_op("su2-spin-zeros").group, Rational(4));
    bad.set(su2_slot(6, 6, 0), ExactComplex(Rational(1)));
    ojson a = admissibility_to_json(check_admissible(example_op("su2-spin-zeros"), bad));
    REQUIRE(a.at("status").get<std::string>() == "not-admissible");
    REQUIRE(a.at("violations").size() == 1);
    REQUIRE(a.at("violations").at(0).at("slot").at("twice_ells").at(0).get<std::int64_t>() == 6);
}

TEST_CASE("JSON files round trip through disk", "[json]") {
    fs::path tmp = temp_dir() / "roundtrip.json";
    ojson j = operator_to_json(example_op("circle-cond2"));
    save_json(tmp.string(), j);
    REQUIRE(load_json(tmp.string()).dump() == j.dump());
    fs::remove(tmp);

    REQUIRE_THROWS_MATCHES(load_json((temp_dir() / "missing.json").string()), std::runtime_error,
                           MessageMatches(ContainsSubstring("cannot open")));
    REQUIRE_THROWS_MATCHES(save_json("/nonexistent-dir/out.json", j), std::runtime_error,
                           MessageMatches(ContainsSubstring("cannot write")));
}

TEST_CASE("shipped operator files match the bundled definitions", "[json]") {
    fs::path dir = fs::path(VEKUA_SOURCE_DIR) / "data" / "ops";
    REQUIRE(fs::is_directory(dir));

    size_t shipped = 0;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") ++shipped;
    REQUIRE(shipped == bundled_examples().size());

    for (const auto& row : bundled_examples()) {
        INFO("operator " << row.name);
        ojson j = load_json((dir / (row.name + ".json")).string());
        REQUIRE(j.dump() == operator_to_json(row.op).dump());
        OperatorSpec op = operator_from_json(j);
        REQUIRE(op.q == row.op.q);
        REQUIRE(op.p == row.op.p);
    }
}

TEST_CASE("classify subcommand writes verdicts and exit codes", "[cli]") {
    fs::path out = temp_dir() / "classify-su2-gap.json";
    REQUIRE(run_cli("classify --op " + shipped_op("su2-gap") + " --xi-max 12 --out " +
                    out.string()) == 0);
    ojson j = load_json(out.string());
    REQUIRE(j.at("schema").get<std::string>() == "vekua-classification/1");
    REQUIRE(j.at("gh").at("answer").get<std::string>() == "yes");
    REQUIRE(j.at("gs").at("answer").get<std::string>() == "yes");
    REQUIRE(j.at("gh").at("certificate").get<std::string>() == "lattice-gap");

    REQUIRE(run_cli("classify") != 0);
    REQUIRE(run_cli("frobnicate") != 0);
    REQUIRE(run_cli("classify --op /no/such/operator.json") == 1);
}

TEST_CASE("admissible subcommand distinguishes the outcomes", "[cli]") {
    fs::path tmp = temp_dir();

    FourierData<ExactComplex> clean(example_op("su2-gap").group, Rational(4));
    clean.set(su2_slot(2, 0, 0), ExactComplex(Rational(1)));
    save_json((tmp / "adm-clean.json").string(), fourier_to_json(clean));
    REQUIRE(run_cli("admissible --op " + shipped_op("su2-gap") + " --rhs " +
                    (tmp / "adm-clean.json").string()) == 0);

    FourierData<ExactComplex> bad(example_op("su2-spin-zeros").group, Rational(4));
    bad.set(su2_slot(6, 6, 0), ExactComplex(Rational(1)));
    save_json((tmp / "adm-bad.json").string(), fourier_to_json(bad));
    REQUIRE(run_cli("admissible --op " + shipped_op("su2-spin-zeros") + " --rhs " +
                    (tmp / "adm-bad.json").string()) == 2);

    // Data on the wrong group is a usage error, not a crash.
    REQUIRE(run_cli("admissible --op " + shipped_op("circle-cond1") + " --rhs " +
                    (tmp / "adm-bad.json").string()) == 1);

    // A wide continued-fraction prefix leaves Delta undecided on a populated
    // orbit, which the checker must refuse rather than assert.
    OperatorSpec wide;
    wide.group = GroupSpec(1, 1);
    wide.vf.torus_coeffs = {ExactReal(Rational(1))};
    wide.vf.su2_coeffs = {ExactReal::continued_fraction({1, 1})};
    wide.q = ExactComplex(Rational(0), Rational(1));
    wide.p = ExactComplex(Rational(0), Rational(1));
    save_json((tmp / "wide-op.json").string(), operator_to_json(wide));
    FourierData<ExactComplex> wf(wide.group, Rational(4));
    wf.set(mixed_slot(-2, 2, 2, 0), ExactComplex(Rational(1)));
    save_json((tmp / "wide-rhs.json").string(), fourier_to_json(wf));
    REQUIRE(run_cli("admissible --op " + (tmp / "wide-op.json").string() + " --rhs " +
                    (tmp / "wide-rhs.json").string()) == 3);
}

TEST_CASE("solve and verify round trip through the CLI", "[cli]") {
    fs::path tmp = temp_dir();

    // Float pipeline with the independent grid check on the way back.
    REQUIRE(run_cli("fixture --group T1 --xi-max 6 --seed 9 --decay 3 --mode float --out " +
                    (tmp / "f.json").string()) == 0);
    REQUIRE(run_cli("solve --op " + shipped_op("circle-cond2") + " --rhs " +
                    (tmp / "f.json").string() + " --out " + (tmp / "u.json").string()) == 0);
    REQUIRE(run_cli("verify --op " + shipped_op("circle-cond2") + " --u " +
                    (tmp / "u.json").string() + " --rhs " + (tmp / "f.json").string() +
                    " --grid 64") == 0);

    ojson tampered = load_json((tmp / "u.json").string());
    double v0 = tampered["blocks"][0]["entries"][0][0].get<double>();
    tampered["blocks"][0]["entries"][0][0] = v0 + 0.5;
    save_json((tmp / "u-bad.json").string(), tampered);
    REQUIRE(run_cli("verify --op " + shipped_op("circle-cond2") + " --u " +
                    (tmp / "u-bad.json").string() + " --rhs " + (tmp / "f.json").string()) == 1);

    // Exact pipeline: the residual statement is an identity, not a bound.
    REQUIRE(run_cli("fixture --group SU2 --xi-max 4 --seed 3 --mode exact --out " +
                    (tmp / "fe.json").string()) == 0);
    REQUIRE(run_cli("solve --op " + shipped_op("su2-gap") + " --rhs " +
                    (tmp / "fe.json").string() + " --out " + (tmp / "ue.json").string()) == 0);
    fs::path log = tmp / "verify-exact.log";
    REQUIRE(run_cli("verify --op " + shipped_op("su2-gap") + " --u " + (tmp / "ue.json").string() +
                        " --rhs " + (tmp / "fe.json").string(),
                    log) == 0);
    REQUIRE(slurp(log).find("P u = f holds exactly") != std::string::npos);

    // Mixing entry modes is refused up front.
    REQUIRE(run_cli("verify --op " + shipped_op("su2-gap") + " --u " + (tmp / "ue.json").string() +
                    " --rhs " + (tmp / "f.json").string()) == 1);

    // Inadmissible exact data is the dedicated exit code.
    FourierData<ExactComplex> bad(example_op("su2-spin-zeros").group, Rational(4));
    bad.set(su2_slot(6, 6, 0), ExactComplex(Rational(1)));
    save_json((tmp / "solve-bad.json").string(), fourier_to_json(bad));
    REQUIRE(run_cli("solve --op " + shipped_op("su2-spin-zeros") + " --rhs " +
                    (tmp / "solve-bad.json").string()) == 2);
}

TEST_CASE("fixture subcommand is deterministic per seed", "[cli]") {
    fs::path tmp = temp_dir();
    REQUIRE(run_cli("fixture --group T2 --xi-max 4 --seed 5 --decay 3 --mode float --out " +
                    (tmp / "fix-a.json").string()) == 0);
    REQUIRE(run_cli("fixture --group T2 --xi-max 4 --seed 5 --decay 3 --mode float --out " +
                    (tmp / "fix-b.json").string()) == 0);
    REQUIRE(run_cli("fixture --group T2 --xi-max 4 --seed 6 --decay 3 --mode float --out " +
                    (tmp / "fix-c.json").string()) == 0);
    REQUIRE(slurp(tmp / "fix-a.json") == slurp(tmp / "fix-b.json"));
    REQUIRE(slurp(tmp / "fix-a.json") != slurp(tmp / "fix-c.json"));
}

TEST_CASE("counterexample subcommand emits certificates and refusals", "[cli]") {
    fs::path tmp = temp_dir();

    REQUIRE(run_cli("counterexample --op " + shipped_op("su2-balanced") +
                    " --kind kernel --xi-max 10 --out " + (tmp / "kernel.json").string()) == 0);
    ojson k = load_json((tmp / "kernel.json").string());
    REQUIRE(k.at("schema").get<std::string>() == "vekua-kernel/1");
    REQUIRE(k.at("infinite_family").get<bool>());

    REQUIRE(run_cli("counterexample --op " + shipped_op("liouville") +
                    " --kind growth --xi-max 40 --out " + (tmp / "growth.json").string()) == 0);
    REQUIRE(load_json((tmp / "growth.json").string()).at("relation").get<std::string>() ==
            "P u = f");

    REQUIRE(run_cli("counterexample --op " + shipped_op("liouville") +
                    " --kind forcing --xi-max 40 --out " + (tmp / "forcing.json").string()) == 0);
    REQUIRE(load_json((tmp / "forcing.json").string()).at("schedule").size() == 3);

    // No construction applies to a gap operator: refusal, not failure.
    REQUIRE(run_cli("counterexample --op " + shipped_op("circle-cond1") + " --kind kernel") == 3);
    REQUIRE(run_cli("counterexample --op " + shipped_op("circle-cond1") + " --kind growth") == 3);
}

TEST_CASE("examples subcommand checks the frozen table and dumps operators", "[cli]") {
    fs::path tmp = temp_dir();
    fs::path dump = tmp / "ops-dump";
    REQUIRE(run_cli("examples --xi-max 40 --dump-ops " + dump.string() + " --out " +
                    (tmp / "outcomes.json").string()) == 0);

    ojson outcomes = load_json((tmp / "outcomes.json").string());
    REQUIRE(outcomes.at("rows").size() == bundled_examples().size());
    for (const auto& row : outcomes.at("rows")) REQUIRE(row.at("matches").get<bool>());

    // The dump is the source of the shipped files, byte for byte.
    for (const auto& row : bundled_examples())
        REQUIRE(slurp(dump / (row.name + ".json")) == slurp(shipped_op(row.name)));

    // A radius too small for the resonance rows is an honest mismatch.
    REQUIRE(run_cli("examples --xi-max 12") == 4);
}
