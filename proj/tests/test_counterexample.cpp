#include <catch2/catch_amalgamated.hpp>

#include "vekua/counterexample.hpp"
#include "vekua/solve.hpp"
#include "test_support.hpp"

using namespace vekua;
using namespace vekua::testsupport;

TEST_CASE("kernel certificates annihilate exactly", "[counterexample]") {
    struct Case {
        const char* name;
        double witness_abs;
    };
    for (Case c : {Case{"su2-balanced", std::sqrt(2.0)}, Case{"mixed-half-zeros", 1.0},
                   Case{"su2-spin-zeros", 4.0}}) {
        const OperatorSpec& op = example_op(c.name);
        KernelCertificate cert = singular_kernel(op, Rational(12));

        REQUIRE(cert.infinite_family);
        REQUIRE(!cert.witness_slots.empty());
        REQUIRE(apply(op, cert.element).all_zero());

        // Witness entries have modulus |p| on the nose.
        for (const Slot& s : cert.witness_slots)
            REQUIRE(cert.element.get(s).norm_squared() == op.p.norm_squared());

        DecayReport decay = estimate_decay(cert.element, cert.witness_slots);
        REQUIRE(decay.verdict == DecayVerdict::CertifiedNonSmooth);
        REQUIRE(decay.floor == Catch::Approx(c.witness_abs).epsilon(1e-15));
    }
}

TEST_CASE("kernel witness count respects its cap", "[counterexample]") {
    KernelCertificate cert = singular_kernel(example_op("su2-balanced"), Rational(12), 5);
    REQUIRE(cert.witness_slots.size() == 5);
    REQUIRE(cert.sites.size() > 5);
    REQUIRE(apply(example_op("su2-balanced"), cert.element).all_zero());
}

TEST_CASE("kernel construction fails without zeros", "[counterexample]") {
    REQUIRE_THROWS_AS(singular_kernel(example_op("circle-cond1"), Rational(20)), NoZeroFamilyError);

    // Zeros confined to the trivial row leave nothing to pair up.
    OperatorSpec op = op_t1(Rational(1), ExactComplex::i(), ExactComplex(1));
    REQUIRE_THROWS_MATCHES(
        singular_kernel(op, Rational(20)), NoZeroFamilyError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("trivial row")));
}

TEST_CASE("non-smooth solution with rapidly decaying forcing", "[counterexample]") {
    const OperatorSpec& op = example_op("liouville");
    GHCounterexample ce = gh_counterexample(op);

    REQUIRE(ce.identity_verified);
    REQUIRE(ce.construction_case == 1);
    REQUIRE(!ce.relation_times_i);
    REQUIRE(ce.family.size() == 6);
    // The floor is alpha itself: |2 + (alpha - 2)| on the first resonant row.
    REQUIRE(ce.solution_floor > 1.67);
    REQUIRE(ce.solution_floor < 1.70);

    for (const auto& rs : ce.seq.slots) {
        double fmag = std::abs(ce.forcing.get(rs.slot));
        REQUIRE(fmag > 0);
        REQUIRE(fmag <= std::sqrt(rs.delta_abs2_upper.to_double()) * 1.01);
    }

    // The reported floor is attained: it is the least entry over the family.
    double min_entry = std::numeric_limits<double>::infinity();
    for (const Slot& s : ce.family) min_entry = std::min(min_entry, std::abs(ce.solution.get(s)));
    REQUIRE(min_entry == Catch::Approx(ce.solution_floor).epsilon(1e-15));

    REQUIRE(residual(op, ce.solution, ce.forcing) <= 1e-10 * (1 + plancherel_norm(ce.forcing)));
}

TEST_CASE("conjugate-matched coefficients route through the twisted relation", "[counterexample]") {
    const OperatorSpec& op = example_op("liouville-conjugate");
    GHCounterexample ce = gh_counterexample(op);

    REQUIRE(ce.identity_verified);
    REQUIRE(ce.construction_case == 3);
    REQUIRE(ce.relation_times_i);
    REQUIRE(ce.solution_floor > 1.67);

    // P u = i f, verified in float against the scaled forcing.
    auto i_forcing = data_scale(ce.forcing, std::complex<double>(0, 1));
    REQUIRE(residual(op, ce.solution, i_forcing) <= 1e-10 * (1 + plancherel_norm(i_forcing)));
}

TEST_CASE("resonance-based constructions explain their refusals", "[counterexample]") {
    using Catch::Matchers::ContainsSubstring;
    using Catch::Matchers::MessageMatches;

    REQUIRE_THROWS_MATCHES(gh_counterexample(example_op("circle-cond1")), NoResonantSequenceError,
                           MessageMatches(ContainsSubstring("|q| = |p|")));

    OperatorSpec balanced_rational = op_t1(Rational(1), ExactComplex::i(), ExactComplex::i());
    REQUIRE_THROWS_MATCHES(gh_counterexample(balanced_rational), NoResonantSequenceError,
                           MessageMatches(ContainsSubstring("continued-fraction")));

    OperatorSpec no_torus;
    no_torus.group = GroupSpec(0, 1);
    no_torus.vf.su2_coeffs = {ExactReal::continued_fraction({1, 1, 2, 6, 24, 120, 720, 5040})};
    no_torus.q = ExactComplex::i();
    no_torus.p = ExactComplex::i();
    REQUIRE_THROWS_MATCHES(gh_counterexample(no_torus), NoResonantSequenceError,
                           MessageMatches(ContainsSubstring("torus coefficient")));

    REQUIRE_THROWS_MATCHES(gs_obstruction(example_op("liouville"), Rational(6)),
                           NoResonantSequenceError,
                           MessageMatches(ContainsSubstring("not enough")));
}

TEST_CASE("unsolvable forcing schedule", "[counterexample]") {
    const OperatorSpec& op = example_op("liouville");
    GSObstruction obs = gs_obstruction(op, Rational(50));

    REQUIRE(obs.schedule.size() == 3);
    REQUIRE(check_admissible(op, obs.forcing).ok());

    double prev_approx = 0;
    for (const auto& row : obs.schedule) {
        REQUIRE(row.support_slot == conjugate_slot(row.forced_slot).slot);
        REQUIRE(row.forced_sq_lower == row.weight2.pow(row.convergent_index));
        REQUIRE(obs.forcing.get(row.support_slot).norm_squared() ==
                ExactComplex(1).norm_squared() / op.p.norm_squared());
        REQUIRE(obs.forcing.get(row.forced_slot).is_zero());

        // The divisor bound is strict, so the forced growth clears its target.
        REQUIRE(row.forced_approx >= std::sqrt(row.forced_sq_lower.to_double()) * 0.999);
        REQUIRE(row.forced_approx > prev_approx);
        prev_approx = row.forced_approx;
    }
    for (const auto& rs : obs.seq.slots) REQUIRE(rs.bound_product < Rational(1));
}
